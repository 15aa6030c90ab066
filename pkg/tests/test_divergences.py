import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oneshot_qcap.core.divergences import (
    CQQState,
    SlackParams,
    binary_entropy,
    classical_purified_distance,
    coherent_info,
    cond_coherent_info,
    cond_i_h_eps,
    cond_i_max_alt_smooth,
    cond_i_max_smooth,
    conditional_mutual_information,
    dh_eps,
    dmax,
    dmax_smooth,
    holevo_information,
    i_h_eps,
    i_max,
    i_max_alt_smooth,
    i_max_smooth,
    inv_gaussian_cdf,
    mutual_information,
    relative_entropy,
    relative_entropy_variance,
    second_order_dh,
    second_order_dmax,
    von_neumann_entropy,
)
from oneshot_qcap.core.errors import DomainError, SlackError, StateValidationError
from oneshot_qcap.core.qmat import (
    SystemLabel,
    basis_state,
    bloch_state,
    diagonal_state,
    maximally_mixed,
    pure_state,
    tensor,
)
from oneshot_qcap.core.sampling import random_density

A = SystemLabel("A", 2)
B = SystemLabel("B", 2)
AB = (A, B)
BELL = pure_state(np.array([1, 0, 0, 1]) / math.sqrt(2), AB)
CLASSICAL_CORRELATED = diagonal_state([0.5, 0, 0, 0.5], AB)
PRODUCT = maximally_mixed(AB)


def _diag(*probs):
    return diagonal_state(probs, (A,) if len(probs) == 2 else (SystemLabel("A", len(probs)),))


class TestRelativeEntropies:
    def test_relative_entropy_of_equal_states(self, rng):
        rho = random_density(rng, (A,))
        assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-9)

    def test_pure_against_maximally_mixed_is_one_bit(self):
        assert relative_entropy(basis_state(A, 0), maximally_mixed((A,))) == pytest.approx(1.0)

    def test_disjoint_support_is_infinite(self):
        assert relative_entropy(basis_state(A, 0), basis_state(A, 1)) == math.inf

    def test_variance_matches_scalar_formula(self):
        p, q = np.array([0.5, 0.5]), np.array([0.9, 0.1])
        llr = np.log2(p / q)
        expected = float(np.sum(p * (llr - np.sum(p * llr)) ** 2))
        assert relative_entropy_variance(_diag(0.5, 0.5), _diag(0.9, 0.1)) == pytest.approx(expected, rel=1e-9)

    def test_variance_of_equal_states_is_zero(self, rng):
        rho = random_density(rng, (A,))
        assert relative_entropy_variance(rho, rho) == pytest.approx(0.0, abs=1e-9)

    def test_variance_needs_support_inclusion(self):
        with pytest.raises(DomainError):
            relative_entropy_variance(maximally_mixed((A,)), basis_state(A, 0))

    def test_dmax_generalized_eigenvalue(self):
        assert dmax(_diag(0.75, 0.25), _diag(0.5, 0.5)) == pytest.approx(math.log2(1.5), abs=1e-9)

    def test_dmax_support_violation_is_infinite(self):
        plus = bloch_state([1, 0, 0], A)
        assert dmax(basis_state(A, 0), plus) == math.inf

    def test_relative_entropy_below_dmax(self, rng):
        for _ in range(20):
            rho, sigma = random_density(rng, (A,)), random_density(rng, (A,))
            assert relative_entropy(rho, sigma) <= dmax(rho, sigma) + 1e-9


class TestHypothesisTesting:
    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.5, 0.9])
    def test_equal_states(self, rng, eps):
        rho = random_density(rng, (A,))
        value, test = dh_eps(rho, rho, eps)
        assert value == pytest.approx(-math.log2(1.0 - eps), abs=1e-8)
        assert test.type_i <= eps + 1e-9

    def test_classical_neyman_pearson_example(self):
        value, test = dh_eps(_diag(0.5, 0.5), _diag(0.9, 0.1), 0.5)
        assert value == pytest.approx(math.log2(10.0), abs=1e-8)
        assert test.type_ii == pytest.approx(0.1, abs=1e-9)

    def test_boundary_mixing_hits_type_one_exactly(self):
        _, test = dh_eps(_diag(0.5, 0.5), _diag(0.9, 0.1), 0.3)
        assert test.type_i == pytest.approx(0.3, abs=1e-9)
        # accept outcome 1 fully and outcome 0 with weight 0.4
        assert test.type_ii == pytest.approx(0.1 + 0.4 * 0.9, abs=1e-8)

    def test_test_errors_agree_with_operator(self, rng):
        rho, sigma = random_density(rng, (A,)), random_density(rng, (A,))
        _, test = dh_eps(rho, sigma, 0.2)
        assert test.type_i == pytest.approx(1.0 - test.test.expectation(rho), abs=1e-9)
        assert test.type_ii == pytest.approx(test.test.expectation(sigma), abs=1e-9)

    @pytest.mark.parametrize("eps", [-0.1, 1.0, 1.5])
    def test_eps_out_of_range(self, eps):
        with pytest.raises(DomainError):
            dh_eps(_diag(0.5, 0.5), _diag(0.9, 0.1), eps)

    def test_random_pairs_satisfy_relative_entropy_bound(self, rng):
        for _ in range(20):
            rho, sigma = random_density(rng, (A,)), random_density(rng, (A,))
            eps = float(rng.uniform(0.05, 0.5))
            bound = (relative_entropy(rho, sigma) + binary_entropy(eps)) / (1.0 - eps)
            assert dh_eps(rho, sigma, eps)[0] <= bound + 1e-9


class TestSmoothing:
    def test_equal_states(self, rng):
        rho = random_density(rng, (A,))
        interval = dmax_smooth(rho, rho, 0.1)
        assert interval.upper == pytest.approx(0.0, abs=1e-9)
        assert interval.lower <= 1e-9

    def test_interval_shrinks_with_eps(self, rng):
        rho, sigma = random_density(rng, (A,)), random_density(rng, (A,))
        interval = dmax_smooth(rho, sigma, 1e-7)
        assert interval.width < 1e-3

    def test_diagonal_smoothing_matches_sweep(self):
        rho, sigma = _diag(0.99, 0.01), _diag(0.5, 0.5)
        eps = 0.2
        interval = dmax_smooth(rho, sigma, eps)
        # smoothed states diag(a, 1 - a) inside the purified-distance ball
        a = np.linspace(0.5, 0.99, 200001)
        fid = np.sqrt(a * 0.99) + np.sqrt((1 - a) * 0.01)
        feasible = a[np.sqrt(np.clip(1 - fid ** 2, 0, None)) <= eps]
        best = math.log2(feasible.min() / 0.5)
        assert interval.lower == pytest.approx(best, abs=1e-4)
        assert interval.upper == pytest.approx(math.log2(1.98), abs=1e-9)

    def test_eps_out_of_range(self):
        with pytest.raises(DomainError):
            dmax_smooth(_diag(0.5, 0.5), _diag(0.9, 0.1), 0.0)


class TestMutualInformation:
    def test_product_state(self):
        assert i_h_eps(PRODUCT, 0.1) == pytest.approx(-math.log2(0.9), abs=1e-8)
        assert i_max(PRODUCT) == pytest.approx(0.0, abs=1e-9)

    def test_classically_correlated(self):
        assert i_max(CLASSICAL_CORRELATED) == pytest.approx(1.0, abs=1e-9)
        assert mutual_information(CLASSICAL_CORRELATED) == pytest.approx(1.0, abs=1e-9)

    def test_bell_state(self):
        assert i_max(BELL) == pytest.approx(2.0, abs=1e-9)
        assert mutual_information(BELL) == pytest.approx(2.0, abs=1e-9)

    def test_smoothed_variants_bracket(self, rng):
        rho = random_density(rng, AB)
        plain = i_max(rho)
        for interval in (i_max_smooth(rho, 0.1), i_max_alt_smooth(rho, 0.1)):
            assert interval.lower <= interval.upper + 1e-12
            assert interval.upper == pytest.approx(plain, abs=1e-9)

    def test_coherent_information(self):
        assert coherent_info(BELL) == pytest.approx(1.0, abs=1e-9)
        pure_product = tensor(basis_state(A, 0), basis_state(B, 1))
        assert coherent_info(pure_product) == pytest.approx(0.0, abs=1e-9)
        mixed = tensor(maximally_mixed((A,)), basis_state(B, 0))
        assert coherent_info(mixed) == pytest.approx(-1.0, abs=1e-9)

    def test_entropy_of_maximally_mixed_qutrit(self):
        rho = maximally_mixed((SystemLabel("A", 3),))
        assert von_neumann_entropy(rho) == pytest.approx(math.log2(3))

    def test_holevo_of_orthogonal_signals(self):
        states = [basis_state(B, 0), basis_state(B, 1)]
        assert holevo_information([0.5, 0.5], states) == pytest.approx(1.0)


class TestConditional:
    def _state(self, weights, blocks):
        return CQQState(tuple(range(len(blocks))), np.array(weights), dict(enumerate(blocks)), ("A",))

    def test_single_symbol(self):
        state = self._state([1.0], [BELL])
        assert cond_i_h_eps(state, 0.1) == pytest.approx(i_h_eps(BELL, 0.1), abs=1e-9)
        assert cond_i_max_smooth(state, 0.1).upper == pytest.approx(i_max(BELL), abs=1e-9)

    def test_uniform_weights_take_the_minimum(self):
        state = self._state([0.5, 0.5], [CLASSICAL_CORRELATED, PRODUCT])
        expected = min(i_h_eps(CLASSICAL_CORRELATED, 0.05), i_h_eps(PRODUCT, 0.05))
        assert cond_i_h_eps(state, 0.05) == pytest.approx(expected, abs=1e-9)

    def test_rare_symbol_can_be_dropped(self):
        state = self._state([0.99, 0.01], [CLASSICAL_CORRELATED, PRODUCT])
        assert classical_purified_distance([1.0, 0.0], [0.99, 0.01]) == pytest.approx(0.1, abs=1e-12)
        expected = max(
            min(i_h_eps(CLASSICAL_CORRELATED, 0.2), i_h_eps(PRODUCT, 0.2)),
            i_h_eps(CLASSICAL_CORRELATED, 0.2),
        )
        assert cond_i_h_eps(state, 0.2) == pytest.approx(expected, abs=1e-9)

    def test_dropping_rare_correlated_block_lowers_max(self):
        state = self._state([0.99, 0.01], [PRODUCT, BELL])
        value = cond_i_max_smooth(state, 0.2)
        assert value.upper == pytest.approx(i_max(PRODUCT), abs=1e-9)
        assert cond_i_max_alt_smooth(state, 0.2).upper == pytest.approx(0.0, abs=1e-9)

    def test_equal_blocks(self):
        state = self._state([0.3, 0.7], [BELL, BELL])
        assert cond_i_max_smooth(state, 0.1).upper == pytest.approx(2.0, abs=1e-9)
        assert conditional_mutual_information(state) == pytest.approx(2.0, abs=1e-9)

    def test_conditional_coherent_information_is_weighted(self):
        state = self._state([0.25, 0.75], [BELL, PRODUCT])
        assert cond_coherent_info(state) == pytest.approx(0.25 * 1.0 + 0.75 * -1.0, abs=1e-9)

    def test_weights_must_be_normalized(self):
        with pytest.raises(StateValidationError):
            self._state([0.5, 0.6], [BELL, PRODUCT])


class TestScalars:
    def test_binary_entropy(self):
        assert binary_entropy(0.5) == pytest.approx(1.0)
        assert binary_entropy(0.0) == 0.0
        assert binary_entropy(1.0) == 0.0

    def test_inverse_gaussian_cdf(self):
        assert inv_gaussian_cdf(0.975) == pytest.approx(1.959964, abs=1e-6)
        assert inv_gaussian_cdf(0.5) == pytest.approx(0.0, abs=1e-10)

    def test_second_order(self):
        assert second_order_dh(0.7, 2.0, 0.5, 10) == pytest.approx(7.0, abs=1e-9)
        assert second_order_dh(0.7, 0.0, 0.1, 10) == pytest.approx(7.0)
        assert second_order_dmax(0.7, 0.0, 0.1, 10) == pytest.approx(7.0)
        assert second_order_dh(1.0, 1.0, 0.8413, 100) == pytest.approx(110.0, abs=0.01)

    def test_second_order_rejects_bad_blocklength(self):
        with pytest.raises(DomainError):
            second_order_dh(1.0, 1.0, 0.1, 0)


class TestSlackParams:
    def test_defaults_are_valid(self):
        s = SlackParams.default()
        assert s.delta < s.eps
        assert s.gamma < math.sqrt(s.eps_prime) - s.delta_prime

    @pytest.mark.parametrize("values", [
        pytest.param((0.1, 0.1, 0.2, 0.1, 0.05), id="delta-above-eps"),
        pytest.param((0.1, 0.1, 0.05, 0.4, 0.05), id="delta-prime-above-root"),
        pytest.param((0.1, 0.1, 0.05, 0.1, 0.3), id="gamma-too-large"),
        pytest.param((1.0, 0.1, 0.05, 0.1, 0.05), id="eps-one"),
    ])
    def test_invalid(self, values):
        with pytest.raises(SlackError):
            SlackParams(*values)

    def test_to_dict(self):
        assert_allclose(list(SlackParams.default().to_dict().values()), [0.1, 0.1, 0.05, 0.1, 0.05])

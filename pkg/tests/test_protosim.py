import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oneshot_qcap.core.document_protocol import load_wiretap
from oneshot_qcap.core.divergences import SlackParams
from oneshot_qcap.core.errors import BudgetExceededError, DimensionError, DomainError
from oneshot_qcap.core.protosim import (
    CodeSizes,
    DecodeMode,
    TheoremSizes,
    build_shared_state,
    convex_split_check,
    convex_split_state,
    derandomize_search,
    gentle_measurement_verify,
    hayashi_nagaoka_bound,
    hayashi_nagaoka_constant,
    hayashi_nagaoka_verify,
    privacy_error,
    public_codebook_table,
    public_decode_error,
    square_root_measurement,
)
from oneshot_qcap.core.qmat import (
    HermitianOperator,
    MeasurementOperator,
    SystemLabel,
    diagonal_state,
    maximally_mixed,
    partial_trace,
    pure_state,
    purified_distance,
    tensor,
)
from oneshot_qcap.core.verification import convex_split_oracle, dense_public_error

A = SystemLabel("A", 2)
B = SystemLabel("B", 2)
DEFAULT = SlackParams.default()


@pytest.fixture
def dephasing(fixture_path):
    return load_wiretap(fixture_path("dephasing.json"))


@pytest.fixture
def damping(fixture_path):
    return load_wiretap(fixture_path("amplitude_damping.json"))


class TestCodeSizes:
    def test_slots(self):
        assert CodeSizes(2, 3, 4).slots == 12

    @pytest.mark.parametrize("sizes", [(0, 1, 1), (1, -2, 1), (1, 1, 1.5)])
    def test_invalid(self, sizes):
        with pytest.raises(DomainError):
            CodeSizes(*sizes)

    def test_theorem_sizes_rounding(self):
        sizes = TheoremSizes(1.5, math.log2(9.5), math.log2(2.2)).sizes
        assert sizes.to_dict() == {"M": 2, "L": 3, "K": 3}

    def test_infeasible_theorem_sizes_floor_at_one(self):
        t = TheoremSizes(-1.0, 0.5, 2.0)
        assert not t.feasible
        assert t.sizes.to_dict() == {"M": 1, "L": 1, "K": 4}


class TestSquareRootMeasurement:
    def test_orthogonal_projectors(self):
        p0 = HermitianOperator((A,), np.diag([1.0, 0.0]))
        p1 = HermitianOperator((A,), np.diag([0.0, 1.0]))
        povm = square_root_measurement([p0, p1])
        assert len(povm) == 3
        assert_allclose(povm[0].matrix, p0.matrix, atol=1e-12)
        assert_allclose(povm[2].matrix, np.zeros((2, 2)), atol=1e-12)

    def test_completion_covers_missing_support(self):
        povm = square_root_measurement([HermitianOperator((A,), np.diag([0.5, 0.0]))])
        assert_allclose(povm[1].matrix, np.diag([0.0, 1.0]), atol=1e-12)
        assert all(isinstance(e, MeasurementOperator) for e in povm)

    def test_rejects_empty_and_negative(self):
        with pytest.raises(DomainError):
            square_root_measurement([])
        with pytest.raises(DomainError):
            square_root_measurement([HermitianOperator((A,), np.diag([1.0, -0.5]))])
        with pytest.raises(DomainError):
            square_root_measurement([HermitianOperator((A,), np.zeros((2, 2)))])


class TestLemmas:
    def test_hayashi_nagaoka_holds(self):
        S = HermitianOperator((A,), np.array([[0.9, 0.1], [0.1, 0.2]]))
        T = HermitianOperator((A,), np.diag([0.1, 0.3]))
        assert hayashi_nagaoka_verify(S, T, 0.5) >= -1e-9

    def test_hayashi_nagaoka_needs_positive_constant(self):
        S = HermitianOperator((A,), np.eye(2) * 0.5)
        with pytest.raises(DomainError):
            hayashi_nagaoka_verify(S, S, 0.0)

    def test_constant_and_bound(self):
        assert hayashi_nagaoka_constant(DEFAULT) == pytest.approx(0.05 / 0.15)
        assert hayashi_nagaoka_bound(0.1, 0.01, 3, 1.0) == pytest.approx(2 * 0.1 + 4 * 3 * 0.01)

    def test_gentle_measurement(self):
        lhs, rhs = gentle_measurement_verify(maximally_mixed((A,)), HermitianOperator((A,), np.diag([1.0, 0.5])))
        assert lhs <= rhs

    def test_gentle_measurement_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            gentle_measurement_verify(maximally_mixed((A, B)), HermitianOperator((A,), np.eye(2)))


class TestConvexSplit:
    def test_product_state_splits_exactly(self):
        rho = maximally_mixed((A, B))
        result = convex_split_check(rho, 3)
        assert result.distance == pytest.approx(0.0, abs=1e-5)
        assert result.i_max == pytest.approx(0.0, abs=1e-9)

    @pytest.mark.parametrize("K", [1, 2, 4, 6])
    def test_bound_is_one_when_inversion_is_infeasible(self, K):
        bell = pure_state(np.array([1, 0, 0, 1]) / math.sqrt(2), (A, B))
        result = convex_split_check(bell, K)
        assert result.i_max == pytest.approx(2.0)
        assert result.bound == 1.0
        assert result.distance <= result.bound

    def test_bound_inverts_at_large_delta(self):
        # 2 log2(1/0.8) < 1 = log2 K, so the product state meets the condition at √ε = δ
        loose = SlackParams(0.9, 0.9, 0.8, 0.1, 0.05)
        result = convex_split_check(maximally_mixed((A, B)), 2, loose)
        assert result.bound == pytest.approx(0.8)
        assert result.distance <= result.bound

    def test_bound_stays_one_when_correlations_exceed_budget(self):
        loose = SlackParams(0.9, 0.9, 0.8, 0.1, 0.05)
        bell = pure_state(np.array([1, 0, 0, 1]) / math.sqrt(2), (A, B))
        assert convex_split_check(bell, 2, loose).bound == 1.0

    def test_single_term_is_plain_product_distance(self):
        rho = diagonal_state([0.5, 0, 0, 0.5], (A, B))
        result = convex_split_check(rho, 1)
        product_state = tensor(partial_trace(rho, ["B"]), partial_trace(rho, ["A"]))
        assert result.distance == pytest.approx(purified_distance(rho, product_state), abs=1e-10)

    def test_distance_strictly_decreases_in_K(self):
        rho = diagonal_state([0.5, 0, 0, 0.5], (A, B))
        distances = [convex_split_check(rho, K).distance for K in (1, 2, 4)]
        assert distances[0] > distances[1] > distances[2]
        assert distances[2] == pytest.approx(convex_split_oracle(rho.matrix, 2, 2, 4), abs=1e-10)

    def test_state_layout(self):
        rho = diagonal_state([0.5, 0, 0, 0.5], (A, B))
        tau, product_state = convex_split_state(rho, 2)
        assert tau.names == ("A1", "A2", "B")
        assert product_state.names == ("A1", "A2", "B")
        assert tau.trace() == pytest.approx(1.0)

    def test_dimension_cap(self):
        with pytest.raises(BudgetExceededError):
            convex_split_state(maximally_mixed((A, B)), 12)


class TestSharedState:
    def test_branches_and_marginals(self, dephasing):
        shared = build_shared_state(dephasing.ensemble, CodeSizes(1, 2, 1))
        assert shared.branch_count == 8
        assert sum(b.weight for b in shared.branches) == pytest.approx(1.0)
        assert_allclose(shared.x_marginal(0), [0.5, 0.5])
        assert_allclose(shared.y_marginal(0, 1, 0), [0.5, 0.5])

    def test_dense_form_is_a_state(self, dephasing):
        shared = build_shared_state(dephasing.ensemble, CodeSizes(1, 1, 1))
        rho = shared.to_density()
        assert rho.dim == shared.dense_dimension == 32
        assert rho.trace() == pytest.approx(1.0)

    def test_branch_budget(self, dephasing, monkeypatch):
        monkeypatch.setenv("ONESHOT_QCAP_BRANCH_CAP", "4")
        with pytest.raises(BudgetExceededError):
            build_shared_state(dephasing.ensemble, CodeSizes(1, 2, 1))


class TestPublicDecoding:
    def test_single_message_never_fails(self, dephasing):
        assert public_decode_error(dephasing.ensemble, dephasing.channel, CodeSizes(1, 1, 1)) == 0.0

    def test_reduced_bound_dominates_exact(self, damping):
        sizes = CodeSizes(2, 1, 1)
        exact = public_decode_error(damping.ensemble, damping.channel, sizes, DecodeMode.EXACT, DEFAULT)
        reduced = public_decode_error(damping.ensemble, damping.channel, sizes, "reduced", DEFAULT)
        assert exact <= reduced + 1e-9

    @pytest.mark.parametrize("M", [2, 3])
    def test_matches_dense_oracle(self, damping, M):
        exact = public_decode_error(damping.ensemble, damping.channel, CodeSizes(M, 1, 1), slacks=DEFAULT)
        dense = dense_public_error(damping, M, DEFAULT.eps - DEFAULT.delta)
        assert exact == pytest.approx(dense, abs=1e-8)

    def test_codebook_table_averages_to_exact_error(self, damping):
        sizes = CodeSizes(2, 1, 1)
        table = public_codebook_table(damping.ensemble, damping.channel, sizes, DEFAULT)
        assert len(table.codebooks) == 4
        exact = public_decode_error(damping.ensemble, damping.channel, sizes, slacks=DEFAULT)
        assert table.average == pytest.approx(exact, abs=1e-9)
        best = derandomize_search(table.errors, table.weights)
        assert best.error <= table.average + 1e-12


class TestDerandomize:
    def test_picks_first_minimum(self):
        code = derandomize_search([0.3, 0.1, 0.1])
        assert code.index == 1
        assert code.average == pytest.approx(0.5 / 3)

    @pytest.mark.parametrize("errors, weights", [([], None), ([0.1, 0.2], [0.7, 0.7]), ([0.1], [0.5, 0.5])])
    def test_invalid_tables(self, errors, weights):
        with pytest.raises(DomainError):
            derandomize_search(errors, weights)


class TestPrivacy:
    def test_trivial_code_is_perfect(self, dephasing):
        report = privacy_error(dephasing.ensemble, dephasing.channel, CodeSizes(1, 1, 1), DEFAULT)
        assert report.public_error == 0.0
        assert report.bob_private_error == pytest.approx(0.0, abs=1e-12)
        assert report.privacy_error == pytest.approx(0.0, abs=1e-9)
        assert report.privacy_pass

    def test_report_shape(self, dephasing):
        sizes = CodeSizes(2, 2, 1)
        report = privacy_error(dephasing.ensemble, dephasing.channel, sizes, DEFAULT)
        assert len(report.rows) == sizes.M * sizes.L
        assert report.public_pass
        summary = report.to_dict()
        assert summary["sizes"] == {"M": 2, "L": 2, "K": 1}
        assert isinstance(summary["size_conditions_met"], bool)
        for value in (report.secrecy_distance, report.secrecy_distance_product, report.privacy_error):
            assert 0.0 <= value <= 1.0

    def test_privacy_error_bounded_by_bob_and_eve(self, damping):
        report = privacy_error(damping.ensemble, damping.channel, CodeSizes(2, 2, 2), DEFAULT)
        for row in report.rows:
            assert row.privacy_error <= row.bob_error + row.secrecy + 1e-9

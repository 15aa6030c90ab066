import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.channels import ChannelKind, standard_channel
from oneshot_qcap.core.errors import BudgetExceededError, DimensionError, LabelError, StateValidationError
from oneshot_qcap.core.qmat import (
    DensityOperator,
    HermitianOperator,
    Keep,
    SystemLabel,
    apply_channel,
    apply_kraus,
    basis_state,
    bloch_state,
    fidelity,
    identity_channel,
    maximally_mixed,
    partial_trace,
    permute,
    positive_part_projector,
    pure_state,
    purified_distance,
    purify,
    tensor,
    trace_distance,
)
from oneshot_qcap.core.sampling import random_density

A = SystemLabel("A", 2)
B = SystemLabel("B", 2)
BELL = np.array([1, 0, 0, 1]) / math.sqrt(2)


def test_partial_trace_of_bell_state_is_maximally_mixed():
    bell = pure_state(BELL, (A, B))
    reduced = partial_trace(bell, ["B"])
    assert isinstance(reduced, DensityOperator)
    assert reduced.names == ("A",)
    assert_allclose(reduced.matrix, np.eye(2) / 2, atol=1e-12)


def test_permute_matches_reversed_tensor(rng):
    a = random_density(rng, (A,))
    b = random_density(rng, (SystemLabel("B", 3),))
    swapped = permute(tensor(a, b), ["B", "A"])
    assert_allclose(swapped.matrix, tensor(b, a).matrix, atol=1e-12)
    assert swapped.names == ("B", "A")


def test_tensor_rejects_label_collision():
    with pytest.raises(LabelError):
        tensor(maximally_mixed((A,)), maximally_mixed((A,)))


def test_duplicate_labels_rejected():
    with pytest.raises(LabelError):
        HermitianOperator((A, A), np.eye(4))


def test_invalid_label_name_rejected():
    with pytest.raises(LabelError):
        SystemLabel("2bad", 2)


@pytest.mark.parametrize("matrix, reason", [
    pytest.param([[1.2, 0.0], [0.0, -0.2]], "negative", id="negative-eigenvalue"),
    pytest.param([[0.6, 0.0], [0.0, 0.6]], "trace", id="wrong-trace"),
    pytest.param([[0.5, 0.3], [0.1, 0.5]], "Hermitian", id="not-hermitian"),
])
def test_density_operator_validation(matrix, reason):
    with pytest.raises(StateValidationError, match=reason):
        DensityOperator((A,), np.array(matrix))


def test_shape_mismatch_is_a_dimension_error():
    with pytest.raises(DimensionError):
        DensityOperator((A, B), np.eye(2) / 2)


def test_bloch_vector_longer_than_one_rejected():
    with pytest.raises(StateValidationError):
        bloch_state([1.0, 0.5, 0.0], A)


def test_bloch_state_poles():
    assert_allclose(bloch_state([0, 0, 1], A).matrix, basis_state(A, 0).matrix, atol=1e-12)
    assert_allclose(bloch_state([0, 0, -1], A).matrix, basis_state(A, 1).matrix, atol=1e-12)


def test_pure_state_requires_unit_norm():
    with pytest.raises(StateValidationError):
        pure_state([1.0, 1.0], (A,))


def test_dimension_cap_is_enforced():
    QcapConfig.override_dim_cap(4)
    with pytest.raises(BudgetExceededError):
        maximally_mixed((A, B, SystemLabel("C", 2)))


def test_identity_channel_is_transparent(rng):
    rho = random_density(rng, (A,))
    out = apply_channel(identity_channel(2), rho, Keep.B)
    assert_allclose(out.matrix, rho.matrix, atol=1e-12)


def test_channel_acts_on_named_factor_only(rng):
    rho = random_density(rng, (SystemLabel("R", 2), A))
    ch = standard_channel(ChannelKind.AMPLITUDE_DAMPING, 0.4)
    out = apply_channel(ch, rho, Keep.BE)
    assert out.names == ("R", "B", "E")
    assert_allclose(partial_trace(out, ["B", "E"]).matrix, partial_trace(rho, ["A"]).matrix, atol=1e-12)


def test_complementary_channel_swaps_outputs(rng):
    rho = random_density(rng, (A,))
    ch = standard_channel(ChannelKind.DEPOLARIZING, 0.3)
    eve = apply_channel(ch, rho, Keep.E)
    swapped = apply_channel(ch.complementary(), rho, Keep.B)
    assert_allclose(swapped.matrix, eve.matrix, atol=1e-12)


def test_kraus_operators_reproduce_channel(rng):
    rho = random_density(rng, (A,))
    ch = standard_channel(ChannelKind.AMPLITUDE_DAMPING, 0.25)
    bob = apply_channel(ch, rho, Keep.B)
    assert_allclose(apply_kraus(ch.kraus_operators(), rho.matrix), bob.matrix, atol=1e-12)


def test_apply_channel_rejects_wrong_input_dimension():
    with pytest.raises(DimensionError):
        apply_channel(identity_channel(2), maximally_mixed((SystemLabel("A", 3),)))


def test_purification_reduces_to_state(rng):
    rho = random_density(rng, (SystemLabel("A", 3),))
    psi = purify(rho)
    assert psi.is_pure()
    assert_allclose(partial_trace(psi, ["R"]).matrix, rho.matrix, atol=1e-10)


def test_distances_of_orthogonal_and_equal_states(rng):
    zero, one = basis_state(A, 0), basis_state(A, 1)
    assert trace_distance(zero, one) == pytest.approx(1.0)
    assert fidelity(zero, one) == pytest.approx(0.0, abs=1e-12)
    assert purified_distance(zero, one) == pytest.approx(1.0)
    rho = random_density(rng, (A,))
    assert purified_distance(rho, rho) == pytest.approx(0.0, abs=1e-5)


def test_positive_part_projector_of_difference():
    h = HermitianOperator((A,), np.diag([0.3, -0.2]))
    assert_allclose(positive_part_projector(h).matrix, np.diag([1.0, 0.0]), atol=1e-12)

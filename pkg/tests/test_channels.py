import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oneshot_qcap.core.channels import (
    ChannelKind,
    CQWiretapEnsemble,
    build_joint_state,
    channel_tensor_power,
    coherent_ensemble_state,
    decohere_reference,
    ensemble_from_bloch,
    standard_channel,
    standard_kraus,
)
from oneshot_qcap.core.errors import DimensionError, DomainError, StateValidationError
from oneshot_qcap.core.qmat import (
    DensityOperator,
    Keep,
    SystemLabel,
    apply_channel,
    basis_state,
    bloch_state,
    identity_channel,
    maximally_mixed,
    partial_trace,
    pure_state,
)
from oneshot_qcap.core.rates import private_to_coherent_check
from oneshot_qcap.core.sampling import random_density, random_pure

A = SystemLabel("A", 2)
PLUS = bloch_state([1, 0, 0], A)
CANONICAL_BLOCH = {(0, 0): (0, 0, 1), (0, 1): (1, 0, 0), (1, 0): (0, 0, -1), (1, 1): (-1, 0, 0)}


@pytest.mark.parametrize("kind", list(ChannelKind))
def test_standard_channels_are_isometries(kind):
    ch = standard_channel(kind, 0.3)
    v = ch.isometry
    assert_allclose(v.conj().T @ v, np.eye(2), atol=1e-12)


@pytest.mark.parametrize("kind, d_b, d_e", [
    (ChannelKind.AMPLITUDE_DAMPING, 2, 2),
    (ChannelKind.DEPOLARIZING, 2, 4),
    (ChannelKind.DEPHASING, 2, 2),
    (ChannelKind.ERASURE, 3, 3),
])
def test_output_dimensions(kind, d_b, d_e):
    ch = standard_channel(kind, 0.5)
    assert (ch.b_label.dim, ch.e_label.dim) == (d_b, d_e)


@pytest.mark.parametrize("param", [-0.1, 1.5, float("nan")])
def test_parameter_out_of_range(param):
    with pytest.raises(DomainError):
        standard_channel(ChannelKind.DEPHASING, param)


def test_unknown_kind():
    with pytest.raises(DomainError):
        standard_channel("teleporter", 0.1)


def test_erasure_has_no_kraus_form_here():
    with pytest.raises(DomainError):
        standard_kraus(ChannelKind.ERASURE, 0.1)


def test_full_dephasing_kills_coherences():
    ch = standard_channel(ChannelKind.DEPHASING, 1.0)
    out = apply_channel(ch, PLUS, Keep.B)
    assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)
    # the environment holds a copy of the computational basis
    eve = apply_channel(ch, PLUS, Keep.E)
    assert_allclose(eve.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_dephasing_shrinks_coherence():
    out = apply_channel(standard_channel(ChannelKind.DEPHASING, 0.25), PLUS, Keep.B)
    assert out.matrix[0, 1].real == pytest.approx(0.5 * 0.75)


def test_amplitude_damping_moves_excitation_to_ground():
    out = apply_channel(standard_channel(ChannelKind.AMPLITUDE_DAMPING, 0.3), basis_state(A, 1), Keep.B)
    assert_allclose(np.real(np.diag(out.matrix)), [0.3, 0.7], atol=1e-12)


def test_full_depolarizing_outputs_maximally_mixed(rng):
    rho = random_density(rng, (A,))
    out = apply_channel(standard_channel(ChannelKind.DEPOLARIZING, 1.0), rho, Keep.B)
    assert_allclose(out.matrix, np.eye(2) / 2, atol=1e-12)


def test_erasure_flags_with_probability_p(rng):
    rho = random_density(rng, (A,))
    out = apply_channel(standard_channel(ChannelKind.ERASURE, 0.4), rho, Keep.B)
    assert out.matrix[2, 2].real == pytest.approx(0.4)
    assert_allclose(out.matrix[:2, :2], 0.6 * rho.matrix, atol=1e-12)


def test_tensor_power_acts_copywise(rng):
    ch = standard_channel(ChannelKind.AMPLITUDE_DAMPING, 0.2)
    power = channel_tensor_power(ch, 2)
    assert (power.input_dim, power.b_label.dim, power.e_label.dim) == (4, 4, 4)
    a, b = random_density(rng, (A,)), random_density(rng, (A,))
    joint = np.kron(a.matrix, b.matrix)
    out = apply_channel(power, DensityOperator((SystemLabel("A", 4),), joint), Keep.B)
    expected = np.kron(apply_channel(ch, a, Keep.B).matrix, apply_channel(ch, b, Keep.B).matrix)
    assert_allclose(out.matrix, expected, atol=1e-12)


def test_tensor_power_range():
    with pytest.raises(DomainError):
        channel_tensor_power(identity_channel(2), 4)


def test_ensemble_validation():
    with pytest.raises(StateValidationError):
        ensemble_from_bloch(np.full((2, 2), 0.3), CANONICAL_BLOCH)
    with pytest.raises(StateValidationError):
        ensemble_from_bloch(np.full((2, 2), 0.25), {(0, 0): (0, 0, 1)})
    with pytest.raises(DimensionError):
        CQWiretapEnsemble((0,), (0, 1), np.array([[0.5, 0.5]]), {
            (0, 0): basis_state(A, 0),
            (0, 1): maximally_mixed((SystemLabel("A", 3),)),
        })


def test_zero_weight_pairs_need_no_signal():
    ens = ensemble_from_bloch([[0.5, 0.0], [0.0, 0.5]], {(0, 0): (0, 0, 1), (1, 1): (0, 0, -1)})
    assert_allclose(ens.p_x, [0.5, 0.5])
    assert_allclose(ens.averaged_signal(1).matrix, basis_state(A, 1).matrix, atol=1e-12)


def test_joint_state_marginals():
    ens = ensemble_from_bloch(np.full((2, 2), 0.25), CANONICAL_BLOCH)
    joint = build_joint_state(ens, identity_channel(2))
    xb = joint.xb_state()
    assert xb.names == ("X", "B")
    assert_allclose(partial_trace(xb, ["B"]).matrix, np.eye(2) / 2, atol=1e-12)
    cond = joint.conditional_state()
    assert cond.a_systems == ("Y",)
    assert_allclose(cond.weights, [0.5, 0.5])


def test_classical_table_only_for_diagonal_blocks():
    diagonal = ensemble_from_bloch(np.full((2, 2), 0.25), {
        (0, 0): (0, 0, 1), (0, 1): (0, 0, -1), (1, 0): (0, 0, -1), (1, 1): (0, 0, 1),
    })
    ch = standard_channel(ChannelKind.DEPHASING, 1.0)
    table = build_joint_state(diagonal, ch).classical_table()
    assert table is not None
    assert table.shape == (2, 2, 2, 2)
    assert table.sum() == pytest.approx(1.0)

    coherent = ensemble_from_bloch(np.full((2, 2), 0.25), CANONICAL_BLOCH)
    assert build_joint_state(coherent, identity_channel(2)).classical_table() is None


def test_joint_state_rejects_dimension_mismatch():
    ens = ensemble_from_bloch(np.full((2, 2), 0.25), CANONICAL_BLOCH)
    with pytest.raises(DimensionError):
        build_joint_state(ens, identity_channel(3))


def test_coherent_ensemble_requires_pure_blocks():
    R = SystemLabel("R", 2)
    mixed = maximally_mixed((R, A))
    with pytest.raises(StateValidationError):
        coherent_ensemble_state([1.0], [mixed], identity_channel(2))


def test_coherent_ensemble_accepts_any_input_name(rng):
    phi = random_pure(rng, (SystemLabel("R", 2), SystemLabel("Q", 2)))
    sigma = coherent_ensemble_state([1.0], [phi], identity_channel(2))
    assert sigma.a_systems == ("R",)
    assert sigma.blocks[0].names == ("R", "B", "E")


def test_decoherence_uses_schmidt_coefficients():
    bell = pure_state(np.array([1, 0, 0, 1]) / math.sqrt(2), (SystemLabel("R", 2), A))
    sigma = coherent_ensemble_state([1.0], [bell], identity_channel(2))
    decohered = decohere_reference(sigma)
    assert_allclose(decohered.p_xy, [[0.5, 0.5]], atol=1e-12)


@pytest.mark.parametrize("kind", list(ChannelKind))
def test_private_to_coherent_identity(rng, kind):
    ch = standard_channel(kind, 0.35)
    purifications = [random_pure(rng, (SystemLabel("R", 2), A)) for _ in range(2)]
    sigma = coherent_ensemble_state([0.4, 0.6], purifications, ch)
    assert private_to_coherent_check(sigma) == pytest.approx(0.0, abs=1e-8)

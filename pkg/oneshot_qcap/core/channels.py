"""
Wiretap channels, ensembles and the joint states built from them.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Hashable, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg as la

from oneshot_qcap.core.divergences import CQQState
from oneshot_qcap.core.errors import DimensionError, DomainError, LabelError, StateValidationError
from oneshot_qcap.core.qmat import (
    DensityOperator,
    Keep,
    SystemLabel,
    WiretapChannel,
    apply_channel,
    bloch_state,
    eigh,
    hermitize,
    partial_trace,
    permute,
)
from oneshot_qcap.utils.helpers import validate_probability

logger = logging.getLogger(__name__)

X_REGISTER = "X"
Y_REGISTER = "Y"

Pair = Tuple[Hashable, Hashable]


class ChannelKind(Enum):
    """Standard qubit channel families."""
    AMPLITUDE_DAMPING = "amplitude_damping"
    DEPOLARIZING = "depolarizing"
    DEPHASING = "dephasing"
    ERASURE = "erasure"


_PAULIS = (
    np.eye(2, dtype=complex),
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def standard_kraus(kind: Union[ChannelKind, str], param: float) -> np.ndarray:
    """Kraus operators of the standard families (erasure excluded: it is defined by its isometry)."""
    kind = ChannelKind(kind)
    if kind is ChannelKind.AMPLITUDE_DAMPING:
        return np.array([
            [[1, 0], [0, np.sqrt(1 - param)]],
            [[0, np.sqrt(param)], [0, 0]],
        ], dtype=complex)
    if kind is ChannelKind.DEPHASING:
        # coherences shrink by (1 - p); p = 1 copies the computational basis into E
        keep = 1.0 - param
        return np.array([
            [[1, 0], [0, keep]],
            [[0, 0], [0, np.sqrt(max(0.0, 1.0 - keep * keep))]],
        ], dtype=complex)
    if kind is ChannelKind.DEPOLARIZING:
        weights = (np.sqrt(1 - 3 * param / 4),) + (np.sqrt(param / 4),) * 3
        return np.array([w * p for w, p in zip(weights, _PAULIS)])
    raise DomainError(f"{kind.value} has no Kraus form here")


def standard_channel(kind: Union[ChannelKind, str], param: float) -> WiretapChannel:
    """
    Standard qubit channel as an isometry with minimal environment.

    Args:
        kind: amplitude_damping, depolarizing, dephasing or erasure
        param: family parameter in [0, 1]

    Returns:
        WiretapChannel A -> B ⊗ E (E of dimension 2, 4, 2 and 3 respectively;
        the erasure output B also carries the erasure flag)

    Raises:
        DomainError: if param is outside [0, 1] or kind is unknown
    """
    try:
        kind = ChannelKind(kind)
    except ValueError:
        raise DomainError(f"unknown channel kind {kind!r}")
    if not validate_probability(param):
        raise DomainError(f"{kind.value} parameter must lie in [0, 1], got {param}")
    param = float(param)

    if kind is ChannelKind.ERASURE:
        v = np.zeros((9, 2), dtype=complex)
        for a in range(2):
            v[3 * a + 2, a] = np.sqrt(1 - param)
            v[3 * 2 + a, a] = np.sqrt(param)
        return WiretapChannel(SystemLabel("A", 2), v, SystemLabel("B", 3), SystemLabel("E", 3))

    return WiretapChannel.from_kraus(standard_kraus(kind, param))


def channel_tensor_power(ch: WiretapChannel, k: int) -> WiretapChannel:
    """
    Isometry of N^{⊗k} with outputs grouped as B₁…B_k and E₁…E_k.

    Raises:
        DomainError: for k outside 1..3
    """
    if not 1 <= k <= 3:
        raise DomainError(f"tensor powers are supported for k in 1..3, got {k}")
    d_a, d_b, d_e = ch.input_dim, ch.b_label.dim, ch.e_label.dim
    v = ch.isometry
    for _ in range(k - 1):
        v = np.kron(v, ch.isometry)
    t = v.reshape((d_b, d_e) * k + (d_a ** k,))
    order = [2 * i for i in range(k)] + [2 * i + 1 for i in range(k)] + [2 * k]
    v = t.transpose(order).reshape(d_b ** k * d_e ** k, d_a ** k)
    return WiretapChannel(
        SystemLabel(ch.input_label.name, d_a ** k),
        v,
        SystemLabel(ch.b_label.name, d_b ** k),
        SystemLabel(ch.e_label.name, d_e ** k),
    )


# ---------------------------------------------------------------------------
# ensembles and joint states
# ---------------------------------------------------------------------------

def _check_distribution(p_xy: np.ndarray, shape: Tuple[int, int]) -> np.ndarray:
    p_xy = np.asarray(p_xy, dtype=float)
    if p_xy.shape != shape:
        raise DimensionError(f"p_xy has shape {p_xy.shape}, expected {shape}")
    if np.any(p_xy < 0) or abs(float(p_xy.sum()) - 1.0) > 1e-10:
        raise StateValidationError(f"p_xy must be a joint distribution, got {p_xy.tolist()}")
    p_xy = p_xy.copy()
    p_xy.setflags(write=False)
    return p_xy


@dataclass(frozen=True, eq=False)
class CQWiretapEnsemble:
    """Joint distribution p(x, y) with signal states ρ_A^{x,y}."""
    x_alphabet: Tuple[Hashable, ...]
    y_alphabet: Tuple[Hashable, ...]
    p_xy: np.ndarray
    signals: Mapping[Pair, DensityOperator]
    input_name: str = "A"

    def __post_init__(self):
        xs, ys = tuple(self.x_alphabet), tuple(self.y_alphabet)
        p_xy = _check_distribution(self.p_xy, (len(xs), len(ys)))

        signals: Dict[Pair, DensityOperator] = {}
        dim = None
        for (i, x) in enumerate(xs):
            for (j, y) in enumerate(ys):
                signal = self.signals.get((x, y))
                if signal is None:
                    if p_xy[i, j] > 0:
                        raise StateValidationError(f"missing signal for (x, y) = ({x!r}, {y!r})")
                    continue
                if not isinstance(signal, DensityOperator) or len(signal.systems) != 1:
                    raise StateValidationError(f"signal ({x!r}, {y!r}) must be a single-system state")
                if dim is None:
                    dim = signal.dim
                elif signal.dim != dim:
                    raise DimensionError("signals have inconsistent dimensions")
                signals[(x, y)] = signal.relabel((SystemLabel(self.input_name, signal.dim),))
        if dim is None:
            raise StateValidationError("ensemble has no signals")

        object.__setattr__(self, "x_alphabet", xs)
        object.__setattr__(self, "y_alphabet", ys)
        object.__setattr__(self, "p_xy", p_xy)
        object.__setattr__(self, "signals", signals)

    @property
    def input_dim(self) -> int:
        return next(iter(self.signals.values())).dim

    @property
    def p_x(self) -> np.ndarray:
        return self.p_xy.sum(axis=1)

    def p_y_given_x(self, x: Hashable) -> np.ndarray:
        row = self.p_xy[self.x_alphabet.index(x)]
        total = row.sum()
        if total <= 0:
            raise DomainError(f"p(y|x) undefined for zero-weight symbol {x!r}")
        return row / total

    def signal(self, x: Hashable, y: Hashable) -> DensityOperator:
        return self.signals[(x, y)]

    def averaged_signal(self, x: Hashable) -> DensityOperator:
        """ω^x = Σ_y p(y|x) ρ^{x,y}."""
        cond = self.p_y_given_x(x)
        matrix = sum(w * self.signals[(x, y)].matrix for y, w in zip(self.y_alphabet, cond) if w > 0)
        return DensityOperator(next(iter(self.signals.values())).systems, hermitize(matrix))


def ensemble_from_bloch(p_xy: np.ndarray, bloch: Mapping[Pair, Sequence[float]],
                        x_alphabet: Sequence[Hashable] = (0, 1),
                        y_alphabet: Sequence[Hashable] = (0, 1)) -> CQWiretapEnsemble:
    """Qubit ensemble whose signals are given by Bloch vectors."""
    label = SystemLabel("A", 2)
    signals = {pair: bloch_state(vec, label) for pair, vec in bloch.items()}
    return CQWiretapEnsemble(tuple(x_alphabet), tuple(y_alphabet), np.asarray(p_xy, dtype=float), signals)


@dataclass(frozen=True, eq=False)
class JointWiretapState:
    """ρ_XYBE = Σ p(x,y) |x><x| ⊗ |y><y| ⊗ ρ_BE^{x,y}."""
    x_alphabet: Tuple[Hashable, ...]
    y_alphabet: Tuple[Hashable, ...]
    p_xy: np.ndarray
    blocks: Mapping[Pair, DensityOperator]

    def __post_init__(self):
        xs, ys = tuple(self.x_alphabet), tuple(self.y_alphabet)
        p_xy = _check_distribution(self.p_xy, (len(xs), len(ys)))
        blocks = dict(self.blocks)
        systems = None
        for i, x in enumerate(xs):
            for j, y in enumerate(ys):
                block = blocks.get((x, y))
                if block is None:
                    if p_xy[i, j] > 0:
                        raise StateValidationError(f"missing block for ({x!r}, {y!r})")
                    continue
                if len(block.systems) != 2:
                    raise DimensionError("joint-state blocks live on exactly two systems, B and E")
                if systems is None:
                    systems = block.systems
                elif block.systems != systems:
                    raise DimensionError("blocks must share their B and E systems")
        if systems is None:
            raise StateValidationError("joint state has no blocks")
        if {X_REGISTER, Y_REGISTER} & {s.name for s in systems}:
            raise LabelError("B and E may not be named X or Y")

        object.__setattr__(self, "x_alphabet", xs)
        object.__setattr__(self, "y_alphabet", ys)
        object.__setattr__(self, "p_xy", p_xy)
        object.__setattr__(self, "blocks", blocks)

    @property
    def b_label(self) -> SystemLabel:
        return next(iter(self.blocks.values())).systems[0]

    @property
    def e_label(self) -> SystemLabel:
        return next(iter(self.blocks.values())).systems[1]

    @property
    def p_x(self) -> np.ndarray:
        return self.p_xy.sum(axis=1)

    def _output(self, x, y, system: str) -> np.ndarray:
        block = self.blocks[(x, y)]
        drop = self.e_label.name if system == self.b_label.name else self.b_label.name
        return partial_trace(block, [drop]).matrix

    def xb_state(self, quantum: Optional[str] = None) -> DensityOperator:
        """
        ρ_XB (or ρ_XE) with X as a dense classical register in front.
        """
        quantum = quantum or self.b_label.name
        label = self.b_label if quantum == self.b_label.name else self.e_label
        nx = len(self.x_alphabet)
        matrix = np.zeros((nx * label.dim, nx * label.dim), dtype=complex)
        for i, x in enumerate(self.x_alphabet):
            for j, y in enumerate(self.y_alphabet):
                w = self.p_xy[i, j]
                if w > 0:
                    sl = slice(i * label.dim, (i + 1) * label.dim)
                    matrix[sl, sl] += w * self._output(x, y, quantum)
        return DensityOperator((SystemLabel(X_REGISTER, nx), label), hermitize(matrix))

    def conditional_state(self, quantum: Optional[str] = None) -> CQQState:
        """
        Σ_x p(x)|x><x| ⊗ ρ_{YQ}^x with ρ_{YQ}^x = Σ_y p(y|x)|y><y| ⊗ ρ_Q^{x,y},
        Q = B by default; Y is the first party. Zero-weight x are dropped.
        """
        quantum = quantum or self.b_label.name
        label = self.b_label if quantum == self.b_label.name else self.e_label
        ny = len(self.y_alphabet)
        y_label = SystemLabel(Y_REGISTER, ny)
        p_x = self.p_x
        alphabet, weights, blocks = [], [], {}
        for i, x in enumerate(self.x_alphabet):
            if p_x[i] <= 0:
                continue
            matrix = np.zeros((ny * label.dim, ny * label.dim), dtype=complex)
            for j, y in enumerate(self.y_alphabet):
                w = self.p_xy[i, j] / p_x[i]
                if w > 0:
                    sl = slice(j * label.dim, (j + 1) * label.dim)
                    matrix[sl, sl] += w * self._output(x, y, quantum)
            alphabet.append(x)
            weights.append(p_x[i])
            blocks[x] = DensityOperator((y_label, label), hermitize(matrix))
        weights = np.asarray(weights) / np.sum(weights)
        return CQQState(tuple(alphabet), weights, blocks, (Y_REGISTER,))

    def classical_table(self, tol: float = 1e-12) -> Optional[np.ndarray]:
        """p(x, y, b, e) when every block is diagonal, else None."""
        d_b, d_e = self.b_label.dim, self.e_label.dim
        table = np.zeros((len(self.x_alphabet), len(self.y_alphabet), d_b, d_e))
        for i, x in enumerate(self.x_alphabet):
            for j, y in enumerate(self.y_alphabet):
                if self.p_xy[i, j] <= 0:
                    continue
                m = self.blocks[(x, y)].matrix
                if np.max(np.abs(m - np.diag(np.diag(m)))) > tol:
                    return None
                table[i, j] = self.p_xy[i, j] * np.real(np.diag(m)).reshape(d_b, d_e)
        return table


def build_joint_state(ens: CQWiretapEnsemble, ch: WiretapChannel) -> JointWiretapState:
    """Blocks N(ρ_A^{x,y}) kept on B ⊗ E."""
    if ens.input_dim != ch.input_dim:
        raise DimensionError(f"signals have dim {ens.input_dim}, channel input has {ch.input_dim}")
    blocks = {pair: apply_channel(ch, signal, Keep.BE) for pair, signal in ens.signals.items()}
    return JointWiretapState(ens.x_alphabet, ens.y_alphabet, ens.p_xy, blocks)


# ---------------------------------------------------------------------------
# coherent ensembles
# ---------------------------------------------------------------------------

def coherent_ensemble_state(weights: Sequence[float], purifications: Sequence[DensityOperator],
                            ch: WiretapChannel, alphabet: Optional[Sequence[Hashable]] = None) -> CQQState:
    """
    σ_XRBE = Σ_x p(x)|x><x| ⊗ (1_R ⊗ U^N)|φ^x><φ^x|(1_R ⊗ U^N)†.

    Each purification lives on (R, A); a two-system state whose second factor
    has the channel's input dimension is accepted under any names.

    Raises:
        StateValidationError: if a block is not pure
    """
    alphabet = tuple(alphabet) if alphabet is not None else tuple(range(len(purifications)))
    if len(alphabet) != len(purifications):
        raise DimensionError("one purification per symbol is required")
    in_name = ch.input_label.name
    blocks = {}
    for x, phi in zip(alphabet, purifications):
        if not isinstance(phi, DensityOperator) or not phi.is_pure():
            raise StateValidationError(f"block {x!r} is not a pure state")
        if in_name not in phi.names:
            if len(phi.systems) != 2 or phi.dims[1] != ch.input_dim:
                raise DimensionError(f"block {x!r} has no channel input system")
            phi = phi.relabel((phi.systems[0], SystemLabel(in_name, ch.input_dim)))
        blocks[x] = apply_channel(ch, phi, Keep.BE)
    reference = [n for n in next(iter(blocks.values())).names if n not in (ch.b_label.name, ch.e_label.name)]
    return CQQState(alphabet, np.asarray(weights, dtype=float), blocks, tuple(reference))


def decohere_reference(sigma: CQQState) -> JointWiretapState:
    """
    Measure R of each pure block in its Schmidt basis across R | BE.

    Y runs over the Schmidt index; p(y|x) are the squared Schmidt
    coefficients and ψ^{x,y} the matching BE vectors. Degenerate Schmidt
    values take whatever basis the SVD returns.
    """
    ref = sigma.a_systems
    if len(ref) != 1 or len(sigma.systems) != 3:
        raise DimensionError("decoherence needs blocks on exactly (R, B, E)")
    r_name = ref[0]
    rest = [s for s in sigma.systems if s.name != r_name]
    d_r = sigma.blocks[sigma.alphabet[0]].label(r_name).dim
    d_be = rest[0].dim * rest[1].dim

    ys = tuple(range(d_r))
    p_xy = np.zeros((len(sigma.alphabet), d_r))
    blocks = {}
    for i, x in enumerate(sigma.alphabet):
        block = sigma.blocks[x]
        if not block.is_pure():
            raise StateValidationError(f"block {x!r} is not pure across R | BE")
        ordered = permute(block, [r_name] + [s.name for s in rest])
        w, v = eigh(ordered.matrix)
        psi = v[:, -1].reshape(d_r, d_be)
        _, s, vh = la.svd(psi, full_matrices=False)
        for y in range(len(s)):
            p_xy[i, y] = sigma.weights[i] * s[y] ** 2
            vec = vh[y]
            blocks[(x, y)] = DensityOperator(tuple(rest), hermitize(np.outer(vec, vec.conj())))
    p_xy /= p_xy.sum()
    return JointWiretapState(sigma.alphabet, ys, p_xy, blocks)

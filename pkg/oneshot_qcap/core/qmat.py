"""
Dense operator algebra over labeled multipartite systems.

Operators carry an ordered tuple of ``SystemLabel``; tensor products, partial
traces and channel applications permute tensor indices internally so callers
never reorder matrices by hand. All spectral decisions share the support
tolerance ``SUPPORT_TOL``.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import reduce
from typing import Callable, Iterable, List, Sequence, Tuple, Type, Union

import numpy as np
from scipy import linalg as la

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.errors import (
    BudgetExceededError,
    DimensionError,
    LabelError,
    StateValidationError,
)
from oneshot_qcap.utils.helpers import is_valid_label

logger = logging.getLogger(__name__)

SUPPORT_TOL = 1e-10
HERMITIAN_TOL = 1e-12
STATE_TOL = 1e-10
ISOMETRY_TOL = 1e-10


# ---------------------------------------------------------------------------
# array kernels
# ---------------------------------------------------------------------------

def hermitize(matrix: np.ndarray) -> np.ndarray:
    return 0.5 * (matrix + matrix.conj().T)


def eigh(matrix: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian array, ascending eigenvalues."""
    return la.eigh(hermitize(np.asarray(matrix, dtype=complex)))


def spectral_apply(matrix: np.ndarray, fn: Callable[[np.ndarray], np.ndarray],
                   support_only: bool = True) -> np.ndarray:
    """
    Apply a scalar function to the spectrum of a Hermitian array.

    Args:
        matrix: Hermitian array
        fn: Vectorized scalar function
        support_only: If True, eigenvalues with |w| <= SUPPORT_TOL map to 0

    Returns:
        Hermitian array fn(matrix)
    """
    w, v = eigh(matrix)
    values = np.zeros_like(w)
    mask = np.abs(w) > SUPPORT_TOL if support_only else np.ones_like(w, dtype=bool)
    values[mask] = fn(w[mask])
    return hermitize((v * values) @ v.conj().T)


def support_projector_array(matrix: np.ndarray) -> np.ndarray:
    return spectral_apply(matrix, lambda w: (w > SUPPORT_TOL).astype(float))


def sqrt_psd(matrix: np.ndarray) -> np.ndarray:
    return spectral_apply(matrix, lambda w: np.sqrt(np.clip(w, 0.0, None)), support_only=False)


def inv_sqrt_on_support(matrix: np.ndarray) -> np.ndarray:
    return spectral_apply(
        matrix, lambda w: np.where(w > SUPPORT_TOL, 1.0 / np.sqrt(np.abs(w)), 0.0)
    )


def log2_on_support(matrix: np.ndarray) -> np.ndarray:
    return spectral_apply(
        matrix, lambda w: np.where(w > SUPPORT_TOL, np.log2(np.abs(w)), 0.0)
    )


def trace_norm(matrix: np.ndarray) -> float:
    return float(np.sum(np.abs(la.eigvalsh(hermitize(matrix)))))


def fidelity_arrays(rho: np.ndarray, sigma: np.ndarray) -> float:
    product = sqrt_psd(rho) @ sqrt_psd(sigma)
    value = float(np.sum(la.svdvals(product)))
    return float(np.clip(value, 0.0, 1.0))


def purified_distance_arrays(rho: np.ndarray, sigma: np.ndarray) -> float:
    f = fidelity_arrays(rho, sigma)
    return float(np.sqrt(max(0.0, 1.0 - f * f)))


# ---------------------------------------------------------------------------
# labeled operators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SystemLabel:
    """A named tensor factor of fixed dimension."""
    name: str
    dim: int

    def __post_init__(self):
        if not is_valid_label(self.name):
            raise LabelError(f"invalid system name {self.name!r}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise DimensionError(f"system {self.name} needs a positive dimension, got {self.dim}")
        object.__setattr__(self, "dim", int(self.dim))


LabelLike = Union[str, SystemLabel]


def _label_name(label: LabelLike) -> str:
    return label.name if isinstance(label, SystemLabel) else str(label)


@dataclass(frozen=True, eq=False)
class HermitianOperator:
    """Hermitian matrix on an ordered tuple of labeled systems."""
    systems: Tuple[SystemLabel, ...]
    matrix: np.ndarray

    def __post_init__(self):
        systems = tuple(self.systems)
        names = [s.name for s in systems]
        if len(set(names)) != len(names):
            raise LabelError(f"duplicate system names in {names}")

        dim = int(np.prod([s.dim for s in systems], dtype=np.int64)) if systems else 1
        cap = QcapConfig.dim_cap()
        if dim > cap:
            raise BudgetExceededError(f"composite dimension {dim} exceeds cap {cap}")

        matrix = np.array(self.matrix, dtype=complex)
        if matrix.shape != (dim, dim):
            raise DimensionError(f"matrix shape {matrix.shape} does not match systems {names} (dim {dim})")
        if not np.all(np.isfinite(matrix)):
            raise StateValidationError("matrix has non-finite entries")

        deviation = float(np.max(np.abs(matrix - matrix.conj().T)))
        if deviation > HERMITIAN_TOL:
            raise StateValidationError(f"matrix is not Hermitian (deviation {deviation:.2e})")

        matrix = hermitize(matrix)
        matrix.setflags(write=False)
        object.__setattr__(self, "systems", systems)
        object.__setattr__(self, "matrix", matrix)
        self._check()

    def _check(self):
        pass

    @property
    def dims(self) -> Tuple[int, ...]:
        return tuple(s.dim for s in self.systems)

    @property
    def names(self) -> Tuple[str, ...]:
        return tuple(s.name for s in self.systems)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def label(self, name: LabelLike) -> SystemLabel:
        name = _label_name(name)
        for system in self.systems:
            if system.name == name:
                return system
        raise LabelError(f"unknown system {name!r}; operator has {list(self.names)}")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def eigenvalues(self) -> np.ndarray:
        return la.eigvalsh(self.matrix)

    def expectation(self, other: "HermitianOperator") -> float:
        """Tr{self · other} for operators on the same systems."""
        _require_same_dims(self, other)
        return float(np.real(np.sum(self.matrix * other.matrix.T)))

    def relabel(self, systems: Sequence[SystemLabel]) -> "HermitianOperator":
        """Same matrix, new labels of identical dimensions."""
        systems = tuple(systems)
        if tuple(s.dim for s in systems) != self.dims:
            raise DimensionError("relabel must keep dimensions")
        return type(self)(systems, self.matrix)

    def as_hermitian(self) -> "HermitianOperator":
        return HermitianOperator(self.systems, self.matrix)

    def __add__(self, other: "HermitianOperator") -> "HermitianOperator":
        _require_same_dims(self, other)
        return HermitianOperator(self.systems, self.matrix + other.matrix)

    def __sub__(self, other: "HermitianOperator") -> "HermitianOperator":
        _require_same_dims(self, other)
        return HermitianOperator(self.systems, self.matrix - other.matrix)

    def __mul__(self, scalar: float) -> "HermitianOperator":
        return HermitianOperator(self.systems, float(scalar) * self.matrix)

    __rmul__ = __mul__

    def __repr__(self):
        return f"{type(self).__name__}({list(self.names)}, dims={list(self.dims)})"


class DensityOperator(HermitianOperator):
    """Positive semidefinite unit-trace operator."""

    def _check(self):
        w_min = float(self.eigenvalues()[0])
        if w_min < -STATE_TOL:
            raise StateValidationError(f"state has negative eigenvalue {w_min:.3e}")
        tr = self.trace()
        if abs(tr - 1.0) > STATE_TOL:
            raise StateValidationError(f"state trace is {tr:.12g}, expected 1")

    def is_pure(self, tol: float = STATE_TOL) -> bool:
        purity = float(np.real(np.sum(self.matrix * self.matrix.T)))
        return abs(purity - 1.0) <= max(tol, 1e-9)


class MeasurementOperator(HermitianOperator):
    """Test operator 0 <= T <= 1."""

    def _check(self):
        w = self.eigenvalues()
        if w.size and (w[0] < -STATE_TOL or w[-1] > 1.0 + STATE_TOL):
            raise StateValidationError(
                f"measurement operator eigenvalues outside [0, 1]: [{w[0]:.3e}, {w[-1]:.3e}]"
            )


OperatorType = Type[HermitianOperator]


def _require_same_dims(a: HermitianOperator, b: HermitianOperator):
    if a.dims != b.dims:
        raise DimensionError(f"dimension mismatch: {list(a.dims)} vs {list(b.dims)}")


def _resolve_names(op: HermitianOperator, labels: Iterable[LabelLike]) -> List[str]:
    names = []
    for label in labels:
        name = _label_name(label)
        op.label(name)
        if isinstance(label, SystemLabel) and label.dim != op.label(name).dim:
            raise DimensionError(f"system {name} has dimension {op.label(name).dim}, not {label.dim}")
        names.append(name)
    return names


def _wrap_like(cls: OperatorType, systems, matrix: np.ndarray) -> HermitianOperator:
    return cls(tuple(systems), hermitize(matrix))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------

def identity(systems: Sequence[SystemLabel]) -> MeasurementOperator:
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems])) if systems else 1
    return MeasurementOperator(systems, np.eye(dim))


def maximally_mixed(systems: Sequence[SystemLabel]) -> DensityOperator:
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems])) if systems else 1
    return DensityOperator(systems, np.eye(dim) / dim)


def basis_state(label: SystemLabel, index: int) -> DensityOperator:
    if not 0 <= index < label.dim:
        raise DimensionError(f"basis index {index} outside system {label.name} of dim {label.dim}")
    matrix = np.zeros((label.dim, label.dim), dtype=complex)
    matrix[index, index] = 1.0
    return DensityOperator((label,), matrix)


def diagonal_state(probs: Sequence[float], systems: Sequence[SystemLabel]) -> DensityOperator:
    return DensityOperator(tuple(systems), np.diag(np.asarray(probs, dtype=float)))


def pure_state(vector: Sequence[complex], systems: Sequence[SystemLabel]) -> DensityOperator:
    """Projector onto a state vector; the vector must be unit norm within 1e-6."""
    vec = np.asarray(vector, dtype=complex).reshape(-1)
    norm = float(np.linalg.norm(vec))
    if abs(norm - 1.0) > 1e-6:
        raise StateValidationError(f"state vector has norm {norm:.9g}")
    vec = vec / norm
    return DensityOperator(tuple(systems), np.outer(vec, vec.conj()))


_PAULI = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def bloch_state(vector: Sequence[float], label: SystemLabel) -> DensityOperator:
    """Qubit state (I + r·σ)/2; requires |r| <= 1 + 1e-10."""
    if label.dim != 2:
        raise DimensionError("Bloch vectors describe qubits only")
    r = np.asarray(vector, dtype=float).reshape(-1)
    if r.shape != (3,):
        raise StateValidationError(f"Bloch vector needs three components, got {r.shape[0]}")
    norm = float(np.linalg.norm(r))
    if norm > 1.0 + 1e-10:
        raise StateValidationError(f"Bloch vector norm {norm:.12g} exceeds 1")
    if norm > 1.0:
        r = r / norm
    matrix = 0.5 * (np.eye(2) + sum(c * p for c, p in zip(r, _PAULI)))
    return DensityOperator((label,), matrix)


# ---------------------------------------------------------------------------
# composition and reduction
# ---------------------------------------------------------------------------

def tensor(a: HermitianOperator, b: HermitianOperator) -> HermitianOperator:
    """
    Kronecker product with concatenated labels.

    Two density (or two measurement) operators give a density (measurement)
    operator; any other combination gives a plain Hermitian operator.
    """
    clash = set(a.names) & set(b.names)
    if clash:
        raise LabelError(f"label collision in tensor product: {sorted(clash)}")
    cls = type(a) if type(a) is type(b) else HermitianOperator
    return _wrap_like(cls, a.systems + b.systems, np.kron(a.matrix, b.matrix))


def tensor_all(operators: Sequence[HermitianOperator]) -> HermitianOperator:
    return reduce(tensor, operators)


def permute(op: HermitianOperator, order: Sequence[LabelLike]) -> HermitianOperator:
    """Reorder tensor factors so that the system names follow ``order``."""
    order = [_label_name(o) for o in order]
    if sorted(order) != sorted(op.names):
        raise LabelError(f"permutation {order} does not match systems {list(op.names)}")
    if list(order) == list(op.names):
        return op
    n = len(op.systems)
    perm = [op.names.index(name) for name in order]
    dims = op.dims
    t = op.matrix.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    systems = tuple(op.systems[p] for p in perm)
    return _wrap_like(type(op), systems, t.reshape(op.dim, op.dim))


def partial_trace(op: HermitianOperator, discard: Iterable[LabelLike]) -> HermitianOperator:
    """
    Trace out the systems in ``discard``.

    Args:
        op: Operator to reduce
        discard: Labels (or names) of systems to remove

    Returns:
        Marginal on the remaining systems, in their original order. Density
        operators stay density operators.
    """
    drop = set(_resolve_names(op, discard))
    if not drop:
        return op
    n = len(op.systems)
    keep_idx = [i for i, name in enumerate(op.names) if name not in drop]
    drop_idx = [i for i, name in enumerate(op.names) if name in drop]
    dims = op.dims
    dk = int(np.prod([dims[i] for i in keep_idx])) if keep_idx else 1
    dd = int(np.prod([dims[i] for i in drop_idx]))
    perm = keep_idx + drop_idx
    t = op.matrix.reshape(dims + dims).transpose(perm + [p + n for p in perm])
    reduced = np.trace(t.reshape(dk, dd, dk, dd), axis1=1, axis2=3)
    cls = DensityOperator if isinstance(op, DensityOperator) else HermitianOperator
    return _wrap_like(cls, tuple(op.systems[i] for i in keep_idx), reduced)


def marginal(op: HermitianOperator, keep: Iterable[LabelLike]) -> HermitianOperator:
    keep = set(_resolve_names(op, keep))
    return partial_trace(op, [name for name in op.names if name not in keep])


# ---------------------------------------------------------------------------
# channels
# ---------------------------------------------------------------------------

class Keep(Enum):
    """Which channel outputs survive apply_channel."""
    B = "B"
    E = "E"
    BE = "BE"


@dataclass(frozen=True, eq=False)
class WiretapChannel:
    """Channel A -> B ⊗ E given by its isometry V of shape (dimB·dimE, dimA)."""
    input_label: SystemLabel
    isometry: np.ndarray
    b_label: SystemLabel
    e_label: SystemLabel

    def __post_init__(self):
        if self.b_label.name == self.e_label.name:
            raise LabelError("B and E outputs need distinct names")

        v = np.array(self.isometry, dtype=complex)
        expected = (self.b_label.dim * self.e_label.dim, self.input_label.dim)
        if v.shape != expected:
            raise DimensionError(f"isometry shape {v.shape}, expected {expected}")
        deviation = float(np.max(np.abs(v.conj().T @ v - np.eye(self.input_label.dim))))
        if deviation > ISOMETRY_TOL:
            raise StateValidationError(f"V†V deviates from identity by {deviation:.2e}")
        v.setflags(write=False)
        object.__setattr__(self, "isometry", v)

    @property
    def input_dim(self) -> int:
        return self.input_label.dim

    @classmethod
    def from_kraus(cls, kraus: Sequence[np.ndarray], input_name: str = "A",
                   b_name: str = "B", e_name: str = "E") -> "WiretapChannel":
        """Stinespring dilation V|ψ> = Σ_k K_k|ψ> ⊗ |k>_E."""
        ks = np.asarray(kraus, dtype=complex)
        if ks.ndim != 3:
            raise DimensionError("Kraus set must be a stack of matrices")
        n_env, d_out, d_in = ks.shape
        v = np.transpose(ks, (1, 0, 2)).reshape(d_out * n_env, d_in)
        return cls(SystemLabel(input_name, d_in), v, SystemLabel(b_name, d_out), SystemLabel(e_name, n_env))

    def kraus_operators(self) -> np.ndarray:
        """Kraus operators K_k = (1 ⊗ <k|) V, stacked along the first axis."""
        d_b, d_e = self.b_label.dim, self.e_label.dim
        return self.isometry.reshape(d_b, d_e, self.input_dim).transpose(1, 0, 2)

    def complementary(self) -> "WiretapChannel":
        """The same dilation read with the roles of B and E exchanged."""
        d_b, d_e = self.b_label.dim, self.e_label.dim
        v = self.isometry.reshape(d_b, d_e, self.input_dim).transpose(1, 0, 2)
        return WiretapChannel(self.input_label, v.reshape(d_e * d_b, self.input_dim),
                              self.e_label, self.b_label)


def identity_channel(dim: int, input_name: str = "A", b_name: str = "B",
                     e_name: str = "E") -> WiretapChannel:
    """Noiseless channel with a trivial (one-dimensional) environment."""
    return WiretapChannel(SystemLabel(input_name, dim), np.eye(dim),
                          SystemLabel(b_name, dim), SystemLabel(e_name, 1))


def apply_channel(ch: WiretapChannel, rho: HermitianOperator,
                  keep: Union[Keep, str] = Keep.BE) -> HermitianOperator:
    """
    Apply the channel to the input factor of ``rho``.

    The input factor is the system named like the channel input; a
    single-system operator of the right dimension is accepted under any name.
    Other factors pass through untouched and the outputs B, E replace the
    input in the label list before the requested partial trace.
    """
    keep = Keep(keep)
    in_name = ch.input_label.name
    if in_name in rho.names:
        if rho.label(in_name).dim != ch.input_dim:
            raise DimensionError(
                f"channel input {in_name} has dim {ch.input_dim}, state has {rho.label(in_name).dim}"
            )
    elif len(rho.systems) == 1 and rho.dim == ch.input_dim:
        in_name = rho.names[0]
    else:
        raise DimensionError(f"state {list(rho.names)} has no input system {in_name} of dim {ch.input_dim}")

    others = [s for s in rho.systems if s.name != in_name]
    clash = {s.name for s in others} & {ch.b_label.name, ch.e_label.name}
    if clash:
        raise LabelError(f"channel outputs collide with state systems {sorted(clash)}")

    ordered = permute(rho, [s.name for s in others] + [in_name])
    d_o = int(np.prod([s.dim for s in others])) if others else 1
    d_a = ch.input_dim
    d_out = ch.isometry.shape[0]
    r = ordered.matrix.reshape(d_o, d_a, d_o, d_a)
    v = ch.isometry
    out = np.einsum("ba,iajc,dc->ibjd", v, r, v.conj()).reshape(d_o * d_out, d_o * d_out)

    cls = DensityOperator if isinstance(rho, DensityOperator) else HermitianOperator
    joint = _wrap_like(cls, tuple(others) + (ch.b_label, ch.e_label), out)
    if keep is Keep.B:
        return partial_trace(joint, [ch.e_label.name])
    if keep is Keep.E:
        return partial_trace(joint, [ch.b_label.name])
    return joint


def apply_kraus(kraus: Sequence[np.ndarray], matrix: np.ndarray) -> np.ndarray:
    """Σ_k K_k ρ K_k† on raw arrays."""
    return hermitize(sum(k @ matrix @ k.conj().T for k in np.asarray(kraus, dtype=complex)))


# ---------------------------------------------------------------------------
# distances and spectral helpers
# ---------------------------------------------------------------------------

def trace_distance(rho: HermitianOperator, sigma: HermitianOperator) -> float:
    _require_same_dims(rho, sigma)
    return float(np.clip(0.5 * trace_norm(rho.matrix - sigma.matrix), 0.0, 1.0))


def fidelity(rho: HermitianOperator, sigma: HermitianOperator) -> float:
    _require_same_dims(rho, sigma)
    return fidelity_arrays(rho.matrix, sigma.matrix)


def purified_distance(rho: HermitianOperator, sigma: HermitianOperator) -> float:
    _require_same_dims(rho, sigma)
    return purified_distance_arrays(rho.matrix, sigma.matrix)


def positive_part_projector(h: HermitianOperator) -> MeasurementOperator:
    """Projector onto the eigenspaces of h with eigenvalue > SUPPORT_TOL."""
    w, v = eigh(h.matrix)
    cols = v[:, w > SUPPORT_TOL]
    return MeasurementOperator(h.systems, hermitize(cols @ cols.conj().T))


def support_projector(h: HermitianOperator) -> MeasurementOperator:
    return MeasurementOperator(h.systems, support_projector_array(h.matrix))


def purify(rho: DensityOperator, reference: str = "R") -> DensityOperator:
    """
    Purification Σ_i √λ_i |v_i> ⊗ |i>_R with R of the same dimension as rho.

    Raises:
        LabelError: if ``reference`` names a system of rho
    """
    if reference in rho.names:
        raise LabelError(f"reference name {reference!r} already used by the state")
    w, v = eigh(rho.matrix)
    amplitudes = v * np.sqrt(np.clip(w, 0.0, None))
    vec = amplitudes.reshape(-1)
    vec = vec / np.linalg.norm(vec)
    return DensityOperator(rho.systems + (SystemLabel(reference, rho.dim),), np.outer(vec, vec.conj()))

"""
Seeded random operators for property suites and tests.

Every function takes an explicit ``numpy.random.Generator``.
"""

from typing import Optional, Sequence

import numpy as np
from scipy import linalg as la

from oneshot_qcap.core.qmat import (
    DensityOperator,
    HermitianOperator,
    MeasurementOperator,
    SystemLabel,
    WiretapChannel,
    hermitize,
)


def random_ginibre(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    return rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))


def random_density(rng: np.random.Generator, systems: Sequence[SystemLabel],
                   rank: Optional[int] = None) -> DensityOperator:
    """Induced-measure random state of the given rank (full rank by default)."""
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems]))
    g = random_ginibre(rng, dim, rank or dim)
    rho = g @ g.conj().T
    return DensityOperator(systems, hermitize(rho / np.real(np.trace(rho))))


def random_pure(rng: np.random.Generator, systems: Sequence[SystemLabel]) -> DensityOperator:
    return random_density(rng, systems, rank=1)


def random_diagonal(rng: np.random.Generator, systems: Sequence[SystemLabel],
                    full_support: bool = True) -> DensityOperator:
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems]))
    p = rng.dirichlet(np.ones(dim))
    if full_support:
        p = 0.98 * p + 0.02 / dim
    return DensityOperator(systems, np.diag(p))


def random_hermitian(rng: np.random.Generator, systems: Sequence[SystemLabel]) -> HermitianOperator:
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems]))
    g = random_ginibre(rng, dim, dim)
    return HermitianOperator(systems, hermitize(g))


def random_psd(rng: np.random.Generator, systems: Sequence[SystemLabel],
               rank: Optional[int] = None, scale: float = 1.0) -> HermitianOperator:
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems]))
    g = random_ginibre(rng, dim, rank or dim)
    m = g @ g.conj().T
    return HermitianOperator(systems, hermitize(scale * m / np.real(np.trace(m))))


def random_contraction(rng: np.random.Generator, systems: Sequence[SystemLabel]) -> MeasurementOperator:
    """Random 0 <= Λ <= 1 with uniformly drawn eigenvalues."""
    systems = tuple(systems)
    dim = int(np.prod([s.dim for s in systems]))
    u = random_unitary(rng, dim)
    w = rng.uniform(0.0, 1.0, dim)
    return MeasurementOperator(systems, hermitize((u * w) @ u.conj().T))


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = la.qr(random_ginibre(rng, dim, dim))
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_isometry(rng: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    q, _ = la.qr(random_ginibre(rng, rows, cols), mode="economic")
    return q


def random_channel(rng: np.random.Generator, d_in: int = 2, d_b: int = 2, d_e: int = 2,
                   input_name: str = "A", b_name: str = "B", e_name: str = "E") -> WiretapChannel:
    v = random_isometry(rng, d_b * d_e, d_in)
    return WiretapChannel(SystemLabel(input_name, d_in), v, SystemLabel(b_name, d_b), SystemLabel(e_name, d_e))


def random_contraction_batch(rng: np.random.Generator, dim: int, count: int) -> np.ndarray:
    """``count`` random operators 0 <= Λ <= 1 stacked as a (count, dim, dim) array."""
    g = rng.standard_normal((count, dim, dim)) + 1j * rng.standard_normal((count, dim, dim))
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r, axis1=1, axis2=2)
    q = q * (diag / np.abs(diag))[:, None, :]
    w = rng.uniform(0.0, 1.0, (count, dim))
    return np.einsum("nij,nj,nkj->nik", q, w, q.conj())

"""
Entropies, divergences and mutual-information variants, all in bits.

D_H^ε is solved exactly through the quantum Neyman–Pearson family of
threshold tests {ρ − tσ > 0} with a fractional weight on the boundary
eigenspace. Smoothed max-quantities are reported as intervals: the upper
endpoint is the unsmoothed value, the lower endpoint the best clipped
candidate found inside the purified-distance ball.
"""

import logging
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, Hashable, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy import linalg as la
from scipy.special import erfc

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.errors import (
    AlphabetTooLargeError,
    DimensionError,
    DomainError,
    LabelError,
    SlackError,
    SolverError,
    StateValidationError,
)
from oneshot_qcap.core.qmat import (
    SUPPORT_TOL,
    DensityOperator,
    HermitianOperator,
    MeasurementOperator,
    eigh,
    hermitize,
    inv_sqrt_on_support,
    log2_on_support,
    partial_trace,
    permute,
    purified_distance_arrays,
    sqrt_psd,
    support_projector_array,
    tensor,
)
from oneshot_qcap.utils.helpers import validate_slacks
from oneshot_qcap.utils.workers import parallel_map

logger = logging.getLogger(__name__)

BOUNDARY_TOL = 1e-9
TYPE_I_TOL = 1e-10
THRESHOLD_TOL = 1e-12
MONOTONE_TOL = 1e-9
EXACT_SUBALPHABET_LIMIT = 12
_MAX_BISECTION_STEPS = 400


# ---------------------------------------------------------------------------
# parameter and result types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SlackParams:
    """Slack parameters (ε, ε′, δ, δ′, γ) of the coding theorems."""
    eps: float
    eps_prime: float
    delta: float
    delta_prime: float
    gamma: float

    def __post_init__(self):
        ok, result = validate_slacks(self.eps, self.eps_prime, self.delta, self.delta_prime, self.gamma)
        if not ok:
            raise SlackError(f"invalid slack parameters ({result.value}): {self.to_dict()}")
        for name in ("eps", "eps_prime", "delta", "delta_prime", "gamma"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def default(cls) -> "SlackParams":
        return cls(*QcapConfig.DEFAULT_SLACKS)

    def to_dict(self) -> Dict[str, float]:
        return {
            "eps": self.eps,
            "eps_prime": self.eps_prime,
            "delta": self.delta,
            "delta_prime": self.delta_prime,
            "gamma": self.gamma,
        }


@dataclass(frozen=True, eq=False)
class OptimalTest:
    """Neyman–Pearson optimal test and its two error probabilities."""
    threshold: float
    boundary_weight: float
    test: MeasurementOperator
    type_i: float
    type_ii: float


class SmoothingInterval(NamedTuple):
    lower: float
    upper: float

    @property
    def width(self) -> float:
        if math.isinf(self.upper) or math.isinf(self.lower):
            return 0.0 if self.upper == self.lower else math.inf
        return self.upper - self.lower


@dataclass(frozen=True, eq=False)
class CQQState:
    """
    Classical-quantum state Σ_x p(x)|x><x| ⊗ ρ^x.

    ``a_systems`` names the block systems forming the first party of
    mutual-information quantities; the remaining block systems form the
    second party.
    """
    alphabet: Tuple[Hashable, ...]
    weights: np.ndarray
    blocks: Mapping[Hashable, DensityOperator]
    a_systems: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        alphabet = tuple(self.alphabet)
        if not alphabet or len(set(alphabet)) != len(alphabet):
            raise StateValidationError("alphabet must be nonempty with distinct symbols")
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.shape != (len(alphabet),):
            raise StateValidationError("one weight per symbol is required")
        if np.any(weights < 0) or abs(float(weights.sum()) - 1.0) > 1e-10:
            raise StateValidationError(f"weights must be a distribution, got {weights.tolist()}")

        blocks = dict(self.blocks)
        missing = [x for x in alphabet if x not in blocks]
        if missing:
            raise StateValidationError(f"missing blocks for symbols {missing}")
        reference = blocks[alphabet[0]]
        for x in alphabet:
            block = blocks[x]
            if not isinstance(block, DensityOperator):
                raise StateValidationError(f"block {x!r} is not a density operator")
            if block.systems != reference.systems:
                raise StateValidationError("all blocks must live on the same systems")

        a_systems = tuple(self.a_systems) if self.a_systems else (reference.names[0],)
        unknown = [a for a in a_systems if a not in reference.names]
        if unknown:
            raise LabelError(f"unknown party systems {unknown}")

        weights.setflags(write=False)
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "blocks", blocks)
        object.__setattr__(self, "a_systems", a_systems)

    @property
    def systems(self):
        return self.blocks[self.alphabet[0]].systems

    @property
    def b_systems(self) -> Tuple[str, ...]:
        return tuple(n for n in self.blocks[self.alphabet[0]].names if n not in self.a_systems)

    @property
    def support(self) -> Tuple[Hashable, ...]:
        return tuple(x for x, w in zip(self.alphabet, self.weights) if w > 0)

    def weight(self, x: Hashable) -> float:
        return float(self.weights[self.alphabet.index(x)])

    def restricted(self, symbols: Iterable[Hashable]) -> "CQQState":
        """Renormalized restriction p|_S."""
        symbols = tuple(symbols)
        w = np.array([self.weight(x) for x in symbols])
        if w.sum() <= 0:
            raise DomainError("restriction to a zero-weight sub-alphabet")
        return CQQState(symbols, w / w.sum(), {x: self.blocks[x] for x in symbols}, self.a_systems)

    def averaged(self) -> DensityOperator:
        """Σ_x p(x) ρ^x."""
        matrix = sum(w * self.blocks[x].matrix for x, w in zip(self.alphabet, self.weights))
        return DensityOperator(self.systems, hermitize(matrix))


# ---------------------------------------------------------------------------
# scalar helpers
# ---------------------------------------------------------------------------

def binary_entropy(eps: float) -> float:
    if not 0.0 <= eps <= 1.0:
        raise DomainError(f"binary entropy needs an argument in [0, 1], got {eps}")
    if eps in (0.0, 1.0):
        return 0.0
    return float(-eps * math.log2(eps) - (1.0 - eps) * math.log2(1.0 - eps))


def gaussian_cdf(x: float) -> float:
    return float(0.5 * erfc(-x / math.sqrt(2.0)))


def inv_gaussian_cdf(q: float, tol: float = 1e-12) -> float:
    """Φ⁻¹(q) by bisection on the erfc form of Φ."""
    if not 0.0 < q < 1.0:
        raise DomainError(f"inverse Gaussian CDF needs q in (0, 1), got {q}")
    lo, hi = -40.0, 40.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if gaussian_cdf(mid) < q:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _check_second_order(V: float, eps: float, n: int):
    if n < 1 or int(n) != n:
        raise DomainError(f"blocklength must be a positive integer, got {n}")
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    if V < 0:
        raise DomainError(f"variance must be nonnegative, got {V}")


def second_order_dh(D: float, V: float, eps: float, n: int) -> float:
    """nD + √(nV)·Φ⁻¹(ε), without the O(log n) remainder."""
    _check_second_order(V, eps, n)
    return n * D + math.sqrt(n * V) * inv_gaussian_cdf(eps)


def second_order_dmax(D: float, V: float, eps: float, n: int) -> float:
    """nD − √(nV)·Φ⁻¹(ε²), without the O(log n) remainder."""
    _check_second_order(V, eps, n)
    return n * D - math.sqrt(n * V) * inv_gaussian_cdf(eps * eps)


def classical_purified_distance(p: Sequence[float], q: Sequence[float]) -> float:
    f = float(np.sum(np.sqrt(np.asarray(p, dtype=float) * np.asarray(q, dtype=float))))
    return math.sqrt(max(0.0, 1.0 - min(f, 1.0) ** 2))


# ---------------------------------------------------------------------------
# entropies
# ---------------------------------------------------------------------------

def _require_states(*ops):
    for op in ops:
        if not isinstance(op, DensityOperator):
            raise StateValidationError(f"expected a density operator, got {type(op).__name__}")
    first = ops[0]
    for op in ops[1:]:
        if op.dims != first.dims:
            raise DimensionError(f"dimension mismatch: {list(first.dims)} vs {list(op.dims)}")


def _entropy_array(matrix: np.ndarray) -> float:
    w = la.eigvalsh(hermitize(matrix))
    w = w[w > SUPPORT_TOL]
    return float(-np.sum(w * np.log2(w)))


def von_neumann_entropy(rho: DensityOperator) -> float:
    _require_states(rho)
    return _entropy_array(rho.matrix)


def split_parties(rho: HermitianOperator, a: Optional[Iterable[str]] = None) -> Tuple[List[str], List[str]]:
    """Party A (default: first system) and party B (the rest)."""
    a_names = list(a) if a is not None else [rho.names[0]]
    for name in a_names:
        rho.label(name)
    b_names = [n for n in rho.names if n not in a_names]
    if not a_names or not b_names:
        raise LabelError(f"bipartite split needs two nonempty parties, got {a_names} | {b_names}")
    return a_names, b_names


def product_of_marginals(rho: DensityOperator, a: Optional[Iterable[str]] = None) -> DensityOperator:
    """ρ_A ⊗ ρ_B in the system order of ρ_AB."""
    a_names, b_names = split_parties(rho, a)
    rho_a = partial_trace(rho, b_names)
    rho_b = partial_trace(rho, a_names)
    return permute(tensor(rho_a, rho_b), rho.names)


def mutual_information(rho: DensityOperator, a: Optional[Iterable[str]] = None) -> float:
    _require_states(rho)
    a_names, b_names = split_parties(rho, a)
    return (
        _entropy_array(partial_trace(rho, b_names).matrix)
        + _entropy_array(partial_trace(rho, a_names).matrix)
        - _entropy_array(rho.matrix)
    )


def coherent_info(rho: DensityOperator, a: Optional[Iterable[str]] = None) -> float:
    """I(A⟩B) = H(B) − H(AB)."""
    _require_states(rho)
    a_names, _ = split_parties(rho, a)
    return _entropy_array(partial_trace(rho, a_names).matrix) - _entropy_array(rho.matrix)


def cond_coherent_info(state: CQQState) -> float:
    return float(sum(
        w * coherent_info(state.blocks[x], state.a_systems)
        for x, w in zip(state.alphabet, state.weights) if w > 0
    ))


def conditional_mutual_information(state: CQQState) -> float:
    """I(A;B|X) = Σ_x p(x) I(A;B)_{ρ^x}."""
    return float(sum(
        w * mutual_information(state.blocks[x], state.a_systems)
        for x, w in zip(state.alphabet, state.weights) if w > 0
    ))


def holevo_information(weights: Sequence[float], states: Sequence[DensityOperator]) -> float:
    """I(X;B) = H(Σ p ρ_x) − Σ p H(ρ_x)."""
    weights = np.asarray(weights, dtype=float)
    average = sum(w * s.matrix for w, s in zip(weights, states))
    return _entropy_array(average) - float(sum(
        w * _entropy_array(s.matrix) for w, s in zip(weights, states) if w > 0
    ))


# ---------------------------------------------------------------------------
# divergences on arrays
# ---------------------------------------------------------------------------

def _support_leak(r: np.ndarray, s: np.ndarray) -> float:
    """Tr{(1 − Π_σ) ρ}: weight of ρ outside supp(σ)."""
    return float(np.real(np.trace(r) - np.trace(support_projector_array(s) @ r)))


def _relative_entropy_arrays(r: np.ndarray, s: np.ndarray) -> float:
    if _support_leak(r, s) > SUPPORT_TOL:
        return math.inf
    return float(np.real(np.trace(r @ (log2_on_support(r) - log2_on_support(s)))))


def _dmax_arrays(r: np.ndarray, s: np.ndarray) -> float:
    if _support_leak(r, s) > SUPPORT_TOL:
        return math.inf
    inv = inv_sqrt_on_support(s)
    lam = float(la.eigvalsh(hermitize(inv @ r @ inv))[-1])
    return math.log2(lam) if lam > 0 else -math.inf


def relative_entropy(rho: DensityOperator, sigma: DensityOperator) -> float:
    _require_states(rho, sigma)
    return _relative_entropy_arrays(rho.matrix, sigma.matrix)


def relative_entropy_variance(rho: DensityOperator, sigma: DensityOperator) -> float:
    """
    Tr{ρ M²} with M = Π_ρ(log₂ρ − log₂σ − D)Π_ρ.

    Raises:
        DomainError: when supp(ρ) is not contained in supp(σ)
    """
    _require_states(rho, sigma)
    r, s = rho.matrix, sigma.matrix
    if _support_leak(r, s) > SUPPORT_TOL:
        raise DomainError("relative entropy variance needs supp(rho) inside supp(sigma)")
    d = _relative_entropy_arrays(r, s)
    proj = support_projector_array(r)
    m = proj @ (log2_on_support(r) - log2_on_support(s) - d * np.eye(r.shape[0])) @ proj
    return max(0.0, float(np.real(np.trace(r @ m @ m))))


def dmax(rho: DensityOperator, sigma: DensityOperator) -> float:
    _require_states(rho, sigma)
    return _dmax_arrays(rho.matrix, sigma.matrix)


# ---------------------------------------------------------------------------
# Neyman–Pearson
# ---------------------------------------------------------------------------

class _ThresholdFamily:
    """Tests {ρ − tσ > 0} and their boundary eigenspaces."""

    def __init__(self, r: np.ndarray, s: np.ndarray):
        self.r = r
        self.s = s

    def split(self, t: float):
        w, v = eigh(self.r - t * self.s)
        strict = v[:, w > BOUNDARY_TOL]
        boundary = v[:, np.abs(w) <= BOUNDARY_TOL]
        return strict @ strict.conj().T, boundary @ boundary.conj().T

    def type_i(self, projector: np.ndarray) -> float:
        return float(1.0 - np.real(np.trace(projector @ self.r)))

    def strict_type_i(self, t: float) -> float:
        strict, _ = self.split(t)
        return self.type_i(strict)


def _neyman_pearson(r: np.ndarray, s: np.ndarray, eps: float):
    """Return (threshold, boundary_weight, test array) with type-I error ε."""
    dim = r.shape[0]
    family = _ThresholdFamily(r, s)

    if eps <= 0.0:
        return 0.0, 0.0, support_projector_array(r)

    # a test on ker(σ) has no type-II error at all
    kernel = np.eye(dim) - support_projector_array(s)
    if family.type_i(kernel) <= eps + TYPE_I_TOL:
        return math.inf, 0.0, kernel

    w_s = la.eigvalsh(hermitize(s))
    lam_min = float(w_s[w_s > SUPPORT_TOL].min())
    lo, hi = 0.0, 1.0 / lam_min + 1.0
    a_lo, a_hi = family.strict_type_i(lo), family.strict_type_i(hi)
    for _ in range(200):
        if a_hi >= eps:
            break
        lo, a_lo = hi, a_hi
        hi *= 2.0
        a_hi = family.strict_type_i(hi)
    else:
        raise SolverError("could not bracket the Neyman-Pearson threshold")

    if a_lo >= eps:
        hi, a_hi = lo, a_lo

    for _ in range(_MAX_BISECTION_STEPS):
        if hi - lo < THRESHOLD_TOL:
            break
        mid = 0.5 * (lo + hi)
        a_mid = family.strict_type_i(mid)
        if a_mid < a_lo - MONOTONE_TOL or a_mid > a_hi + MONOTONE_TOL:
            raise SolverError(
                f"type-I error not monotone in threshold: {a_lo:.12g} <= {a_mid:.12g} <= {a_hi:.12g} fails"
            )
        if abs(a_mid - eps) <= TYPE_I_TOL:
            hi, a_hi = mid, a_mid
            break
        if a_mid < eps:
            lo, a_lo = mid, a_mid
        else:
            hi, a_hi = mid, a_mid

    strict, boundary = family.split(hi)
    a_strict = family.type_i(strict)
    mass = float(np.real(np.trace(boundary @ r)))

    if a_strict <= eps + TYPE_I_TOL:
        return hi, 0.0, strict
    if mass > 0 and a_strict - mass <= eps + TYPE_I_TOL:
        p = float(np.clip((a_strict - eps) / mass, 0.0, 1.0))
        return hi, p, strict + p * boundary

    # the jump was not resolved into a boundary eigenspace: mix the bracketing tests
    strict_lo, _ = family.split(lo)
    a_low = family.type_i(strict_lo)
    q = float(np.clip((a_strict - eps) / max(a_strict - a_low, 1e-300), 0.0, 1.0))
    return hi, q, (1.0 - q) * strict + q * strict_lo


def dh_eps(rho: DensityOperator, sigma: DensityOperator, eps: float) -> Tuple[float, OptimalTest]:
    """
    Hypothesis-testing relative entropy: −log₂ of the least Tr{Tσ} over tests
    0 ≤ T ≤ 1 with Tr{(1−T)ρ} ≤ ε.

    Returns:
        (value in bits, the optimal test)

    Raises:
        DomainError: if ε is outside [0, 1)
    """
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    _require_states(rho, sigma)
    r, s = rho.matrix, sigma.matrix
    threshold, weight, test = _neyman_pearson(r, s, eps)
    test = hermitize(test)
    type_i = float(np.clip(1.0 - np.real(np.trace(test @ r)), 0.0, 1.0))
    type_ii = float(np.clip(np.real(np.trace(test @ s)), 0.0, 1.0))
    value = math.inf if type_ii <= 0.0 else -math.log2(type_ii)
    logger.debug(f"D_H at eps={eps}: threshold {threshold:.6g}, weight {weight:.4g}, value {value:.9g}")
    return value, OptimalTest(threshold, weight, MeasurementOperator(rho.systems, test), type_i, type_ii)


# ---------------------------------------------------------------------------
# smoothing by clipping
# ---------------------------------------------------------------------------

class _ClippingFamily:
    """
    Candidates ρ′_λ ∝ σ^{1/2} min(Γ, λ) σ^{1/2} with Γ = σ^{-1/2} ρ σ^{-1/2}.

    D_max(ρ′_λ‖σ) = log₂(min(λ, λmax(Γ)) / c_λ) with c_λ the normalisation,
    which is nondecreasing in λ.
    """

    def __init__(self, r: np.ndarray, s: np.ndarray):
        self.r = r
        self.sqrt_s = sqrt_psd(s)
        inv = inv_sqrt_on_support(s)
        g, u = eigh(inv @ r @ inv)
        self.g = np.clip(g, 0.0, None)
        self.u = u
        self.g_max = float(self.g.max()) if self.g.size else 0.0

    def candidate(self, lam: float) -> Tuple[np.ndarray, float]:
        capped = np.minimum(self.g, lam)
        x = self.sqrt_s @ ((self.u * capped) @ self.u.conj().T) @ self.sqrt_s
        c = float(np.real(np.trace(x)))
        return hermitize(x / c), math.log2(min(lam, self.g_max) / c)

    def distance(self, lam: float) -> float:
        state, _ = self.candidate(lam)
        return purified_distance_arrays(state, self.r)

    def smallest_feasible(self, eps: float) -> Optional[float]:
        """Smallest cap λ whose candidate lies within purified distance ε."""
        if self.g_max <= 0 or self.distance(self.g_max) > eps:
            return None
        lo = self.g_max * 1e-12
        if self.distance(lo) <= eps:
            return lo
        hi = self.g_max
        for _ in range(200):
            if hi - lo <= 1e-13 * self.g_max:
                break
            mid = 0.5 * (lo + hi)
            if self.distance(mid) <= eps:
                hi = mid
            else:
                lo = mid
        return hi


def _check_smoothing(eps: float):
    if not 0.0 < eps < 1.0:
        raise DomainError(f"smoothing parameter must lie in (0, 1), got {eps}")


def _dmax_smooth_arrays(r: np.ndarray, s: np.ndarray, eps: float) -> SmoothingInterval:
    upper = _dmax_arrays(r, s)
    family = _ClippingFamily(r, s)
    lam = family.smallest_feasible(eps)
    if lam is None:
        return SmoothingInterval(upper, upper)
    _, lower = family.candidate(lam)
    return SmoothingInterval(min(lower, upper), upper)


def dmax_smooth(rho: DensityOperator, sigma: DensityOperator, eps: float) -> SmoothingInterval:
    _check_smoothing(eps)
    _require_states(rho, sigma)
    return _dmax_smooth_arrays(rho.matrix, sigma.matrix, eps)


# ---------------------------------------------------------------------------
# mutual-information variants
# ---------------------------------------------------------------------------

def i_h_eps(rho_ab: DensityOperator, eps: float, a: Optional[Iterable[str]] = None) -> float:
    _require_states(rho_ab)
    return dh_eps(rho_ab, product_of_marginals(rho_ab, a), eps)[0]


def i_max(rho_ab: DensityOperator, a: Optional[Iterable[str]] = None) -> float:
    _require_states(rho_ab)
    return dmax(rho_ab, product_of_marginals(rho_ab, a))


def i_max_smooth(rho_ab: DensityOperator, eps: float, a: Optional[Iterable[str]] = None) -> SmoothingInterval:
    """Smoothing of the first argument only, both marginals fixed."""
    _require_states(rho_ab)
    return dmax_smooth(rho_ab, product_of_marginals(rho_ab, a), eps)


_ALT_GRID = 48


def i_max_alt_smooth(rho_ab: DensityOperator, eps: float, a: Optional[Iterable[str]] = None) -> SmoothingInterval:
    """
    Smoothing with the B-marginal re-derived from the smoothed state:
    inf D_max(ρ′_AB ‖ ρ_A ⊗ ρ′_B) over the ball, A-marginal fixed.
    """
    _check_smoothing(eps)
    _require_states(rho_ab)
    a_names, b_names = split_parties(rho_ab, a)
    product = product_of_marginals(rho_ab, a_names)
    upper = _dmax_arrays(rho_ab.matrix, product.matrix)

    family = _ClippingFamily(rho_ab.matrix, product.matrix)
    lam_star = family.smallest_feasible(eps)
    if lam_star is None:
        return SmoothingInterval(upper, upper)

    rho_a = partial_trace(rho_ab, b_names)
    grid = np.unique(np.concatenate([
        np.geomspace(lam_star, family.g_max, _ALT_GRID), [lam_star, family.g_max]
    ]))
    lower = upper
    for lam in grid:
        candidate, _ = family.candidate(float(lam))
        if purified_distance_arrays(candidate, rho_ab.matrix) > eps:
            continue
        smoothed = DensityOperator(rho_ab.systems, candidate)
        reference = permute(tensor(rho_a, partial_trace(smoothed, a_names)), rho_ab.names)
        lower = min(lower, _dmax_arrays(candidate, reference.matrix))
    return SmoothingInterval(lower, upper)


# ---------------------------------------------------------------------------
# conditional variants
# ---------------------------------------------------------------------------

def _feasible_subalphabets(state: CQQState, eps: float):
    support = state.support
    if len(support) > EXACT_SUBALPHABET_LIMIT:
        raise AlphabetTooLargeError(
            f"exact sub-alphabet search supports at most {EXACT_SUBALPHABET_LIMIT} symbols, got {len(support)}"
        )
    p = np.array([state.weight(x) for x in support])
    for size in range(1, len(support) + 1):
        for idx in combinations(range(len(support)), size):
            restricted = np.zeros_like(p)
            restricted[list(idx)] = p[list(idx)]
            if restricted.sum() <= 0:
                continue
            restricted /= restricted.sum()
            if classical_purified_distance(restricted, p) <= eps + 1e-12:
                yield tuple(support[i] for i in idx)


def _per_block(state: CQQState, fn: Callable[[DensityOperator], object]) -> Dict[Hashable, object]:
    symbols = list(state.support)
    values = parallel_map(lambda x: fn(state.blocks[x]), symbols)
    return dict(zip(symbols, values))


def cond_i_h_eps(state: CQQState, eps: float) -> float:
    """Max over nearby sub-alphabets S of min over x ∈ S of I_H^ε(A;B)_{ρ^x}."""
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    values = _per_block(state, lambda block: i_h_eps(block, eps, state.a_systems))
    best = -math.inf
    for subset in _feasible_subalphabets(state, eps):
        best = max(best, min(values[x] for x in subset))
    return best


def _cond_smooth(state: CQQState, eps: float, fn) -> SmoothingInterval:
    _check_smoothing(eps)
    values = _per_block(state, lambda block: fn(block, eps, state.a_systems))
    lower = upper = math.inf
    for subset in _feasible_subalphabets(state, eps):
        lower = min(lower, max(values[x].lower for x in subset))
        upper = min(upper, max(values[x].upper for x in subset))
    return SmoothingInterval(lower, upper)


def cond_i_max_smooth(state: CQQState, eps: float) -> SmoothingInterval:
    """Min over nearby sub-alphabets of max over x of the smoothed I_max interval."""
    return _cond_smooth(state, eps, i_max_smooth)


def cond_i_max_alt_smooth(state: CQQState, eps: float) -> SmoothingInterval:
    return _cond_smooth(state, eps, i_max_alt_smooth)

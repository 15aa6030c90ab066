"""
Commuting fast path.

For diagonal (classical) states every quantity reduces to distributions. n-fold
products are handled through type classes: all sequences with the same letter
counts share one likelihood ratio, so a product of up to a dozen copies
collapses to a few thousand weighted groups.
"""

import math
from dataclasses import dataclass
from typing import Iterator, List, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from oneshot_qcap.core.divergences import SmoothingInterval
from oneshot_qcap.core.errors import DomainError

MAX_BLOCKLENGTH = 12
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class TypeGroups:
    """Groups of equiprobable outcomes: count, log₂ P per outcome, log₂ Q per outcome."""
    log_count: np.ndarray
    log_p: np.ndarray
    log_q: np.ndarray

    @property
    def mass_p(self) -> np.ndarray:
        return np.exp2(self.log_count + self.log_p)

    @property
    def mass_q(self) -> np.ndarray:
        return np.exp2(self.log_count + self.log_q)

    def __len__(self):
        return self.log_count.shape[0]


def _log2_safe(values: np.ndarray) -> np.ndarray:
    values = np.asarray(values, dtype=float)
    out = np.full(values.shape, -np.inf)
    positive = values > 0
    out[positive] = np.log2(values[positive])
    return out


def compositions(n: int, k: int) -> Iterator[Tuple[int, ...]]:
    """All k-tuples of nonnegative integers summing to n."""
    if k == 1:
        yield (n,)
        return
    for first in range(n + 1):
        for rest in compositions(n - first, k - 1):
            yield (first,) + rest


def log2_multinomial(counts: Sequence[int]) -> float:
    counts = np.asarray(counts)
    return float((gammaln(counts.sum() + 1) - np.sum(gammaln(counts + 1))) / _LN2)


def _weighted_log(counts: np.ndarray, logs: np.ndarray) -> float:
    used = counts > 0
    if np.any(np.isinf(logs[used])):
        return -math.inf
    return float(np.sum(counts[used] * logs[used]))


def type_groups(p: Sequence[float], q: Sequence[float], n: int) -> TypeGroups:
    """Type classes of the n-fold products p^{⊗n}, q^{⊗n}."""
    if not 1 <= n <= MAX_BLOCKLENGTH:
        raise DomainError(f"blocklength must lie in [1, {MAX_BLOCKLENGTH}], got {n}")
    lp, lq = _log2_safe(p), _log2_safe(q)
    rows = []
    for counts in compositions(n, len(lp)):
        c = np.asarray(counts)
        lpc, lqc = _weighted_log(c, lp), _weighted_log(c, lq)
        if lpc == -math.inf and lqc == -math.inf:
            continue
        rows.append((log2_multinomial(c), lpc, lqc))
    arr = np.array(rows, dtype=float).reshape(-1, 3)
    return TypeGroups(arr[:, 0], arr[:, 1], arr[:, 2])


def combine_groups(a: TypeGroups, b: TypeGroups) -> TypeGroups:
    """Groups of the product of two independent families."""
    return TypeGroups(
        np.add.outer(a.log_count, b.log_count).reshape(-1),
        np.add.outer(a.log_p, b.log_p).reshape(-1),
        np.add.outer(a.log_q, b.log_q).reshape(-1),
    )


def product_groups(families: Sequence[Tuple[Sequence[float], Sequence[float], int]]) -> TypeGroups:
    """Groups of ⊗_j (p_j, q_j)^{⊗n_j}; families with n_j = 0 are skipped."""
    groups = None
    for p, q, n in families:
        if n == 0:
            continue
        g = type_groups(p, q, n)
        groups = g if groups is None else combine_groups(groups, g)
    if groups is None:
        return TypeGroups(np.zeros(1), np.zeros(1), np.zeros(1))
    return groups


# ---------------------------------------------------------------------------
# Neyman–Pearson and smoothing on groups
# ---------------------------------------------------------------------------

def _ratio_order(groups: TypeGroups) -> np.ndarray:
    with np.errstate(invalid="ignore"):
        ratio = groups.log_p - groups.log_q
    ratio = np.where(np.isneginf(groups.log_q) & ~np.isneginf(groups.log_p), np.inf, ratio)
    ratio = np.where(np.isneginf(groups.log_p), -np.inf, ratio)
    # stable sort keeps the enumeration order among ties
    return np.argsort(-ratio, kind="stable")


def min_type_ii(groups: TypeGroups, eps: float) -> float:
    """Smallest Σ T·Q subject to Σ T·P ≥ 1 − ε, randomised over the last group."""
    if not 0.0 <= eps < 1.0:
        raise DomainError(f"eps must lie in [0, 1), got {eps}")
    need = 1.0 - eps
    mass_p, mass_q = groups.mass_p, groups.mass_q
    taken_p = beta = 0.0
    for i in _ratio_order(groups):
        if taken_p >= need - 1e-15:
            break
        if mass_p[i] <= 0:
            continue
        fraction = min(1.0, (need - taken_p) / mass_p[i])
        taken_p += fraction * mass_p[i]
        beta += fraction * mass_q[i]
    return beta


def dh_eps_groups(groups: TypeGroups, eps: float) -> float:
    beta = min_type_ii(groups, eps)
    return math.inf if beta <= 0 else -math.log2(beta)


def classical_dh_eps(p: Sequence[float], q: Sequence[float], eps: float) -> float:
    return dh_eps_groups(type_groups(p, q, 1), eps)


def dh_eps_iid(p: Sequence[float], q: Sequence[float], eps: float, n: int) -> float:
    return dh_eps_groups(type_groups(p, q, n), eps)


def relative_entropy_classical(p: Sequence[float], q: Sequence[float]) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    used = p > 0
    if np.any(q[used] <= 0):
        return math.inf
    return float(np.sum(p[used] * np.log2(p[used] / q[used])))


def variance_classical(p: Sequence[float], q: Sequence[float]) -> float:
    p, q = np.asarray(p, dtype=float), np.asarray(q, dtype=float)
    used = p > 0
    if np.any(q[used] <= 0):
        raise DomainError("variance needs supp(p) inside supp(q)")
    llr = np.log2(p[used] / q[used])
    d = float(np.sum(p[used] * llr))
    return float(np.sum(p[used] * (llr - d) ** 2))


def dmax_smooth_groups(groups: TypeGroups, eps: float) -> SmoothingInterval:
    """Clipped candidates P′ ∝ min(P, λQ), exact on grouped outcomes."""
    mass_p, mass_q = groups.mass_p, groups.mass_q
    if np.any((mass_p > 0) & (mass_q <= 0)):
        return SmoothingInterval(math.inf, math.inf)
    used = mass_q > 0
    per_p = np.exp2(groups.log_p[used])
    per_q = np.exp2(groups.log_q[used])
    count = np.exp2(groups.log_count[used])
    ratio = per_p / per_q
    r_max = float(ratio.max())
    upper = math.log2(r_max)

    def candidate(lam: float):
        capped = np.minimum(per_p, lam * per_q)
        c = float(np.sum(count * capped))
        f = float(np.sum(count * np.sqrt(per_p * capped / c)))
        return math.sqrt(max(0.0, 1.0 - min(f, 1.0) ** 2)), math.log2(min(lam, r_max) / c)

    lo, hi = r_max * 1e-12, r_max
    if candidate(lo)[0] <= eps:
        hi = lo
    else:
        for _ in range(200):
            if hi - lo <= 1e-13 * r_max:
                break
            mid = 0.5 * (lo + hi)
            if candidate(mid)[0] <= eps:
                hi = mid
            else:
                lo = mid
    return SmoothingInterval(min(candidate(hi)[1], upper), upper)


# ---------------------------------------------------------------------------
# conditional n-fold quantities
# ---------------------------------------------------------------------------

def _x_types(weights: Sequence[float], n: int):
    """Sequence types of X^n with their probability mass."""
    weights = np.asarray(weights, dtype=float)
    lw = _log2_safe(weights)
    for counts in compositions(n, len(weights)):
        c = np.asarray(counts)
        log_mass = _weighted_log(c, lw)
        if log_mass == -math.inf:
            continue
        yield c, float(np.exp2(log2_multinomial(c) + log_mass))


def _block_families(joints: Sequence[np.ndarray], counts: np.ndarray):
    families = []
    for joint, k in zip(joints, counts):
        joint = np.asarray(joint, dtype=float)
        product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
        families.append((joint.reshape(-1), product.reshape(-1), int(k)))
    return families


def _greedy_union(values: List[float], masses: List[float], eps: float, maximize: bool) -> float:
    """
    Best value over unions S of type classes with mass(S) ≥ 1 − ε²
    (purified distance of the renormalised restriction ≤ ε); the value of a
    union is the min (maximize=True) or max (maximize=False) over its members.
    """
    need = 1.0 - eps * eps
    order = sorted(range(len(values)), key=lambda i: (-values[i] if maximize else values[i], i))
    total = 0.0
    for i in order:
        total += masses[i]
        if total >= need - 1e-12:
            return values[i]
    return values[order[-1]]


def cond_i_h_eps_iid(weights: Sequence[float], joints: Sequence[np.ndarray], eps: float, n: int) -> float:
    """
    I_H^ε(A^n;B^n|X^n) of the n-fold product of a commuting CQQ state.

    Args:
        weights: p(x)
        joints: per-x joint distributions p_x(a, b) as 2-D arrays
        eps: error parameter
        n: blocklength

    Returns:
        bits
    """
    values, masses = [], []
    for counts, mass in _x_types(weights, n):
        values.append(dh_eps_groups(product_groups(_block_families(joints, counts)), eps))
        masses.append(mass)
    return _greedy_union(values, masses, eps, maximize=True)


def cond_i_max_smooth_iid(weights: Sequence[float], joints: Sequence[np.ndarray], eps: float,
                          n: int) -> SmoothingInterval:
    lowers, uppers, masses = [], [], []
    for counts, mass in _x_types(weights, n):
        interval = dmax_smooth_groups(product_groups(_block_families(joints, counts)), eps)
        lowers.append(interval.lower)
        uppers.append(interval.upper)
        masses.append(mass)
    return SmoothingInterval(
        _greedy_union(lowers, masses, eps, maximize=False),
        _greedy_union(uppers, masses, eps, maximize=False),
    )


def i_h_eps_iid(joint: np.ndarray, eps: float, n: int) -> float:
    """I_H^ε(A^n;B^n) for n copies of a joint distribution p(a, b)."""
    joint = np.asarray(joint, dtype=float)
    product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    return dh_eps_iid(joint.reshape(-1), product.reshape(-1), eps, n)


def mutual_information_classical(joint: np.ndarray) -> float:
    joint = np.asarray(joint, dtype=float)
    product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
    return relative_entropy_classical(joint.reshape(-1), product.reshape(-1))

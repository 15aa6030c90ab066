"""
Seeded property suites.

Each suite draws its instances from ``numpy.random.default_rng([seed, index])``
so the suites are independent of one another and of execution order. A check
records ``lhs - rhs`` of an inequality ``lhs <= rhs``; it is a violation when
that excess is above the suite tolerance. ``scale`` multiplies the instance
counts (1.0 is the full acceptance run).
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from oneshot_qcap.core import classical
from oneshot_qcap.core.channels import ChannelKind, build_joint_state, coherent_ensemble_state, standard_channel
from oneshot_qcap.core.divergences import (
    CQQState,
    SlackParams,
    binary_entropy,
    cond_i_h_eps,
    cond_i_max_smooth,
    conditional_mutual_information,
    dh_eps,
    dmax,
    i_max_alt_smooth,
    i_max_smooth,
    inv_gaussian_cdf,
    product_of_marginals,
    relative_entropy,
    second_order_dh,
)
from oneshot_qcap.core.document_protocol import WiretapDocument, load_wiretap
from oneshot_qcap.core.errors import DocumentError, PropertyViolation
from oneshot_qcap.core.protosim import (
    CodeSizes,
    convex_split_check,
    gentle_measurement_verify,
    hayashi_nagaoka_verify,
    privacy_error,
)
from oneshot_qcap.core.qmat import (
    SystemLabel,
    apply_channel,
    eigh,
    hermitize,
    identity_channel,
    inv_sqrt_on_support,
    purified_distance,
    purified_distance_arrays,
    trace_norm,
)
from oneshot_qcap.core.rates import (
    EncoderGrid,
    classical_information_point,
    classical_rates_iid,
    private_to_coherent_check,
    sweep_region,
)
from oneshot_qcap.core.sampling import (
    random_channel,
    random_contraction,
    random_contraction_batch,
    random_density,
    random_diagonal,
    random_psd,
    random_pure,
)
from oneshot_qcap.utils.logger import RunLogger

logger = logging.getLogger(__name__)

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures"
PROTOCOL_FIXTURES = ("dephasing.json", "amplitude_damping.json")
PROTOCOL_SIZES = ((2, 1, 1), (2, 2, 1), (2, 2, 2))

ANALYTIC_TOL = 1e-9
SMOOTHING_TOL = 1e-6
ORACLE_TOL = 1e-8


@dataclass(frozen=True)
class SuiteResult:
    name: str
    instances: int
    violations: int
    max_violation: float
    advisories: int = 0

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_row(self) -> Dict[str, object]:
        return {
            "suite": self.name,
            "instances": self.instances,
            "violations": self.violations,
            "max_violation": self.max_violation,
            "passed": self.passed,
            "advisories": self.advisories,
        }


class _Tally:
    """Running count of checks for one suite."""

    def __init__(self, name: str):
        self.name = name
        self.instances = 0
        self.violations = 0
        self.max_violation = 0.0
        self.advisories = 0

    def check(self, lhs: float, rhs: float, tol: float, what: str = ""):
        """Record the inequality lhs <= rhs + tol."""
        if math.isinf(lhs) and math.isinf(rhs) and (lhs > 0) == (rhs > 0):
            excess = 0.0
        else:
            excess = lhs - rhs
        self.instances += 1
        if math.isnan(excess) or excess > tol:
            self.violations += 1
            logger.warning(f"{self.name}: {what or 'check'} violated, {lhs!r} > {rhs!r}")
        if not math.isnan(excess):
            self.max_violation = max(self.max_violation, excess)

    def close(self, a: float, b: float, tol: float, what: str = ""):
        """Record |a - b| <= tol."""
        self.check(abs(a - b), 0.0, tol, what)

    def report(self, lhs: float, rhs: float, tol: float, what: str = ""):
        """Log lhs > rhs + tol as an advisory; it does not fail the suite."""
        if lhs - rhs > tol:
            self.advisories += 1
            logger.warning(f"{self.name}: {what or 'trend'} not met, {lhs!r} > {rhs!r}")

    def fail(self, reason: str):
        self.instances += 1
        self.violations += 1
        logger.warning(f"{self.name}: {reason}")

    def result(self) -> SuiteResult:
        return SuiteResult(self.name, self.instances, self.violations, self.max_violation, self.advisories)


def _count(base: int, scale: float) -> int:
    return max(1, int(round(base * scale)))


def _qudit(name: str, dim: int) -> Tuple[SystemLabel, ...]:
    return (SystemLabel(name, dim),)


# ---------------------------------------------------------------------------
# Neyman–Pearson optimality
# ---------------------------------------------------------------------------

def _threshold_grid_best(r: np.ndarray, s: np.ndarray, eps: float, points: int) -> float:
    """Least type-II error over T = P(t) + p(1 - P(t)) with P(t) = {r - t s > 0}."""
    best = 1.0
    weights = np.linspace(0.0, 1.0, points)
    for t in np.geomspace(1e-3, 1e3, points):
        w, v = eigh(r - t * s)
        cols = v[:, w > 0]
        projector = cols @ cols.conj().T
        rest_r = 1.0 - float(np.real(np.trace(projector @ r)))
        beta_p = float(np.real(np.trace(projector @ s)))
        alpha = (1.0 - weights) * rest_r
        beta = beta_p + weights * (1.0 - beta_p)
        feasible = alpha <= eps
        if np.any(feasible):
            best = min(best, float(beta[feasible].min()))
    return best


def _random_tests_best(rng: np.random.Generator, r: np.ndarray, s: np.ndarray, eps: float, count: int) -> float:
    """Least type-II error over random contractions pushed onto the constraint."""
    tests = random_contraction_batch(rng, r.shape[0], count)
    alpha = 1.0 - np.real(np.einsum("nij,ji->n", tests, r))
    beta = np.real(np.einsum("nij,ji->n", tests, s))
    mix = np.where(alpha > eps, 1.0 - eps / np.maximum(alpha, 1e-300), 0.0)
    return float(np.min((1.0 - mix) * beta + mix))


def neyman_pearson_suite(rng: np.random.Generator, scale: float = 1.0) -> SuiteResult:
    tally = _Tally("neyman_pearson")
    for _ in range(_count(200, scale)):
        d = int(rng.integers(2, 5))
        rho = random_density(rng, _qudit("A", d))
        sigma = random_density(rng, _qudit("A", d))
        eps = float(rng.uniform(0.02, 0.5))
        _, test = dh_eps(rho, sigma, eps)
        tally.check(test.type_i, eps, ANALYTIC_TOL, "type-I constraint")
        tally.check(test.type_ii, _threshold_grid_best(rho.matrix, sigma.matrix, eps, 100), ANALYTIC_TOL,
                    "grid optimality")
        tally.check(test.type_ii, _random_tests_best(rng, rho.matrix, sigma.matrix, eps, 1000), ANALYTIC_TOL,
                    "random-test optimality")

    for _ in range(_count(20, scale)):
        d = int(rng.integers(2, 5))
        rho = random_diagonal(rng, _qudit("A", d))
        sigma = random_diagonal(rng, _qudit("A", d))
        eps = float(rng.uniform(0.02, 0.5))
        _, test = dh_eps(rho, sigma, eps)
        oracle = classical.classical_dh_eps(np.real(np.diag(rho.matrix)), np.real(np.diag(sigma.matrix)), eps)
        tally.close(test.type_ii, 2.0 ** (-oracle), ORACLE_TOL, "commuting oracle")
    return tally.result()


# ---------------------------------------------------------------------------
# inequality facts
# ---------------------------------------------------------------------------

def _random_cqq(rng: np.random.Generator, symbols: int = 2, d_a: int = 2, d_b: int = 2) -> CQQState:
    systems = (SystemLabel("A", d_a), SystemLabel("B", d_b))
    weights = rng.dirichlet(np.ones(symbols))
    blocks = {x: random_density(rng, systems) for x in range(symbols)}
    return CQQState(tuple(range(symbols)), weights, blocks, ("A",))


def inequality_suite(rng: np.random.Generator, scale: float = 1.0) -> SuiteResult:
    tally = _Tally("inequalities")
    for _ in range(_count(200, scale)):
        d = int(rng.integers(2, 4))
        rho = random_density(rng, _qudit("A", d))
        sigma = random_density(rng, _qudit("A", d))
        eps = float(rng.uniform(0.05, 0.5))
        d_rel = relative_entropy(rho, sigma)
        d_h, _ = dh_eps(rho, sigma, eps)

        tally.check(d_h, (d_rel + binary_entropy(eps)) / (1.0 - eps), ANALYTIC_TOL, "D_H vs D")
        tally.check(d_rel, dmax(rho, sigma), ANALYTIC_TOL, "D <= D_max")

        ch = random_channel(rng, d_in=d, d_b=2, d_e=2)
        rho_out = apply_channel(ch, rho, "B")
        sigma_out = apply_channel(ch, sigma, "B")
        tally.check(dmax(rho_out, sigma_out), dmax(rho, sigma), ANALYTIC_TOL, "D_max data processing")
        tally.check(dh_eps(rho_out, sigma_out, eps)[0], d_h, ANALYTIC_TOL, "D_H data processing")

        distance = trace_norm(rho.matrix - sigma.matrix)
        pd = purified_distance(rho, sigma)
        tally.check(0.5 * distance, pd, ANALYTIC_TOL, "trace distance <= purified distance")
        tally.check(pd, math.sqrt(distance), ANALYTIC_TOL, "purified distance <= sqrt(trace norm)")

    for _ in range(_count(200, scale)):
        state = _random_cqq(rng)
        eps = float(rng.uniform(0.05, 0.4))
        gamma = float(rng.uniform(0.01, 0.5 * eps))
        cmi = conditional_mutual_information(state)
        d_a = 2

        tally.check(cond_i_h_eps(state, eps), (cmi + binary_entropy(eps)) / (1.0 - eps), ANALYTIC_TOL,
                    "conditional I_H vs I(A;B|X)")
        continuity = 3.0 * eps * math.log2(d_a) + 2.0 * (1.0 + eps) * binary_entropy(eps / (1.0 + eps))
        tally.check(cmi - continuity, cond_i_max_smooth(state, eps).lower, SMOOTHING_TOL,
                    "conditional smooth I_max vs I(A;B|X)")

        block = state.blocks[0]
        tally.check(
            i_max_alt_smooth(block, eps, ("A",)).upper,
            i_max_smooth(block, eps - gamma, ("A",)).upper + math.log2(3.0 / (gamma * gamma)),
            ANALYTIC_TOL,
            "alternate smooth I_max bridge",
        )
    return tally.result()


# ---------------------------------------------------------------------------
# operator lemmas
# ---------------------------------------------------------------------------

def operator_lemma_suite(rng: np.random.Generator, scale: float = 1.0) -> SuiteResult:
    tally = _Tally("operator_lemmas")
    for _ in range(_count(1000, scale)):
        d = int(rng.integers(2, 7))
        systems = _qudit("B", d)
        S = random_contraction(rng, systems)
        T = random_psd(rng, systems, scale=float(rng.uniform(0.0, 2.0)))
        c = float(np.exp(rng.uniform(math.log(0.05), math.log(20.0))))
        tally.check(-hayashi_nagaoka_verify(S, T, c), 0.0, ANALYTIC_TOL, "Hayashi–Nagaoka")

    for _ in range(_count(1000, scale)):
        d = int(rng.integers(2, 7))
        systems = _qudit("B", d)
        try:
            lhs, rhs = gentle_measurement_verify(random_density(rng, systems), random_contraction(rng, systems))
        except PropertyViolation as e:
            tally.fail(str(e))
            continue
        tally.check(lhs, rhs, ANALYTIC_TOL, "gentle measurement")
    return tally.result()


# ---------------------------------------------------------------------------
# convex split
# ---------------------------------------------------------------------------

def convex_split_oracle(rho_ab: np.ndarray, d_a: int, d_b: int, K: int) -> float:
    """
    Purified distance of the convex-split state to ρ_A^{⊗K} ⊗ ρ_B, built
    directly with Kronecker products and an axis transpose.
    """
    full = rho_ab.reshape(d_a, d_b, d_a, d_b)
    rho_a = np.einsum("ibjb->ij", full)
    rho_b = np.einsum("aiaj->ij", full)
    dim = d_a ** K * d_b
    tau = np.zeros((dim, dim), dtype=complex)
    for k in range(K):
        # factors in order A_1 … (A_k skipped) … A_K, then A_k B
        term = np.ones((1, 1), dtype=complex)
        for _ in range(K - 1):
            term = np.kron(term, rho_a)
        term = np.kron(term, rho_ab)
        order = [j for j in range(K) if j != k] + [k]
        axes = [order.index(j) for j in range(K)] + [K]
        tensor = term.reshape([d_a] * K + [d_b] + [d_a] * K + [d_b])
        tensor = tensor.transpose(axes + [K + 1 + a for a in axes])
        tau += tensor.reshape(dim, dim)
    tau /= K

    product_state = np.ones((1, 1), dtype=complex)
    for _ in range(K):
        product_state = np.kron(product_state, rho_a)
    product_state = np.kron(product_state, rho_b)
    return purified_distance_arrays(hermitize(tau), hermitize(product_state))


def convex_split_suite(rng: np.random.Generator, scale: float = 1.0) -> SuiteResult:
    tally = _Tally("convex_split")
    systems = (SystemLabel("A", 2), SystemLabel("B", 2))
    for _ in range(_count(20, scale)):
        rho_ab = random_density(rng, systems)
        previous = math.inf
        for K in range(1, 7):
            result = convex_split_check(rho_ab, K)
            tally.report(result.distance, previous, ANALYTIC_TOL, f"distance nonincreasing at K={K}")
            previous = result.distance
            oracle = convex_split_oracle(rho_ab.matrix, 2, 2, K)
            tally.close(result.distance, oracle, 1e-10, f"convex split oracle K={K}")
            if result.bound < 1.0:
                tally.check(result.distance, result.bound, ANALYTIC_TOL, f"convex split bound K={K}")
    return tally.result()


# ---------------------------------------------------------------------------
# protocol end-to-end
# ---------------------------------------------------------------------------

def dense_public_error(doc: WiretapDocument, M: int, eps: float) -> float:
    """
    Public error of position-based decoding written out on X₁…X_M ⊗ B as
    one dense square-root measurement.
    """
    joint = build_joint_state(doc.ensemble, doc.channel)
    rho_xb = joint.xb_state()
    _, test = dh_eps(rho_xb, product_of_marginals(rho_xb, ("X",)), eps)
    nx, d_b = len(joint.x_alphabet), joint.b_label.dim
    p_x = joint.p_x
    blocks = [test.test.matrix[i * d_b:(i + 1) * d_b, i * d_b:(i + 1) * d_b] for i in range(nx)]
    outputs = [
        rho_xb.matrix[i * d_b:(i + 1) * d_b, i * d_b:(i + 1) * d_b] / p_x[i] if p_x[i] > 0 else None
        for i in range(nx)
    ]

    dim = nx ** M * d_b
    gammas = [np.zeros((dim, dim), dtype=complex) for _ in range(M)]
    states = [np.zeros((dim, dim), dtype=complex) for _ in range(M)]
    for flat in range(nx ** M):
        xs = np.unravel_index(flat, [nx] * M)
        weight = float(np.prod([p_x[x] for x in xs]))
        sl = slice(flat * d_b, (flat + 1) * d_b)
        for m in range(M):
            gammas[m][sl, sl] = blocks[xs[m]]
            if weight > 0:
                states[m][sl, sl] = weight * outputs[xs[m]]

    root = inv_sqrt_on_support(sum(gammas))
    success = sum(float(np.real(np.trace(root @ g @ root @ st))) for g, st in zip(gammas, states))
    return float(np.clip(1.0 - success / M, 0.0, 1.0))


def _load_fixtures(paths: Sequence[Path]) -> List[Tuple[str, WiretapDocument]]:
    docs = []
    for path in paths:
        doc = load_wiretap(path)
        if doc.ensemble is None:
            raise DocumentError(f"{path}: protocol fixtures need an ensemble")
        docs.append((Path(path).name, doc))
    return docs


def protocol_suite(rng: np.random.Generator, scale: float = 1.0,
                   fixtures: Optional[Sequence[Path]] = None) -> SuiteResult:
    tally = _Tally("protocol")
    s = SlackParams.default()
    paths = fixtures or [FIXTURE_DIR / name for name in PROTOCOL_FIXTURES]
    sizes_list = PROTOCOL_SIZES if scale >= 1.0 else PROTOCOL_SIZES[:2]
    for name, doc in _load_fixtures(paths):
        for M, L, K in sizes_list:
            sizes = CodeSizes(M, L, K)
            try:
                report = privacy_error(doc.ensemble, doc.channel, sizes, s)
            except PropertyViolation as e:
                tally.fail(f"{name} {sizes.to_dict()}: {e}")
                continue
            tally.check(report.public_error, report.public_bound, ANALYTIC_TOL, f"{name} public error")
            tally.check(report.privacy_error, report.privacy_bound, ANALYTIC_TOL, f"{name} privacy error")
            tally.check(report.privacy_error, report.bob_private_error + report.secrecy_distance, ANALYTIC_TOL,
                        f"{name} privacy triangle")
            oracle = dense_public_error(doc, M, s.eps - s.delta)
            tally.close(report.public_error, oracle, ANALYTIC_TOL, f"{name} dense public oracle")
    return tally.result()


# ---------------------------------------------------------------------------
# private-to-coherent identity
# ---------------------------------------------------------------------------

def coherent_identity_suite(rng: np.random.Generator, scale: float = 1.0) -> SuiteResult:
    tally = _Tally("private_to_coherent")
    systems = (SystemLabel("R", 2), SystemLabel("A", 2))
    for _ in range(_count(50, scale)):
        weights = rng.dirichlet(np.ones(2))
        purifications = [random_pure(rng, systems) for _ in range(2)]
        for kind in ChannelKind:
            ch = standard_channel(kind, float(rng.uniform(0.0, 1.0)))
            residual = private_to_coherent_check(coherent_ensemble_state(weights, purifications, ch))
            tally.check(residual, 0.0, ANALYTIC_TOL, f"{kind.value} identity")
    return tally.result()


# ---------------------------------------------------------------------------
# asymptotic trends
# ---------------------------------------------------------------------------

TREND_PAIRS = (
    ((0.5, 0.5), (0.9, 0.1)),
    ((0.7, 0.2, 0.1), (1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0)),
)
TREND_EPS = 0.1
RATE_BLOCKLENGTHS = (1, 2, 4, 6, 8, 10)


def binary_symmetric_table(p_xy: np.ndarray, bob_flip: float, eve_flip: float) -> np.ndarray:
    """p(x, y, b, e) with Y sent to Bob and Eve over independent binary symmetric channels."""
    p_xy = np.asarray(p_xy, dtype=float)
    table = np.zeros(p_xy.shape + (2, 2))
    for x in range(p_xy.shape[0]):
        for y in range(2):
            bob = np.full(2, bob_flip)
            bob[y] = 1.0 - bob_flip
            eve = np.full(2, eve_flip)
            eve[y] = 1.0 - eve_flip
            table[x, y] = p_xy[x, y] * np.outer(bob, eve)
    return table


TREND_TABLE = binary_symmetric_table(np.array([[0.4, 0.1], [0.2, 0.3]]), 0.1, 0.3)


def conditional_blocks(table: np.ndarray) -> Tuple[np.ndarray, List[np.ndarray]]:
    """p(x) and the per-x joints p(y, b | x) of a table p(x, y, b, e)."""
    p_x = table.sum(axis=(1, 2, 3))
    return p_x, [table[i].sum(axis=2) / w for i, w in enumerate(p_x)]


def _information_variance(p_x: np.ndarray, joints: Sequence[np.ndarray], info: float) -> float:
    total = 0.0
    for w, joint in zip(p_x, joints):
        product = np.outer(joint.sum(axis=1), joint.sum(axis=0))
        used = joint > 0
        density = np.log2(joint[used] / product[used])
        total += w * float(np.sum(joint[used] * (density - info) ** 2))
    return total


def conditional_trend(p_x: np.ndarray, joints: Sequence[np.ndarray], eps: float,
                      n: int) -> Tuple[float, float, float]:
    """
    (1/n)·I_H^ε(A^n;B^n|X^n) with its converse ceiling and its second-order
    envelope around I(A;B|X).
    """
    info = sum(w * classical.mutual_information_classical(j) for w, j in zip(p_x, joints) if w > 0)
    value = classical.cond_i_h_eps_iid(p_x, joints, eps, n) / n
    # excluded x-types carry mass at most ε², every I_type is nonnegative
    ceiling = (info / (1.0 - eps * eps) + binary_entropy(eps) / n) / (1.0 - eps)
    spread = abs(inv_gaussian_cdf(eps)) + abs(inv_gaussian_cdf(eps * eps))
    envelope = math.sqrt(_information_variance(p_x, joints, info) / n) * spread + 3.0 * math.log2(n + 1) / n
    return value, ceiling, envelope


def asymptotic_suite(rng: np.random.Generator, scale: float = 1.0) -> SuiteResult:
    tally = _Tally("asymptotic")
    top = classical.MAX_BLOCKLENGTH if scale >= 1.0 else 8
    for p, q in TREND_PAIRS:
        D = classical.relative_entropy_classical(p, q)
        V = classical.variance_classical(p, q)
        for n in range(4, top + 1):
            exact = classical.dh_eps_iid(p, q, TREND_EPS, n) / n
            expansion = second_order_dh(D, V, TREND_EPS, n) / n
            tally.check(abs(exact - expansion), 3.0 * math.log2(n + 1) / n, 0.0, f"second-order envelope n={n}")

    p_x, joints = conditional_blocks(TREND_TABLE)
    info = sum(w * classical.mutual_information_classical(j) for w, j in zip(p_x, joints))
    for n in range(1, top + 1):
        value, ceiling, envelope = conditional_trend(p_x, joints, TREND_EPS, n)
        tally.check(value, ceiling, ANALYTIC_TOL, f"conditional converse n={n}")
        tally.report(abs(value - info), envelope, 0.0, f"conditional envelope n={n}")

    s = SlackParams.default()
    ds = classical_information_point(TREND_TABLE)
    previous = None
    for n in (m for m in RATE_BLOCKLENGTHS if m <= top):
        pair = classical_rates_iid(TREND_TABLE, s, n)
        tally.check(pair.public_rate, ds.public_rate, ANALYTIC_TOL, f"public rate below asymptote n={n}")
        tally.check(pair.private_rate, ds.private_rate, ANALYTIC_TOL, f"private rate below asymptote n={n}")
        if previous is not None:
            tally.report(previous.public_rate, pair.public_rate, ANALYTIC_TOL, f"public rate rising n={n}")
            tally.report(previous.private_rate, pair.private_rate, ANALYTIC_TOL, f"private rate rising n={n}")
        previous = pair

    resolution = 1e-6
    samples = sweep_region(identity_channel(2), EncoderGrid.regular(3), SlackParams.default(),
                           evaluate_one_shot=False)
    points = [smp.asymptotic.as_tuple() for smp in samples]
    for corner in ((1.0, 0.0), (0.0, 1.0)):
        gap = min(max(abs(r - corner[0]), abs(R - corner[1])) for r, R in points)
        tally.check(gap, 0.0, resolution, f"identity-channel corner {corner}")
    return tally.result()


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------

SuiteFn = Callable[..., SuiteResult]

SUITES: Dict[str, SuiteFn] = {
    "neyman_pearson": neyman_pearson_suite,
    "inequalities": inequality_suite,
    "operator_lemmas": operator_lemma_suite,
    "convex_split": convex_split_suite,
    "protocol": protocol_suite,
    "private_to_coherent": coherent_identity_suite,
    "asymptotic": asymptotic_suite,
}


def run_suites(seed: int = 0, scale: float = 1.0, names: Optional[Sequence[str]] = None,
               fixtures: Optional[Sequence[Union[str, Path]]] = None,
               run_logger: Optional[RunLogger] = None) -> List[SuiteResult]:
    """
    Run the named suites (all by default) in registry order.

    Raises:
        KeyError: for an unknown suite name
        InputError: if a protocol fixture does not load
    """
    selected = list(SUITES) if names is None else list(names)
    for name in selected:
        if name not in SUITES:
            raise KeyError(f"unknown suite {name!r}")
    fixture_paths = [Path(p) for p in fixtures] if fixtures else None
    if fixture_paths:
        # validate up front so a broken document fails before any suite runs
        _load_fixtures(fixture_paths)

    results = []
    for index, name in enumerate(SUITES):
        if name not in selected:
            continue
        rng = np.random.default_rng([seed, index])
        if name == "protocol":
            result = protocol_suite(rng, scale, fixture_paths)
        else:
            result = SUITES[name](rng, scale)
        if run_logger is not None:
            run_logger.suite_result(result.name, result.instances, result.violations, result.max_violation)
        results.append(result)
    return results

"""
Exact small-instance simulation of the public/private coding protocol.

Alice, Bob and Eve share M copies of Σ_x p(x)|x><x|_X ⊗ |x><x|_X′ ⊗
(Σ_y p(y|x) ρ_A^{x,y} ⊗ |y><y|_Y ⊗ |y><y|_Y′)^{⊗LK}. Every register except
the transmitted A slot is classical, so the shared state is kept as weighted
classical branches and only the channel output of one slot is ever a matrix.

Bob decodes the public message with a square-root measurement built from
Neyman–Pearson tests on ρ_XB, then, on the post-measurement state, the
(private message, key) pair with a second square-root measurement built
from per-x tests on σ_YB^x.
"""

import logging
import math
from dataclasses import asdict, dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, Hashable, List, Optional, Sequence, Tuple, Union

import numpy as np

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.channels import X_REGISTER, CQWiretapEnsemble, JointWiretapState, build_joint_state
from oneshot_qcap.core.divergences import (
    OptimalTest,
    SlackParams,
    cond_i_h_eps,
    cond_i_max_alt_smooth,
    dh_eps,
    i_max,
    i_max_alt_smooth,
    product_of_marginals,
)
from oneshot_qcap.core.errors import (
    BudgetExceededError,
    DimensionError,
    DomainError,
    PropertyViolation,
)
from oneshot_qcap.core.qmat import (
    SUPPORT_TOL,
    DensityOperator,
    HermitianOperator,
    Keep,
    MeasurementOperator,
    SystemLabel,
    WiretapChannel,
    apply_channel,
    eigh,
    hermitize,
    inv_sqrt_on_support,
    partial_trace,
    permute,
    purified_distance,
    sqrt_psd,
    tensor_all,
    trace_norm,
)
from oneshot_qcap.core.rates import decoding_penalty, public_hypothesis_rate
from oneshot_qcap.utils.workers import parallel_map

logger = logging.getLogger(__name__)

PERMUTATION_TOL = 1e-10
COMPLETENESS_TOL = 1e-9
BOUND_TOL = 1e-9
PRIVACY_TOL = 1e-6


@dataclass(frozen=True)
class CodeSizes:
    """|𝓜|, |𝓛| and the local key size |𝓚|."""
    M: int
    L: int
    K: int

    def __post_init__(self):
        for name in ("M", "L", "K"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise DomainError(f"code size {name} must be a positive integer, got {value}")
            object.__setattr__(self, name, int(value))

    @property
    def slots(self) -> int:
        """A-slots per public copy."""
        return self.L * self.K

    def to_dict(self) -> Dict[str, int]:
        return {"M": self.M, "L": self.L, "K": self.K}


# ---------------------------------------------------------------------------
# shared state
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Branch:
    """One classical configuration: x per copy, y per (copy, ℓ, k) slot."""
    xs: Tuple[Hashable, ...]
    ys: Tuple[Hashable, ...]
    weight: float


@dataclass(frozen=True, eq=False)
class SharedState:
    ensemble: CQWiretapEnsemble
    sizes: CodeSizes
    branches: Tuple[Branch, ...]

    def slot(self, m: int, l: int, k: int) -> int:
        return (m * self.sizes.L + l) * self.sizes.K + k

    def y(self, branch: Branch, m: int, l: int, k: int) -> Hashable:
        return branch.ys[self.slot(m, l, k)]

    @property
    def branch_count(self) -> int:
        return len(self.branches)

    @property
    def dense_dimension(self) -> int:
        """Dimension of the same state written as one dense matrix."""
        nx, ny = len(self.ensemble.x_alphabet), len(self.ensemble.y_alphabet)
        per_slot = self.ensemble.input_dim * ny * ny
        return (nx * nx * per_slot ** self.sizes.slots) ** self.sizes.M

    def x_marginal(self, m: int) -> np.ndarray:
        out = np.zeros(len(self.ensemble.x_alphabet))
        for b in self.branches:
            out[self.ensemble.x_alphabet.index(b.xs[m])] += b.weight
        return out

    def y_marginal(self, m: int, l: int, k: int) -> np.ndarray:
        out = np.zeros(len(self.ensemble.y_alphabet))
        for b in self.branches:
            out[self.ensemble.y_alphabet.index(self.y(b, m, l, k))] += b.weight
        return out

    def to_density(self) -> DensityOperator:
        """
        Dense ρ on X₁X′₁(A Y Y′)^{LK}… in copy order.

        Raises:
            BudgetExceededError: if the dense dimension exceeds the cap
        """
        cap = QcapConfig.dim_cap()
        if self.dense_dimension > cap:
            raise BudgetExceededError(f"dense shared state needs dimension {self.dense_dimension}, cap is {cap}")
        ens = self.ensemble
        nx, ny, da = len(ens.x_alphabet), len(ens.y_alphabet), ens.input_dim
        systems: List[SystemLabel] = []
        for m in range(self.sizes.M):
            systems += [SystemLabel(f"X{m}", nx), SystemLabel(f"Xp{m}", nx)]
            for s in range(self.sizes.slots):
                systems += [SystemLabel(f"A{m}_{s}", da), SystemLabel(f"Y{m}_{s}", ny), SystemLabel(f"Yp{m}_{s}", ny)]

        def ket(alphabet, value):
            e = np.zeros((len(alphabet), len(alphabet)))
            i = alphabet.index(value)
            e[i, i] = 1.0
            return e

        total = np.zeros((self.dense_dimension, self.dense_dimension), dtype=complex)
        for b in self.branches:
            factors = []
            for m in range(self.sizes.M):
                factors += [ket(ens.x_alphabet, b.xs[m])] * 2
                for s in range(self.sizes.slots):
                    y = b.ys[m * self.sizes.slots + s]
                    factors += [ens.signal(b.xs[m], y).matrix, ket(ens.y_alphabet, y), ket(ens.y_alphabet, y)]
            term = factors[0]
            for f in factors[1:]:
                term = np.kron(term, f)
            total += b.weight * term
        return DensityOperator(tuple(systems), hermitize(total))


def _conditional_support(ens: CQWiretapEnsemble):
    """[(x, p(x), [(y, p(y|x)), …]), …] over the support of p."""
    out = []
    for i, x in enumerate(ens.x_alphabet):
        px = float(ens.p_x[i])
        if px <= 0:
            continue
        cond = ens.p_y_given_x(x)
        out.append((x, px, [(y, float(w)) for y, w in zip(ens.y_alphabet, cond) if w > 0]))
    return out


def _check_branch_budget(count: int, what: str):
    cap = QcapConfig.branch_cap()
    if count > cap:
        raise BudgetExceededError(f"{what} needs {count} classical branches, cap is {cap}")


def build_shared_state(ens: CQWiretapEnsemble, sizes: CodeSizes) -> SharedState:
    """
    Enumerate the classical branches of the shared state.

    Raises:
        BudgetExceededError: if the branch count exceeds the branch cap
    """
    support = _conditional_support(ens)
    count = sum(len(ys) ** sizes.slots for _, _, ys in support) ** sizes.M
    _check_branch_budget(count, "shared state")

    per_copy = []
    for x, px, ys in support:
        for combo in product(ys, repeat=sizes.slots):
            per_copy.append((x, tuple(y for y, _ in combo), px * float(np.prod([w for _, w in combo]))))

    branches = []
    for copies in product(per_copy, repeat=sizes.M):
        xs = tuple(c[0] for c in copies)
        ys = tuple(y for c in copies for y in c[1])
        branches.append(Branch(xs, ys, float(np.prod([c[2] for c in copies]))))
    logger.debug(f"Shared state with {len(branches)} branches for sizes {sizes.to_dict()}")
    return SharedState(ens, sizes, tuple(branches))


# ---------------------------------------------------------------------------
# square-root measurements
# ---------------------------------------------------------------------------

def _srm_arrays(positives: Sequence[np.ndarray]) -> List[np.ndarray]:
    s = sum(positives)
    root = inv_sqrt_on_support(s)
    return [hermitize(root @ g @ root) for g in positives]


def square_root_measurement(positives: Sequence[HermitianOperator]) -> List[MeasurementOperator]:
    """
    Λ_i = S^{−1/2} Γ_i S^{−1/2} with S = Σ Γ_i (inverse on supp S), followed
    by the completion element 1 − Σ Λ_i.

    Raises:
        DomainError: if the list is empty, an element is not PSD or all vanish
    """
    if not positives:
        raise DomainError("square-root measurement needs at least one element")
    systems = positives[0].systems
    for g in positives:
        if g.dims != positives[0].dims:
            raise DimensionError("square-root measurement elements differ in dimension")
        if g.eigenvalues()[0] < -SUPPORT_TOL:
            raise DomainError("square-root measurement elements must be positive semidefinite")
    mats = [g.matrix for g in positives]
    if max(float(np.max(np.abs(m))) for m in mats) <= SUPPORT_TOL:
        raise DomainError("square-root measurement of all-zero elements")
    elements = _srm_arrays(mats)
    completion = hermitize(np.eye(mats[0].shape[0]) - sum(elements))
    out = [MeasurementOperator(systems, e) for e in elements + [completion]]
    deviation = float(np.max(np.abs(sum(e.matrix for e in out) - np.eye(mats[0].shape[0]))))
    if deviation > COMPLETENESS_TOL:
        raise PropertyViolation(f"measurement does not sum to identity (deviation {deviation:.2e})")
    return out


# ---------------------------------------------------------------------------
# decoding tests
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class _PublicTest:
    test: OptimalTest
    blocks: Dict[Hashable, np.ndarray]
    outputs: Dict[Hashable, np.ndarray]
    rate: float


def _public_test(joint: JointWiretapState, eps: float) -> _PublicTest:
    """Neyman–Pearson test for ρ_XB against ρ_X ⊗ ρ_B, split into its x-blocks."""
    rho_xb = joint.xb_state()
    value, test = dh_eps(rho_xb, product_of_marginals(rho_xb, (X_REGISTER,)), eps)
    d_b = joint.b_label.dim
    blocks, outputs = {}, {}
    p_x = joint.p_x
    for i, x in enumerate(joint.x_alphabet):
        sl = slice(i * d_b, (i + 1) * d_b)
        blocks[x] = hermitize(test.test.matrix[sl, sl])
        if p_x[i] > 0:
            outputs[x] = rho_xb.matrix[sl, sl] / p_x[i]
    return _PublicTest(test, blocks, outputs, value)


def _private_tests(joint: JointWiretapState, eps: float) -> Dict[Hashable, Dict[Hashable, np.ndarray]]:
    """Per-x tests Z^x for σ_YB^x against σ_Y^x ⊗ σ_B^x, split into y-blocks."""
    state = joint.conditional_state(joint.b_label.name)
    d_b = joint.b_label.dim
    tests = {}
    for x in state.alphabet:
        block = state.blocks[x]
        _, test = dh_eps(block, product_of_marginals(block, state.a_systems), eps)
        tests[x] = {
            y: hermitize(test.test.matrix[j * d_b:(j + 1) * d_b, j * d_b:(j + 1) * d_b])
            for j, y in enumerate(joint.y_alphabet)
        }
    return tests


def hayashi_nagaoka_constant(s: SlackParams) -> float:
    """c = δ/(2ε − δ)."""
    return s.delta / (2.0 * s.eps - s.delta)


def hayashi_nagaoka_bound(alpha: float, beta: float, competitors: int, c: float) -> float:
    """(1 + c)α + (2 + c + 1/c)·competitors·β."""
    return (1.0 + c) * alpha + (2.0 + c + 1.0 / c) * competitors * beta


# ---------------------------------------------------------------------------
# public message
# ---------------------------------------------------------------------------

class DecodeMode(Enum):
    EXACT = "exact"
    REDUCED = "reduced"


def _codebooks(joint: JointWiretapState, M: int) -> List[Tuple[Tuple[Hashable, ...], float]]:
    support = [(x, float(w)) for x, w in zip(joint.x_alphabet, joint.p_x) if w > 0]
    _check_branch_budget(len(support) ** M, "public codebook enumeration")
    return [
        (tuple(x for x, _ in combo), float(np.prod([w for _, w in combo])))
        for combo in product(support, repeat=M)
    ]


def _public_success(tests: _PublicTest, codebook: Tuple[Hashable, ...]) -> np.ndarray:
    """Tr{Λ^m ρ_B^{x_m}} for every m of one codebook."""
    if len(codebook) == 1:
        return np.ones(1)
    povm = _srm_arrays([tests.blocks[x] for x in codebook])
    return np.array([
        float(np.real(np.trace(povm[m] @ tests.outputs[x]))) for m, x in enumerate(codebook)
    ])


def public_decode_error(ens: CQWiretapEnsemble, ch: WiretapChannel, sizes: CodeSizes,
                        mode: Union[DecodeMode, str] = DecodeMode.EXACT,
                        slacks: Optional[SlackParams] = None, c: Optional[float] = None) -> float:
    """
    Average public-message error of position-based decoding.

    Args:
        ens: encoder ensemble
        ch: wiretap channel
        sizes: code sizes (only M matters here)
        mode: ``exact`` runs the square-root measurement on every codebook;
            ``reduced`` evaluates the Hayashi–Nagaoka bound at the optimal test
        slacks: the tester works at error ε − δ
        c: Hayashi–Nagaoka constant, δ/(2ε − δ) by default

    Raises:
        BudgetExceededError: if exact enumeration exceeds the branch cap
        PropertyViolation: if the per-message errors differ
    """
    mode = DecodeMode(mode)
    s = slacks or SlackParams.default()
    joint = build_joint_state(ens, ch)
    tests = _public_test(joint, s.eps - s.delta)

    if mode is DecodeMode.REDUCED:
        c = hayashi_nagaoka_constant(s) if c is None else c
        return hayashi_nagaoka_bound(tests.test.type_i, tests.test.type_ii, sizes.M - 1, c)

    if sizes.M == 1:
        return 0.0
    codebooks = _codebooks(joint, sizes.M)
    successes = parallel_map(lambda cb: cb[1] * _public_success(tests, cb[0]), codebooks)
    per_message = 1.0 - np.sum(successes, axis=0)
    spread = float(per_message.max() - per_message.min())
    if spread > PERMUTATION_TOL:
        raise PropertyViolation(f"public errors differ across messages by {spread:.2e}")
    return float(np.clip(per_message.mean(), 0.0, 1.0))


@dataclass(frozen=True)
class CodebookTable:
    """Public error of every deterministic codebook x₁…x_M with its probability."""
    codebooks: Tuple[Tuple[Hashable, ...], ...]
    weights: Tuple[float, ...]
    errors: Tuple[float, ...]

    @property
    def average(self) -> float:
        return float(np.dot(self.weights, self.errors))


def public_codebook_table(ens: CQWiretapEnsemble, ch: WiretapChannel, sizes: CodeSizes,
                          s: Optional[SlackParams] = None) -> CodebookTable:
    s = s or SlackParams.default()
    joint = build_joint_state(ens, ch)
    tests = _public_test(joint, s.eps - s.delta)
    codebooks = _codebooks(joint, sizes.M)
    errors = parallel_map(lambda cb: float(1.0 - _public_success(tests, cb[0]).mean()), codebooks)
    return CodebookTable(tuple(cb for cb, _ in codebooks), tuple(w for _, w in codebooks), tuple(errors))


@dataclass(frozen=True)
class DerandomizedCode:
    index: int
    error: float
    average: float


def derandomize_search(errors: Sequence[float], weights: Optional[Sequence[float]] = None) -> DerandomizedCode:
    """
    Pick the deterministic codebook with the smallest error (smallest index
    on ties); its error never exceeds the ensemble average.

    Raises:
        DomainError: on an empty table or weights that are not a distribution
    """
    errors = np.asarray(errors, dtype=float).reshape(-1)
    if errors.size == 0:
        raise DomainError("derandomization needs a nonempty error table")
    if weights is None:
        weights = np.full(errors.size, 1.0 / errors.size)
    weights = np.asarray(weights, dtype=float).reshape(-1)
    if weights.shape != errors.shape or np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-10:
        raise DomainError("codebook weights must be a distribution over the table")
    index = int(np.argmin(errors))
    average = float(np.dot(weights, errors))
    if errors[index] > average + BOUND_TOL:
        raise PropertyViolation(f"best codebook error {errors[index]} exceeds the average {average}")
    return DerandomizedCode(index, float(errors[index]), average)


# ---------------------------------------------------------------------------
# private message and secrecy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrivacyRow:
    """Exact figures for one (m, ℓ), averaged over the key."""
    m: int
    l: int
    bob_error: float
    secrecy: float
    secrecy_product: float
    privacy_error: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class ProtocolReport:
    sizes: CodeSizes
    slacks: SlackParams
    public_error: float
    public_bound: float
    public_theorem_bound: float
    bob_private_error: float
    secrecy_distance: float
    secrecy_distance_product: float
    privacy_error: float
    privacy_bound: float
    size_conditions_met: bool
    rows: Tuple[PrivacyRow, ...] = field(default_factory=tuple)

    @property
    def public_pass(self) -> bool:
        return self.public_error <= self.public_bound + BOUND_TOL

    @property
    def privacy_pass(self) -> bool:
        return self.privacy_error <= self.privacy_bound + PRIVACY_TOL

    def to_dict(self) -> Dict[str, object]:
        return {
            "sizes": self.sizes.to_dict(),
            "slacks": self.slacks.to_dict(),
            "public_error": self.public_error,
            "public_bound": self.public_bound,
            "public_theorem_bound": self.public_theorem_bound,
            "bob_private_error": self.bob_private_error,
            "secrecy_distance": self.secrecy_distance,
            "secrecy_distance_product": self.secrecy_distance_product,
            "privacy_error": self.privacy_error,
            "privacy_bound": self.privacy_bound,
            "size_conditions_met": self.size_conditions_met,
            "public_pass": self.public_pass,
            "privacy_pass": self.privacy_pass,
            "rows": [r.to_dict() for r in self.rows],
        }


def _effective_povm(shared: SharedState, branch: Branch, public: _PublicTest,
                    private: Dict[Hashable, Dict[Hashable, np.ndarray]], d_b: int) -> List[np.ndarray]:
    """
    Bob's two-stage decoder collapsed to one POVM on B: element ℓ̂ is
    Σ_m̂ √Λ^m̂ P^{m̂}_ℓ̂ √Λ^m̂. Failures are left out, so the elements sum to ≤ 1.
    """
    sizes = shared.sizes
    identity = np.eye(d_b)
    if sizes.M == 1:
        first = [identity]
    else:
        first = _srm_arrays([public.blocks[x] for x in branch.xs])
    out = [np.zeros((d_b, d_b), dtype=complex) for _ in range(sizes.L)]
    for m_hat, lam in enumerate(first):
        root = sqrt_psd(lam)
        if sizes.L == 1:
            out[0] += hermitize(root @ root)
            continue
        x = branch.xs[m_hat]
        z = private[x]
        second = _srm_arrays([
            z[shared.y(branch, m_hat, l, k)] for l in range(sizes.L) for k in range(sizes.K)
        ])
        for l in range(sizes.L):
            element = sum(second[l * sizes.K + k] for k in range(sizes.K))
            out[l] += hermitize(root @ element @ root)
    return out


def _eve_reduce(povm_element: np.ndarray, block_be: np.ndarray, d_b: int, d_e: int) -> np.ndarray:
    """Tr_B[(Q ⊗ 1) ρ_BE]."""
    full = np.kron(povm_element, np.eye(d_e)) @ block_be
    return np.einsum("ijik->jk", full.reshape(d_b, d_e, d_b, d_e))


def _privacy_row(shared: SharedState, joint: JointWiretapState, povms: List[List[np.ndarray]],
                 eve_product: Dict[Hashable, np.ndarray], m: int, l: int) -> PrivacyRow:
    sizes = shared.sizes
    d_b, d_e = joint.b_label.dim, joint.e_label.dim
    bob_error = secrecy = secrecy_product = merged = 0.0
    for b, povm in zip(shared.branches, povms):
        x = b.xs[m]
        blocks = [joint.blocks[(x, shared.y(b, m, l, k))].matrix for k in range(sizes.K)]
        eve = sum(_eve_reduce(np.eye(d_b), blk, d_b, d_e) for blk in blocks) / sizes.K
        reference = sum(
            _eve_reduce(np.eye(d_b), joint.blocks[(x, shared.y(b, m, l2, k))].matrix, d_b, d_e)
            for l2 in range(sizes.L) for k in range(sizes.K)
        ) / sizes.slots
        correct = sum(_eve_reduce(povm[l], blk, d_b, d_e) for blk in blocks) / sizes.K
        p_correct = 1.0 if sizes.L == 1 else float(np.real(np.trace(correct)))
        if sizes.L == 1:
            correct = eve

        bob_error += b.weight * (1.0 - p_correct)
        secrecy += b.weight * 0.5 * trace_norm(eve - reference)
        secrecy_product += b.weight * 0.5 * trace_norm(eve - eve_product[x])
        merged += b.weight * 0.5 * (trace_norm(correct - reference) + (1.0 - p_correct))
    clip = lambda v: float(np.clip(v, 0.0, 1.0))  # noqa: E731
    return PrivacyRow(m, l, clip(bob_error), clip(secrecy), clip(secrecy_product), clip(merged))


def _eve_product_states(ens: CQWiretapEnsemble, ch: WiretapChannel) -> Dict[Hashable, np.ndarray]:
    """N_E(ω^x) for every x in the support."""
    out = {}
    for i, x in enumerate(ens.x_alphabet):
        if ens.p_x[i] > 0:
            out[x] = apply_channel(ch, ens.averaged_signal(x), Keep.E).matrix
    return out


def privacy_error(ens: CQWiretapEnsemble, ch: WiretapChannel, sizes: CodeSizes,
                  s: Optional[SlackParams] = None) -> ProtocolReport:
    """
    Exact public error, private error and secrecy of the randomness-assisted code.

    For each (m, ℓ), with the key averaged out:
      - Bob's private error Pr[ℓ̂ ≠ ℓ] after successive decoding;
      - Eve's secrecy distance ½‖σ_E^{m,ℓ} − σ̂‖₁ against the exact average over all (ℓ, k)
        and against the product reference N_E(ω^{x_m});
      - the merged privacy error ½‖D²(σ^{m,ℓ}) − |ℓ><ℓ| ⊗ σ̂‖₁.

    Raises:
        BudgetExceededError: if the branch enumeration exceeds the cap
    """
    s = s or SlackParams.default()
    joint = build_joint_state(ens, ch)
    shared = build_shared_state(ens, sizes)
    public = _public_test(joint, s.eps - s.delta)
    private = _private_tests(joint, s.eps - s.delta) if sizes.L > 1 else {}
    d_b = joint.b_label.dim

    povms = parallel_map(lambda b: _effective_povm(shared, b, public, private, d_b), list(shared.branches))
    eve_product = _eve_product_states(ens, ch)
    pairs = [(m, l) for m in range(sizes.M) for l in range(sizes.L)]
    rows = parallel_map(lambda ml: _privacy_row(shared, joint, povms, eve_product, *ml), pairs)

    public_error = public_decode_error(ens, ch, sizes, DecodeMode.EXACT, s)
    c = hayashi_nagaoka_constant(s)
    public_bound = hayashi_nagaoka_bound(public.test.type_i, public.test.type_ii, sizes.M - 1, c)
    theorem_bound = hayashi_nagaoka_bound(s.eps - s.delta, 2.0 ** (-public.rate), sizes.M, c)
    root = math.sqrt(s.eps)
    report = ProtocolReport(
        sizes=sizes,
        slacks=s,
        public_error=public_error,
        public_bound=public_bound,
        public_theorem_bound=theorem_bound,
        bob_private_error=float(np.mean([r.bob_error for r in rows])),
        secrecy_distance=float(np.mean([r.secrecy for r in rows])),
        secrecy_distance_product=float(np.mean([r.secrecy_product for r in rows])),
        privacy_error=float(np.mean([r.privacy_error for r in rows])),
        privacy_bound=2.0 * (s.eps + root) + math.sqrt(s.eps_prime),
        size_conditions_met=size_conditions_met(joint, sizes, s),
        rows=tuple(rows),
    )
    if not report.public_pass:
        raise PropertyViolation(
            f"exact public error {report.public_error} exceeds its Hayashi–Nagaoka bound {report.public_bound}"
        )
    logger.info(f"Protocol {sizes.to_dict()}: P_e={report.public_error:.6g} P_priv={report.privacy_error:.6g}")
    return report


# ---------------------------------------------------------------------------
# code sizes from the achievability formulas
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremSizes:
    log_m: float
    log_lk: float
    log_k: float

    @property
    def sizes(self) -> CodeSizes:
        """M and L·K floored, K rounded up; each at least 1."""
        k = max(1, math.ceil(2.0 ** self.log_k)) if math.isfinite(self.log_k) else 1
        m = max(1, math.floor(2.0 ** self.log_m)) if self.log_m > 0 else 1
        lk = math.floor(2.0 ** self.log_lk) if self.log_lk > 0 else 1
        return CodeSizes(m, max(1, lk // k), k)

    @property
    def feasible(self) -> bool:
        return self.log_m >= 0 and self.log_lk - self.log_k >= 0


def theorem_code_sizes(state: JointWiretapState, s: SlackParams) -> TheoremSizes:
    """
    log|𝓜| = I_H^{ε−δ}(X;B) − log₂(4ε/δ²)
    log|𝓛||𝓚| = I_H^{ε−δ}(Y;B|X) − log₂(4ε/δ²)
    log|𝓚| = Ĩ_max^{√ε′−δ′}(Y;E|X) + 2log₂(1/δ′)
    """
    penalty = decoding_penalty(s)
    log_m = public_hypothesis_rate(state, s) - penalty
    log_lk = cond_i_h_eps(state.conditional_state(state.b_label.name), s.eps - s.delta) - penalty
    eve = cond_i_max_alt_smooth(state.conditional_state(state.e_label.name),
                                math.sqrt(s.eps_prime) - s.delta_prime).upper
    return TheoremSizes(log_m, log_lk, eve + 2.0 * math.log2(1.0 / s.delta_prime))


def size_conditions_met(state: JointWiretapState, sizes: CodeSizes, s: SlackParams) -> bool:
    bounds = theorem_code_sizes(state, s)
    return (
        math.log2(sizes.M) <= bounds.log_m + 1e-12
        and math.log2(sizes.slots) <= bounds.log_lk + 1e-12
        and math.log2(sizes.K) >= bounds.log_k - 1e-12
    )


# ---------------------------------------------------------------------------
# lemma checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConvexSplitResult:
    K: int
    distance: float
    bound: float
    i_max: float


def convex_split_state(rho_ab: DensityOperator, K: int) -> Tuple[DensityOperator, DensityOperator]:
    """
    τ = (1/K) Σ_k ρ_{A₁} ⊗ … ⊗ ρ_{A_k B} ⊗ … ⊗ ρ_{A_K} and ρ_A^{⊗K} ⊗ ρ_B,
    both on A₁…A_K B.
    """
    if len(rho_ab.systems) != 2:
        raise DimensionError("convex split needs a bipartite state ρ_AB")
    if K < 1:
        raise DomainError(f"K must be positive, got {K}")
    a, b = rho_ab.systems
    needed = a.dim ** K * b.dim
    cap = QcapConfig.dim_cap()
    if needed > cap:
        raise BudgetExceededError(f"convex split with K={K} needs dimension {needed}, cap is {cap}")

    rho_a = partial_trace(rho_ab, [b.name])
    rho_b = partial_trace(rho_ab, [a.name])
    slots = [SystemLabel(f"{a.name}{k + 1}", a.dim) for k in range(K)]
    order = [s.name for s in slots] + [b.name]

    total = np.zeros((needed, needed), dtype=complex)
    for k in range(K):
        factors = [rho_a.relabel((slots[j],)) for j in range(K) if j != k]
        factors.append(rho_ab.relabel((slots[k], b)))
        total += permute(tensor_all(factors), order).matrix
    tau = DensityOperator(tuple(slots) + (b,), hermitize(total / K))
    product_state = tensor_all([rho_a.relabel((s,)) for s in slots] + [rho_b])
    return tau, product_state


_INVERSION_STEPS = 60


def _convex_split_bound(rho_ab: DensityOperator, K: int, delta: float) -> float:
    """
    Smallest √ε with log₂K ≥ Ĩ_max^{√ε−δ}(B;A) + 2log₂(1/δ), read at the upper
    smoothing endpoint; 1 when no √ε ≤ 1 satisfies it.
    """
    b_first = (rho_ab.systems[1].name,)
    budget = math.log2(K) - 2.0 * math.log2(1.0 / delta)
    if budget < 0.0:
        # the upper endpoint is a D_max between normalised states, never negative
        return 1.0

    def feasible(root_eps: float) -> bool:
        radius = root_eps - delta
        if radius <= 0.0:
            return i_max(rho_ab, b_first) <= budget
        return i_max_alt_smooth(rho_ab, min(radius, 1.0 - 1e-12), b_first).upper <= budget

    if not feasible(1.0):
        return 1.0
    if feasible(delta):
        return delta
    lo, hi = delta, 1.0
    for _ in range(_INVERSION_STEPS):
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
    return hi


def convex_split_check(rho_ab: DensityOperator, K: int,
                       slacks: Optional[SlackParams] = None) -> ConvexSplitResult:
    """
    Exact P(τ, ρ_A^{⊗K} ⊗ ρ_B) next to the √ε obtained by inverting the
    convex-split size condition with δ from ``slacks``.
    """
    s = slacks or SlackParams.default()
    tau, product_state = convex_split_state(rho_ab, K)
    distance = purified_distance(tau, product_state)
    bound = _convex_split_bound(rho_ab, K, s.delta)
    return ConvexSplitResult(K, distance, bound, i_max(rho_ab))


def hayashi_nagaoka_verify(S: HermitianOperator, T: HermitianOperator, c: float) -> float:
    """
    λ_min of (1 + c)(1 − S) + (2 + c + 1/c)T − (1 − (S+T)^{−1/2} S (S+T)^{−1/2}).

    Raises:
        DomainError: if S is not in [0, 1], T is not PSD or c ≤ 0
    """
    if c <= 0:
        raise DomainError(f"c must be positive, got {c}")
    if S.dims != T.dims:
        raise DimensionError("S and T act on different spaces")
    w = S.eigenvalues()
    if w[0] < -SUPPORT_TOL or w[-1] > 1.0 + SUPPORT_TOL:
        raise DomainError("S must satisfy 0 <= S <= 1")
    if T.eigenvalues()[0] < -SUPPORT_TOL:
        raise DomainError("T must be positive semidefinite")
    identity = np.eye(S.dim)
    root = inv_sqrt_on_support(S.matrix + T.matrix)
    lhs = identity - root @ S.matrix @ root
    rhs = (1.0 + c) * (identity - S.matrix) + (2.0 + c + 1.0 / c) * T.matrix
    return float(eigh(hermitize(rhs - lhs))[0][0])


def gentle_measurement_verify(rho: DensityOperator, lam: HermitianOperator) -> Tuple[float, float]:
    """
    (‖ρ − √Λρ√Λ‖₁, 2√(1 − Tr{Λρ})).

    Raises:
        PropertyViolation: if the left side exceeds the right by more than 1e-9
    """
    if rho.dims != lam.dims:
        raise DimensionError("state and measurement act on different spaces")
    w = lam.eigenvalues()
    if w[0] < -SUPPORT_TOL or w[-1] > 1.0 + SUPPORT_TOL:
        raise DomainError("Λ must satisfy 0 <= Λ <= 1")
    root = sqrt_psd(lam.matrix)
    lhs = trace_norm(rho.matrix - root @ rho.matrix @ root)
    rhs = 2.0 * math.sqrt(max(0.0, 1.0 - float(np.real(np.trace(lam.matrix @ rho.matrix)))))
    if lhs > rhs + BOUND_TOL:
        raise PropertyViolation(f"gentle measurement violated: {lhs:.12g} > {rhs:.12g}")
    return lhs, rhs

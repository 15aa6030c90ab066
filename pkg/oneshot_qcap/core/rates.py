"""
One-shot and asymptotic rate regions for simultaneous public and private
transmission over a wiretap channel.

Every reported number is a one-sided bound: achievable rates consume the
upper end of a smoothing interval, converse rates the lower end. Negative
values are kept as computed; clamping happens only when plotting.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core import classical
from oneshot_qcap.core.channels import (
    X_REGISTER,
    JointWiretapState,
    build_joint_state,
    decohere_reference,
    ensemble_from_bloch,
)
from oneshot_qcap.core.classical import compositions
from oneshot_qcap.core.divergences import (
    CQQState,
    SlackParams,
    binary_entropy,
    cond_coherent_info,
    cond_i_h_eps,
    cond_i_max_alt_smooth,
    cond_i_max_smooth,
    conditional_mutual_information,
    holevo_information,
    i_h_eps,
    mutual_information,
)
from oneshot_qcap.core.errors import BudgetExceededError, DimensionError, DomainError
from oneshot_qcap.core.qmat import WiretapChannel, partial_trace
from oneshot_qcap.utils.helpers import format_float
from oneshot_qcap.utils.workers import parallel_map

logger = logging.getLogger(__name__)

# converse error budgets under slack matching never exceed this
MATCHED_SLACK_CAP = 0.49


class Provenance(Enum):
    """Which theorem a rate pair comes from."""
    ACHIEVABLE = "achievable"
    CONVERSE = "converse"
    ASYMPTOTIC = "asymptotic"


@dataclass(frozen=True)
class RatePair:
    public_rate: float
    private_rate: float
    slacks: Optional[SlackParams]
    provenance: Provenance

    def clamped(self) -> Tuple[float, float]:
        """Rates clamped at zero, for plotting."""
        return max(0.0, self.public_rate), max(0.0, self.private_rate)

    def as_tuple(self) -> Tuple[float, float]:
        return self.public_rate, self.private_rate


def decoding_penalty(s: SlackParams) -> float:
    """log₂(4ε/δ²), the cost of position-based decoding."""
    return math.log2(4.0 * s.eps / (s.delta * s.delta))


def _eve_smoothing(s: SlackParams) -> float:
    return math.sqrt(s.eps_prime) - s.delta_prime


# ---------------------------------------------------------------------------
# one-shot regions
# ---------------------------------------------------------------------------

def public_hypothesis_rate(state: JointWiretapState, s: SlackParams) -> float:
    """I_H^{ε−δ}(X;B)."""
    return i_h_eps(state.xb_state(), s.eps - s.delta, (X_REGISTER,))


def achievable_pair(state: JointWiretapState, s: SlackParams) -> RatePair:
    """
    One-shot achievable pair:
        r = I_H^{ε−δ}(X;B) − log₂(4ε/δ²)
        R = I_H^{ε−δ}(Y;B|X) − Ĩ_max^{√ε′−δ′}(Y;E|X) − log₂(4ε/δ²) − 2log₂(1/δ′)

    The Eve term is the upper end of the alternate smoothing interval.
    """
    penalty = decoding_penalty(s)
    r = public_hypothesis_rate(state, s) - penalty
    bob = cond_i_h_eps(state.conditional_state(state.b_label.name), s.eps - s.delta)
    eve = cond_i_max_alt_smooth(state.conditional_state(state.e_label.name), _eve_smoothing(s)).upper
    R = bob - eve - penalty - 2.0 * math.log2(1.0 / s.delta_prime)
    logger.debug(f"achievable: I_H(X;B)-pen={r:.6g} bob={bob:.6g} eve={eve:.6g}")
    return RatePair(r, R, s, Provenance.ACHIEVABLE)


def bridged_achievable_pair(state: JointWiretapState, s: SlackParams) -> RatePair:
    """
    Achievable pair with the Eve term bridged to the fixed-marginal smoothing:
    Ĩ_max^{√ε′−δ′} ≤ I_max^{√ε′−δ′−γ} + log₂(3/γ²).
    """
    penalty = decoding_penalty(s)
    r = public_hypothesis_rate(state, s) - penalty
    bob = cond_i_h_eps(state.conditional_state(state.b_label.name), s.eps - s.delta)
    eve = cond_i_max_smooth(state.conditional_state(state.e_label.name), _eve_smoothing(s) - s.gamma).upper
    eve += math.log2(3.0 / (s.gamma * s.gamma))
    R = bob - eve - penalty - 2.0 * math.log2(1.0 / s.delta_prime)
    return RatePair(r, R, s, Provenance.ACHIEVABLE)


def converse_pair(state: JointWiretapState, s: SlackParams) -> RatePair:
    """
    One-shot outer bound:
        r ≤ I_H^ε(X;B)
        R ≤ I_H^{√ε}(Y;B|X) − I_max^{√(2ε′)}(Y;E|X)

    The Eve term is the lower end of the smoothing interval; when √(2ε′) ≥ 1
    the ball contains a product state and the term is 0.
    """
    r = i_h_eps(state.xb_state(), s.eps, (X_REGISTER,))
    bob = cond_i_h_eps(state.conditional_state(state.b_label.name), math.sqrt(s.eps))
    radius = math.sqrt(2.0 * s.eps_prime)
    if radius >= 1.0:
        eve = 0.0
    else:
        eve = cond_i_max_smooth(state.conditional_state(state.e_label.name), radius).lower
    return RatePair(r, bob - eve, s, Provenance.CONVERSE)


def relaxed_converse_pair(state: JointWiretapState, s: SlackParams) -> RatePair:
    """Converse relaxed to von Neumann quantities via the D_H and continuity bounds."""
    i_xb = mutual_information(state.xb_state(), (X_REGISTER,))
    i_yb = conditional_mutual_information(state.conditional_state(state.b_label.name))
    i_ye = conditional_mutual_information(state.conditional_state(state.e_label.name))
    root = math.sqrt(s.eps)
    eta = min(math.sqrt(2.0 * s.eps_prime), 1.0)
    r = (i_xb + binary_entropy(s.eps)) / (1.0 - s.eps)
    continuity = 3.0 * eta * math.log2(len(state.y_alphabet)) + 2.0 * (1.0 + eta) * binary_entropy(eta / (1.0 + eta))
    R = (i_yb + binary_entropy(root)) / (1.0 - root) - i_ye + continuity
    return RatePair(r, R, s, Provenance.CONVERSE)


def matched_converse_slacks(s: SlackParams) -> SlackParams:
    """
    Converse slacks matched to the achievability error budgets:
    ε_c = 3ε + 2√ε + √ε′ and ε′_c = 2(ε + √ε) + √ε′, both capped.
    """
    root, root_p = math.sqrt(s.eps), math.sqrt(s.eps_prime)
    eps_c = min(3.0 * s.eps + 2.0 * root + root_p, MATCHED_SLACK_CAP)
    eps_prime_c = min(2.0 * (s.eps + root) + root_p, MATCHED_SLACK_CAP)
    delta = min(s.delta, 0.5 * eps_c)
    delta_prime = min(s.delta_prime, 0.5 * math.sqrt(eps_prime_c))
    gamma = min(s.gamma, 0.5 * (math.sqrt(eps_prime_c) - delta_prime))
    return SlackParams(eps_c, eps_prime_c, delta, delta_prime, gamma)


# ---------------------------------------------------------------------------
# asymptotic points
# ---------------------------------------------------------------------------

def ds_region_point(sigma: CQQState) -> RatePair:
    """
    Corner (I(X;B), I(R⟩BX)) of a coherent ensemble σ_XRBE.
    """
    if len(sigma.a_systems) != 1 or len(sigma.systems) != 3:
        raise DimensionError("expected blocks on (R, B, E) with R as the reference")
    r_name = sigma.a_systems[0]
    b_name, e_name = [n for n in sigma.blocks[sigma.alphabet[0]].names if n != r_name]
    support = sigma.support
    weights = [sigma.weight(x) for x in support]
    outputs_b = [partial_trace(sigma.blocks[x], [r_name, e_name]) for x in support]
    rb = CQQState(support, np.asarray(weights) / np.sum(weights),
                  {x: partial_trace(sigma.blocks[x], [e_name]) for x in support}, (r_name,))
    return RatePair(holevo_information(weights, outputs_b), cond_coherent_info(rb), None, Provenance.ASYMPTOTIC)


def private_information_point(state: JointWiretapState) -> RatePair:
    """(I(X;B), I(Y;B|X) − I(Y;E|X)) for a classical-input ensemble."""
    i_xb = mutual_information(state.xb_state(), (X_REGISTER,))
    i_yb = conditional_mutual_information(state.conditional_state(state.b_label.name))
    i_ye = conditional_mutual_information(state.conditional_state(state.e_label.name))
    return RatePair(float(i_xb), float(i_yb - i_ye), None, Provenance.ASYMPTOTIC)


def private_to_coherent_check(sigma: CQQState) -> float:
    """
    |I(R⟩BX)_σ − [I(Y;B|X) − I(Y;E|X)]_σ̄| with σ̄ the Schmidt-basis
    decoherence of the reference.
    """
    lhs = ds_region_point(sigma).private_rate
    decohered = decohere_reference(sigma)
    rhs = private_information_point(decohered).private_rate
    return abs(lhs - rhs)


# ---------------------------------------------------------------------------
# commuting n-fold rates
# ---------------------------------------------------------------------------

def _split_table(table: np.ndarray):
    table = np.asarray(table, dtype=float)
    if table.ndim != 4:
        raise DimensionError("expected a table p(x, y, b, e)")
    p_x = table.sum(axis=(1, 2, 3))
    xb = table.sum(axis=(1, 3))
    yb, ye = [], []
    for i, w in enumerate(p_x):
        cond = table[i] / w if w > 0 else np.zeros_like(table[i])
        yb.append(cond.sum(axis=2))
        ye.append(cond.sum(axis=1))
    return p_x, xb, yb, ye


def classical_rates_iid(table: np.ndarray, s: SlackParams, n: int) -> RatePair:
    """
    Per-letter achievable pair (bridged Eve term) of n copies of a commuting
    state given as a table p(x, y, b, e).
    """
    p_x, xb, yb, ye = _split_table(table)
    penalty = decoding_penalty(s)
    r = classical.i_h_eps_iid(xb, s.eps - s.delta, n) - penalty
    bob = classical.cond_i_h_eps_iid(p_x, yb, s.eps - s.delta, n)
    eve = classical.cond_i_max_smooth_iid(p_x, ye, _eve_smoothing(s) - s.gamma, n).upper
    eve += math.log2(3.0 / (s.gamma * s.gamma))
    R = bob - eve - penalty - 2.0 * math.log2(1.0 / s.delta_prime)
    return RatePair(r / n, R / n, s, Provenance.ACHIEVABLE)


def classical_information_point(table: np.ndarray) -> RatePair:
    p_x, xb, yb, ye = _split_table(table)
    i_yb = sum(w * classical.mutual_information_classical(j) for w, j in zip(p_x, yb) if w > 0)
    i_ye = sum(w * classical.mutual_information_classical(j) for w, j in zip(p_x, ye) if w > 0)
    return RatePair(
        float(classical.mutual_information_classical(xb)), float(i_yb - i_ye), None, Provenance.ASYMPTOTIC
    )


# ---------------------------------------------------------------------------
# region sweeps
# ---------------------------------------------------------------------------

# signal order of the four (x, y) pairs
SIGNAL_PAIRS = ((0, 0), (0, 1), (1, 0), (1, 1))


@dataclass(frozen=True)
class EncoderGrid:
    """
    Binary-alphabet encoders: joint distributions p(x, y) and one Bloch angle
    per signal, the signal for (x, y) being cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
    """
    distributions: Tuple[Tuple[float, float, float, float], ...]
    angles: Tuple[Tuple[float, float, float, float], ...]

    @classmethod
    def regular(cls, n: int) -> "EncoderGrid":
        """
        Size-n grid: p(x, y) on the simplex with step 1/(n−1) and n angles in
        [0, π] per signal. n = 1 is the canonical encoder (uniform p, θ = π·x).
        """
        if n < 1:
            raise DomainError(f"grid resolution must be positive, got {n}")
        if n == 1:
            return cls(((0.25, 0.25, 0.25, 0.25),), ((0.0, 0.0, math.pi, math.pi),))
        dists = tuple(tuple(c / (n - 1) for c in counts) for counts in compositions(n - 1, 4))
        thetas = [math.pi * i / (n - 1) for i in range(n)]
        return cls(dists, tuple(product(thetas, repeat=4)))

    @classmethod
    def single(cls, p_xy: Sequence[float], thetas: Sequence[float]) -> "EncoderGrid":
        p_xy = tuple(float(v) for v in np.asarray(p_xy, dtype=float).reshape(-1))
        thetas = tuple(float(v) for v in thetas)
        if len(p_xy) != 4 or len(thetas) != 4:
            raise DimensionError("a binary encoder has four weights and four angles")
        return cls((p_xy,), (thetas,))

    @property
    def size(self) -> int:
        return len(self.distributions) * len(self.angles)

    def encoder(self, index: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        d, a = divmod(index, len(self.angles))
        return self.distributions[d], self.angles[a]


def encoder_state(ch: WiretapChannel, p_xy: Sequence[float], thetas: Sequence[float]) -> JointWiretapState:
    if ch.input_dim != 2:
        raise DimensionError("region sweeps encode into qubit signals")
    bloch = {pair: (math.sin(t), 0.0, math.cos(t)) for pair, t in zip(SIGNAL_PAIRS, thetas)}
    ens = ensemble_from_bloch(np.asarray(p_xy, dtype=float).reshape(2, 2), bloch)
    return build_joint_state(ens, ch)


@dataclass(frozen=True)
class RegionSample:
    index: int
    p_xy: Tuple[float, ...]
    thetas: Tuple[float, ...]
    asymptotic: RatePair
    achievable: Optional[RatePair] = None
    converse: Optional[RatePair] = None
    slacks: Optional[SlackParams] = field(default=None, compare=False)

    def series(self) -> Dict[str, RatePair]:
        out = {"ds": self.asymptotic}
        if self.achievable is not None:
            out["ach"] = self.achievable
        if self.converse is not None:
            out["con"] = self.converse
        return out

    def to_row(self) -> Dict[str, str]:
        """CSV row, floats at 12 significant digits."""
        row = {f"p{x}{y}": format_float(v) for (x, y), v in zip(SIGNAL_PAIRS, self.p_xy)}
        row.update({f"theta{x}{y}": format_float(v) for (x, y), v in zip(SIGNAL_PAIRS, self.thetas)})
        for key, pair in (("ach", self.achievable), ("con", self.converse), ("ds", self.asymptotic)):
            row[f"r_{key}"] = format_float(pair.public_rate) if pair else ""
            row[f"R_{key}"] = format_float(pair.private_rate) if pair else ""
        s = self.slacks
        for key, attr in (("eps", "eps"), ("epsPrime", "eps_prime"), ("delta", "delta"),
                          ("deltaPrime", "delta_prime"), ("gamma", "gamma")):
            row[key] = format_float(getattr(s, attr)) if s else ""
        return row


CSV_COLUMNS = (
    [f"p{x}{y}" for x, y in SIGNAL_PAIRS]
    + [f"theta{x}{y}" for x, y in SIGNAL_PAIRS]
    + ["r_ach", "R_ach", "r_con", "R_con", "r_ds", "R_ds", "eps", "epsPrime", "delta", "deltaPrime", "gamma"]
)


def pareto_frontier(pairs: Sequence[Tuple[float, float]], tol: float = 1e-12) -> List[int]:
    """
    Indices of the non-dominated pairs, ascending. Among exact duplicates the
    first index is kept.
    """
    pts = np.asarray(pairs, dtype=float).reshape(-1, 2)
    keep = []
    for i, (r, R) in enumerate(pts):
        dominated = False
        for j, (r2, R2) in enumerate(pts):
            if j == i:
                continue
            if r2 >= r - tol and R2 >= R - tol:
                strictly = r2 > r + tol or R2 > R + tol
                if strictly or j < i:
                    dominated = True
                    break
        if not dominated:
            keep.append(i)
    return keep


def _evaluate(ch: WiretapChannel, grid: EncoderGrid, s: SlackParams, index: int,
              evaluate_one_shot: bool) -> RegionSample:
    p_xy, thetas = grid.encoder(index)
    state = encoder_state(ch, p_xy, thetas)
    asymptotic = private_information_point(state)
    if not evaluate_one_shot:
        return RegionSample(index, p_xy, thetas, asymptotic, slacks=s)
    return RegionSample(index, p_xy, thetas, asymptotic, achievable_pair(state, s), converse_pair(state, s), s)


def sweep_region(ch: WiretapChannel, grid: EncoderGrid, s: SlackParams, evaluate_one_shot: bool = True,
                 pareto: bool = True, workers: Optional[int] = None) -> List[RegionSample]:
    """
    Evaluate every encoder of the grid and keep the samples that are
    non-dominated in at least one series.

    Raises:
        BudgetExceededError: if the grid exceeds the sweep sample cap
    """
    cap = QcapConfig.get_sweep_config()["sample_cap"]
    if grid.size > cap:
        raise BudgetExceededError(f"encoder grid has {grid.size} samples, cap is {cap}")
    logger.info(f"Sweeping {grid.size} encoders (one-shot={evaluate_one_shot})")
    samples = parallel_map(lambda i: _evaluate(ch, grid, s, i, evaluate_one_shot), list(range(grid.size)), workers)
    if not pareto:
        return samples

    kept = set()
    for key in ("ds", "ach", "con"):
        indexed = [(i, smp.series()[key]) for i, smp in enumerate(samples) if key in smp.series()]
        if not indexed:
            continue
        front = pareto_frontier([pair.as_tuple() for _, pair in indexed])
        kept.update(indexed[k][0] for k in front)
    return [samples[i] for i in sorted(kept)]

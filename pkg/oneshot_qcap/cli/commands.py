"""
The four commands: divergence, region, simulate and verify.

Output is CSV (pandas, 12 significant digits) behind the comment header of
``CommandBase``. The region command can also draw its frontier as SVG.
"""

import io
import logging
import math
from pathlib import Path
from typing import Dict, List, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402

from oneshot_qcap.cli.command_base import CommandBase, CommandKind, RunConfig  # noqa: E402
from oneshot_qcap.config import QcapConfig  # noqa: E402
from oneshot_qcap.core.channels import build_joint_state  # noqa: E402
from oneshot_qcap.core.divergences import (  # noqa: E402
    dh_eps,
    dmax,
    dmax_smooth,
    product_of_marginals,
    relative_entropy,
    relative_entropy_variance,
)
from oneshot_qcap.core.document_protocol import load_divergence, load_wiretap  # noqa: E402
from oneshot_qcap.core.errors import ExitCode, InputError  # noqa: E402
from oneshot_qcap.core.protosim import (  # noqa: E402
    CodeSizes,
    derandomize_search,
    privacy_error,
    public_codebook_table,
    theorem_code_sizes,
)
from oneshot_qcap.core.rates import CSV_COLUMNS, EncoderGrid, RegionSample, sweep_region  # noqa: E402
from oneshot_qcap.core.verification import SuiteResult, run_suites  # noqa: E402

logger = logging.getLogger(__name__)

DIVERGENCE_COLUMNS = ["D", "V", "Dmax", "DH", "Dmax_smooth_lower", "Dmax_smooth_upper", "eps"]
SIMULATE_COLUMNS = [
    "M", "L", "K", "public_error", "public_bound", "public_theorem_bound", "best_codebook_error",
    "bob_private_error", "secrecy_distance", "secrecy_distance_product", "privacy_error",
    "privacy_bound", "size_conditions_met", "public_pass", "privacy_pass",
]
VERIFY_COLUMNS = ["suite", "instances", "violations", "max_violation", "passed", "advisories"]


def to_csv(rows: Sequence[Dict[str, object]], columns: Sequence[str]) -> str:
    frame = pd.DataFrame(list(rows), columns=list(columns))
    buffer = io.StringIO()
    frame.to_csv(buffer, index=False, float_format=QcapConfig.FLOAT_FORMAT, lineterminator="\n")
    return buffer.getvalue()


class DivergenceCommand(CommandBase):
    """D, V, D_max, D_H^ε and the smoothed D_max interval of one pair of states."""

    @property
    def kind(self) -> CommandKind:
        return CommandKind.DIVERGENCE

    def execute(self) -> ExitCode:
        doc = load_divergence(self.require_input())
        self.check_dimension("divergence input", doc.rho.dim)
        rho = doc.rho
        sigma = doc.sigma if doc.sigma is not None else product_of_marginals(rho, doc.a_systems)
        eps = self.config.slacks.eps

        d = relative_entropy(rho, sigma)
        v = relative_entropy_variance(rho, sigma) if math.isfinite(d) else math.inf
        smooth = dmax_smooth(rho, sigma, eps)
        row = {
            "D": d,
            "V": v,
            "Dmax": dmax(rho, sigma),
            "DH": dh_eps(rho, sigma, eps)[0],
            "Dmax_smooth_lower": smooth.lower,
            "Dmax_smooth_upper": smooth.upper,
            "eps": eps,
        }
        self.write_output(to_csv([row], DIVERGENCE_COLUMNS))
        return ExitCode.SUCCESS


class RegionCommand(CommandBase):
    """Rate-region sweep over the regular encoder grid of a qubit channel."""

    @property
    def kind(self) -> CommandKind:
        return CommandKind.REGION

    def execute(self) -> ExitCode:
        doc = load_wiretap(self.require_input())
        if self.config.svg and not self.config.output_path:
            raise InputError("--svg needs --output")
        grid = EncoderGrid.regular(self.config.grid)
        samples = sweep_region(doc.channel, grid, self.config.slacks)
        self.write_output(to_csv([smp.to_row() for smp in samples], CSV_COLUMNS))
        if self.config.svg:
            plot_region(samples, Path(self.config.output_path).with_suffix(".svg"))
        return ExitCode.SUCCESS


SERIES_STYLE = (
    ("ds", "o", "asymptotic"),
    ("ach", "+", "achievable"),
    ("con", "x", "converse"),
)


def plot_region(samples: List[RegionSample], path: Path):
    """Scatter the (r, R) pairs of each series, negatives clamped to zero."""
    plt.rcParams["svg.hashsalt"] = "oneshot-qcap"
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for key, marker, label in SERIES_STYLE:
        pairs = [smp.series()[key].clamped() for smp in samples if key in smp.series()]
        if pairs:
            ax.plot([p[0] for p in pairs], [p[1] for p in pairs], marker, linestyle="none", label=label)
    ax.set_xlabel("public rate r (bits)")
    ax.set_ylabel("private rate R (bits)")
    ax.legend(loc="best")
    ax.grid(True)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    logger.info(f"Frontier plot written to {path}")


class SimulateCommand(CommandBase):
    """Exact protocol simulation for the code sizes in the document."""

    @property
    def kind(self) -> CommandKind:
        return CommandKind.SIMULATE

    def execute(self) -> ExitCode:
        doc = load_wiretap(self.require_input())
        if doc.ensemble is None:
            raise InputError("simulate needs an 'ensemble' in the document")
        s = self.config.slacks
        if doc.code is not None:
            sizes = CodeSizes(*doc.code)
        else:
            sizes = theorem_code_sizes(build_joint_state(doc.ensemble, doc.channel), s).sizes
            self._notify_status(f"using code sizes {sizes.to_dict()} from the achievability formulas")

        report = privacy_error(doc.ensemble, doc.channel, sizes, s)
        table = public_codebook_table(doc.ensemble, doc.channel, sizes, s)
        best = derandomize_search(table.errors, table.weights)

        row = dict(sizes.to_dict())
        summary = report.to_dict()
        for column in SIMULATE_COLUMNS[3:]:
            if column == "best_codebook_error":
                row[column] = best.error
            else:
                row[column] = summary[column]
        self.write_output(to_csv([row], SIMULATE_COLUMNS))
        return ExitCode.SUCCESS if report.privacy_pass else ExitCode.PROPERTY_FAILURE


class VerifyCommand(CommandBase):
    """Run the property suites; succeeds iff every suite has zero violations."""

    @property
    def kind(self) -> CommandKind:
        return CommandKind.VERIFY

    def execute(self) -> ExitCode:
        fixtures = [self.config.input_path] if self.config.input_path else None
        names = list(self.config.suites) or None
        try:
            results = run_suites(self.config.seed, self.config.scale, names, fixtures, self.run_logger)
        except KeyError as e:
            raise InputError(str(e))
        self.write_output(to_csv([r.to_row() for r in results], VERIFY_COLUMNS))
        self._notify_status(summary_table(results))
        failed = [r.name for r in results if not r.passed]
        if failed:
            self.run_logger.warning(f"failed suites: {', '.join(failed)}")
            return ExitCode.PROPERTY_FAILURE
        return ExitCode.SUCCESS


def summary_table(results: Sequence[SuiteResult]) -> str:
    lines = [f"{'suite':<22}{'instances':>10}{'violations':>12}{'max violation':>16}{'advisories':>12}"]
    for r in results:
        lines.append(f"{r.name:<22}{r.instances:>10}{r.violations:>12}{r.max_violation:>16.3g}{r.advisories:>12}")
    return "\n".join(lines)


COMMANDS = {
    CommandKind.DIVERGENCE: DivergenceCommand,
    CommandKind.REGION: RegionCommand,
    CommandKind.SIMULATE: SimulateCommand,
    CommandKind.VERIFY: VerifyCommand,
}


def cmd_divergence(config: RunConfig) -> int:
    return DivergenceCommand(config).run()


def cmd_region(config: RunConfig) -> int:
    return RegionCommand(config).run()


def cmd_simulate(config: RunConfig) -> int:
    return SimulateCommand(config).run()


def cmd_verify(config: RunConfig) -> int:
    return VerifyCommand(config).run()

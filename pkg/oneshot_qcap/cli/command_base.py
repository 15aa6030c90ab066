import abc
import json
import sys
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.divergences import SlackParams
from oneshot_qcap.core.errors import BudgetExceededError, ExitCode, InputError, QcapError
from oneshot_qcap.utils.helpers import format_duration
from oneshot_qcap.utils.logger import RunLogger


class CommandKind(Enum):
    DIVERGENCE = "divergence"
    REGION = "region"
    SIMULATE = "simulate"
    VERIFY = "verify"


@dataclass(frozen=True)
class RunConfig:
    """Everything one command invocation depends on."""
    command: str
    input_path: Optional[str] = None
    output_path: Optional[str] = None
    slacks: SlackParams = field(default_factory=SlackParams.default)
    grid: int = 2
    seed: int = QcapConfig.DEFAULT_SEED
    dim_cap: Optional[int] = None
    svg: bool = False
    scale: float = 1.0
    suites: Tuple[str, ...] = ()

    def to_dict(self) -> Dict[str, Any]:
        return {
            "command": self.command,
            "input": self.input_path,
            "output": self.output_path,
            "slacks": self.slacks.to_dict(),
            "grid": self.grid,
            "seed": self.seed,
            "dim_cap": self.dim_cap if self.dim_cap is not None else QcapConfig.dim_cap(),
            "svg": self.svg,
            "scale": self.scale,
            "suites": list(self.suites),
        }


class CommandBase(abc.ABC):
    """abstract class for the command line commands"""

    def __init__(self, config: RunConfig):
        self.config = config
        self.status_callback: Optional[Callable] = None
        self.run_logger = RunLogger(__name__, self.kind.value)

    def set_status_callback(self, callback: Callable):
        """Set callback for status updates."""
        self.status_callback = callback

    def _notify_status(self, message: str, is_error: bool = False):
        """Notify status callback if set."""
        if self.status_callback:
            self.status_callback(message, is_error)

    @property
    @abc.abstractmethod
    def kind(self) -> CommandKind:
        """Return the command kind."""
        pass

    @abc.abstractmethod
    def execute(self) -> ExitCode:
        """Compute and write the command's output."""
        pass

    def header_lines(self) -> List[str]:
        """Comment header: tool version, seed and the full config."""
        return [
            f"# oneshot-qcap {QcapConfig.VERSION}",
            f"# seed: {self.config.seed}",
            f"# config: {json.dumps(self.config.to_dict(), sort_keys=True)}",
        ]

    def write_output(self, body: str):
        """Write header plus body to the output path, or to stdout without one."""
        text = "\n".join(self.header_lines()) + "\n" + body
        if self.config.output_path:
            try:
                Path(self.config.output_path).write_text(text, encoding=QcapConfig.ENCODING)
            except OSError as e:
                raise InputError(f"cannot write {self.config.output_path}: {e}")
            self._notify_status(f"wrote {self.config.output_path}")
        else:
            sys.stdout.write(text)

    def require_input(self) -> str:
        if not self.config.input_path:
            raise InputError(f"{self.kind.value} needs --input")
        return self.config.input_path

    def check_dimension(self, what: str, needed: int):
        cap = QcapConfig.dim_cap()
        if needed > cap:
            self.run_logger.budget_exceeded(what, needed, cap)
            raise BudgetExceededError(f"{what} needs dimension {needed}, cap is {cap}")

    def run(self) -> int:
        """Run the command and map failures to exit codes."""
        start = time.perf_counter()
        self.run_logger.run_start(self.config.to_dict())
        QcapConfig.override_dim_cap(self.config.dim_cap)
        try:
            code = self.execute()
        except QcapError as e:
            code = e.exit_code
            self._report(str(e))
        except FileNotFoundError as e:
            code = ExitCode.INPUT_ERROR
            self._report(f"file not found: {e}")
        except json.JSONDecodeError as e:
            code = ExitCode.INPUT_ERROR
            self._report(f"JSON decode error: {e}")
        finally:
            QcapConfig.override_dim_cap(None)
        self.run_logger.run_stop(int(code), format_duration(time.perf_counter() - start))
        return int(code)

    def _report(self, message: str):
        print(f"oneshot-qcap {self.kind.value}: {message}", file=sys.stderr)
        self.run_logger.error(message)
        self._notify_status(message, True)

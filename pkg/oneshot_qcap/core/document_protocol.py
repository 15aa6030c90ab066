"""
JSON documents: channel/ensemble descriptions, divergence inputs and reports.

Complex numbers are written as [re, im] pairs. A state is one of
``{"matrix": [[...]]}``, ``{"vector": [...]}``, ``{"bloch": [x, y, z]}`` or
``{"diag": [...]}``, optionally with ``"systems": [["A", 2], ...]``.
"""

import json
import logging
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import numpy as np

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.core.channels import CQWiretapEnsemble, standard_channel
from oneshot_qcap.core.errors import DocumentError, QcapError
from oneshot_qcap.core.qmat import (
    DensityOperator,
    SystemLabel,
    WiretapChannel,
    bloch_state,
    diagonal_state,
    pure_state,
)
from oneshot_qcap.utils.helpers import parse_complex

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1.0"


class DocumentType(Enum):
    """Kinds of input documents."""
    DIVERGENCE = "divergence"
    WIRETAP = "wiretap"


@dataclass(frozen=True, eq=False)
class DivergenceDocument:
    """Two states (ρ, σ), or one bipartite state when sigma is None."""
    rho: DensityOperator
    sigma: Optional[DensityOperator] = None
    a_systems: Optional[Tuple[str, ...]] = None


@dataclass(frozen=True, eq=False)
class WiretapDocument:
    channel: WiretapChannel
    ensemble: Optional[CQWiretapEnsemble] = None
    code: Optional[Tuple[int, int, int]] = None


def _require(data: Dict[str, Any], key: str, where: str) -> Any:
    if not isinstance(data, dict) or key not in data:
        raise DocumentError(f"{where}: missing field '{key}'")
    return data[key]


def _complex_matrix(rows: Any, where: str) -> np.ndarray:
    try:
        matrix = np.array([[parse_complex(entry) for entry in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as e:
        raise DocumentError(f"{where}: {e}")
    if matrix.ndim != 2:
        raise DocumentError(f"{where}: expected a matrix")
    return matrix


def _systems(spec: Dict[str, Any], dim: int, default_name: str) -> Tuple[SystemLabel, ...]:
    raw = spec.get("systems")
    if raw is None:
        return (SystemLabel(default_name, dim),)
    try:
        systems = tuple(SystemLabel(str(name), int(d)) for name, d in raw)
    except (TypeError, ValueError) as e:
        raise DocumentError(f"bad systems list {raw!r}: {e}")
    if int(np.prod([s.dim for s in systems])) != dim:
        raise DocumentError(f"systems {raw!r} do not multiply to dimension {dim}")
    return systems


class DocumentProtocol:
    """Decoding and encoding of the toolkit's JSON documents."""

    @staticmethod
    def load(path: Union[str, Path]) -> Dict[str, Any]:
        """Read and parse a JSON document from disk."""
        try:
            text = Path(path).read_text(encoding=QcapConfig.ENCODING)
        except FileNotFoundError:
            raise DocumentError(f"input file not found: {path}")
        except OSError as e:
            raise DocumentError(f"cannot read {path}: {e}")
        return DocumentProtocol.decode(text)

    @staticmethod
    def decode(text: str) -> Dict[str, Any]:
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DocumentError(f"JSON decode error: {e}")
        if not isinstance(data, dict):
            raise DocumentError("top-level document must be an object")
        version = str(data.get("version", FORMAT_VERSION))
        if version.split(".")[0] != FORMAT_VERSION.split(".")[0]:
            raise DocumentError(f"unsupported document version {version}")
        return data

    @staticmethod
    def document_type(data: Dict[str, Any]) -> DocumentType:
        raw = data.get("type")
        if raw is None:
            return DocumentType.WIRETAP if "channel" in data else DocumentType.DIVERGENCE
        try:
            return DocumentType(raw)
        except ValueError:
            raise DocumentError(f"unknown document type {raw!r}")

    # -- states ------------------------------------------------------------

    @staticmethod
    def parse_state(spec: Any, default_name: str = "A") -> DensityOperator:
        """
        Parse one state specification.

        Raises:
            DocumentError: on malformed entries
            StateValidationError: if the numbers do not describe a state
        """
        if not isinstance(spec, dict):
            raise DocumentError(f"state must be an object, got {type(spec).__name__}")
        if "matrix" in spec:
            matrix = _complex_matrix(spec["matrix"], "state matrix")
            if matrix.shape[0] != matrix.shape[1]:
                raise DocumentError(f"state matrix is not square: {matrix.shape}")
            return DensityOperator(_systems(spec, matrix.shape[0], default_name), matrix)
        if "vector" in spec:
            try:
                vec = np.array([parse_complex(v) for v in spec["vector"]], dtype=complex)
            except (TypeError, ValueError) as e:
                raise DocumentError(f"state vector: {e}")
            return pure_state(vec, _systems(spec, vec.shape[0], default_name))
        if "bloch" in spec:
            try:
                vec = [float(v) for v in spec["bloch"]]
            except (TypeError, ValueError) as e:
                raise DocumentError(f"Bloch vector: {e}")
            return bloch_state(vec, SystemLabel(default_name, 2))
        if "diag" in spec:
            try:
                probs = [float(v) for v in spec["diag"]]
            except (TypeError, ValueError) as e:
                raise DocumentError(f"diagonal state: {e}")
            return diagonal_state(probs, _systems(spec, len(probs), default_name))
        raise DocumentError("state needs one of 'matrix', 'vector', 'bloch' or 'diag'")

    @staticmethod
    def parse_divergence(data: Dict[str, Any]) -> DivergenceDocument:
        if "states" in data:
            states = data["states"]
            rho = DocumentProtocol.parse_state(_require(states, "rho", "states"))
            sigma = DocumentProtocol.parse_state(_require(states, "sigma", "states"))
            return DivergenceDocument(rho, sigma)
        state = DocumentProtocol.parse_state(_require(data, "state", "divergence document"))
        if len(state.systems) < 2:
            raise DocumentError("a single-state divergence document needs a bipartite state")
        a = data.get("a_systems")
        return DivergenceDocument(state, None, tuple(a) if a else None)

    # -- channels and ensembles -------------------------------------------

    @staticmethod
    def parse_channel(spec: Any) -> WiretapChannel:
        if not isinstance(spec, dict):
            raise DocumentError("channel must be an object")
        if "kind" in spec:
            return standard_channel(spec["kind"], _require(spec, "param", "channel"))
        if "isometry" in spec:
            v = _complex_matrix(spec["isometry"], "channel isometry")
            try:
                d_b, d_e = int(_require(spec, "dim_b", "channel")), int(_require(spec, "dim_e", "channel"))
            except (TypeError, ValueError) as e:
                raise DocumentError(f"channel dimensions: {e}")
            return WiretapChannel(SystemLabel("A", v.shape[1]), v, SystemLabel("B", d_b), SystemLabel("E", d_e))
        raise DocumentError("channel needs either 'kind' and 'param' or an explicit 'isometry'")

    @staticmethod
    def parse_ensemble(spec: Any) -> CQWiretapEnsemble:
        xs = tuple(_require(spec, "x_alphabet", "ensemble"))
        ys = tuple(_require(spec, "y_alphabet", "ensemble"))
        try:
            p_xy = np.array(_require(spec, "p_xy", "ensemble"), dtype=float)
        except (TypeError, ValueError) as e:
            raise DocumentError(f"p_xy: {e}")
        raw = _require(spec, "signals", "ensemble")
        if not isinstance(raw, dict):
            raise DocumentError("signals must map 'x,y' keys to states")
        lookup_x = {str(x): x for x in xs}
        lookup_y = {str(y): y for y in ys}
        signals = {}
        for key, state in raw.items():
            parts = str(key).split(",")
            if len(parts) != 2 or parts[0].strip() not in lookup_x or parts[1].strip() not in lookup_y:
                raise DocumentError(f"signal key {key!r} is not an 'x,y' pair of alphabet symbols")
            pair = (lookup_x[parts[0].strip()], lookup_y[parts[1].strip()])
            signals[pair] = DocumentProtocol.parse_state(state)
        return CQWiretapEnsemble(xs, ys, p_xy, signals)

    @staticmethod
    def parse_code(spec: Any) -> Tuple[int, int, int]:
        try:
            sizes = tuple(int(_require(spec, key, "code")) for key in ("M", "L", "K"))
        except (TypeError, ValueError) as e:
            raise DocumentError(f"code sizes: {e}")
        if min(sizes) < 1:
            raise DocumentError(f"code sizes must be positive, got {sizes}")
        return sizes

    @staticmethod
    def parse_wiretap(data: Dict[str, Any]) -> WiretapDocument:
        channel = DocumentProtocol.parse_channel(_require(data, "channel", "wiretap document"))
        ensemble = DocumentProtocol.parse_ensemble(data["ensemble"]) if "ensemble" in data else None
        code = DocumentProtocol.parse_code(data["code"]) if "code" in data else None
        return WiretapDocument(channel, ensemble, code)


def load_wiretap(path: Union[str, Path]) -> WiretapDocument:
    """Load a channel/ensemble document; validation failures are logged and re-raised."""
    data = DocumentProtocol.load(path)
    try:
        return DocumentProtocol.parse_wiretap(data)
    except QcapError as e:
        logger.warning(f"invalid wiretap document {path}: {e}")
        raise


def load_divergence(path: Union[str, Path]) -> DivergenceDocument:
    data = DocumentProtocol.load(path)
    return DocumentProtocol.parse_divergence(data)

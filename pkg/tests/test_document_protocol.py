import json

import numpy as np
import pytest
from numpy.testing import assert_allclose

from oneshot_qcap.core.channels import ChannelKind
from oneshot_qcap.core.document_protocol import (
    DocumentProtocol,
    DocumentType,
    load_divergence,
    load_wiretap,
)
from oneshot_qcap.core.errors import DocumentError, StateValidationError


def test_decode_rejects_bad_json():
    with pytest.raises(DocumentError):
        DocumentProtocol.decode("{not json")


def test_decode_rejects_non_object():
    with pytest.raises(DocumentError):
        DocumentProtocol.decode("[1, 2]")


def test_decode_rejects_future_major_version():
    with pytest.raises(DocumentError, match="version"):
        DocumentProtocol.decode(json.dumps({"version": "2.0", "states": {}}))


def test_document_type_inference():
    assert DocumentProtocol.document_type({"channel": {}}) is DocumentType.WIRETAP
    assert DocumentProtocol.document_type({"states": {}}) is DocumentType.DIVERGENCE
    with pytest.raises(DocumentError):
        DocumentProtocol.document_type({"type": "poem"})


@pytest.mark.parametrize("spec, expected", [
    pytest.param({"diag": [0.25, 0.75]}, np.diag([0.25, 0.75]), id="diag"),
    pytest.param({"bloch": [0, 0, -1]}, np.diag([0.0, 1.0]), id="bloch"),
    pytest.param({"vector": [[0, 1], 0]}, np.diag([1.0, 0.0]), id="complex-vector"),
    pytest.param({"matrix": [[0.5, [0, -0.5]], [[0, 0.5], 0.5]]},
                 np.array([[0.5, -0.5j], [0.5j, 0.5]]), id="complex-matrix"),
])
def test_parse_state_forms(spec, expected):
    rho = DocumentProtocol.parse_state(spec)
    assert rho.names == ("A",)
    assert_allclose(rho.matrix, expected, atol=1e-12)


def test_parse_state_with_systems():
    rho = DocumentProtocol.parse_state({"diag": [0.25] * 4, "systems": [["A", 2], ["B", 2]]})
    assert rho.names == ("A", "B")


def test_parse_state_systems_must_multiply_out():
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_state({"diag": [0.25] * 4, "systems": [["A", 3]]})


def test_parse_state_needs_a_form():
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_state({"density": 1})


def test_parse_state_rejects_non_states():
    with pytest.raises(StateValidationError):
        DocumentProtocol.parse_state({"matrix": [[1.2, 0.0], [0.0, -0.2]]})


def test_single_state_divergence_needs_two_systems():
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_divergence({"state": {"diag": [0.5, 0.5]}})


def test_parse_channel_kinds_and_isometries():
    ch = DocumentProtocol.parse_channel({"kind": "amplitude_damping", "param": 0.2})
    assert ch.e_label.dim == 2
    iso = DocumentProtocol.parse_channel({"isometry": [[1, 0], [0, 1]], "dim_b": 2, "dim_e": 1})
    assert iso.input_dim == 2
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_channel({"isometry": [[1, 0], [0, 1]]})
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_channel({"name": ChannelKind.DEPHASING.value})


def test_parse_ensemble_rejects_unknown_keys():
    spec = {
        "x_alphabet": [0], "y_alphabet": [0], "p_xy": [[1.0]],
        "signals": {"0;0": {"bloch": [0, 0, 1]}},
    }
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_ensemble(spec)


@pytest.mark.parametrize("code", [{"M": 0, "L": 1, "K": 1}, {"M": 1, "L": 1}, {"M": "x", "L": 1, "K": 1}])
def test_parse_code_errors(code):
    with pytest.raises(DocumentError):
        DocumentProtocol.parse_code(code)


def test_load_protocol_fixture(fixture_path):
    doc = load_wiretap(fixture_path("dephasing.json"))
    assert doc.code == (2, 2, 2)
    assert doc.ensemble.x_alphabet == (0, 1)
    assert_allclose(doc.ensemble.p_x, [0.5, 0.5])


def test_load_identity_fixture_without_ensemble(fixture_path):
    doc = load_wiretap(fixture_path("identity_channel.json"))
    assert doc.ensemble is None
    assert doc.channel.e_label.dim == 1


def test_load_divergence_fixture(fixture_path):
    doc = load_divergence(fixture_path("classical_pair.json"))
    assert_allclose(np.real(np.diag(doc.sigma.matrix)), [0.9, 0.1])


def test_corrupted_fixture_fails_validation(fixture_path):
    with pytest.raises(StateValidationError):
        load_wiretap(fixture_path("corrupted_state.json"))


def test_missing_file(tmp_path):
    with pytest.raises(DocumentError, match="not found"):
        load_wiretap(tmp_path / "absent.json")

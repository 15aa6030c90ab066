import json
import math

import pandas as pd
import pytest

from oneshot_qcap.config import QcapConfig
from oneshot_qcap.main import build_parser, main


def _read(path):
    return pd.read_csv(path, comment="#")


@pytest.fixture
def trivial_code(tmp_path, fixture_path):
    data = json.loads(fixture_path("dephasing.json").read_text())
    data["code"] = {"M": 1, "L": 1, "K": 1}
    path = tmp_path / "trivial.json"
    path.write_text(json.dumps(data))
    return path


def test_divergence_of_classical_pair(tmp_path, fixture_path):
    out = tmp_path / "div.csv"
    code = main(["divergence", "--input", str(fixture_path("classical_pair.json")),
                 "--eps", "0.5", "--output", str(out)])
    assert code == 0
    frame = _read(out)
    assert list(frame.columns) == ["D", "V", "Dmax", "DH", "Dmax_smooth_lower", "Dmax_smooth_upper", "eps"]
    assert frame.loc[0, "DH"] == pytest.approx(math.log2(10.0), abs=1e-9)
    assert frame.loc[0, "Dmax_smooth_lower"] <= frame.loc[0, "Dmax_smooth_upper"]


def test_output_header(tmp_path, fixture_path):
    out = tmp_path / "div.csv"
    main(["divergence", "--input", str(fixture_path("classical_pair.json")), "--seed", "5", "--output", str(out)])
    lines = out.read_text().splitlines()
    assert lines[0] == f"# oneshot-qcap {QcapConfig.VERSION}"
    assert lines[1] == "# seed: 5"
    config = json.loads(lines[2][len("# config: "):])
    assert config["slacks"]["eps"] == 0.1
    assert config["command"] == "divergence"


def test_stdout_when_no_output(fixture_path, capsys):
    assert main(["divergence", "--input", str(fixture_path("classical_pair.json"))]) == 0
    assert capsys.readouterr().out.startswith("# oneshot-qcap")


def test_missing_input_file(tmp_path, capsys):
    assert main(["divergence", "--input", str(tmp_path / "nope.json")]) == 2
    assert "not found" in capsys.readouterr().err


def test_missing_input_flag():
    assert main(["region"]) == 2


@pytest.mark.parametrize("flags", [["--delta", "0.5"], ["--eps", "1.5"], ["--gamma", "0.9"]])
def test_bad_slacks(fixture_path, flags):
    assert main(["divergence", "--input", str(fixture_path("classical_pair.json"))] + flags) == 2


def test_dimension_cap(fixture_path):
    assert main(["divergence", "--input", str(fixture_path("classical_pair.json")), "--dim-cap", "1"]) == 3
    assert QcapConfig.dim_cap() == QcapConfig.DEFAULT_DIM_CAP


def test_region_single_encoder(tmp_path, fixture_path):
    out = tmp_path / "region.csv"
    assert main(["region", "--input", str(fixture_path("identity_channel.json")),
                 "--grid", "1", "--output", str(out)]) == 0
    frame = _read(out)
    assert len(frame) == 1
    assert frame.loc[0, "r_ds"] == pytest.approx(1.0, abs=1e-9)
    assert frame.loc[0, "R_ds"] == pytest.approx(0.0, abs=1e-9)


def test_region_is_deterministic(tmp_path, fixture_path):
    paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
    for path in paths:
        main(["region", "--input", str(fixture_path("identity_channel.json")), "--grid", "1", "--output", str(path)])
    assert paths[0].read_text().splitlines()[3:] == paths[1].read_text().splitlines()[3:]


def test_region_svg(tmp_path, fixture_path):
    out = tmp_path / "region.csv"
    assert main(["region", "--input", str(fixture_path("identity_channel.json")),
                 "--grid", "1", "--output", str(out), "--svg"]) == 0
    svg = out.with_suffix(".svg")
    assert svg.exists()
    assert "<svg" in svg.read_text()


def test_region_svg_needs_output(fixture_path):
    assert main(["region", "--input", str(fixture_path("identity_channel.json")), "--grid", "1", "--svg"]) == 2


def test_non_positive_grid(fixture_path):
    assert main(["region", "--input", str(fixture_path("identity_channel.json")), "--grid", "0"]) == 2


def test_simulate_trivial_code(tmp_path, trivial_code):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--input", str(trivial_code), "--output", str(out)]) == 0
    frame = _read(out)
    assert frame.loc[0, "public_error"] == 0.0
    assert frame.loc[0, "privacy_error"] == pytest.approx(0.0, abs=1e-9)
    assert bool(frame.loc[0, "privacy_pass"])


def test_simulate_needs_an_ensemble(fixture_path):
    assert main(["simulate", "--input", str(fixture_path("identity_channel.json"))]) == 2


def test_verify_rejects_corrupted_fixture(fixture_path):
    assert main(["verify", "--input", str(fixture_path("corrupted_state.json")), "--scale", "0.05"]) == 2


def test_verify_single_suite(tmp_path):
    out = tmp_path / "verify.csv"
    assert main(["verify", "--suite", "convex_split", "--scale", "0.05", "--output", str(out)]) == 0
    frame = _read(out)
    assert list(frame["suite"]) == ["convex_split"]
    assert bool(frame.loc[0, "passed"])


def test_unknown_suite_is_an_argument_error():
    with pytest.raises(SystemExit) as excinfo:
        build_parser().parse_args(["verify", "--suite", "nonexistent"])
    assert excinfo.value.code == 2

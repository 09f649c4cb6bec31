import json

import numpy as np
import pytest

from iontoffoli.cli import build_parser, main, parse_values
from iontoffoli.cli.config import (
    DEFAULT_PARAMS,
    config_echo,
    merge_params,
    noise_config,
    resolve_config,
)
from iontoffoli.cli.output import complex_frame, to_jsonable
from iontoffoli.sim.sequences import serialize_sequence, toffoli_sequence
from tests.sim_utils import TOFFOLI_FILE, TWO_PI

FAST = ["--samples", "200"]
CONF = {
    "verbose": False,
    "defaults": {"samples": 500, "seed": 1},
    "presets": {"noisy": {"epsilon": 0.07, "detuning_hz": 100}},
}


def run(capsys, *argv):
    status = main(list(argv))
    return status, capsys.readouterr().out


def run_json(capsys, *argv):
    status, out = run(capsys, *argv)
    return status, json.loads(out)


def test_merge_params():
    params = merge_params({"epsilon": "0.07", "nmax": 6.0, "verbose": 1})
    assert params["epsilon"] == 0.07
    assert params["nmax"] == 6 and isinstance(params["nmax"], int)
    assert params["verbose"] is True
    assert params["seed"] == DEFAULT_PARAMS["seed"]
    with pytest.raises(KeyError):
        merge_params({"rabi": 1})
    with pytest.raises(ValueError):
        merge_params({"epsilon": 1.5})
    with pytest.raises(ValueError):
        merge_params({"format": "xml"})
    with pytest.raises(ValueError):
        merge_params({"nmax": 1})


def test_resolve_config_layers():
    config = resolve_config({"seed": None}, conf=CONF)
    assert config["samples"] == 500 and config["seed"] == 1
    config = resolve_config({"epsilon": 0.01}, "noisy", CONF)
    assert config["epsilon"] == 0.01
    assert config["detuning_hz"] == 100
    assert noise_config(config).detuning == pytest.approx(TWO_PI * 100)
    with pytest.raises(KeyError):
        resolve_config({}, "missing", CONF)
    assert resolve_config({}, conf={**CONF, "verbose": True})["verbose"]


def test_config_echo_hides_local_settings():
    echo = config_echo(merge_params({"out": "x.json", "workers": 3}))
    assert "out" not in echo and "workers" not in echo and "verbose" not in echo
    assert echo["seed"] == DEFAULT_PARAMS["seed"]


def test_parser():
    args = build_parser().parse_args(
        ["sweep", "--axis", "epsilon", "--values", "0, 0.02,0.05", "--nmax", "6"]
    )
    assert args.values == [0, 0.02, 0.05]
    assert args.nmax == 6
    assert args.epsilon is None
    assert parse_values("1 2,3") == [1, 2, 3]
    with pytest.raises(SystemExit):
        build_parser().parse_args(["sweep", "--axis", "rabi", "--values", "1"])
    with pytest.raises(SystemExit):
        build_parser().parse_args(["unitary", "--format", "xml"])


def test_to_jsonable():
    assert to_jsonable({"z": 1 + 2j}) == {"z": {"re": 1.0, "im": 2.0}}
    assert to_jsonable([float("nan"), (1, 2)]) == [None, [1, 2]]
    frame = complex_frame(np.eye(2) * 1j, ["D", "S"])
    assert list(frame.columns) == ["row", "col", "re", "im"]
    assert frame["im"].tolist() == [1, 0, 0, 1]


def test_unitary_passes(capsys):
    status, document = run_json(capsys, "unitary")
    assert status == 0
    result = document["result"]
    assert result["verdict"] == "PASS"
    assert result["deviation"] < 1e-9
    assert result["labels"][0] == "DDD"
    assert set(result["unitary"][7][6]) == {"re", "im"}
    assert document["config"]["sequence"] == "builtin:toffoli"
    assert "out" not in document["config"]


def test_unitary_literal_phase_fails(capsys, tmp_path):
    path = tmp_path / "literal.seq"
    path.write_text(serialize_sequence(toffoli_sequence(1.0)), encoding="utf8")
    status, document = run_json(capsys, "unitary", "--sequence", str(path))
    assert status == 1
    assert document["result"]["verdict"] == "FAIL"


def test_noisy_unitary_reports_without_failing(capsys):
    status, document = run_json(capsys, "unitary", "--epsilon", "0.07")
    assert status == 0
    assert document["result"]["verdict"] == "FAIL"
    assert document["config"]["epsilon"] == 0.07


def test_truth_table_csv(capsys):
    status, out = run(capsys, "truth-table", "--format", "csv", "--shots", "0")
    assert status == 0
    lines = out.strip().splitlines()
    assert lines[0] == "input,DDD,DDS,DSD,DSS,SDD,SDS,SSD,SSS"
    assert len(lines) == 9
    ssd = lines[7].split(",")
    assert ssd[0] == "SSD"
    assert float(ssd[8]) == pytest.approx(1, abs=1e-9)


def test_truth_table_sampled(capsys):
    _, document = run_json(capsys, "truth-table", "--epsilon", "0.07", "--shots", "50")
    result = document["result"]
    assert result["shots"] == 50
    assert 0 < result["mean_correct"] < 1
    for row in result["probabilities"]:
        assert sum(row) == pytest.approx(1)


def test_chi_outputs(capsys):
    status, document = run_json(capsys, "chi")
    assert status == 0
    assert document["result"]["F_pro"] == pytest.approx(1, abs=1e-9)
    assert document["result"]["trace"] == pytest.approx(1, abs=1e-9)
    assert len(document["result"]["abs_chi"]) == 64
    assert "chi" not in document["result"]

    _, out = run(capsys, "chi", "--complex", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "row,col,re,im,abs"
    assert len(lines) == 1 + 64 * 64


def test_fidelity(capsys):
    status, document = run_json(capsys, "fidelity", "--preset", "lab", *FAST)
    result = document["result"]
    assert status == 0
    assert result["samples"] == 200
    gap = abs(result["estimate"] - result["analytic_crosscheck"])
    assert gap < 5 * result["std_error"]
    assert "consistent" in result
    assert 0.68 <= result["estimate"] <= 0.88
    _, again = run_json(capsys, "fidelity", "--preset", "lab", *FAST)
    assert again["result"]["estimate"] == result["estimate"]


@pytest.mark.parametrize("command", ["fidelity", "budget"])
def test_output_independent_of_workers(capsys, command):
    _, serial = run(capsys, command, "--preset", "lab", "--workers", "1", *FAST)
    _, threaded = run(capsys, command, "--preset", "lab", "--workers", "4", *FAST)
    assert serial == threaded


def test_sweep_csv(capsys):
    status, out = run(
        capsys,
        "sweep",
        "--axis",
        "detuning",
        "--values",
        "0,100",
        "--format",
        "csv",
        *FAST,
    )
    assert status == 0
    lines = out.strip().splitlines()
    assert lines[0] == "value,F_mean,std_error,F_pro,duration,leakage"
    assert [float(line.split(",")[0]) for line in lines[1:]] == [0, 100]


def test_budget(capsys):
    status, document = run_json(capsys, "budget", "--preset", "lab", *FAST)
    result = document["result"]
    assert status == 0
    assert [row["mechanism"] for row in result["mechanisms"]] == [
        "addressing",
        "detuning",
        "combined",
    ]
    assert result["cnot_cascade"]["fidelity"] == pytest.approx(0.926 ** 6)
    assert result["duration"] == pytest.approx(1.4104e-3, abs=1e-6)


def test_run_file(capsys, tmp_path):
    out = tmp_path / "run.json"
    status, printed = run(capsys, "run", TOFFOLI_FILE, "--out", str(out), *FAST)
    assert status == 0
    assert printed == ""
    document = json.loads(out.read_text(encoding="utf8"))
    result = document["result"]
    assert result["sequence"] == "toffoli"
    assert result["pulses"] == 15
    assert result["verdict"] == "PASS"
    assert result["mean_correct"] == pytest.approx(1, abs=1e-9)
    assert result["F_mean"] == pytest.approx(1, abs=1e-9)
    assert set(result) >= {"unitary", "truth_table", "fidelity"}


@pytest.mark.parametrize(
    "argv",
    [
        ["unitary", "--epsilon", "2"],
        ["unitary", "--nmax", "1"],
        ["unitary", "--preset", "missing"],
        ["unitary", "--sequence", "builtin:cnot"],
        ["run", "does-not-exist.seq"],
    ],
)
def test_usage_errors(capsys, argv):
    status, out = run(capsys, *argv)
    assert status == 2
    assert out == ""


@pytest.mark.parametrize(
    "text",
    ["sb 1 pi\n", "ions 4\nsb 4 pi 0\n"],
    ids=["malformed", "too-many-ions"],
)
def test_unusable_sequence_file(capsys, tmp_path, text):
    path = tmp_path / "broken.seq"
    path.write_text(text, encoding="utf8")
    status, out = run(capsys, "unitary", "--sequence", str(path))
    assert status == 2
    assert out == ""


def test_directory_as_sequence_file(capsys, tmp_path):
    status, out = run(capsys, "run", str(tmp_path))
    assert status == 2
    assert out == ""

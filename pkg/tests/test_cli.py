import csv
import json
import subprocess
import sys

import pytest

from iabandit import cli
from iabandit.errors import ParseError, ValidationError


def write_config(tmp_path, text):
    path = tmp_path / "exp.toml"
    path.write_text(text, encoding="utf-8")
    return path


def test_minimal_config_gets_defaults(tmp_path):
    spec = cli.parse_config(write_config(tmp_path, 'experiment = "regret_vs_n"'))
    assert spec.states == 4
    assert spec.samples == 1000
    assert spec.runs == 100
    assert spec.seed == 42
    assert spec.slots == 10_000
    assert spec.reward == "sumrate"
    assert spec.policies == ["oracle", "klucb", "ucb1", "random"]
    assert spec.channel_model == "independent"


def test_validation_names_offending_field(tmp_path):
    with pytest.raises(ValidationError, match="states"):
        cli.parse_config(write_config(tmp_path, 'experiment = "regret_vs_n"\nstates = 0'))
    with pytest.raises(ValidationError, match="policy"):
        cli.parse_config(write_config(tmp_path, 'experiment = "regret_vs_n"\npolicies = ["greedy"]'))
    with pytest.raises(ValidationError, match="snr_grid_db"):
        cli.parse_config(
            write_config(tmp_path, 'experiment = "sumrate_vs_power"\nsnr_grid_db = [10.0, 5.0]')
        )


def test_unknown_keys_rejected(tmp_path):
    with pytest.raises(ValidationError, match="horizon"):
        cli.parse_config(write_config(tmp_path, 'experiment = "regret_vs_n"\nhorizon = 3'))


def test_malformed_toml_raises_parse_error(tmp_path):
    with pytest.raises(ParseError):
        cli.parse_config(write_config(tmp_path, 'experiment = "regret_vs_n'))
    with pytest.raises(ParseError):
        cli.parse_config(tmp_path / "missing.toml")


def test_spec_round_trip(tmp_path):
    spec = cli.parse_config(
        write_config(
            tmp_path,
            'experiment = "sumrate_vs_power"\nstates = 2\nslots = 128\nruns = 3\n'
            "snr_grid_db = [0.0, 10.0]\nstate_powers = [[0.5, 0.5], [1.0, 1.0]]\n",
        )
    )
    again = cli.build_spec(cli.serialize_spec(spec))
    assert again == spec


def test_distributed_requires_chordal_reward():
    with pytest.raises(ValidationError, match="chordal"):
        cli.build_spec({"experiment": "regret_vs_n", "mode": "distributed"})
    spec = cli.build_spec(
        {"experiment": "regret_vs_n", "mode": "distributed", "reward": "chordal",
         "policies": ["klucb"]}
    )
    assert spec.mode == "distributed"


def test_snr_grid_flag_parsing():
    single, grid = cli._parse_snr("20")
    assert single == 20.0 and grid is None
    single, grid = cli._parse_snr("0:30:5")
    assert single is None and grid == [0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0]
    with pytest.raises(Exception):
        cli._parse_snr("0:30")


def run_cli(args):
    return subprocess.run(
        [sys.executable, "-m", "iabandit.cli", *args], capture_output=True, text=True
    )


def test_help_exits_zero():
    proc = run_cli(["--help"])
    assert proc.returncode == 0
    assert "usage" in proc.stdout.lower()


def test_unknown_flag_exits_two():
    proc = run_cli(["--frobnicate"])
    assert proc.returncode == 2
    assert "usage" in proc.stderr.lower()


def test_conflicting_mode_reward_exits_two():
    proc = run_cli(["--experiment", "regret_vs_n", "--mode", "distributed"])
    assert proc.returncode == 2
    assert "chordal" in proc.stderr


def test_smoke_run_writes_csv_and_manifest(tmp_path):
    out = tmp_path / "res"
    proc = run_cli([
        "--experiment", "sumrate_vs_power", "--runs", "2", "--slots", "256",
        "--samples", "60", "--snr-db", "0:30:15", "--out", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    with open(out / "sumrate_vs_power.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["power_db", "policy", "mean_sum_rate", "stderr", "runs"]
    body = rows[1:]
    assert len(body) == 3 * 5  # three grid points, five policies
    assert {r[1] for r in body} == {"oracle", "klucb", "ucb1", "random", "conventional"}
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["arms"] == 64
    assert manifest["seed"] == 42
    assert manifest["config"]["slots"] == 256
    assert manifest["outputs"] == {
        "sumrate_vs_power.csv": ["power_db", "policy", "mean_sum_rate", "stderr", "runs"]
    }


def test_states_flag_changes_arm_count(tmp_path):
    out = tmp_path / "res"
    proc = run_cli([
        "--experiment", "regret_vs_n", "--states", "2", "--runs", "2", "--slots", "64",
        "--samples", "40", "--policy", "random", "--out", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["arms"] == 8


def test_identical_config_gives_identical_csv(tmp_path):
    args = ["--experiment", "chordal_cdf", "--runs", "2", "--slots", "200",
            "--samples", "50", "--policy", "klucb", "--policy", "conventional"]
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_cli(args + ["--out", str(out1)]).returncode == 0
    assert run_cli(args + ["--out", str(out2)]).returncode == 0
    assert (out1 / "chordal_cdf.csv").read_bytes() == (out2 / "chordal_cdf.csv").read_bytes()


def test_config_file_plus_flag_overrides(tmp_path):
    cfg = write_config(
        tmp_path, 'experiment = "regret_vs_P"\nslots = 96\nruns = 2\nsamples = 40\n'
        'states_grid = [2]\npolicies = ["random"]\n'
    )
    out = tmp_path / "res"
    proc = run_cli(["--config", str(cfg), "--seed", "7", "--out", str(out)])
    assert proc.returncode == 0, proc.stderr
    manifest = json.loads((out / "manifest.json").read_text())
    assert manifest["seed"] == 7
    assert manifest["config"]["slots"] == 96
    with open(out / "regret_vs_p.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["states", "policy", "mean_regret", "stderr", "runs"]
    assert len(rows) == 2


def test_regret_csv_schema(tmp_path):
    out = tmp_path / "res"
    proc = run_cli([
        "--experiment", "regret_vs_n", "--runs", "2", "--slots", "80", "--samples", "40",
        "--policy", "oracle", "--policy", "random", "--out", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    with open(out / "regret_vs_n.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["slot", "policy", "mean_regret", "stderr", "runs"]
    assert len(rows) == 1 + 80 * 2
    # rows sorted by slot then policy; regret floats parse back
    slots = [int(r[0]) for r in rows[1:]]
    assert slots == sorted(slots)
    float(rows[1][2]); float(rows[1][3])


def test_distributed_vs_combinational_series(tmp_path):
    out = tmp_path / "res"
    proc = run_cli([
        "--experiment", "distributed_vs_combinational", "--runs", "2", "--slots", "96",
        "--samples", "40", "--snr-db", "0:20:20", "--policy", "klucb", "--policy", "random",
        "--out", str(out),
    ])
    assert proc.returncode == 0, proc.stderr
    with open(out / "distributed_vs_combinational.csv", newline="") as fh:
        rows = list(csv.reader(fh))
    labels = {r[1] for r in rows[1:]}
    assert labels == {"klucb", "random", "klucb_distributed"}

import csv
import json

import pytest

from corrdyn.channels import channel_to_json, identity_channel, swap_channel
from corrdyn.cli import main
from corrdyn.linalg import fidelity, load_state, save_state
from corrdyn.noise import long_time_state


@pytest.fixture
def identity_file(tmp_path):
    path = tmp_path / "identity.json"
    path.write_text(json.dumps(channel_to_json(identity_channel((2, 2)))))
    return str(path)


def test_ibar_identity(identity_file, capsys):
    assert main(["ibar", "--channel", identity_file, "--parties", "2,2"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc["ibar_raw"]) < 1e-9


def test_ibar_swap_with_csv(tmp_path, capsys):
    path = tmp_path / "swap.json"
    path.write_text(json.dumps(channel_to_json(swap_channel(2))))
    csv_path = tmp_path / "rows.csv"
    for _ in range(2):  # append twice, one header
        assert (
            main(
                [
                    "ibar",
                    "--channel",
                    str(path),
                    "--parties",
                    "2,2",
                    "--label",
                    "swap",
                    "--csv",
                    str(csv_path),
                ]
            )
            == 0
        )
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 2
    assert float(rows[0]["ibar"]) == pytest.approx(1.0)
    capsys.readouterr()


def test_ibar_bad_parties(identity_file):
    with pytest.raises(SystemExit):
        main(["ibar", "--channel", identity_file, "--parties", "two"])


def test_lowerbound_state(tmp_path, capsys):
    state_path = tmp_path / "lt.json"
    save_state(long_time_state("sym2"), state_path)
    assert main(["lowerbound", "--state", str(state_path), "--obs", "X,X"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["lower_bound"] == pytest.approx(0.0451, abs=1e-4)


def test_lowerbound_counts_roundtrip(tmp_path, capsys):
    state_path = tmp_path / "lt.json"
    save_state(long_time_state("sym2"), state_path)
    rec_path = tmp_path / "rec.json"
    assert (
        main(
            [
                "tomo",
                "simulate",
                "--state",
                str(state_path),
                "--shots",
                "5000",
                "--seed",
                "4",
                "--out",
                str(rec_path),
            ]
        )
        == 0
    )
    capsys.readouterr()
    csv_path = tmp_path / "lb.csv"
    assert (
        main(
            [
                "lowerbound",
                "--counts",
                str(rec_path),
                "--obs",
                "X,X",
                "--csv",
                str(csv_path),
            ]
        )
        == 0
    )
    doc = json.loads(capsys.readouterr().out)
    assert doc["std_err"] is not None
    assert abs(doc["lower_bound"] - 0.0451) <= 4 * doc["std_err"] + 0.002
    with open(csv_path) as fh:
        rows = list(csv.DictReader(fh))
    assert rows[0]["lower_bound"]


def test_tomo_reconstruct_state(tmp_path, capsys):
    state_path = tmp_path / "lt.json"
    save_state(long_time_state("sym2"), state_path)
    rec_path = tmp_path / "rec.json"
    main(["tomo", "simulate", "--state", str(state_path), "--shots", "2000", "--seed", "1", "--out", str(rec_path)])
    out_path = tmp_path / "rho.json"
    assert main(["tomo", "reconstruct", "--record", str(rec_path), "--out", str(out_path)]) == 0
    summary = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert summary["type"] == "state"
    rho = load_state(out_path)
    assert fidelity(rho, long_time_state("sym2")) > 0.98


def test_tomo_simulate_scenario(tmp_path, capsys):
    sc = tmp_path / "scenario.json"
    sc.write_text(json.dumps({"model": "dephasing", "sigmaB": 1.0, "sigmaL": 0.0, "suscept": [1.0, 1.0]}))
    rec_path = tmp_path / "rec.json"
    assert main(["tomo", "simulate", "--scenario", str(sc), "--shots", "50", "--seed", "2", "--out", str(rec_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["settings"] == 144


def test_reproduce_fig8(tmp_path, capsys):
    out = tmp_path / "fig8.csv"
    assert main(["reproduce", "fig8", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert "[PASS]" in printed and "[FAIL]" not in printed
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert {r["panel"] for r in rows} == {"sym", "asym"}


def test_reproduce_fig4_analytic_only(tmp_path, capsys):
    out = tmp_path / "fig4_sym.csv"
    assert main(["reproduce", "fig4", "--variant", "sym", "--analytic-only", "--out", str(out)]) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 12
    assert float(rows[-1]["analytic_ref"]) == pytest.approx(0.125, abs=1e-3)
    capsys.readouterr()


def test_reproduce_exit_code_on_failed_check(tmp_path, capsys, monkeypatch):
    # CI contract: a violated scenario tolerance makes the command fail
    from corrdyn import experiments
    from corrdyn.experiments import ScenarioCheck, ScenarioResult

    failing = ScenarioResult(scenario="fig8", columns=("panel", "sigma_b", "sigma_l", "ibar"))
    failing.checks.append(ScenarioCheck("forced failure", False, "synthetic"))
    monkeypatch.setattr(experiments, "run_fig8", lambda: failing)
    rc = main(["reproduce", "fig8", "--out", str(tmp_path / "f.csv")])
    assert rc == 1
    assert "[FAIL]" in capsys.readouterr().out


def test_env_seed_override(tmp_path, capsys, monkeypatch):
    state_path = tmp_path / "lt.json"
    save_state(long_time_state("sym2"), state_path)
    monkeypatch.setenv("CORRDYN_SEED", "777")
    rec_path = tmp_path / "rec.json"
    main(["tomo", "simulate", "--state", str(state_path), "--shots", "10", "--seed", "3", "--out", str(rec_path)])
    doc = json.loads(capsys.readouterr().out)
    assert doc["seed"] == 777

import csv
import json
import os

import pytest

from satgrowth import cli, cnf, report
from satgrowth.ensemble import EnsembleConfig, extrapolate_omega, run_ensemble


def _read_header(path):
    with open(path, newline="") as fh:
        return next(csv.reader(fh))


def test_cli_gen_solve_roundtrip(tmp_path, capsys):
    cnf_path = str(tmp_path / "inst.cnf")
    assert cli.main(["gen", "--n-vars", "12", "--n3", "50", "--seed", "4",
                     "--out", cnf_path]) == 0
    inst = cnf.read_dimacs(cnf_path)
    assert inst.n_vars == 12 and inst.n_clauses == 50
    json_path = str(tmp_path / "run.json")
    assert cli.main(["solve", cnf_path, "--seed", "2", "--json", json_path]) == 0
    rec = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert rec["result"] in ("sat", "unsat")
    assert rec["n_vars"] == 12
    full = json.load(open(json_path))
    assert set(full) == {"result", "q_splits", "b_leaves", "g_node", "cloud",
                         "seed", "heuristic", "n_vars", "alpha0"}


def test_cli_oracle(tmp_path, capsys):
    cnf_path = str(tmp_path / "small.cnf")
    cli.main(["gen", "--n-vars", "6", "--n3", "38", "--seed", "11",
              "--out", cnf_path])
    assert cli.main(["oracle", cnf_path, "--mc", "500"]) == 0
    out = capsys.readouterr().out
    assert "B(T):" in out and "monte carlo leaves:" in out


def test_cli_error_exit(capsys):
    assert cli.main(["oracle", "/nonexistent/file.cnf"]) == 1
    assert "error:" in capsys.readouterr().err


def test_cli_ode_pde_annealed(capsys):
    assert cli.main(["pde", "--alpha0", "10"]) == 0
    assert "omega_THE = 0.0323" in capsys.readouterr().out
    assert cli.main(["ode", "--alpha0", "3.5", "--find-g"]) == 0
    assert "G: t =" in capsys.readouterr().out
    assert cli.main(["annealed", "--alpha0", "10", "--n-vars", "30"]) == 0
    assert "log2(peak mass)/N" in capsys.readouterr().out


def test_config_file_parsing(tmp_path, capsys):
    cfg = tmp_path / "ens.cfg"
    cfg.write_text("schema_version = 1\nalpha0 = 5.0\nn_values = 12,16\n"
                   "trials_per_n = 10\nbase_seed = 3\n# comment\n")
    assert cli.main(["ensemble", "--config", str(cfg), "--workers", "1"]) == 0
    # flags override file values
    out_path = tmp_path / "recs.csv"
    assert cli.main(["ensemble", "--config", str(cfg), "--trials", "5",
                     "--out", str(out_path), "--workers", "1"]) == 0
    with open(out_path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 10  # 5 trials x 2 sizes
    bad = tmp_path / "bad.cfg"
    bad.write_text("alpha0 = 5.0\n")
    assert cli.main(["ensemble", "--config", str(bad), "--workers", "1"]) == 1


def test_report_table1(tmp_path):
    cfg = EnsembleConfig(10.0, [20, 30, 40], 30, base_seed=6, parallelism=2)
    est = extrapolate_omega(run_ensemble(cfg))
    path = report.report_table1(str(tmp_path / "table1.csv"), {10.0: est},
                                unsat_alphas=(10.0, 20.0),
                                upper_sat_alpha=None)
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert [r["alpha0"] for r in rows] == ["10", "20"]
    assert abs(float(rows[0]["omega_the"]) - 0.0323) < 0.001
    assert rows[0]["omega_exp"] != ""
    assert float(rows[1]["asymptote"]) == pytest.approx(0.2915420119866045 / 20)


def test_report_phase_diagram_deterministic(tmp_path):
    d1 = tmp_path / "a"
    d2 = tmp_path / "b"
    p1 = report.report_phase_diagram(str(d1), branch_alphas=(2.0,),
                                     tree_alphas=(10.0,))
    p2 = report.report_phase_diagram(str(d2), branch_alphas=(2.0,),
                                     tree_alphas=(10.0,))
    for key in p1:
        assert open(p1[key], "rb").read() == open(p2[key], "rb").read()
    assert _read_header(p1["trajectories"]) == ["kind", "alpha0", "t", "p",
                                                "alpha"]
    assert _read_header(p1["lines"]) == ["p", "alpha_critical", "alpha_halt"]


def test_report_cloud_and_mass(tmp_path):
    cloud = report.report_cloud(str(tmp_path / "cloud.csv"), 4.3, 30, 2)
    assert _read_header(cloud) == ["p", "alpha", "t"]
    with open(cloud, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) > 3
    mass = report.report_mass_curve(str(tmp_path / "mass.csv"), 10.0, 30)
    assert _read_header(mass) == ["T", "total_mass", "mean_c2", "mean_c3"]


def test_report_surface(tmp_path):
    path = report.report_surface(str(tmp_path / "surf.csv"), 10.0, 0.03,
                                 n_fan=9, grid=(8, 8))
    assert _read_header(path) == ["p", "alpha", "omega_nats"]
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 64


def test_cli_report_command(tmp_path, capsys):
    out = str(tmp_path / "cloud.csv")
    assert cli.main(["report", "cloud", "--out", out, "--alpha0", "4.3",
                     "--n-vars", "25", "--seed", "3"]) == 0
    assert os.path.exists(out)

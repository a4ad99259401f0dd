import json
import subprocess
import sys
from pathlib import Path

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fracgrad.cli import main
from fracgrad.config import ExperimentConfig, format_config, parse_config

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


def run_cli(*args):
    return main([str(a) for a in args])


def parse_kv(text):
    out = {}
    for line in text.splitlines():
        if " = " in line:
            k, v = line.split(" = ", 1)
            out[k] = v
    return out


def write_cfg(tmp_path, name="run.cfg", **kw):
    cfg = ExperimentConfig(output=str(tmp_path / "out" / "traj"), **kw)
    p = tmp_path / name
    p.write_text(format_config(cfg))
    return p


# derive


def test_derive_square_with_quadrature(capsys):
    assert run_cli("derive", "--function", "poly:0,0,1", "--alpha", 0.5, "--lower", 0, "--upper", 1,
                   "--mode", "extended", "--quadrature") == 0
    out = parse_kv(capsys.readouterr().out)
    assert float(out["value"]) == pytest.approx(1.5045055561, abs=1e-9)
    assert out["value"] == format(float(out["value"]), ".17g")
    assert len(out["value"].replace(".", "").lstrip("0")) == 17
    assert float(out["abs_diff"]) <= 1e-6
    assert out["terms_used"] == "2" and out["status"] == "ExactFinite"


def test_derive_constant(capsys):
    assert run_cli("derive", "--function", "const:5", "--alpha", 0.3, "--lower", 0, "--upper", 2) == 0
    assert float(parse_kv(capsys.readouterr().out)["value"]) == 0.0


def test_derive_strict_domain_error(capsys):
    code = run_cli("derive", "--function", "poly:0,0,1", "--alpha", 0.5, "--lower", 0, "--upper", 1, "--mode", "strict")
    assert code == 2
    assert "Gamma(-0.5)" in capsys.readouterr().err


def test_derive_env_mode(monkeypatch, capsys):
    monkeypatch.setenv("FRACGRAD_GAMMA_MODE", "strict")
    assert run_cli("derive", "--function", "poly:0,0,1", "--alpha", 0.5, "--lower", 0, "--upper", 1) == 2
    assert run_cli("derive", "--function", "poly:0,0,1", "--alpha", 0.5, "--lower", 0, "--upper", 1,
                   "--mode", "extended") == 0


@pytest.mark.parametrize(
    "argv",
    [
        ["derive", "--function", "poly:0,0,1", "--alpha", "x", "--lower", "0", "--upper", "1"],
        ["derive", "--function", "poly:0,0,1", "--alpha", "0.5"],
        ["derive", "--function", "bogus:1", "--alpha", "0.5", "--lower", "0", "--upper", "1"],
        ["derive", "--function", "poly:1,1", "--alpha", "0.5", "--lower", "0", "--upper", "1", "--mode", "loose"],
        ["nosuchcommand"],
        [],
    ],
)
def test_malformed_flags_exit_1(argv, capsys):
    assert main(argv) == 1


def test_derive_lower_above_upper_is_domain_error():
    assert run_cli("derive", "--function", "poly:0,0,1", "--alpha", 0.5, "--lower", 1, "--upper", 0) == 2


# optimize


def test_optimize_gd_shifted_quadratic(tmp_path):
    p = write_cfg(tmp_path, function="shiftquad:3.0,1.0", algorithm="gd", mu=0.1, x0=0.0)
    assert run_cli("optimize", p) == 0
    meta = json.loads((tmp_path / "out" / "traj.json").read_text())
    assert meta["terminal_status"] == "StoppedByTolerance"
    assert abs(meta["final_iterate"] - 3.0) <= 1e-8
    rows = (tmp_path / "out" / "traj.csv").read_text().splitlines()
    assert rows[0] == "k,x_k,D_k,terms_used,series_status,lag_gap"
    assert float(rows[-1].split(",")[1]) == meta["final_iterate"]


def test_optimize_twice_identical_bytes(tmp_path):
    p = write_cfg(tmp_path, function="poly:0,0,1", alpha=0.5, x0=2.0, max_iters=200)
    assert run_cli("optimize", p) == 0
    first = {f.name: f.read_bytes() for f in (tmp_path / "out").iterdir()}
    assert run_cli("optimize", p) == 0
    second = {f.name: f.read_bytes() for f in (tmp_path / "out").iterdir()}
    assert first == second and len(first) == 2


def test_optimize_algo3_strict_exit_3(tmp_path):
    p = write_cfg(tmp_path, function="poly:0,0,1", algorithm="algo3", schedule="const:0.5", gamma_mode="strict", x0=1.0)
    assert run_cli("optimize", p) == 3
    meta = json.loads((tmp_path / "out" / "traj.json").read_text())
    assert meta["terminal_status"] == "SeriesDomainError"
    assert (tmp_path / "out" / "traj.csv").exists()


def test_optimize_parse_error(tmp_path):
    p = tmp_path / "bad.cfg"
    p.write_text('function = poly:0,0,1\n')  # unquoted string
    assert run_cli("optimize", p) == 1
    p.write_text('mu = "fast"\n')
    assert run_cli("optimize", p) == 1
    p.write_text("colour = 3\n")
    assert run_cli("optimize", p) == 1
    assert run_cli("optimize", tmp_path / "missing.cfg") == 1


def test_optimize_jobs_order(tmp_path, capsys):
    paths = []
    for j, x0 in enumerate([0.0, 1.0, 2.0]):
        cfg = ExperimentConfig(function="shiftquad:3.0,1.0", algorithm="gd", x0=x0,
                               output=str(tmp_path / f"o{j}"))
        p = tmp_path / f"c{j}.cfg"
        p.write_text(format_config(cfg))
        paths.append(p)
    assert run_cli("optimize", *paths, "--jobs", 2) == 0
    lines = [l for l in capsys.readouterr().out.splitlines() if l.endswith(".json")]
    assert [l.split(":")[0] for l in lines] == [str(p) for p in paths]


# audit


def _optimize(tmp_path, **kw):
    p = write_cfg(tmp_path, **kw)
    assert run_cli("optimize", p) in (0, 3)
    return tmp_path / "out" / "traj.csv"


def test_audit_constant_trajectory(tmp_path, capsys):
    traj = _optimize(tmp_path, function="const:2", alpha=0.5, x0=1.0, step_tol=0.0, max_iters=10)
    assert run_cli("audit", traj, "--x-star", 3.0) == 0
    out = capsys.readouterr().out
    assert "paper_direction_failures=0" in out and "geometric_failures=0" in out
    rows = (tmp_path / "out" / "traj_audit.csv").read_text().splitlines()
    header = rows[0].split(",")
    lhs = header.index("lhs_12a")
    assert all(float(r.split(",")[lhs]) == 0.0 for r in rows[1:])


def test_audit_witness_config(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    assert run_cli("optimize", CONFIGS / "witness_direction.cfg") == 0
    assert run_cli("audit", "out/witness_direction.csv") == 0
    out = capsys.readouterr().out
    failures = int(out.split("paper_direction_failures=")[1].split()[0])
    assert failures >= 1
    report = json.loads(Path("out/witness_direction_audit.json").read_text())
    assert report["paper_direction_witnesses"]


def test_audit_short_trajectory_exit_4(tmp_path):
    traj = _optimize(tmp_path, function="poly:0,0,1", alpha=0.5, x0=2.0, warmup="replicate_x0")
    assert run_cli("audit", traj, "--x-star", 0.0) == 4


def test_audit_rejects_non_algo1(tmp_path):
    traj = _optimize(tmp_path, function="shiftquad:3.0,1.0", algorithm="gd")
    assert run_cli("audit", traj) == 1


def test_audit_needs_x_star(tmp_path):
    traj = _optimize(tmp_path, function="exp:1,1", alpha=0.5, x0=0.0, max_iters=20)
    assert run_cli("audit", traj) == 1


def test_audit_twice_identical(tmp_path):
    traj = _optimize(tmp_path, function="poly:0,0,1", alpha=0.5, x0=2.0, max_iters=300)
    assert run_cli("audit", traj, "--x-star", 0.0) == 0
    a = (tmp_path / "out" / "traj_audit.json").read_bytes(), (tmp_path / "out" / "traj_audit.csv").read_bytes()
    assert run_cli("audit", traj, "--x-star", 0.0) == 0
    b = (tmp_path / "out" / "traj_audit.json").read_bytes(), (tmp_path / "out" / "traj_audit.csv").read_bytes()
    assert a == b


# counterexample


def test_counterexample_gamma_domain(capsys):
    assert run_cli("counterexample", "gamma-domain", "--alpha", 0.5) == 0
    rec = json.loads(capsys.readouterr().out)
    vals = [r["extended_value"] for r in rec["rows"]]
    assert vals[:2] == [-0.5, 0.375]
    assert all(r["strict_error"] for r in rec["rows"])


def test_counterexample_sigma_sign(capsys):
    assert run_cli("counterexample", "sigma-sign", "--alpha", 0.5, "--range", "0.1:0.9") == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["sigma_abs"] > 0
    assert rec["index_signs"] == [(-1) ** (i + 1) for i in range(33)]


def test_counterexample_geometric(capsys, tmp_path):
    out = tmp_path / "geo.json"
    assert run_cli("counterexample", "geometric", "--function", "poly:0,0,1", "--output", out) == 0
    rec = json.loads(out.read_text())
    assert rec["offending"] and all(o["delta"] >= 1 for o in rec["offending"])
    assert run_cli("counterexample", "geometric", "--function", "const:1") == 5


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "fracgrad", "counterexample", "gamma-domain", "--alpha", "0.999"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["rows"][0]["strict_error"]


# config


def test_config_example_roundtrip():
    text = (CONFIGS / "witness_direction.cfg").read_text()
    cfg = parse_config(text)
    assert cfg.x_star == 0.0 and cfg.formats == ["csv", "json"]
    assert parse_config(format_config(cfg)) == cfg


def test_all_shipped_configs_parse():
    for p in CONFIGS.glob("*.cfg"):
        parse_config(p.read_text())


@given(
    alpha=st.floats(0.01, 1.0),
    mu=st.floats(1e-4, 10, allow_subnormal=False),
    K=st.integers(1, 10),
    x0=st.floats(-1e6, 1e6),
    eps=st.one_of(st.none(), st.floats(1e-6, 1.0)),
    algorithm=st.sampled_from(["algo1", "algo3", "gd"]),
    mode=st.sampled_from(["strict", "extended"]),
    output=st.text(st.characters(blacklist_categories=["Cs", "Cc"]), max_size=20),
    formats=st.sampled_from([["csv"], ["json"], ["csv", "json"]]),
)
def test_config_roundtrip(alpha, mu, K, x0, eps, algorithm, mode, output, formats):
    cfg = ExperimentConfig(alpha=alpha, mu=mu, K=K, x0=x0, epsilon=eps, algorithm=algorithm,
                           gamma_mode=mode, output=output, formats=formats,
                           schedule="sigmoid:0.1,0.9,0.0,1.0" if algorithm == "algo3" else "")
    assert parse_config(format_config(cfg)) == cfg

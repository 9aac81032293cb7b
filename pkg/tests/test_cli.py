import csv
import io
import json

import pytest

from conftest import base_config
from spin1_ac.cli import DEFAULT_SEED, TEST_HOOKS_ENV, main
from spin1_ac.config import ConfigError, SweepSpec, parse_config
from spin1_ac.ac_phase import total_phase


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


# --- verify ------------------------------------------------------------------

def test_verify_default(capsys):
    code, out, _ = run(capsys, "verify")
    assert code == 0
    lines = [l for l in out.splitlines() if l.startswith(("PASS", "FAIL"))]
    assert len(lines) >= 7 and all(l.startswith("PASS") for l in lines)
    assert out.startswith(f"seed {DEFAULT_SEED}")


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "--json", "--seed", "7")
    report = json.loads(out)
    assert code == 0 and report["passed"] and report["seed"] == 7
    names = [c["name"] for c in report["checks"]]
    assert len(names) == len(set(names)) >= 7
    assert all(set(c) == {"name", "passed", "detail"} for c in report["checks"])


def test_verify_perturb_hook(capsys, monkeypatch):
    monkeypatch.setenv(TEST_HOOKS_ENV, "1")
    code, out, _ = run(capsys, "verify", "--json", "--perturb")
    assert code == 1
    checks = {c["name"]: c for c in json.loads(out)["checks"]}
    assert not checks["beta_algebra"]["passed"]


def test_verify_perturb_rejected_without_hooks(capsys, monkeypatch):
    monkeypatch.delenv(TEST_HOOKS_ENV, raising=False)
    code, _, err = run(capsys, "verify", "--perturb")
    assert code == 2 and TEST_HOOKS_ENV in err


def test_verify_out_file(capsys, tmp_path):
    target = tmp_path / "report.txt"
    code, out, _ = run(capsys, "verify", "--out", str(target))
    assert code == 0 and out == ""
    assert "checks passed" in target.read_text()


# --- phase -------------------------------------------------------------------

def test_phase_unit_circle(capsys, write_config):
    path = write_config(base_config(particle={"mu_m": 0.5, "s3": 1}))
    code, out, _ = run(capsys, "phase", "--config", path, "--json")
    res = json.loads(out)
    assert code == 0
    assert abs(res["phi_ac"] - 1.0) <= 1e-8
    assert res["delta_ncs"] == 0.0 and res["delta_ncps"] == 0.0


def test_phase_far_loop(capsys, write_config):
    cfg = base_config(loop={"type": "circle", "cx": 5.0, "cy": 5.0, "r": 1.0})
    code, out, _ = run(capsys, "phase", "--config", write_config(cfg))
    (row,) = rows(out)
    assert code == 0
    for key in ("phi_ac", "delta_ncs", "delta_ncps", "total"):
        assert abs(float(row[key])) < 1e-10


def test_phase_csv_header(capsys, write_config):
    _, out, _ = run(capsys, "phase", "--config", write_config(base_config()))
    assert out.splitlines()[0] == "phi_ac,delta_ncs,delta_ncps,total,error_estimate"


@pytest.mark.parametrize("override, field", [
    ({"loop": {"type": "circle", "r": -1.0}}, "loop.r"),
    ({"particle": {"mu_m": 0.5, "s3": 2}}, "particle.s3"),
    ({"nc": {"theta": 0.1, "alpha": 1.5}}, "nc.alpha"),
    ({"schema": 2}, "schema"),
    ({"loop": {"type": "circle", "r": 1.0, "cx": 1.0}}, "loop"),
])
def test_phase_invalid_config(capsys, write_config, override, field):
    code, out, err = run(capsys, "phase", "--config", write_config(base_config(**override)))
    assert code == 2 and out == ""
    assert field in err


def test_phase_malformed_json(capsys, tmp_path):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    code, _, err = run(capsys, "phase", "--config", str(path))
    assert code == 2 and "JSON" in err


def test_phase_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "phase", "--config", str(tmp_path / "absent.json"))
    assert code == 2


def test_phase_quadrature_failure(capsys, write_config):
    # filament just outside the clearance guard with a tiny panel budget
    cfg = base_config(filaments=[{"x": 1.0 + 1e-6, "y": 0.0, "lambda_e": 1.0}],
                      quadrature={"rel_tol": 1e-14, "max_panels": 10})
    code, _, err = run(capsys, "phase", "--config", write_config(cfg))
    assert code == 3 and "quadrature" in err


def test_phase_deterministic(capsys, write_config):
    path = write_config(base_config(nc={"theta": 0.02, "alpha": 0.95}))
    outs = {run(capsys, "phase", "--config", path)[1] for _ in range(3)}
    outs |= {run(capsys, "phase", "--config", path, "--json")[1] for _ in range(2)}
    assert len(outs) == 2


# --- sweep -------------------------------------------------------------------

def test_sweep_theta_linear(capsys, write_config):
    path = write_config(base_config(loop={"type": "circle", "cx": 0.2, "cy": 0.1, "r": 1.3}))
    code, out, _ = run(capsys, "sweep", "--config", path,
                       "--sweep", '{"parameter": "theta", "values": [0, 0.01, 0.02]}')
    r = rows(out)
    assert code == 0 and [row["theta"] for row in r] == ["0", "0.01", "0.02"]
    d = [float(row["delta_ncs"]) for row in r]
    assert d[0] == 0.0 and d[1] != 0.0
    assert abs(d[2] / d[1] - 2) <= 1e-12


def test_sweep_alpha_starts_at_zero(capsys, write_config):
    path = write_config(base_config(nc={"theta": 0.01, "alpha": 1.0}))
    code, out, _ = run(capsys, "sweep", "--config", path,
                       "--sweep", '{"parameter": "alpha", "values": [1.0, 0.99, 0.9]}')
    d = [float(row["delta_ncps"]) for row in rows(out)]
    assert code == 0 and d[0] == 0.0
    assert abs(d[1]) < abs(d[2])


def test_sweep_s3(capsys, write_config):
    path = write_config(base_config())
    code, out, _ = run(capsys, "sweep", "--config", path,
                       "--sweep", '{"parameter": "s3", "values": [-1, 0, 1]}')
    phi = [float(row["phi_ac"]) for row in rows(out)]
    assert code == 0 and phi[0] == -phi[2] and phi[1] == 0.0 and phi[2] != 0.0


def test_sweep_from_file_and_config_key(capsys, write_config):
    spec = {"parameter": "radius", "values": {"start": 0.5, "stop": 2.0, "count": 4, "scale": "log"}}
    spec_path = write_config(spec, "sweep.json")
    a = run(capsys, "sweep", "--config", write_config(base_config()), "--sweep", spec_path)
    b = run(capsys, "sweep", "--config", write_config(base_config(sweep=spec), "with_sweep.json"))
    assert a[0] == b[0] == 0 and a[1] == b[1]
    assert len(rows(a[1])) == 4


def test_sweep_parallel_order(capsys, write_config):
    path = write_config(base_config(nc={"theta": 0.01, "alpha": 0.9}))
    spec = '{"parameter": "radius", "values": {"start": 0.5, "stop": 3.0, "count": 6}}'
    serial = run(capsys, "sweep", "--config", path, "--sweep", spec)[1]
    parallel = run(capsys, "sweep", "--config", path, "--sweep", spec, "--jobs", "4")[1]
    assert serial == parallel


def test_sweep_failing_row(capsys, write_config):
    cfg = base_config(filaments=[{"x": 1.0, "y": 0.0, "lambda_e": 1.0}],
                      loop={"type": "circle", "r": 0.5},
                      quadrature={"rel_tol": 1e-14, "max_panels": 10})
    spec = json.dumps({"parameter": "radius", "values": [0.5, 1.0 - 1e-6, 0.7]})
    code, out, err = run(capsys, "sweep", "--config", write_config(cfg), "--sweep", spec)
    assert code == 3 and out == "" and "row 1" in err


@pytest.mark.parametrize("spec", [
    '{"parameter": "mass", "values": [1, 2]}',
    '{"parameter": "theta", "values": [0.1]}',
    '{"parameter": "theta", "values": {"start": 0, "stop": 1, "count": 3, "scale": "log"}}',
    '{"parameter": "s3", "values": [0, 2]}',
    "not json at all",
])
def test_sweep_invalid_spec(capsys, write_config, spec):
    code, _, _ = run(capsys, "sweep", "--config", write_config(base_config()), "--sweep", spec)
    assert code == 2


def test_sweep_missing_spec(capsys, write_config):
    code, _, err = run(capsys, "sweep", "--config", write_config(base_config()))
    assert code == 2 and "sweep" in err


# --- convergence -------------------------------------------------------------

def test_convergence_default(capsys, write_config):
    code, out, _ = run(capsys, "convergence", "--config", write_config(base_config()), "--json")
    info = json.loads(out)
    assert code == 0 and 1.9 <= info["slope"] <= 2.1
    assert info["status"] == "certified" and len(info["deltas"]) == 7


def test_convergence_linear_field(capsys, write_config):
    conv = {"linear_field": {"e0": [0.1, 0.2], "jacobian": [[1.0, 0.3], [0.3, -1.0]]}}
    code, out, _ = run(capsys, "convergence", "--config", write_config(base_config(convergence=conv)))
    assert code == 0 and "exact agreement, Delta below noise floor" in out


def test_convergence_single_point_grid(capsys, write_config):
    cfg = base_config(convergence={"theta_grid": [0.01]})
    code, _, err = run(capsys, "convergence", "--config", write_config(cfg))
    assert code == 4 and "InsufficientGrid" in err


def test_convergence_degenerate_filament_momentum(capsys, write_config):
    # zero momentum: the shift is trivial, so the fit is degenerate
    cfg = base_config(convergence={"momentum": [0.0, 0.0]})
    code, _, err = run(capsys, "convergence", "--config", write_config(cfg))
    assert code == 4 and "DegenerateFit" in err


# --- argument handling -------------------------------------------------------

@pytest.mark.parametrize("argv", [[], ["bogus"], ["phase"], ["verify", "--seed", "x"]])
def test_usage_errors_exit_2(capsys, argv):
    with pytest.raises(SystemExit) as info:
        main(argv)
    assert info.value.code == 2


# --- config round trip -------------------------------------------------------

@pytest.mark.parametrize("loop", [
    {"type": "circle", "cx": 0.1, "cy": -0.2, "r": 1.4, "winding": -2},
    {"type": "polygon", "vertices": [[-1, -1], [2, -1], [2, 1.5], [-1, 1]]},
])
def test_config_round_trip(loop):
    raw = base_config(loop=loop, nc={"theta": 0.03, "alpha": 0.97},
                      filaments=[{"x": 0.0, "y": 0.0, "lambda_e": 1.0}, {"x": 5.0, "y": 0.5, "lambda_e": -2.0}],
                      convergence={"momentum": [0.2, 0.1], "linear_field": {"jacobian": [[1, 0], [0, -1]]}})
    cfg = parse_config(raw)
    again = parse_config(json.loads(json.dumps(cfg.to_dict())))
    assert again == cfg
    a = total_phase(cfg.loop, cfg.field, cfg.particle, cfg.nc, cfg.quadrature)
    b = total_phase(again.loop, again.field, again.particle, again.nc, again.quadrature)
    assert a == b


def test_sweep_spec_grid():
    spec = SweepSpec.from_dict({"parameter": "theta", "values": {"start": 1e-3, "stop": 1e-1, "count": 3, "scale": "log"}})
    assert spec.values == pytest.approx((1e-3, 1e-2, 1e-1), rel=1e-14)
    with pytest.raises(ConfigError):
        SweepSpec.from_dict({"parameter": "theta", "values": {"start": 0, "stop": 1, "count": 1}})

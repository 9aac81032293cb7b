"""Command-line entry point.

Subcommands::

    spin1-ac verify [--json] [--seed N]
    spin1-ac phase --config run.json [--json]
    spin1-ac sweep --config run.json --sweep sweep.json [--jobs N]
    spin1-ac convergence --config run.json [--json]

Exit codes: 0 ok, 1 algebra check failed, 2 config error, 3 quadrature failure,
4 convergence failure.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import ac_phase, em_fields, kemmer_algebra as ka
from .ac_phase import PhaseResult
from .config import ConfigError, SweepSpec, load_config
from .moyal_deformation import DegenerateFit, InsufficientGrid, star_shift_equivalence
from .quadrature import QuadratureNoConvergence

EXIT_OK, EXIT_ALGEBRA, EXIT_CONFIG, EXIT_QUADRATURE, EXIT_CONVERGENCE = 0, 1, 2, 3, 4
DEFAULT_SEED = 20240101
TEST_HOOKS_ENV = "SPIN1_AC_TEST_HOOKS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return format(float(x), ".17g")


# verify

def algebra_checks(rep: ka.KemmerRep, seed: int) -> list[dict]:
    checks = []

    def add(name, passed, detail=""):
        checks.append({"name": name, "passed": bool(passed), "detail": detail})

    report = ka.verify_beta_algebra(rep)
    add("beta_algebra", report.ok, f"{report.checked} triples, {len(report.violations)} violations")

    b = rep.beta_upper
    add("beta0_cube", b[0] ** 3 == b[0], "(beta^0)^3 == beta^0")
    add("betaj_cube", all(b[j] ** 3 == -b[j] for j in (1, 2, 3)), "(beta^j)^3 == -beta^j, j=1..3")

    try:
        S = ka.spin_tensor(rep)
        anti = all(S[l][r] == -S[r][l] for l in range(4) for r in range(4))
        add("spin_tensor_antisymmetry", anti, "S_lr == -S_rl for 16 pairs")
    except ArithmeticError as exc:
        add("spin_tensor_antisymmetry", False, str(exc))

    try:
        xis = ka.xi(rep)
    except ka.OddContraction as exc:
        add("xi_exact", False, str(exc))
        return checks
    add("xi_exact", all(not x.is_zero() for x in xis), "xi_nu Gaussian-integral and non-zero")
    x3 = xis[3]
    add("xi3_hermitian", x3 == x3.H)
    add("xi3_cube", x3 ** 3 == x3, "xi_3^3 == xi_3")
    tr = x3.trace()
    add("xi3_traceless", tr == (0, 0), f"trace = {tr[0]}+{tr[1]}i")

    comm = ka.commutator_condition(rep)
    add("commutator_nu012_zero", all(c.vanishes for c in comm[:3]),
        "norms " + ", ".join(f"{c.norm:.3g}" for c in comm[:3]))
    add("commutator_nu3_nonzero", comm[3].norm > 0, f"norm {comm[3].norm:.6g}")

    try:
        spec = ka.xi3_spectrum(rep)
        add("xi3_spectrum", True, f"multiplicities {spec.multiplicities}")
    except ka.SpectrumOutOfRange as exc:
        spec = None
        add("xi3_spectrum", False, str(exc))

    dirac = ka.spin_half_counterpart()
    bad = dirac.clifford_violations()
    add("dirac_clifford", not bad, f"{len(bad)} violating pairs")
    add("dirac_spectrum", True, f"multiplicities {dirac.spectrum.multiplicities}")
    if spec is not None:
        ratio = spec.max_abs / dirac.spectrum.max_abs
        add("spin_ratio", abs(ratio - 2.0) < 1e-10, f"max|xi_3| / max|g0 s12 / 2| = {ratio:.12g}")

    # seeded finite-difference cross-check of the field Jacobian
    rng = np.random.default_rng(seed)
    field = em_fields.LineChargeField.single(1.0)
    pts = rng.uniform(-2, 2, size=(100, 2))
    pts = pts[np.linalg.norm(pts, axis=1) > 0.1]
    h = 1e-6
    fd = np.stack([(em_fields.eval_E(field, pts + h * e) - em_fields.eval_E(field, pts - h * e)) / (2 * h)
                   for e in np.eye(2)], axis=1)
    an = em_fields.grad_E(field, pts)
    rel = float(np.max(np.abs(fd - an) / np.max(np.abs(an), axis=(1, 2))[:, None, None]))
    add("field_jacobian_fd", rel < 1e-6, f"{len(pts)} points, max rel dev {rel:.3g}")
    return checks


def cmd_verify(args, out) -> int:
    if args.perturb:
        if os.environ.get(TEST_HOOKS_ENV) != "1":
            print(f"--perturb is a test hook; set {TEST_HOOKS_ENV}=1 to enable it", file=sys.stderr)
            return EXIT_CONFIG
        rep = ka.perturbed_betas()
    else:
        rep = ka.build_betas()
    checks = algebra_checks(rep, args.seed)
    passed = all(c["passed"] for c in checks)
    if args.json:
        out.write(json.dumps({"seed": args.seed, "passed": passed, "checks": checks}, indent=2) + "\n")
    else:
        out.write(f"seed {args.seed}\n")
        for c in checks:
            out.write(f"{'PASS' if c['passed'] else 'FAIL'}  {c['name']:<26} {c['detail']}\n")
        out.write(f"{sum(c['passed'] for c in checks)}/{len(checks)} checks passed\n")
    return EXIT_OK if passed else EXIT_ALGEBRA


# phase / sweep

def compute(cfg) -> PhaseResult:
    return ac_phase.total_phase(cfg.loop, cfg.field, cfg.particle, cfg.nc, cfg.quadrature)


def write_rows(out, header, rows):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([fmt(v) for v in r])


def cmd_phase(args, out) -> int:
    cfg = load_config(args.config)
    res = compute(cfg)
    if args.json:
        out.write(json.dumps(res.as_dict()) + "\n")
    else:
        write_rows(out, PhaseResult.FIELDS, [list(res.as_dict().values())])
    return EXIT_OK


def _load_sweep(arg, config_path) -> SweepSpec:
    if arg is None:
        raw = json.loads(Path(config_path).read_text(encoding="utf-8")).get("sweep")
        if raw is None:
            raise ConfigError("sweep: give --sweep or a 'sweep' section in the config")
    else:
        try:
            raw = json.loads(Path(arg).read_text(encoding="utf-8")) if Path(arg).is_file() else json.loads(arg)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"sweep: cannot parse {arg!r}: {exc}") from None
    return SweepSpec.from_dict(raw)


class RowFailure(Exception):
    def __init__(self, index, cause):
        super().__init__(index, cause)
        self.index, self.cause = index, cause


def cmd_sweep(args, out) -> int:
    cfg = load_config(args.config)
    spec = _load_sweep(args.sweep, args.config)
    configs = [spec.apply(cfg, v) for v in spec.values]

    def run(i):
        try:
            return compute(configs[i])
        except (QuadratureNoConvergence, ac_phase.SingularPath) as exc:
            raise RowFailure(i, exc) from None

    with ThreadPoolExecutor(max_workers=max(1, args.jobs)) as pool:
        try:
            results = list(pool.map(run, range(len(configs))))
        except RowFailure as exc:
            print(f"sweep row {exc.index} ({spec.parameter}={spec.values[exc.index]}) failed: {exc.cause}",
                  file=sys.stderr)
            return EXIT_QUADRATURE
    write_rows(out, (spec.parameter,) + PhaseResult.FIELDS,
               [[v] + list(r.as_dict().values()) for v, r in zip(spec.values, results)])
    return EXIT_OK


# convergence

def cmd_convergence(args, out) -> int:
    cfg = load_config(args.config)
    conv = cfg.convergence
    field = conv.linear_field if conv.linear_field is not None else cfg.field
    p = conv.momentum if conv.momentum is not None else cfg.particle.k
    info = {"theta_grid": list(conv.theta_grid), "momentum": list(p),
            "field": "linear" if conv.linear_field is not None else "filaments"}
    try:
        rep = star_shift_equivalence(field, p, conv.theta_grid)
    except InsufficientGrid as exc:
        print(f"InsufficientGrid: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except DegenerateFit as exc:
        if conv.linear_field is None:
            print(f"DegenerateFit: {exc}", file=sys.stderr)
            return EXIT_CONVERGENCE
        info.update(deltas=list(exc.deltas), slope=None, status="exact agreement, Delta below noise floor")
        _emit_convergence(info, args.json, out)
        return EXIT_OK
    info.update(deltas=list(rep.deltas), first_order_gaps=list(rep.first_order_gaps),
                slope=rep.slope, points=rep.n_points,
                status="certified" if rep.certified else "order below 1.9")
    _emit_convergence(info, args.json, out)
    return EXIT_OK if rep.certified else EXIT_CONVERGENCE


def _emit_convergence(info, as_json, out):
    if as_json:
        out.write(json.dumps(info, indent=2) + "\n")
        return
    out.write(f"field {info['field']}, momentum ({fmt(info['momentum'][0])}, {fmt(info['momentum'][1])})\n")
    out.write("theta,delta\n")
    for t, d in zip(info["theta_grid"], info["deltas"]):
        out.write(f"{fmt(t)},{fmt(d)}\n")
    if info["slope"] is not None:
        out.write(f"fitted order {info['slope']:.6f}\n")
    out.write(f"{info['status']}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, default=DEFAULT_SEED, help="seed for randomized sampling")
    common.add_argument("--out", default=None, help="output file (default stdout)")

    ap = _Parser(prog="spin1-ac", description="Spin-1 Aharonov-Casher phase toolkit")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    v = sub.add_parser("verify", parents=[common], help="exact Kemmer-algebra checks")
    v.add_argument("--perturb", action="store_true", help=argparse.SUPPRESS)

    for name, helptext in (("phase", "phase for one configuration"),
                           ("sweep", "phase over a parameter sweep (CSV)"),
                           ("convergence", "star-product vs shift convergence order")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--config", required=True, help="JSON run configuration")
        if name == "sweep":
            p.add_argument("--sweep", default=None, help="sweep spec: JSON file or inline JSON")
            p.add_argument("--jobs", type=int, default=1, help="worker threads")
    return ap


COMMANDS = {"verify": cmd_verify, "phase": cmd_phase, "sweep": cmd_sweep, "convergence": cmd_convergence}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    buf = io.StringIO()
    try:
        code = COMMANDS[args.command](args, buf)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (QuadratureNoConvergence, ac_phase.SingularPath) as exc:
        print(f"quadrature failure: {exc}", file=sys.stderr)
        return EXIT_QUADRATURE
    text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        with contextlib.suppress(BrokenPipeError):
            sys.stdout.write(text)
    return code


if __name__ == "__main__":
    raise SystemExit(main())

"""Command-line front end.

Subcommands: ``derive``, ``optimize``, ``audit``, ``counterexample``.

Exit codes: 0 ok, 1 malformed input, 2 domain error, 3 run stopped by a
series domain error, 4 insufficient tail, 5 counterexample not found.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

from . import audit as audit_mod
from .caputo import TruncationPolicy, caputo_quadrature, caputo_series
from .config import ExperimentConfig, load_config
from .errors import DomainError, InsufficientTail, NotFound
from .functions import parse_function
from .optimize import Algorithm, FractionalConfig, TerminalStatus, run
from .report import dumps, load_trajectory, write_audit, write_trajectory
from .special_fn import GammaMode, default_mode

log = logging.getLogger("fracgrad")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_SERIES_DOMAIN = 3
EXIT_TAIL = 4
EXIT_NOT_FOUND = 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _g(x: float) -> str:
    return format(x, ".17g")


def cmd_derive(args) -> int:
    f = parse_function(args.function)
    mode = GammaMode.parse(args.mode) if args.mode else default_mode()
    policy = TruncationPolicy(args.abs_tol, args.max_terms, args.divergence_window)
    try:
        res = caputo_series(f, args.alpha, args.lower, args.upper, policy, mode)
    except DomainError as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    print(f"value = {_g(res.value)}")
    print(f"terms_used = {res.terms_used}")
    print(f"status = {res.status.value}")
    if args.quadrature:
        if args.upper == args.lower or args.alpha >= 1.0:
            oracle = 0.0 if args.upper == args.lower else f.derivative(1, args.upper)
        else:
            oracle = caputo_quadrature(f, args.alpha, args.lower, args.upper, args.nodes)
        print(f"oracle = {_g(oracle)}")
        print(f"abs_diff = {_g(abs(oracle - res.value))}")
    return EXIT_OK


def _optimize_one(path: str, output: str | None) -> tuple[int, str]:
    cfg = load_config(path)
    if output:
        cfg.output = output
    f = cfg.make_function()
    traj = run(f, cfg.make_fractional_config(), cfg.make_algorithm())
    written = write_trajectory(traj, cfg, cfg.output)
    line = (
        f"{path}: {traj.terminal_status.value} after {len(traj.steps)} steps, "
        f"final x = {_g(traj.final)} -> {', '.join(str(p) for p in written)}"
    )
    code = EXIT_SERIES_DOMAIN if traj.terminal_status is TerminalStatus.SERIES_DOMAIN_ERROR else EXIT_OK
    if traj.message:
        line += f"\n  {traj.message}"
    return code, line


def cmd_optimize(args) -> int:
    if args.output and len(args.config) > 1:
        raise UsageError("--output only applies to a single config")
    for path in args.config:
        # parse everything up front so a bad config fails before any run
        load_config(path)
    if args.jobs > 1 and len(args.config) > 1:
        with ProcessPoolExecutor(args.jobs) as ex:
            results = list(ex.map(_optimize_one, args.config, [args.output] * len(args.config)))
    else:
        results = [_optimize_one(p, args.output) for p in args.config]
    code = EXIT_OK
    for c, line in results:
        print(line)
        code = max(code, c)
    return code


def cmd_audit(args) -> int:
    traj, cfg = load_trajectory(args.trajectory)
    if cfg.make_algorithm() is not Algorithm.ALGO1:
        raise UsageError("the audit applies to algo1 trajectories only")
    if args.x_star is not None:
        cfg.x_star = args.x_star
    for name in ("claimed_limit", "epsilon", "tail_start", "i_max"):
        v = getattr(args, name)
        if v is not None:
            setattr(cfg, name, v)
    f = cfg.make_function()
    acfg = cfg.make_audit_config(f)
    try:
        report = audit_mod.audit_trajectory(traj, f, cfg.make_fractional_config(), acfg)
    except InsufficientTail as exc:
        print(f"insufficient tail: {exc}", file=sys.stderr)
        return EXIT_TAIL
    stem = args.output or str(Path(args.trajectory).with_suffix("")) + "_audit"
    written = write_audit(report, stem)
    s = report.summary()
    print(
        f"audited_steps={s['audited_steps']} "
        f"paper_direction_failures={s['paper_direction_failures']} "
        f"corrected_direction_failures={s['corrected_direction_failures']} "
        f"geometric_failures={s['geometric_failures']} "
        f"epsilon_failures={s['epsilon_failures']} "
        f"sign_discrepancy={str(s['sign_discrepancy']).lower()}"
    )
    print(f"sigma_paper={_g(report.sigma.sigma_paper)} sigma_abs={_g(report.sigma.sigma_abs)}")
    print("wrote " + ", ".join(str(p) for p in written))
    return EXIT_OK


def _emit(record: dict, output: str | None) -> None:
    text = dumps(record)
    if output:
        Path(output).parent.mkdir(parents=True, exist_ok=True)
        Path(output).write_text(text, encoding="utf-8", newline="")
    sys.stdout.write(text)


def cmd_counterexample(args) -> int:
    if args.kind == "gamma-domain":
        rows = audit_mod.counterexample_gamma_domain(args.alpha)
        record = {"kind": "gamma-domain", "alpha": args.alpha, "rows": [asdict(r) for r in rows]}
    elif args.kind == "sigma-sign":
        lo, _, hi = args.range.partition(":")
        rep = audit_mod.counterexample_sigma_sign(args.alpha, (float(lo), float(hi)), args.i_max, args.samples)
        record = {"kind": "sigma-sign", **asdict(rep)}
        if not args.full:
            record.pop("coefficients")
    else:
        f = parse_function(args.function)
        mode = GammaMode.parse(args.mode) if args.mode else default_mode()
        base = FractionalConfig(alpha=args.alpha, gamma_mode=mode)
        try:
            w = audit_mod.counterexample_geometric(f, base)
        except NotFound as exc:
            print(f"not found: {exc}", file=sys.stderr)
            return EXIT_NOT_FOUND
        record = {
            "kind": "geometric",
            "function": args.function,
            "alpha": args.alpha,
            "mu": w.mu,
            "x0": w.x0,
            "K": w.K,
            "terminal_status": w.trajectory.terminal_status.value,
            "offending": [{"k": k, "delta": d} for k, d in w.offending],
        }
    _emit(record, args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="fracgrad", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    d = sub.add_parser("derive", help="evaluate the Caputo series at one point")
    d.add_argument("--function", required=True, help="e.g. poly:0,0,1, exp:1,2, pole:-1,1")
    d.add_argument("--alpha", type=float, required=True)
    d.add_argument("--lower", type=float, required=True)
    d.add_argument("--upper", type=float, required=True)
    d.add_argument("--mode", choices=["strict", "extended"])
    d.add_argument("--quadrature", action="store_true", help="also print the quadrature oracle")
    d.add_argument("--nodes", type=int, default=400)
    d.add_argument("--abs-tol", type=float, default=1e-14)
    d.add_argument("--max-terms", type=int, default=64)
    d.add_argument("--divergence-window", type=int, default=8)
    d.set_defaults(func=cmd_derive)

    o = sub.add_parser("optimize", help="run configs and write trajectory CSV + JSON")
    o.add_argument("config", nargs="+")
    o.add_argument("--output", help="output path stem (single config only)")
    o.add_argument("--jobs", type=int, default=1)
    o.set_defaults(func=cmd_optimize)

    a = sub.add_parser("audit", help="audit an algo1 trajectory")
    a.add_argument("trajectory", help="trajectory CSV or its JSON sidecar")
    a.add_argument("--x-star", type=float)
    a.add_argument("--claimed-limit", type=float)
    a.add_argument("--epsilon", type=float)
    a.add_argument("--tail-start", type=int)
    a.add_argument("--i-max", type=int)
    a.add_argument("--output", help="output path stem (default: <trajectory>_audit)")
    a.set_defaults(func=cmd_audit)

    c = sub.add_parser("counterexample", help="emit a counterexample report")
    c.add_argument("kind", choices=["sigma-sign", "geometric", "gamma-domain"])
    c.add_argument("--alpha", type=float, default=0.5)
    c.add_argument("--range", default="0.1:0.9")
    c.add_argument("--i-max", type=int, default=32)
    c.add_argument("--samples", type=int, default=9)
    c.add_argument("--full", action="store_true", help="include the coefficient table")
    c.add_argument("--function", default="poly:0,0,1")
    c.add_argument("--mode", choices=["strict", "extended"])
    c.add_argument("--output", help="also write the JSON record here")
    c.set_defaults(func=cmd_counterexample)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
        return args.func(args)
    except (UsageError, ValueError, OSError, KeyError) as exc:
        # DomainError is a ValueError but is handled inside each command
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

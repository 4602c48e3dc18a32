"""Command-line front end.

Exit codes: 0 ran to completion (DISCREPANCY rows included), 2 invalid
configuration (bad literal, prime, grid file or coset), 3 computation error.
"""
from __future__ import annotations

import argparse
import json
import sys
from typing import Optional

from .checks import CHECK_IDS, Config, default_spec, run_all, run_check
from .errors import BadLevel, InvalidSpec, IoFailure, PadicError
from .fermionic import DEFAULT_BUDGET, CosetQuery, coset_volume_candidate, coset_volume_printed
from .fermionic import integrate, mu_minus_q, weighted_measure
from .functions import parse_function
from .maximal import maximal_function
from .padic import DEFAULT_PRECISION, PadicInt
from .report import ERROR, ReportBundle, emit

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3


def _common(suppress: bool = False) -> argparse.ArgumentParser:
    # Subcommand copies suppress their defaults so flags given before the
    # subcommand are not overwritten.
    common = argparse.ArgumentParser(add_help=False)

    def d(value):
        return argparse.SUPPRESS if suppress else value

    common.add_argument("--p", type=int, default=d(3), help="odd prime")
    common.add_argument("--q", default=d("4"), help="q as s/t, integer or digit string")
    common.add_argument("--omega", default=d("7"), help="weight base, same formats as --q")
    common.add_argument("--prec", type=int, default=d(DEFAULT_PRECISION), help="precision N")
    common.add_argument("--max-level", type=int, default=d(None), help="deepest level m")
    common.add_argument("--n-max", type=int, default=d(3), help="largest scale for maximal")
    common.add_argument("--level", type=int, default=d(6), help="finite level for averages")
    common.add_argument("--target", type=int, default=d(6), help="stabilization exponent")
    common.add_argument("--budget", type=int, default=d(DEFAULT_BUDGET), help="max terms per sum")
    common.add_argument("--grid", default=d(None), help="JSON file with grid overrides")
    common.add_argument("--format", choices=("table", "json", "csv"), default=d("table"))
    common.add_argument("--out", default=d(None), help="output path (default stdout)")
    return common


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="padicq", parents=[_common()],
                                     description="Fermionic p-adic q-integrals and identity audits")
    sub = parser.add_subparsers(dest="command", required=True)
    common = _common(suppress=True)

    p_int = sub.add_parser("integrate", parents=[common], help="stabilized fermionic integral")
    p_int.add_argument("--f", default="monomial:1", help="function label, e.g. q_monomial:2")
    p_int.add_argument("--t", type=int, default=0, help="integrate against mu_{-q^(p^t)}")

    p_meas = sub.add_parser("measure", parents=[common], help="weighted measure of a coset")
    p_meas.add_argument("--f", default="const:1")
    p_meas.add_argument("--a", type=int, default=0)
    p_meas.add_argument("--n", type=int, default=1)

    p_max = sub.add_parser("maximal", parents=[common], help="scale averages around a point")
    p_max.add_argument("--f", default="const:1")
    p_max.add_argument("--a", type=int, default=0)

    p_chk = sub.add_parser("check", parents=[common], help="run one registry check")
    p_chk.add_argument("id", choices=CHECK_IDS)

    sub.add_parser("report", parents=[common], help="run every registry check")
    return parser


def _config(args) -> Config:
    grid = {}
    if args.grid:
        try:
            with open(args.grid, encoding="utf-8") as fh:
                grid = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InvalidSpec(f"cannot read grid file {args.grid}: {exc}") from exc
        if not isinstance(grid, dict):
            raise InvalidSpec("grid file must hold a JSON object")
    return Config(p=args.p, q=args.q, omega=args.omega, prec=args.prec, budget=args.budget,
                  target=args.target, max_level=args.max_level, n_max=args.n_max,
                  level=args.level, grid=grid)


def _value(x: PadicInt) -> dict:
    return {"residue": x.r, "digits": x.digits()}


def _write(text: str, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(f"cannot write {out}: {exc}") from exc


def _render_record(record: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(record, indent=2) + "\n"
    lines = []
    for key, val in record.items():
        if isinstance(val, dict) and "residue" in val:
            val = f"{val['residue']}  ({val['digits']})"
        elif isinstance(val, list):
            val = "; ".join(str(v) for v in val)
        sep = "," if fmt == "csv" else ": "
        lines.append(f"{key}{sep}{val}")
    return "\n".join(lines) + "\n"


def _cmd_integrate(args, cfg: Config) -> int:
    w = cfg.validate()
    f = parse_function(args.f, w)
    res = integrate(f, w, target_k=args.target, m_max=args.max_level, t=args.t, budget=args.budget)
    record = {"function": args.f, "t": args.t, "value": _value(res.value),
              "achieved_exponent": res.achieved_exponent, "levels_used": res.levels_used,
              "history": [f"m={m}:{v.r}" for m, v in res.history]}
    _write(_render_record(record, args.format), args.out)
    return EXIT_OK


def _cmd_measure(args, cfg: Config) -> int:
    w = cfg.validate()
    f = parse_function(args.f, w)
    c = CosetQuery(args.a, args.n, w.p)
    res = weighted_measure(f, c, w, args.target, args.max_level, args.budget)
    record = {"function": args.f, "a": args.a, "n": args.n,
              "weighted_measure": _value(res.value),
              "achieved_exponent": res.achieved_exponent, "levels_used": res.levels_used,
              "mu_minus_q": _value(mu_minus_q(c, w)),
              "closed_form_printed": _value(coset_volume_printed(c, w)),
              "closed_form_candidate": _value(coset_volume_candidate(c, w))}
    _write(_render_record(record, args.format), args.out)
    return EXIT_OK


def _cmd_maximal(args, cfg: Config) -> int:
    w = cfg.validate()
    f = parse_function(args.f, w)
    res = maximal_function(f, w, args.a, args.n_max, args.level, args.budget)
    record = {"function": args.f, "a": args.a, "m": res.m,
              "scales": [f"n={s.n}: value={s.value.r} |.|={s.value.norm()}" for s in res.scales],
              "sup_abs": str(res.sup_abs), "argmax_n": res.argmax_n}
    _write(_render_record(record, args.format), args.out)
    return EXIT_OK


def _finish(bundle: ReportBundle, args) -> int:
    text = emit(bundle, args.format)
    _write(text, args.out)
    errors = [r for r in bundle.reports if r.status == ERROR]
    if any(r.notes.startswith("InvalidSpec") for r in errors):
        return EXIT_INVALID
    return EXIT_INTERNAL if errors else EXIT_OK


def _cmd_check(args, cfg: Config) -> int:
    cfg.validate()
    bundle = ReportBundle(cfg.meta(), run_check(default_spec(args.id, cfg), cfg))
    return _finish(bundle, args)


def _cmd_report(args, cfg: Config) -> int:
    cfg.validate()
    return _finish(run_all(cfg), args)


COMMANDS = {"integrate": _cmd_integrate, "measure": _cmd_measure, "maximal": _cmd_maximal,
            "check": _cmd_check, "report": _cmd_report}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        return COMMANDS[args.command](args, cfg)
    except (InvalidSpec, BadLevel, ValueError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except IoFailure as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INTERNAL
    except PadicError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 bracket
violation (a certified lower bound or the upper bound contradicted by the
reference energy).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .core import DomainError, NumericalError, PowerLawPotential, Units, turning_point_of_energy
from .reference import NumerovConfig
from .report import analyze, rows_to_csv, sweep
from .wkb import region_map

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL, EXIT_VIOLATION = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _float_list(text: str) -> list[float]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return [float(t) for t in items]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _n_range(text: str) -> list[float]:
    """start:stop:step, inclusive of stop."""
    try:
        start, stop, step = (float(t) for t in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected start:stop:step, got {text!r}") from None
    if step <= 0 or stop < start:
        raise argparse.ArgumentTypeError("need step > 0 and stop >= start")
    count = int(round((stop - start) / step)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def read_config(path: str) -> dict[str, str]:
    """key = value lines; '#' starts a comment; keys may use '-' or '_'."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, val = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = val.strip("\"'")
    return out


def _add_units(p: argparse.ArgumentParser) -> None:
    p.add_argument("--hbar", type=float, default=1.0)
    p.add_argument("--mass", type=float, default=1.0)
    p.add_argument("--config", help="key = value file mirroring the flags (flags win)")


def _add_potential(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beta", type=float)
    p.add_argument("--n", type=float)
    p.add_argument("--gravity", type=float, help="free fall: beta = mass * g, n = 1")


def _add_numerov(p: argparse.ArgumentParser) -> None:
    p.add_argument("--safety", type=float, default=4.0, help="x_max / turning point (>= 2)")
    p.add_argument("--points-per-turn", type=int, default=1000)
    p.add_argument("--strictness", type=float, default=1.0,
                   help="factor s in 'variation length > s * wavelength'")
    p.add_argument("--trial", choices=("auto", "best", "ExpLinear", "ExpGauss"), default="auto",
                   help="variational trial family (auto: ExpLinear for n < 1.5)")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="wkbbound", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    subs = {}

    for name, help_ in (("analyze", "full bracket report as JSON"),
                        ("bracket", "verdict-only bracket check")):
        sp = sub.add_parser(name, help=help_)
        _add_potential(sp)
        _add_units(sp)
        _add_numerov(sp)
        sp.add_argument("--output", "-o")
        sp.add_argument("--no-timing", action="store_true", help="omit timing metadata")
        subs[name] = sp

    sp = sub.add_parser("region-map", help="labelled WKB validity intervals")
    _add_potential(sp)
    _add_units(sp)
    sp.add_argument("--x0", type=float)
    sp.add_argument("--energy", type=float)
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.add_argument("--strictness", type=float, default=1.0)
    sp.add_argument("--output", "-o")
    subs["region-map"] = sp

    sp = sub.add_parser("sweep", help="(beta, n) sweep as CSV")
    _add_units(sp)
    _add_numerov(sp)
    g = sp.add_mutually_exclusive_group()
    g.add_argument("--n-values", type=_float_list, help="comma-separated exponents")
    g.add_argument("--n-range", type=_n_range, help="start:stop:step (inclusive)")
    sp.add_argument("--betas", type=_float_list, default="0.1,1,10", help="comma-separated")
    sp.add_argument("--jobs", type=int, default=1)
    sp.add_argument("--output", "-o")
    subs["sweep"] = sp
    return parser, subs


def parse_args(argv):
    parser, subs = build_parser()
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if known.config:
        cfg = read_config(known.config)
        cmd = next((a for a in argv if a in subs), None)
        if cmd is not None:
            valid = {a.dest for a in subs[cmd]._actions}
            unknown = set(cfg) - valid
            if unknown:
                raise UsageError(f"unknown config keys for {cmd}: {sorted(unknown)}")
            if cfg.get("no_timing", "").lower() in ("1", "true", "yes"):
                cfg["no_timing"] = True
            subs[cmd].set_defaults(**cfg)
    return parser.parse_args(argv)


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _potential_params(args) -> tuple[float, float]:
    if args.gravity is not None:
        if args.beta is not None or args.n is not None:
            raise UsageError("--gravity excludes --beta/--n")
        return args.mass * args.gravity, 1.0
    if args.beta is None or args.n is None:
        raise UsageError("--beta and --n are required (or --gravity)")
    return args.beta, args.n


def _numerov_cfg(args) -> NumerovConfig:
    return NumerovConfig(safety=args.safety, points_per_turn=args.points_per_turn)


def _cmd_analyze(args, verdict_only: bool) -> int:
    beta, n = _potential_params(args)
    rep = analyze(beta, n, Units(args.hbar, args.mass), args.strictness,
                  _numerov_cfg(args), timing=not args.no_timing, trial=args.trial)
    if verdict_only:
        _emit(json.dumps({"bracket_verdict": rep.bracket_verdict.value,
                          "E_cl": rep.lower.E_cl, "E_ref": rep.reference.E0,
                          "E_rr": rep.upper.E_rr, "reason": rep.reason}, indent=2) + "\n",
              args.output)
    else:
        _emit(rep.to_json() + "\n", args.output)
    return EXIT_VIOLATION if rep.violation else EXIT_OK


def _cmd_region_map(args) -> int:
    beta, n = _potential_params(args)
    units = Units(args.hbar, args.mass)
    p = PowerLawPotential(beta, n)
    if (args.x0 is None) == (args.energy is None):
        raise UsageError("give exactly one of --x0 or --energy")
    x0 = args.x0 if args.x0 is not None else turning_point_of_energy(p, args.energy)
    rm = region_map(p, x0, units, args.strictness)
    text = rm.to_csv() if args.format == "csv" else rm.to_json(indent=2) + "\n"
    _emit(text, args.output)
    return EXIT_OK


def _cmd_sweep(args) -> int:
    n_values = args.n_values if args.n_values is not None else args.n_range
    if not n_values:
        raise UsageError("give --n-values or --n-range")
    if any(not 1.0 <= n <= 6.0 for n in n_values):
        raise UsageError("sweep exponents must lie in [1, 6]")
    if not args.betas:
        raise UsageError("empty beta set")
    if any(b <= 0 for b in args.betas):
        raise UsageError("betas must be positive")
    rows = sweep(n_values, args.betas, Units(args.hbar, args.mass), _numerov_cfg(args), args.jobs,
                 args.trial)
    _emit(rows_to_csv(rows), args.output)
    if any(r.get("violation") for r in rows):
        return EXIT_VIOLATION
    return EXIT_OK


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parse_args(argv)
        if args.command in ("analyze", "bracket"):
            return _cmd_analyze(args, args.command == "bracket")
        if args.command == "region-map":
            return _cmd_region_map(args)
        return _cmd_sweep(args)
    except (UsageError, ValueError, DomainError, OSError) as exc:
        # DomainError subclasses ValueError; parameter validation lands here too
        print(f"wkbbound: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, ArithmeticError) as exc:
        print(f"wkbbound: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    raise SystemExit(main())

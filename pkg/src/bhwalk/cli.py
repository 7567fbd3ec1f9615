"""Command-line entry point: run scenarios, write delimited results and
figures, and run the built-in oracle cross-checks."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import experiments
from .experiments import InfeasibleScenarioError, TimeSeries

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def _fmt(x: float) -> str:
    return f"{x:.12g}"


def write_series_csv(series: TimeSeries, path: Path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(series.header()) + "\n")
        for row in series.rows():
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def series_to_record(series: TimeSeries) -> dict:
    return {
        "name": series.name,
        "meta": series.meta,
        series.index_name: [float(x) for x in series.index],
        "columns": {k: [float(x) for x in v] for k, v in series.columns.items()},
    }


def write_series(series: TimeSeries, path: Path, fmt: str):
    if fmt == "csv":
        write_series_csv(series, path)
    else:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(series_to_record(series), fh, indent=1)
            fh.write("\n")


def write_record(record: dict, path: Path, fmt: str):
    if fmt == "json":
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(record, fh, indent=1)
            fh.write("\n")
        return
    scalars = {k: v for k, v in record.items() if not isinstance(v, list)}
    lists = {k: v for k, v in record.items() if isinstance(v, list)}
    with open(path, "w", encoding="utf-8") as fh:
        header = list(scalars)
        for key, vals in lists.items():
            header += [f"{key}_{i + 1}" for i in range(len(vals))]
        fh.write(",".join(header) + "\n")
        row = [str(v) if not isinstance(v, float) else _fmt(v) for v in scalars.values()]
        for vals in lists.values():
            row += [_fmt(v) for v in vals]
        fh.write(",".join(row) + "\n")


def _parse_u_list(text: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad interaction list {text!r}") from exc


def _load_config(path: str) -> dict:
    """Parse a `key = value` config file; '#' starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (part.strip() for part in line.split("=", 1))
        values[key.replace("-", "_")] = val
    return values


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bhwalk",
        description="Boson transport and entanglement on a 1D Bose-Hubbard chain "
                    "(times in units of 1/J, hbar = 1).",
    )
    parser.add_argument("--config", help="key = value file; flags take precedence")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default <subcommand>.<format>)")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--no-plot", action="store_true",
                        help="skip rendering the companion figure")
    common.add_argument("-v", "--verbose", action="store_true")

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ctqw", parents=[common],
                       help="single-particle quantum walk (closed form)")
    p.add_argument("--sites", type=int, default=41)
    p.add_argument("--tmax", type=float, default=10.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--classical", action="store_true",
                   help="run the classical random-walk counterpart")

    p = sub.add_parser("ground-state", parents=[common],
                       help="sector ground state and outer-site entanglement")
    p.add_argument("--sites", type=int, default=5)
    p.add_argument("--nbar", type=int, default=1)
    p.add_argument("--u", type=float, default=40.0)
    p.add_argument("--nmax", type=int, default=3)

    p = sub.add_parser("transport", parents=[common],
                       help="extra particle on an interacting ground state")
    p.add_argument("--sites", type=int, default=9)
    p.add_argument("--nbar", type=int, default=1)
    p.add_argument("--u", type=float, default=40.0)
    p.add_argument("--tmax", type=float, default=3.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--nmax", type=int, default=3)

    p = sub.add_parser("ln-sweep", parents=[common],
                       help="first entanglement maximum versus U/J")
    p.add_argument("--sites", type=int, default=9)
    p.add_argument("--nbar", type=int, default=1)
    p.add_argument("--u", type=_parse_u_list, default=[6.0, 10.0, 15.0, 25.0, 40.0],
                   metavar="U1,U2,...")
    p.add_argument("--tmax", type=float, default=3.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--nmax", type=int, default=3)

    p = sub.add_parser("cotunnel", parents=[common],
                       help="N particles released from one site")
    p.add_argument("--sites", type=int, default=7)
    p.add_argument("--particles", type=int, default=2)
    p.add_argument("--u", type=float, default=40.0)
    p.add_argument("--tmax", type=float, default=40.0)
    p.add_argument("--dt", type=float, default=0.1)

    p = sub.add_parser("sdq", parents=[common],
                       help="spatially delocalized qubit protocols")
    p.add_argument("--scenario", choices=sorted(experiments.SDQ_VARIANTS),
                   default="fig5")
    p.add_argument("--u", type=float, default=0.0)
    p.add_argument("--tmax", type=float, default=8.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--nbar", type=int, default=0)

    sub.add_parser("validate", parents=[common],
                   help="run the built-in oracle cross-checks")
    return parser


def _apply_config(parser, argv):
    """Flags > config file > defaults."""
    ns, _ = parser.parse_known_args(argv)
    if getattr(ns, "config", None):
        raw = _load_config(ns.config)
        defaults = {}
        for key, val in raw.items():
            if key == "u" and "," in val:
                defaults[key] = _parse_u_list(val)
            else:
                for cast in (int, float):
                    try:
                        defaults[key] = cast(val)
                        break
                    except ValueError:
                        continue
                else:
                    defaults[key] = val
        parser.set_defaults(**defaults)
        for action in parser._subparsers._group_actions[0].choices.values():
            known = {a.dest for a in action._actions}
            action.set_defaults(**{k: v for k, v in defaults.items() if k in known})
    return parser.parse_args(argv)


def _run(args) -> tuple:
    """Dispatch to the scenario runners; returns (payload, default stem)."""
    cmd = args.command
    if cmd == "ctqw":
        fn = experiments.run_ctrw_reference if args.classical else experiments.run_ctqw_figure
        return fn(args.sites, args.tmax, args.dt), cmd
    if cmd == "ground-state":
        return (
            experiments.run_ground_state(args.sites, args.nbar, args.u, args.nmax),
            "ground_state",
        )
    if cmd == "transport":
        return (
            experiments.run_mott_transport(
                args.sites, args.nbar, args.u, args.tmax, dt=args.dt, n_max=args.nmax
            ),
            cmd,
        )
    if cmd == "ln-sweep":
        return (
            experiments.run_ln_vs_u_sweep(
                args.sites, args.nbar, args.u, t_max=args.tmax, dt=args.dt,
                n_max=args.nmax,
            ),
            "ln_sweep",
        )
    if cmd == "cotunnel":
        return (
            experiments.run_cotunneling(
                args.sites, args.particles, args.u, t_max=args.tmax, dt=args.dt
            ),
            cmd,
        )
    if cmd == "sdq":
        return (
            experiments.run_sdq_scenario(
                args.scenario, args.u, t_max=args.tmax, dt=args.dt, nbar=args.nbar
            ),
            cmd,
        )
    raise AssertionError(f"unhandled command {cmd}")


def main(argv=None) -> int:
    parser = build_parser()
    args = _apply_config(parser, argv)

    if args.command == "validate":
        results = experiments.run_validation()
        failed = 0
        for name, ok, detail in results:
            print(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
            failed += 0 if ok else 1
        print(f"{len(results) - failed}/{len(results)} checks passed")
        return EXIT_OK if failed == 0 else EXIT_ERROR

    try:
        payload, stem = _run(args)
    except InfeasibleScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    out = Path(args.out) if args.out else Path(f"{stem}.{args.format}")
    if isinstance(payload, TimeSeries):
        write_series(payload, out, args.format)
        if not args.no_plot:
            from . import plotting  # deferred: matplotlib import is slow

            fig_path = out.with_suffix(".png")
            if plotting.render(payload, fig_path) and args.verbose:
                print(f"wrote {fig_path}")
    else:
        write_record(payload, out, args.format)
    if args.verbose:
        print(f"wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

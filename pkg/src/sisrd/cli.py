"""Command-line interface.

Subcommands:

* ``analyze``   equilibria, stability classes and verdict for a config
* ``simulate``  run a configured simulation, write CSV + summary JSON
* ``reproduce`` rerun built-in reference sets and compare to reported values
* ``sweep``     analyze across a list of values for one parameter
* ``verify``    admissibility checks plus all runtime monitors

Exit codes: 0 all checks passed, 1 a monitor or comparison failed,
2 configuration error.  The ``SISRD_WORKERS`` environment variable caps
the worker pool used by ``reproduce --all`` and ``sweep``.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import experiments, tables
from .config import ConfigError, load_config
from .incidence import check_admissible

OK = 0
CHECK_FAILED = 1
BAD_CONFIG = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sisrd",
        description="Analyze and simulate the diffusive SIS model with nonlinear incidence.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_analyze = sub.add_parser("analyze", help="compute equilibria, stability and verdict")
    p_analyze.add_argument("--config", required=True)
    p_analyze.add_argument("--json-out", default=None)

    p_sim = sub.add_parser("simulate", help="run the configured simulation")
    p_sim.add_argument("--config", required=True)
    p_sim.add_argument("--out-dir", default=None,
                       help="defaults to the config's output.dir")

    p_rep = sub.add_parser("reproduce", help="rerun built-in reference sets")
    p_rep.add_argument("--table", type=int, choices=(1, 2, 3), default=None)
    p_rep.add_argument("--set", dest="set_key", default=None,
                       help="set key such as ode-1 or pde-3")
    p_rep.add_argument("--out-dir", required=True)
    p_rep.add_argument("--all", action="store_true",
                       help="run every set (of --table if given, else of all tables)")

    p_sweep = sub.add_parser("sweep", help="analyze across one parameter")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--param", required=True)
    p_sweep.add_argument("--values", required=True,
                         help="comma-separated list, e.g. 0.1,0.2,0.5")
    p_sweep.add_argument("--out", required=True)

    p_verify = sub.add_parser("verify", help="admissibility checks plus all monitors")
    p_verify.add_argument("--config", required=True)

    return parser


def _print_comparisons(label: str, rep: experiments.ReproduceResult) -> None:
    for comp in rep.comparisons:
        status = "pass" if comp["passed"] else "FAIL"
        if comp.get("annotated"):
            status = "noted"
        print(f"{label}: {comp['quantity']}: {status} "
              f"(computed {comp['computed']}, expected {comp['expected']})")
        if comp.get("note"):
            print(f"{label}:   note: {comp['note']}")
    monitors = "pass" if rep.result.monitors_passed else "FAIL"
    print(f"{label}: monitors: {monitors}")


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return BAD_CONFIG


def _dispatch(args) -> int:
    if args.command == "analyze":
        config = load_config(args.config)
        text = experiments.analysis_json(config)
        print(text)
        if args.json_out:
            with open(args.json_out, "w", encoding="utf-8") as fh:
                fh.write(text + "\n")
        return OK

    if args.command == "simulate":
        config = load_config(args.config)
        out_dir = args.out_dir or config.out_dir
        if not out_dir:
            print("simulate needs --out-dir (or output.dir in the config)", file=sys.stderr)
            return BAD_CONFIG
        result = experiments.run_simulation(config)
        paths = experiments.write_artifacts(result, out_dir, prefix=config.label)
        experiments.write_summary(paths["summary"], experiments.summary_document(result))
        print(f"converged: {result.converged} (final distance {result.final_distance:.3e})")
        for name, path in paths.items():
            print(f"{name}: {path}")
        return OK if result.monitors_passed else CHECK_FAILED

    if args.command == "reproduce":
        if args.all:
            rows = tables.sets_for_table(args.table) if args.table else tables.all_sets()
        else:
            if args.table is None or args.set_key is None:
                print("reproduce needs --table and --set, or --all", file=sys.stderr)
                return BAD_CONFIG
            try:
                rows = [tables.get_set(args.table, args.set_key)]
            except KeyError as exc:
                print(str(exc), file=sys.stderr)
                return BAD_CONFIG
        results = experiments.reproduce_many(rows, args.out_dir)
        all_passed = True
        for rep in results:
            _print_comparisons(rep.row.label, rep)
            all_passed = all_passed and rep.passed
        print(f"reproduced {len(results)} set(s); overall: {'pass' if all_passed else 'FAIL'}")
        return OK if all_passed else CHECK_FAILED

    if args.command == "sweep":
        config = load_config(args.config)
        try:
            values = [float(cell) for cell in args.values.split(",") if cell.strip()]
        except ValueError:
            print(f"bad --values list: {args.values!r}", file=sys.stderr)
            return BAD_CONFIG
        if not values:
            print("empty --values list", file=sys.stderr)
            return BAD_CONFIG
        try:
            rows = experiments.sweep(config, args.param, values)
        except ValueError as exc:
            print(str(exc), file=sys.stderr)
            return BAD_CONFIG
        experiments.write_sweep_csv(args.out, rows)
        print(f"wrote {len(rows)} rows to {args.out}")
        return OK

    if args.command == "verify":
        config = load_config(args.config)
        adm = check_admissible(config.incidence, v_max=100.0, n_samples=2000)
        print(f"admissibility: {'pass' if adm.passed else 'FAIL'}")
        if not adm.passed:
            first = adm.first_violation
            print(f"  first violation: {first.check} at v={first.v:.6g} "
                  f"(lhs {first.lhs:.6g}, rhs {first.rhs:.6g})")
        result = experiments.run_simulation(config)
        monitors = experiments.summary_document(result)["monitors"]
        for name, doc in monitors.items():
            if doc.get("skipped"):
                print(f"{name}: skipped ({doc['reason']})")
            else:
                print(f"{name}: {'pass' if doc['passed'] else 'FAIL'}")
        print(f"convergence to predicted attractor: "
              f"{'pass' if result.converged else 'FAIL'} "
              f"(final distance {result.final_distance:.3e})")
        ok = adm.passed and result.monitors_passed
        return OK if ok else CHECK_FAILED

    raise AssertionError(f"unhandled command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())

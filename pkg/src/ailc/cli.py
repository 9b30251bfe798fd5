"""Command line entry point: ``ailc list|run|check|compare``.

Exit codes: 0 success, 1 validation error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from .errors import ConfigurationError, NumericalError
from .harness import (build_controllers, build_plant, catalog_documents, emit_results, get_scenario,
                      load_scenario_file, parse_document, run_scenario, summarize, validate_scenario)
from .plant import CoupledPlant, assumption_check

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2


def _resolve(target: str):
    """A built-in name, a scenario file, or a batch file holding a list of either."""
    if target in catalog_documents():
        return [get_scenario(target)]
    if not os.path.exists(target):
        raise ConfigurationError(f"{target!r} is neither a built-in scenario nor a readable file")
    try:
        with open(target, encoding="utf-8") as fh:
            doc = parse_document(fh.read())
    except OSError as exc:
        raise ConfigurationError(f"cannot read {target}: {exc}") from None
    if isinstance(doc, list):
        out = []
        for i, item in enumerate(doc):
            if isinstance(item, str):
                out.append(get_scenario(item) if item in catalog_documents() else load_scenario_file(item))
            else:
                item = dict(item)
                item.setdefault("name", f"{os.path.splitext(os.path.basename(target))[0]}-{i}")
                out.append(validate_scenario(item))
        return out
    return [load_scenario_file(target)]


def _targets(args):
    names = list(getattr(args, "targets", []) or []) + list(args.scenario or []) + list(args.config or [])
    if not names:
        raise ConfigurationError("no scenario given; pass a built-in name, --scenario or --config")
    cfgs = [c for n in names for c in _resolve(n)]
    return [c.with_overrides(seed=args.seed, iterations=args.iterations) for c in cfgs]


def _print_summary(summary):
    for label, entry in summary["controllers"].items():
        mx, av = entry["max_err"], entry["avg_err"]
        print(f"{summary['scenario']:<22} {label:<9} K={len(mx):<4} max_err[1]={mx[0]:.3e} "
              f"max_err[K]={mx[-1]:.3e} avg_err[K]={av[-1]:.3e}  ({summary['wall_clock_s']:.1f}s)")


def _run_one(cfg, args):
    cfg = cfg.with_overrides(verbose=args.verbose or None, format=args.format)
    result = run_scenario(cfg)
    summary = summarize(result)
    paths = emit_results(result, args.out, cfg.run["format"], summary, verbose=cfg.run["verbose"]) \
        if args.out else []
    return summary, paths


def cmd_list(args):
    for name, doc in catalog_documents().items():
        print(f"{name:<22} {doc['description']}")
    return EXIT_OK


def cmd_run(args, controller_type=None):
    cfgs = _targets(args)
    if controller_type:
        cfgs = [c.with_overrides(controller_type=controller_type) for c in cfgs]
    if args.out is None:
        args.out = next((c.run["out"] for c in cfgs if c.run["out"]), None)
    names = [c.name for c in cfgs]
    if len(set(names)) != len(names):
        raise ConfigurationError(f"batch contains duplicate scenario names {names}; outputs would collide")
    workers = max(1, int(args.parallel or 1))
    if workers > 1 and len(cfgs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _run_one(c, args), cfgs))
    else:
        results = [_run_one(c, args) for c in cfgs]
    for summary, paths in results:
        _print_summary(summary)
        for p in paths:
            print(f"  wrote {p}")
    return EXIT_OK


def cmd_compare(args):
    return cmd_run(args, controller_type="compare")


def cmd_check(args):
    for cfg in _targets(args):
        plant = build_plant(cfg)
        d = cfg.to_dict()
        if cfg.controller["type"] == "ddilc":
            d["controller"]["type"] = "compare"
        channels = plant.channels if isinstance(plant, CoupledPlant) else (plant,)
        _, balls, _, _ = build_controllers(d, len(channels))
        for i, (spec, ball) in enumerate(zip(channels, balls)):
            shape = (len(channels), spec.rho) if isinstance(plant, CoupledPlant) else None
            rep = assumption_check(spec, args.samples, seed=cfg.seed, ball=ball, state_shape=shape)
            flag = "  WARNING: gain near zero" if rep.gain_near_zero else ""
            print(f"{cfg.name} {spec.name}: samples={rep.samples} gain in [{rep.min_gain:.4g}, {rep.max_gain:.4g}] "
                  f"sign_changes={rep.gain_sign_changes} L_x~{rep.lipschitz_x:.4g} L_u~{rep.lipschitz_u:.4g}{flag}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ailc", description="Adaptive ILC simulations and baselines.")
    sub = parser.add_subparsers(dest="verb", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("targets", nargs="*", help="built-in scenario names, scenario files or batch files")
    common.add_argument("--scenario", action="append", help="built-in scenario name (repeatable)")
    common.add_argument("--config", action="append", help="scenario or batch file, YAML or JSON (repeatable)")
    common.add_argument("--seed", type=int)
    common.add_argument("--iterations", type=int)
    common.add_argument("--verbose", action="store_true")

    out = argparse.ArgumentParser(add_help=False)
    out.add_argument("--out", help="directory for CSV/JSON results")
    out.add_argument("--format", choices=("csv", "json"))
    out.add_argument("--parallel", type=int, default=1, help="worker threads for batches")

    sub.add_parser("list", help="show the built-in scenarios")
    sub.add_parser("run", parents=[common, out], help="run scenarios")
    sub.add_parser("compare", parents=[common, out], help="run AILC and DDILC on the same plant and seed")
    chk = sub.add_parser("check", parents=[common], help="Monte-Carlo check of the plant assumptions")
    chk.add_argument("--samples", type=int, default=2000)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handlers = {"list": cmd_list, "run": cmd_run, "compare": cmd_compare, "check": cmd_check}
    try:
        return handlers[args.verb](args)
    except ConfigurationError as exc:
        for line in exc.errors or [str(exc)]:
            print(f"error: {line}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())

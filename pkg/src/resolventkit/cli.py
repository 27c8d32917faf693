"""Command-line front end: ``resolventkit list`` and ``resolventkit run``."""
import argparse
import datetime
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, kernels
from .errors import ToolkitError
from .scenarios import PRESETS, dump_report, run_scenario

EXIT_PASS, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


def _parser():
    p = argparse.ArgumentParser(prog="resolventkit", description="Resolvent, averaging and near-convexity experiments.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    sub.add_parser("list", help="show preset scenarios")
    r = sub.add_parser("run", help="run presets or an inline config")
    r.add_argument("names", nargs="*", help="preset names (same as --scenario)")
    r.add_argument("--scenario", action="append", default=[], help="preset name; may repeat")
    r.add_argument("--config", type=Path, help="JSON file with settings and/or an inline scenario")
    r.add_argument("--all", action="store_true", help="run every preset")
    r.add_argument("--out", type=Path, default=Path("runs"), help="output root (default: ./runs)")
    r.add_argument("--iters", type=int, help="iteration budget")
    r.add_argument("--grid-h", type=float, help="grid cell size")
    r.add_argument("--window", type=float, help="comparison window radius R")
    r.add_argument("--seed", type=int, help="random seed")
    r.add_argument("--tol", type=float, help="main tolerance of the scenario (see 'list')")
    r.add_argument("--parallel", action="store_true", help="run independent scenarios in separate processes")
    r.add_argument("-q", "--quiet", action="store_true")
    return p


def _list():
    width = max(len(n) for n in PRESETS)
    for name, pr in PRESETS.items():
        tol = f" [--tol: {pr.tol_meaning}]" if pr.tol_meaning else ""
        print(f"{name:<{width}}  {pr.description}{tol}")
    return EXIT_PASS


def _load_config(path):
    try:
        cfg = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ToolkitError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ToolkitError("config must be a JSON object")
    unknown = set(cfg) - {"scenario", "scenarios", "iters", "grid_h", "window", "seed", "tol", "out"}
    if unknown:
        raise ToolkitError(f"unknown config keys: {sorted(unknown)}")
    return cfg


def _job(scenario, overrides, out):
    """Run one scenario and write its report; returns (name, passed)."""
    Path(out).mkdir(parents=True, exist_ok=True)
    report = run_scenario(scenario, overrides, out)
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")
    dump_report(report, Path(out) / "report.json", stamp, __version__, kernels.BACKEND)
    return report["scenario"], report["passed"], [c["name"] for c in report["checks"] if not c["passed"]]


def _out_name(s):
    return s if isinstance(s, str) else str(s.get("name", f"inline-{s.get('kind')}"))


def _run(args):
    cfg = _load_config(args.config) if args.config else {}
    scenarios = list(args.names) + list(args.scenario)
    if "scenario" in cfg:
        scenarios.append(cfg["scenario"])
    scenarios += list(cfg.get("scenarios", []))
    if args.all:
        scenarios += [n for n in PRESETS if n not in scenarios]
    if not scenarios:
        raise ToolkitError("nothing to run; name a scenario, pass --config or use --all")
    for s in scenarios:
        if isinstance(s, str) and s not in PRESETS:
            raise ToolkitError(f"unknown scenario {s!r}; see 'resolventkit list'")
    overrides = {k: cfg.get(k) for k in ("iters", "grid_h", "window", "seed", "tol")}
    for k in overrides:
        v = getattr(args, k)
        if v is not None:
            overrides[k] = v
    root = Path(cfg.get("out", args.out)) if args.out == Path("runs") else args.out
    names = [_out_name(s) for s in scenarios]
    if len(set(names)) != len(names):
        raise ToolkitError("scenario names must be unique within one run")
    jobs = [(s, overrides, root / n) for s, n in zip(scenarios, names)]

    if args.parallel and len(jobs) > 1:
        with ProcessPoolExecutor() as pool:
            results = list(pool.map(_job, *zip(*jobs)))
    else:
        results = [_job(*j) for j in jobs]
    for name, passed, failed in results:
        if not args.quiet:
            extra = "" if passed else f"  failed: {', '.join(failed)}"
            print(f"{'PASS' if passed else 'FAIL'}  {name}  -> {root / name / 'report.json'}{extra}")
    return EXIT_PASS if all(r[1] for r in results) else EXIT_FAIL


def main(argv=None):
    args = _parser().parse_args(argv)
    try:
        if args.command == "list":
            return _list()
        return _run(args)
    except ToolkitError as exc:
        print(f"resolventkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

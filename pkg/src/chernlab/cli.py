"""Command-line front end.

Single-shot subcommands (``curvature``, ``rbc``, ``sbc``, ``schwarz``,
``identity``) are sugar: each builds a one-task scenario and runs it
through the same engine as ``run``, so outputs are identical to scenario
runs and deterministic given the seed.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ChernLabError, SchemaError
from .metrics import CATALOG_NAMES
from .scenario import emit_grid, run_scenario

_MAP_KINDS = ("identity", "scaling", "linear", "power", "mobius", "product")


def _catalog_dim(name, params):
    if name == "poincare_disk":
        return 1
    if name == "polydisk":
        return len(params)
    return int(params[0]) if params else 1


def _metric_arg(text):
    """Parse '[scale*]name[:p1,p2,...]' into a scenario metric entry."""
    spec = {}
    if "*" in text:
        scale, text = text.split("*", 1)
        spec["scale"] = float(scale)
    if ":" in text:
        name, params = text.split(":", 1)
        spec["params"] = [float(p) for p in params.split(",") if p]
    else:
        name, spec["params"] = text, []
    spec["catalog"] = name
    return spec


def _map_arg(text, source_dim):
    if ":" in text:
        kind, arg = text.split(":", 1)
    else:
        kind, arg = text, None
    if kind == "identity":
        return {"kind": "identity", "dim": source_dim}
    if kind == "scaling":
        c = complex(arg) if arg else 1.0
        return {"kind": "scaling", "c": [c.real, c.imag], "dim": source_dim}
    if kind == "power":
        return {"kind": "power", "k": int(arg)}
    if kind == "mobius":
        a = complex(arg) if arg else 0.0
        return {"kind": "mobius", "a": [a.real, a.imag]}
    raise SchemaError(f"unsupported map spec {text!r} (CLI supports identity, scaling, power, mobius)", "--map")


def _point_arg(text):
    values = [float(v) for v in text.split(",") if v]
    if len(values) % 2 == 0:
        return [[values[i], values[i + 1]] for i in range(0, len(values), 2)]
    return [[v, 0.0] for v in values]


def _grid_arg(text):
    if not text.startswith("box:"):
        raise SchemaError("grid spec must start with 'box:'", "--grid")
    fields = dict(part.split("=", 1) for part in text[4:].split(";") if "=" in part)
    unknown = set(fields) - {"center", "half", "per-axis"}
    if unknown:
        raise SchemaError(f"unknown grid fields {sorted(unknown)}", "--grid")
    center_vals = [float(v) for v in fields.get("center", "0").split(",")]
    if len(center_vals) % 2 == 0:
        center = [[center_vals[i], center_vals[i + 1]] for i in range(0, len(center_vals), 2)]
    else:
        center = [[v, 0.0] for v in center_vals]
    return {
        "center": center,
        "half": float(fields.get("half", "0.25")),
        "per_axis": int(fields.get("per-axis", "3")),
    }


def _emit(report, args):
    text = report.to_json(include_timing=getattr(args, "timing", False))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0 if report.passed else 1


def _write_grids(report, prefix):
    written = []
    for entry in report.tasks:
        records = (entry.get("result") or {}).get("records")
        if records:
            path = f"{prefix}_task{entry['index']}.csv" if len(report.tasks) > 1 else prefix
            emit_grid(records, path)
            written.append(path)
    return written


def _run_single_task(task, metrics, maps, args):
    scenario = {
        "version": 1,
        "seed": args.seed,
        "metrics": metrics,
        "maps": maps,
        "tasks": [task],
    }
    report = run_scenario(scenario, seed=args.seed, parallel=False)
    code = _emit(report, args)
    if getattr(args, "grid_out", None):
        _write_grids(report, args.grid_out)
    return code


def _cmd_catalog(args):
    lines = ["metrics:"]
    lines += [f"  {name}" for name in CATALOG_NAMES]
    lines.append("maps:")
    lines += [f"  {kind}" for kind in _MAP_KINDS]
    print("\n".join(lines))
    return 0


def _cmd_curvature(args):
    task = {"kind": "curvature", "metric": "m", "point": _point_arg(args.point)}
    if args.tol is not None:
        task["tol"] = args.tol
    return _run_single_task(task, {"m": _metric_arg(args.metric)}, {}, args)


def _cmd_cone(args, kind):
    task = {"kind": kind, "metric": "m", "point": _point_arg(args.point)}
    return _run_single_task(task, {"m": _metric_arg(args.metric)}, {}, args)


def _cmd_schwarz(args):
    metrics = {"source": _metric_arg(args.source), "target": _metric_arg(args.target)}
    maps = {}
    task = {
        "kind": "schwarz",
        "theorem": args.theorem,
        "source": "source",
        "target": "target",
        "grid": _grid_arg(args.grid),
    }
    if args.theorem != "trace_bound":
        src_dim = _catalog_dim(metrics["source"]["catalog"], metrics["source"]["params"])
        maps["f"] = _map_arg(args.map, src_dim)
        task["map"] = "f"
    if args.mu:
        metrics["mu"] = _metric_arg(args.mu)
        task["mu"] = "mu"
    if args.preset:
        task["preset"] = args.preset
    if args.constants:
        task["constants"] = json.loads(args.constants)
    if args.tol is not None:
        task["tol"] = args.tol
    if args.kappa_mode:
        task["kappa_mode"] = args.kappa_mode
    return _run_single_task(task, metrics, maps, args)


def _cmd_identity(args):
    task = {"kind": "identity", "check": args.check}
    metrics = {}
    if args.check == "fs-moment":
        task["n"] = args.n
        task["indices"] = [int(v) for v in args.indices.split(",")]
        task["samples"] = args.samples
    elif args.check == "theorem23":
        task["n"] = args.n
        task["trials"] = args.trials
        if args.tol is not None:
            task["tol"] = args.tol
    else:
        if not args.metric or not args.point:
            raise SchemaError("averaged-hsc needs --metric and --point", "--check")
        metrics["m"] = _metric_arg(args.metric)
        task["metric"] = "m"
        task["point"] = _point_arg(args.point)
        if args.b:
            task["b"] = [float(v) for v in args.b.split(",")]
        task["samples"] = args.samples
    return _run_single_task(task, metrics, {}, args)


def _cmd_run(args):
    report = run_scenario(args.scenario, seed=args.seed, parallel=args.parallel)
    code = _emit(report, args)
    if args.grid_out:
        _write_grids(report, args.grid_out)
    return code


def build_parser():
    parser = argparse.ArgumentParser(
        prog="chernlab",
        description="Curvature invariants of Hermitian chart metrics and "
        "pointwise verification of Schwarz-type inequalities.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False):
        p.add_argument("--seed", type=int, default=0, help="master random seed")
        p.add_argument("--out", default=None, help="write the report JSON here")
        p.add_argument("--timing", action="store_true", help="include wall-clock timing (breaks byte determinism)")
        if grid:
            p.add_argument("--grid-out", default=None, help="write per-point CSV grid(s) here")

    p = sub.add_parser("catalog", help="list the model metric and map catalogs")
    p.set_defaults(func=_cmd_catalog)

    p = sub.add_parser("curvature", help="curvature report at a point")
    p.add_argument("--metric", required=True, help="e.g. poincare_disk:1 or 3*fubini_study:2")
    p.add_argument("--point", required=True, help="comma-separated reals (re,im pairs)")
    p.add_argument("--tol", type=float, default=None)
    common(p)
    p.set_defaults(func=_cmd_curvature)

    for kind, help_text in (
        ("rbc", "real bisectional curvature search bounds at a point"),
        ("sbc", "ordered-cone curvature infimum at a point"),
    ):
        p = sub.add_parser(kind, help=help_text)
        p.add_argument("--metric", required=True)
        p.add_argument("--point", required=True)
        common(p)
        p.set_defaults(func=lambda a, _k=kind: _cmd_cone(a, _k))

    p = sub.add_parser("schwarz", help="verify a Schwarz-type inequality on a grid")
    p.add_argument("--theorem", required=True, choices=["chern_lu", "aubin_yau", "family", "trace_bound"])
    p.add_argument("--source", required=True, help="source metric spec")
    p.add_argument("--target", required=True, help="target metric spec")
    p.add_argument("--map", default="identity", help="map spec (identity, scaling:c, power:k, mobius:a)")
    p.add_argument("--mu", default=None, help="auxiliary metric for the family theorem")
    p.add_argument("--preset", default=None, choices=["chen_cheng_lu", "ricci_only", "liouville"])
    p.add_argument("--grid", required=True, help="box:center=..;half=..;per-axis=..")
    p.add_argument("--constants", default=None, help="JSON object of user constants")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--kappa-mode", dest="kappa_mode", default=None, choices=["along_map", "full_cone"])
    common(p, grid=True)
    p.set_defaults(func=_cmd_schwarz)

    p = sub.add_parser("identity", help="standalone identity checks")
    p.add_argument("--check", required=True, choices=["fs-moment", "theorem23", "averaged-hsc"])
    p.add_argument("--n", type=int, default=2)
    p.add_argument("--indices", default="1,1,1,1")
    p.add_argument("--samples", type=int, default=1_000_000)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--metric", default=None)
    p.add_argument("--point", default=None)
    p.add_argument("--b", default=None)
    common(p)
    p.set_defaults(func=_cmd_identity)

    p = sub.add_parser("run", help="run a scenario file")
    p.add_argument("--scenario", required=True)
    p.add_argument("--parallel", action="store_true", help="task-level parallelism")
    common(p, grid=True)
    p.set_defaults(func=_cmd_run)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error: {exc}", file=sys.stderr)
        return 2
    except ChernLabError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())

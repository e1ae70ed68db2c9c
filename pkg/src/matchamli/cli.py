"""Command-line interface.

Subcommands
-----------
mesh     generate a test graph (Matrix Market) plus a lattice-coordinate sidecar
match    compute an aligned or random maximal matching as JSON aggregates
analyze  projection-stability report for a graph/matching pair
build    hierarchy summary (per level: n, edges, sigma, theta) as JSON
solve    run one experiment row, print it as JSON
sweep    run several rows and emit a CSV or markdown table

A JSON config file may provide any ``solve``/``sweep`` settings; explicit
flags win over the file.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .experiments import ExperimentConfig, emit_table, make_problem, run_experiment
from .graphs import load_graph, save_graph
from .hierarchy import build_hierarchy
from .matching import Partition, aligned_matching, random_maximal_matching
from .stability import build_pi_matching, check_commutation, pi_norm_bounds, q_energy_norm

_Q_ENERGY_CLI_CAP = 2000


def _write_json(data, path=None):
    text = json.dumps(data, indent=2, sort_keys=True)
    if path:
        with open(path, "w") as f:
            f.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")


def _load_coords(path):
    with open(path) as f:
        data = json.load(f)
    return np.asarray(data["coords"], dtype=np.int64)


def _cmd_mesh(args):
    g, coords, _ = make_problem(args.family, args.n, args.seed)
    save_graph(g, args.out + ".mtx")
    if coords is not None:
        with open(args.out + ".coords.json", "w") as f:
            json.dump({"coords": coords.tolist()}, f)
    print(f"wrote {args.out}.mtx ({g.n} vertices, {g.num_edges} edges)")
    return 0


def _make_partition(g, args):
    if args.strategy == "aligned":
        if not args.coords:
            raise SystemExit("aligned matching needs --coords")
        coords = _load_coords(args.coords)
        return aligned_matching(g, coords, args.dim)
    return random_maximal_matching(g, args.seed)


def _cmd_match(args):
    g = load_graph(args.graph)
    p = _make_partition(g, args)
    _write_json({"aggregates": [list(a) for a in p.aggregates]}, args.out)
    return 0


def _cmd_analyze(args):
    g = load_graph(args.graph)
    p = _make_partition(g, args)
    Pi = build_pi_matching(g, p)
    bounds = pi_norm_bounds(Pi, g.max_degree)
    report = {
        "inf_norm": bounds["inf_norm"],
        "one_norm": bounds["one_norm"],
        "gershgorin_bound": bounds["gershgorin_bound"],
        "commutation_residual": check_commutation(g, p, Pi, trials=25, seed=args.seed),
    }
    if g.n <= _Q_ENERGY_CLI_CAP:
        report["q_energy_sq"] = q_energy_norm(g, p)
    _write_json(report, args.out)
    return 0


def _cmd_build(args):
    if args.graph:
        g = load_graph(args.graph)
        coords = _load_coords(args.coords) if args.coords else None
        strategy = "structured" if coords is not None else "random"
    else:
        g, coords, strategy = make_problem(args.family, args.n, args.seed)
    h = build_hierarchy(g, strategy, variant=args.variant, seed=args.seed,
                        coords=coords, sigma_mode=args.sigma_mode)
    _write_json({"levels": h.summary(), "c_g": h.c_g,
                 "zeta_finest": h.zeta_finest, "variant": h.variant,
                 "sigma_mode": h.sigma_mode}, args.out)
    return 0


def _config_from_args(args, overrides):
    data = {}
    if args.config:
        with open(args.config) as f:
            data.update(json.load(f))
    data.pop("runs", None)
    for key in overrides:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    return data


_RUN_KEYS = ("family", "n", "variant", "sigma_mode", "seed", "tol",
             "rhs_count", "maxiter")


def _cmd_solve(args):
    cfg = ExperimentConfig.from_dict(_config_from_args(args, _RUN_KEYS))
    row = run_experiment(cfg)
    _write_json(row, args.out)
    return 0 if row["converged"] else 1


def _cmd_sweep(args):
    base = {}
    runs = [{}]
    if args.config:
        with open(args.config) as f:
            data = json.load(f)
        runs = data.pop("runs", [{}])
        base = data
    rows = []
    ok = True
    for run in runs:
        merged = dict(base)
        merged.update(run)
        for key in _RUN_KEYS:
            value = getattr(args, key, None)
            if value is not None:
                merged[key] = value
        cfg = ExperimentConfig.from_dict(merged)
        row = run_experiment(cfg)
        ok &= row["converged"]
        rows.append(row)
    text = emit_table(rows, fmt=args.format, path=args.out)
    if not args.out:
        sys.stdout.write(text)
    return 0 if ok else 1


def _add_run_flags(sub):
    sub.add_argument("--config", help="JSON config file; flags override it")
    sub.add_argument("--family", choices=("square", "lshape", "cube", "fichera",
                                          "unstructured2d", "path"))
    sub.add_argument("--n", type=int)
    sub.add_argument("--variant", choices=("ordinary", "modified"))
    sub.add_argument("--sigma-mode", dest="sigma_mode",
                     choices=("auto", "theory-grid", "theory-general",
                              "modified-grid", "ratio"))
    sub.add_argument("--seed", type=int)
    sub.add_argument("--tol", type=float)
    sub.add_argument("--rhs-count", dest="rhs_count", type=int)
    sub.add_argument("--maxiter", type=int)
    sub.add_argument("--out", help="output path (default: stdout)")


def main(argv=None):
    parser = argparse.ArgumentParser(prog="matchamli",
                                     description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("mesh", help="generate a test graph")
    p.add_argument("--family", required=True,
                   choices=("square", "lshape", "cube", "fichera",
                            "unstructured2d", "path"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output prefix")
    p.set_defaults(func=_cmd_mesh)

    for name, func in (("match", _cmd_match), ("analyze", _cmd_analyze)):
        p = subs.add_parser(name)
        p.add_argument("--graph", required=True, help="Matrix Market graph file")
        p.add_argument("--strategy", choices=("aligned", "random"), default="random")
        p.add_argument("--dim", type=int, default=0, help="axis for aligned matching")
        p.add_argument("--coords", help="lattice coordinate sidecar (aligned)")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out")
        p.set_defaults(func=func)

    p = subs.add_parser("build", help="hierarchy summary")
    p.add_argument("--graph")
    p.add_argument("--coords")
    p.add_argument("--family", default="square")
    p.add_argument("--n", type=int, default=32)
    p.add_argument("--variant", choices=("ordinary", "modified"), default="ordinary")
    p.add_argument("--sigma-mode", dest="sigma_mode", default="auto")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=_cmd_build)

    p = subs.add_parser("solve", help="run one experiment row")
    _add_run_flags(p)
    p.set_defaults(func=_cmd_solve)

    p = subs.add_parser("sweep", help="run several rows into a table")
    _add_run_flags(p)
    p.add_argument("--format", choices=("csv", "markdown"), default="csv")
    p.set_defaults(func=_cmd_sweep)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())

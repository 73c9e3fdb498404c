"""Command line entry point: ``walkloss {compute,compare,sequential,tc-bounds,gen}``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
non-convergence, 1 when a bound check fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from ..errors import GraphError, NumericalError
from ..graph import write_edge_list
from .config import ConfigError, ExperimentConfig, parse_graph_spec, read_config_file
from .experiments import run_compare, run_compute, run_sequential, run_tc_bounds, write_records

EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC, EXIT_BOUND = 2, 3, 4, 1


def _shared(p):
    src = p.add_argument_group("graph source")
    src.add_argument("--graph", help="edge list or Matrix Market file")
    src.add_argument("--gen", help="erdrey:n,m or pref:n,d")
    src.add_argument("--zero-based", action="store_true", help="edge list ids start at 0")
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--alpha-factor", type=float, default=0.85)
    p.add_argument("--tol", type=float, default=1e-4)
    p.add_argument("--tol-pcg", type=float, default=None, help="default: tol / 10")
    p.add_argument("--exact-tol", type=float, default=1e-10)
    p.add_argument("--lmax-node", type=int, default=30)
    p.add_argument("--lmax-edge", type=int, default=30)
    p.add_argument("--neumann-max", type=int, default=100)
    p.add_argument("--fraction", type=float, default=0.01)
    p.add_argument("--trials", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--policy", choices=("random", "top-katz", "min-product"), default="random")
    p.add_argument("--kind", choices=("nodes", "edges"), default="nodes")
    p.add_argument("--out", help="output path (CSV, or edge list for gen)")
    p.add_argument("--stale-bounds", action="store_true")
    p.add_argument("--recompute-on-maxlen", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser():
    parser = argparse.ArgumentParser(prog="walkloss", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("compute", "Katz scores and total communicability of one graph"),
        ("compare", "update methods after one random removal, averaged over trials"),
        ("sequential", "approximate vs exact scores under sequential removals"),
        ("tc-bounds", "communicability bounds under random sequential removals"),
        ("gen", "write a generated graph as an edge list"),
    ):
        p = sub.add_parser(name, help=helptext)
        _shared(p)
        if name == "compute":
            p.add_argument("--condition", action="store_true", help="also estimate cond(I - alpha A)")
    return parser


_BOOL_KEYS = {"zero-based", "stale-bounds", "recompute-on-maxlen"}


def _apply_config_file(parser, argv):
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config")
    known, _ = pre.parse_known_args(argv)
    if not known.config:
        return
    values = read_config_file(known.config)
    defaults = {}
    for key, raw in values.items():
        dest = key.replace("-", "_")
        if key in _BOOL_KEYS:
            defaults[dest] = raw.lower() in ("1", "true", "yes", "on")
        else:
            defaults[dest] = raw
    for sp in parser._subparsers._group_actions[0].choices.values():
        # string defaults still pass through the argument's type converter
        sp.set_defaults(**defaults)


def config_from_args(args):
    source = parse_graph_spec(args.gen, args.graph, args.zero_based)
    return ExperimentConfig(
        source=source,
        alpha_factor=float(args.alpha_factor),
        tol=float(args.tol),
        tol_pcg=None if args.tol_pcg is None else float(args.tol_pcg),
        exact_tol=float(args.exact_tol),
        lmax_node=int(args.lmax_node),
        lmax_edge=int(args.lmax_edge),
        neumann_max=int(args.neumann_max),
        fraction=float(args.fraction),
        policy=args.policy,
        kind=args.kind,
        trials=int(args.trials),
        seed=int(args.seed),
        stale_bounds=bool(args.stale_bounds),
        recompute_on_maxlen=bool(args.recompute_on_maxlen),
    )


def _emit(records, out):
    if out:
        write_records(records, out, timing_out=str(out) + ".timing.csv")
    else:
        write_records(records, sys.stdout)


def _run(args):
    cfg = config_from_args(args)
    if args.command == "gen":
        if not cfg.source.generated:
            raise ConfigError("gen needs --gen")
        g = cfg.source.build(cfg.trial_rng(0))
        if args.out:
            with open(args.out, "w") as fh:
                write_edge_list(g, fh)
        else:
            write_edge_list(g, sys.stdout)
        print(f"# {cfg.source.label()}: n={g.n} m={g.m}", file=sys.stderr)
        return 0
    if args.command == "compute":
        g = cfg.source.build(cfg.trial_rng(0))
        res = run_compute(g, cfg.alpha_factor, cfg.exact_tol, condition=args.condition)
        info = sys.stderr if not args.out else sys.stdout
        print(f"n={g.n} m={g.m} rho={res.rho!r} alpha={res.alpha!r} iterations={res.iterations}", file=info)
        print(f"TC={res.tc!r}", file=info)
        if res.condition is not None:
            print(f"cond(I - alpha A)={res.condition:.4g}", file=info)
        lines = ["node,katz"] + [f"{i + 1},{v!r}" for i, v in enumerate(res.x.tolist())]
        text = "\n".join(lines) + "\n"
        if args.out:
            Path(args.out).write_text(text)
        else:
            sys.stdout.write(text)
        return 0
    if args.command == "compare":
        _emit(run_compare(cfg), args.out)
        return 0
    if args.command == "sequential":
        _emit(run_sequential(cfg), args.out)
        return 0
    records, violations = run_tc_bounds(cfg)
    _emit(records, args.out)
    if violations:
        print(f"{violations} bound violations", file=sys.stderr)
        return EXIT_BOUND
    return 0


def main(argv=None):
    argv = sys.argv[1:] if argv is None else argv
    parser = build_parser()
    try:
        _apply_config_file(parser, argv)
    except (ConfigError, OSError) as err:
        print(f"walkloss: {err}", file=sys.stderr)
        return EXIT_CONFIG
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return _run(args)
    except (ConfigError, ValueError) as err:
        if isinstance(err, GraphError):
            print(f"walkloss: data error: {err}", file=sys.stderr)
            return EXIT_DATA
        print(f"walkloss: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as err:
        print(f"walkloss: {err}", file=sys.stderr)
        return EXIT_DATA
    except NumericalError as err:
        print(f"walkloss: {err}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())

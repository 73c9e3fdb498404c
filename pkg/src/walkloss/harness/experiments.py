"""Experiment drivers behind the CLI subcommands.

Each driver returns a list of :class:`ExperimentRecord`; :func:`write_records`
turns them into the fixed CSV schema plus a timing sidecar.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from collections import defaultdict
from dataclasses import asdict, dataclass, replace
from pathlib import Path

import numpy as np

from ..graph import RemovalSet, remove_elements
from ..katz import choose_alpha, katz, total_communicability
from ..linalg import condition_estimate, solve_resolvent_cg, solve_resolvent_neumann, spectral_radius
from ..metrics import (
    downdate_edge_pick,
    intersection_similarity,
    ranking,
    relative_error,
    tc_bound_edge,
    tc_bound_node,
)
from ..update import katz_difference, removal_step, update_edge_removal, update_node_removal

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
COLUMNS = (
    "trial",
    "step",
    "method",
    "target_kind",
    "target_id",
    "L",
    "spmv_count",
    "time_ns",
    "rel_err",
    "isim",
    "tc_drop",
    "tc_bound",
    "converged_by",
)


@dataclass(frozen=True)
class ExperimentRecord:
    trial: int | str
    step: int | str
    method: str
    target_kind: str
    target_id: str
    L: float | None = None
    spmv_count: float | None = None
    time_ns: int | None = None
    rel_err: float | None = None
    isim: float | None = None
    tc_drop: float | None = None
    tc_bound: float | None = None
    converged_by: str = ""

    def sort_key(self):
        trial = self.trial if isinstance(self.trial, int) else math.inf
        step = self.step if isinstance(self.step, int) else -1
        return (trial, step, self.target_kind, self.method)


def _target_id(kind, target):
    if kind == "nodes":
        return str(int(target) + 1)
    return f"{int(target[0]) + 1}-{int(target[1]) + 1}"


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_records(records, out, timing_out=None):
    """Write the CSV (no wall times) and, optionally, a timing sidecar.

    Rows are sorted by ``(trial, step, kind, method)``, with summary rows
    last, so the file does not depend on execution order.
    """
    rows = sorted(records, key=ExperimentRecord.sort_key)
    out = Path(out) if not hasattr(out, "write") else out
    fh = out.open("w", newline="") if isinstance(out, Path) else out
    try:
        fh.write(f"# walkloss schema v{SCHEMA_VERSION}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(COLUMNS)
        for r in rows:
            d = asdict(r)
            d["time_ns"] = None
            w.writerow([_fmt(d[c]) for c in COLUMNS])
    finally:
        if isinstance(out, Path):
            fh.close()
    if timing_out is not None:
        with Path(timing_out).open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("trial", "step", "method", "target_kind", "target_id", "time_ns"))
            for r in rows:
                w.writerow([_fmt(r.trial), _fmt(r.step), r.method, r.target_kind, r.target_id, _fmt(r.time_ns)])


def read_records(path):
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def summarize(records):
    """Mean row per ``(target_kind, method)`` over the per-trial rows."""
    groups = defaultdict(list)
    for r in records:
        if isinstance(r.trial, int):
            groups[(r.target_kind, r.method)].append(r)
    out = []
    for (kind, method), rows in sorted(groups.items()):
        def mean(attr):
            vals = [getattr(r, attr) for r in rows if getattr(r, attr) is not None]
            return float(np.mean(vals)) if vals else None
        out.append(
            ExperimentRecord(
                trial="mean",
                step="",
                method=method,
                target_kind=kind,
                target_id="",
                L=mean("L"),
                spmv_count=mean("spmv_count"),
                time_ns=None if mean("time_ns") is None else int(mean("time_ns")),
                rel_err=mean("rel_err"),
                isim=mean("isim"),
                tc_drop=mean("tc_drop"),
                tc_bound=mean("tc_bound"),
            )
        )
    return out


# -- shared setup ----------------------------------------------------------------


@dataclass
class Baseline:
    graph: object
    rho: float
    alpha: float
    state: object


def prepare(config, trial, graph=None):
    """Graph (regenerated per trial for generators), damping and exact scores."""
    rng = config.trial_rng(trial)
    g = graph if graph is not None else config.source.build(rng)
    rho = spectral_radius(g)
    alpha = choose_alpha(g, config.alpha_factor, rho=rho)
    state = katz(g, alpha, tol=config.exact_tol)
    return Baseline(g, rho, alpha, state), rng


def _fixed_graph(config):
    return None if config.source.generated else config.source.build()


def _isim_depth(n):
    return max(1, math.ceil(n / 100))


def _timed(fn, *args, **kw):
    t0 = time.perf_counter_ns()
    out = fn(*args, **kw)
    return out, time.perf_counter_ns() - t0


# -- compute -----------------------------------------------------------------------


@dataclass(frozen=True)
class ComputeResult:
    rho: float
    alpha: float
    iterations: int
    tc: float
    x: np.ndarray
    condition: float | None = None


def run_compute(graph, alpha_factor=0.85, tol=1e-10, condition=False):
    """Katz scores of one graph with ``alpha = factor / rho``."""
    if graph.m == 0:
        state = katz(graph, 0.0)
        return ComputeResult(0.0, 0.0, 0, total_communicability(state), state.x, 1.0 if condition else None)
    rho = spectral_radius(graph)
    alpha = alpha_factor / rho
    state = katz(graph, alpha, tol=tol)
    kappa = condition_estimate(graph, alpha, rho) if condition else None
    return ComputeResult(rho, alpha, state.iterations, total_communicability(state), state.x, kappa)


# -- compare -------------------------------------------------------------------------


def run_compare(config):
    """One random node and one random edge per trial, four ways to update.

    Methods: CG from zero, CG warm-started at the old scores, the truncated
    series on the pruned graph, and the walk-loss update.
    """
    fixed = _fixed_graph(config)
    records = []
    for trial in range(config.trials):
        base, rng = prepare(config, trial, fixed)
        g, alpha, x = base.graph, base.alpha, base.state.x
        ones = np.ones(g.n)
        candidates = np.flatnonzero(g.degree() > 0)
        w = int(rng.choice(candidates))
        edges = g.edges()
        e = tuple(int(t) for t in edges[rng.integers(len(edges))])
        p = _isim_depth(g.n)
        for kind, target in (("nodes", w), ("edges", e)):
            s = RemovalSet.nodes([target]) if kind == "nodes" else RemovalSet.edges([target])
            h = remove_elements(g, s)
            truth = katz(h, alpha, tol=config.exact_tol, x0=x).x
            rank_truth = ranking(truth)
            tid = _target_id(kind, target)

            def row(method, xs, L, spmv, t_ns, conv, **extra):
                return ExperimentRecord(
                    trial, 0, method, kind, tid, L, spmv, t_ns,
                    relative_error(truth, xs),
                    intersection_similarity(rank_truth, ranking(xs), p),
                    converged_by=conv, **extra,
                )

            for method, x0 in (("pcg-cold", None), ("pcg-warm", x)):
                rep, t_ns = _timed(
                    solve_resolvent_cg, h, alpha, ones, x0=x0, tol=config.pcg_tol, raise_on_fail=False
                )
                conv = "tolerance" if rep.converged else "max_length"
                records.append(row(method, rep.solution, rep.iterations, rep.iterations, t_ns, conv))
            rep, t_ns = _timed(solve_resolvent_neumann, h, alpha, ones, tol=config.tol, max_iter=config.neumann_max)
            conv = "tolerance" if rep.converged else "max_length"
            records.append(row("neumann", rep.solution, rep.iterations, rep.iterations, t_ns, conv))
            if kind == "nodes":
                res, t_ns = _timed(update_node_removal, g, base.state, w, config.lmax_node, config.tol)
                bound = tc_bound_node(base.state, w, int(g.degree()[w])).bound
                method = "alg-node"
            else:
                res, t_ns = _timed(update_edge_removal, g, base.state, e, config.lmax_edge, config.tol)
                bound = tc_bound_edge(base.state, e).bound
                method = "alg-edge"
            drop = total_communicability(x) - total_communicability(truth)
            records.append(
                row(method, res.x_new, res.L_used, res.work_spmv, t_ns, res.converged_by, tc_drop=drop, tc_bound=bound)
            )
    return records + summarize(records)


# -- sequential ------------------------------------------------------------------------


def _pick_target(config, g, exact, rng):
    exact_x = exact.x
    deg = g.degree()
    if config.kind == "nodes":
        alive = np.flatnonzero(deg > 0)
        if len(alive) == 0:
            return None
        if config.policy == "random":
            return int(rng.choice(alive))
        # highest exact score among nodes that still have edges; ties by id
        order = ranking(np.where(deg > 0, exact_x, -np.inf))
        return int(order[0])
    edges = g.edges()
    if len(edges) == 0:
        return None
    if config.policy == "random":
        return tuple(int(t) for t in edges[rng.integers(len(edges))])
    if config.policy == "min-product":
        return downdate_edge_pick(exact, g).edge
    prod = exact_x[edges[:, 0]] * exact_x[edges[:, 1]]
    k = int(np.argmax(prod))
    return tuple(int(t) for t in edges[k])


def run_sequential(config):
    """Sequential removals tracked by the walk-loss update and by recomputation.

    Each step records the error of the running approximation against the
    exact scores, ``isim`` at depth ``ceil(n/100)``, and the exact TC drop
    with its bound from the pre-removal exact scores.
    """
    fixed = _fixed_graph(config)
    records = []
    for trial in range(config.trials):
        base, rng = prepare(config, trial, fixed)
        g, alpha = base.graph, base.alpha
        exact, approx = base.state, base.state
        p = _isim_depth(g.n)
        steps = config.removal_count(g)
        for step in range(steps):
            target = _pick_target(config, g, exact, rng)
            if target is None:
                log.warning("trial %d: nothing left to remove at step %d", trial, step)
                break
            if config.kind == "nodes":
                s = RemovalSet.nodes([target])
                bound = tc_bound_node(exact, target, int(g.degree()[target])).bound
            else:
                s = RemovalSet.edges([target])
                bound = tc_bound_edge(exact, target).bound
            tr = removal_step(
                g,
                approx,
                s,
                "approx",
                tol=config.tol,
                lmax_node=config.lmax_node,
                lmax_edge=config.lmax_edge,
                cg_tol=config.pcg_tol,
                recompute_on_maxlen=config.recompute_on_maxlen,
            )
            h = tr.graph
            new_exact = katz(h, alpha, tol=config.exact_tol, x0=exact.x)
            records.append(
                ExperimentRecord(
                    trial,
                    step,
                    "alg-node" if config.kind == "nodes" else "alg-edge",
                    config.kind,
                    _target_id(config.kind, target),
                    tr.result.L_used,
                    tr.result.work_spmv,
                    tr.time_ns,
                    relative_error(new_exact.x, tr.state.x),
                    intersection_similarity(ranking(new_exact.x), ranking(tr.state.x), p),
                    total_communicability(exact) - total_communicability(new_exact),
                    bound,
                    tr.result.converged_by,
                )
            )
            g, exact, approx = h, new_exact, tr.state
    return records


# -- tc bounds ---------------------------------------------------------------------------


def run_tc_bounds(config):
    """Random sequential removals with the communicability bounds alongside.

    ``tc-fresh`` rows bound each step from the exact pre-removal scores;
    ``tc-stale`` rows (with ``stale_bounds``) keep using the initial scores.
    Both report cumulative values divided by the initial TC.  Returns
    ``(records, violations)`` where violations counts fresh steps whose
    bound falls short of the actual drop by more than 1e-12.
    """
    fixed = _fixed_graph(config)
    records = []
    violations = 0
    for trial in range(config.trials):
        base, rng = prepare(config, trial, fixed)
        g = base.graph
        initial = exact = base.state
        tc0 = total_communicability(initial)
        cum_drop = cum_fresh = cum_stale = 0.0
        cfg = replace(config, policy="random")
        for step in range(config.removal_count(g)):
            target = _pick_target(cfg, g, exact, rng)
            if target is None:
                break
            if config.kind == "nodes":
                s = RemovalSet.nodes([target])
                deg = int(g.degree()[target])
                fresh = tc_bound_node(exact, target, deg)
                stale = tc_bound_node(initial, target, deg)
            else:
                s = RemovalSet.edges([target])
                fresh = tc_bound_edge(exact, target)
                stale = tc_bound_edge(initial, target)
            h = remove_elements(g, s)
            # solve for x - x^S directly so the drop carries no cancellation error
            diff = katz_difference(g, exact, s, tol=config.exact_tol).solution
            new_exact = replace(exact, x=exact.x - diff)
            drop = float(diff.mean())
            if replace(fresh, actual_drop=drop).violated:
                violations += 1
                log.error("bound violated: trial %d step %d target %s", trial, step, target)
            cum_drop += drop
            cum_fresh += fresh.bound
            cum_stale += stale.bound
            tid = _target_id(config.kind, target)
            records.append(
                ExperimentRecord(trial, step, "tc-fresh", config.kind, tid, tc_drop=cum_drop / tc0, tc_bound=cum_fresh / tc0)
            )
            if config.stale_bounds:
                records.append(
                    ExperimentRecord(trial, step, "tc-stale", config.kind, tid, tc_drop=cum_drop / tc0, tc_bound=cum_stale / tc0)
                )
            g, exact = h, new_exact
    return records, violations

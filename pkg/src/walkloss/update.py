"""Updating a Katz vector after nodes or edges are removed.

The truncated updates subtract damped counts of the walks a removal
destroys, propagated one sparse product at a time, and stop as soon as the
newest correction is small relative to ``||x||``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Iterable, Literal

import numpy as np

from .errors import IsolatedNode, MissingElement
from .graph import Graph, RemovalSet, remove_elements, removed_edges
from .katz import KatzState, katz
from .linalg import solve_resolvent_cg, solve_resolvent_neumann, spmv
from .walks import edge_pruned_spmv


@dataclass(frozen=True)
class UpdateResult:
    """Output of one update.

    ``L_used`` is the number of series terms (walk lengths) summed, and
    ``converged_by`` is ``"tolerance"`` or ``"max_length"``.  For the
    recompute baselines ``L_used`` holds the solver iteration count.
    """

    x_new: np.ndarray
    L_used: int
    converged_by: Literal["tolerance", "max_length"]
    work_spmv: int


def _check_edge(g, u, v):
    if not (0 <= u < g.n and 0 <= v < g.n and g.has_edge(u, v)):
        raise MissingElement((u, v))


def update_node_removal(g, state, w, L_max=30, tol=1e-4):
    """Truncated update of ``state.x`` after isolating node ``w``.

    ``q`` carries ``alpha^r`` times the first-passage counts into ``w``; each
    step is one product with ``A`` followed by zeroing ``q_w``.  The loop
    stops at the first ``L`` with ``x_w ||q|| / ||x|| <= tol`` or at
    ``L_max``.  Node ``w`` itself ends with score 1.
    """
    if not 0 <= w < g.n:
        raise MissingElement(w)
    if g.indptr[w + 1] == g.indptr[w]:
        raise IsolatedNode(w)
    x, alpha = state.x, state.alpha
    xw = x[w]
    xnorm = np.linalg.norm(x)
    e = np.zeros(g.n)
    e[w] = 1.0
    q = alpha * spmv(g, e)
    x_hat = x - xw * q
    L = 1
    while xw * np.linalg.norm(q) / xnorm > tol and L < L_max:
        q = alpha * spmv(g, q)
        q[w] = 0.0
        x_hat -= xw * q
        L += 1
    done = xw * np.linalg.norm(q) / xnorm <= tol
    x_hat[w] = 1.0
    return UpdateResult(x_hat, L, "tolerance" if done else "max_length", L)


def update_edge_removal(g, state, e, L_max=30, tol=1e-4):
    """Truncated update of ``state.x`` after deleting edge ``e = (u, v)``.

    Two propagation vectors ``s`` and ``t`` hold ``alpha^{r+1} A_E^r e_u``
    and ``alpha^{r+1} A_E^r e_v``; ``A_E`` is applied as ``A`` minus the two
    entries of the removed edge.  Stops when the norm of the latest
    correction relative to ``||x||`` is at most ``tol``.
    """
    u, v = int(e[0]), int(e[1])
    _check_edge(g, u, v)
    x, alpha = state.x, state.alpha
    xu, xv = x[u], x[v]
    xnorm = np.linalg.norm(x)
    x_hat = x.copy()
    x_hat[u] -= alpha * xv
    x_hat[v] -= alpha * xu
    eu = np.zeros(g.n)
    eu[u] = 1.0
    ev = np.zeros(g.n)
    ev[v] = 1.0
    s = alpha**2 * (spmv(g, eu) - ev)
    t = alpha**2 * (spmv(g, ev) - eu)
    step = xv * s + xu * t
    x_hat -= step
    L = 1
    while np.linalg.norm(step) / xnorm > tol and L < L_max:
        s_new = alpha * spmv(g, s)
        s_new[v] -= alpha * s[u]
        s_new[u] -= alpha * s[v]
        t_new = alpha * spmv(g, t)
        t_new[v] -= alpha * t[u]
        t_new[u] -= alpha * t[v]
        s, t = s_new, t_new
        step = xv * s + xu * t
        x_hat -= step
        L += 1
    done = np.linalg.norm(step) / xnorm <= tol
    return UpdateResult(x_hat, L, "tolerance" if done else "max_length", 2 * L)


def _update_edge_set(g, state, es, L_max, tol):
    drop = removed_edges(g, es)
    x, alpha = state.x, state.alpha
    xnorm = np.linalg.norm(x)
    x_hat = x.copy()
    pairs = []
    for u, v in drop:
        x_hat[u] -= alpha * x[v]
        x_hat[v] -= alpha * x[u]
    for u, v in drop:
        eu = np.zeros(g.n)
        eu[u] = 1.0
        ev = np.zeros(g.n)
        ev[v] = 1.0
        pairs.append(
            (
                alpha**2 * edge_pruned_spmv(g, drop, eu),
                alpha**2 * edge_pruned_spmv(g, drop, ev),
            )
        )
    step = np.zeros(g.n)
    for (u, v), (s, t) in zip(drop, pairs):
        step += x[v] * s + x[u] * t
    x_hat -= step
    L = 1
    while np.linalg.norm(step) / xnorm > tol and L < L_max:
        pairs = [
            (alpha * edge_pruned_spmv(g, drop, s), alpha * edge_pruned_spmv(g, drop, t))
            for s, t in pairs
        ]
        step = np.zeros(g.n)
        for (u, v), (s, t) in zip(drop, pairs):
            step += x[v] * s + x[u] * t
        x_hat -= step
        L += 1
    done = np.linalg.norm(step) / xnorm <= tol
    return UpdateResult(x_hat, L, "tolerance" if done else "max_length", 2 * len(drop) * L)


def _update_node_set(g, state, ns, L_max, tol):
    members = list(ns.members)
    for w in members:
        if not 0 <= w < g.n:
            raise MissingElement(w)
        if g.indptr[w + 1] == g.indptr[w]:
            raise IsolatedNode(w)
    x, alpha = state.x, state.alpha
    xnorm = np.linalg.norm(x)
    x_hat = x.copy()
    qs = []
    for w in members:
        e = np.zeros(g.n)
        e[w] = 1.0
        q = alpha * spmv(g, e)
        q[members] = 0.0
        qs.append(q)
    step = sum(x[w] * q for w, q in zip(members, qs))
    x_hat -= step
    L = 1
    while np.linalg.norm(step) / xnorm > tol and L < L_max:
        for q in qs:
            q[:] = alpha * spmv(g, q)
            q[members] = 0.0
        step = sum(x[w] * q for w, q in zip(members, qs))
        x_hat -= step
        L += 1
    done = np.linalg.norm(step) / xnorm <= tol
    x_hat[members] = 1.0
    return UpdateResult(x_hat, L, "tolerance" if done else "max_length", len(members) * L)


def update_set_removal(g, state, s: RemovalSet, L_max=30, tol=1e-4):
    """Truncated update for removing every element of ``s`` at once.

    Edge sets propagate one ``(s, t)`` pair per edge through ``A_E``.  Node
    sets propagate, for each ``w``, the ``F``-avoiding first-passage counts
    into ``w`` with ``F`` the other removed nodes, which avoids counting a
    walk once per removed node it meets.  Singletons are delegated to
    :func:`update_node_removal` / :func:`update_edge_removal`.
    """
    if s.kind == "edges":
        if len(s) == 1:
            return update_edge_removal(g, state, s.members[0], L_max, tol)
        return _update_edge_set(g, state, s, L_max, tol)
    if len(s) == 1:
        return update_node_removal(g, state, s.members[0], L_max, tol)
    return _update_node_set(g, state, s, L_max, tol)


def naive_node_set_update(g, state, ns, L_max=30, tol=1e-4):
    """Sum of independent single-node corrections; wrong for adjacent nodes."""
    x_hat = state.x.copy()
    for w in ns.members:
        x_hat += update_node_removal(g, state, w, L_max, tol).x_new - state.x
    for w in ns.members:
        x_hat[w] = 1.0
    return x_hat


def katz_difference(g, state, s: RemovalSet, tol=1e-12):
    """``x - x^S`` solved directly, without subtracting two close vectors.

    ``(I - alpha A_S)(x - x^S) = alpha (A - A_S) x``; for node sets the rows
    of removed nodes reproduce ``x_i - 1``.  Accurate to ``tol`` relative to
    the difference itself, which matters when the difference is small.
    """
    h = remove_elements(g, s)
    x, alpha = state.x, state.alpha
    rhs = alpha * (spmv(g, x) - spmv(h, x))
    return solve_resolvent_cg(h, alpha, rhs, tol=tol, max_iter=10_000)


def exact_update_edges(g, state, es: RemovalSet, tol=1e-12):
    """Exact new state after deleting the edges ``es``.

    Solves ``(I - alpha A_E) y = alpha sum_{(u,v)} (x_u e_v + x_v e_u)`` once
    and returns ``x - y`` with exact provenance.
    """
    if es.kind != "edges":
        raise ValueError("exact_update_edges needs an edge set")
    rep = katz_difference(g, state, es, tol)
    return KatzState(state.alpha, state.seed, state.x - rep.solution, iterations=rep.iterations)


def exact_update_nodes(g, state, ns: RemovalSet, tol=1e-12):
    """Exact new state after isolating the nodes ``ns`` (their scores become seed)."""
    if ns.kind != "nodes":
        raise ValueError("exact_update_nodes needs a node set")
    rep = katz_difference(g, state, ns, tol)
    x = state.x - rep.solution
    x[list(ns.members)] = state.seed[list(ns.members)]
    return KatzState(state.alpha, state.seed, x, iterations=rep.iterations)


# -- sequential removals -------------------------------------------------------


@dataclass(frozen=True)
class StepTrace:
    """One removal in a sequential run."""

    removal: RemovalSet
    graph: Graph
    state: KatzState
    result: UpdateResult
    time_ns: int


Policy = Literal["approx", "recompute-cg", "recompute-neumann"]


def removal_step(
    g,
    state,
    s,
    policy: Policy = "approx",
    *,
    tol=1e-4,
    lmax_node=30,
    lmax_edge=30,
    cg_tol=None,
    warm=True,
    neumann_max=100,
    recompute_on_maxlen=False,
):
    """Apply one removal to ``(g, state)`` and return a :class:`StepTrace`.

    ``approx`` runs the truncated update and marks the new state approximate;
    the recompute policies solve on the pruned graph from scratch (CG starts
    from the previous ``x`` when ``warm``).  Timings cover the numerical call
    only.
    """
    h = remove_elements(g, s)
    cg_tol = tol / 10 if cg_tol is None else cg_tol
    if policy == "approx":
        lmax = lmax_node if s.kind == "nodes" else lmax_edge
        t0 = time.perf_counter_ns()
        res = update_set_removal(g, state, s, lmax, tol)
        elapsed = time.perf_counter_ns() - t0
        new_state = state.advanced(res.x_new)
        if recompute_on_maxlen and res.converged_by == "max_length":
            new_state = katz(h, state.alpha, state.seed, tol=cg_tol, x0=res.x_new)
        return StepTrace(s, h, new_state, res, elapsed)
    t0 = time.perf_counter_ns()
    if policy == "recompute-cg":
        rep = solve_resolvent_cg(h, state.alpha, state.seed, x0=state.x if warm else None, tol=cg_tol)
    elif policy == "recompute-neumann":
        rep = solve_resolvent_neumann(h, state.alpha, state.seed, tol=tol, max_iter=neumann_max)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    elapsed = time.perf_counter_ns() - t0
    x = rep.solution
    iso = h.isolated()
    x[iso] = state.seed[iso]
    res = UpdateResult(x, rep.iterations, "tolerance" if rep.converged else "max_length", rep.iterations)
    return StepTrace(s, h, KatzState(state.alpha, state.seed, x, iterations=rep.iterations), res, elapsed)


def sequential_removal_driver(
    g,
    state,
    schedule: Iterable[RemovalSet] | Callable,
    policy: Policy = "approx",
    **params,
):
    """Remove the scheduled sets one after another.

    ``schedule`` is an iterable of removal sets, or a callable
    ``schedule(step, graph, state)`` returning the next set (``None`` ends
    the run).  Each step starts from the previous step's graph and state,
    so approximate updates feed on earlier approximations.

    Returns the list of :class:`StepTrace`.  A missing element raises
    :class:`MissingElement` whose ``trace`` attribute holds the steps done.
    """
    trace = []
    if callable(schedule):
        def sets():
            k = 0
            while True:
                nxt = schedule(k, g_cur, st_cur)
                if nxt is None:
                    return
                yield nxt
                k += 1
        it = sets()
    else:
        it = iter(schedule)
    g_cur, st_cur = g, state
    for s in it:
        try:
            step = removal_step(g_cur, st_cur, s, policy, **params)
        except MissingElement as err:
            err.trace = trace
            raise
        trace.append(step)
        g_cur, st_cur = step.graph, step.state
    return trace

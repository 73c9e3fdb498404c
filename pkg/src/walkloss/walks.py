"""Walk counting: totals, walks lost to a removal, and first-passage walks.

Every routine works in one of two arithmetic modes.  ``exact=True`` (the
default) keeps int64 counts and raises :class:`IntegerOverflow` before a
product could wrap; ``exact=False`` uses float64.  Matrices ``A_S`` of a
pruned graph are never formed: they are applied as ``A`` followed by
corrections on the removed entries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal

import numpy as np

from .graph import RemovalSet, remove_elements, removed_edges, split_boundary
from .linalg import spmv

SeriesKind = Literal["total", "lost_edges", "lost_nodes", "fpw", "favoiding_fpw"]


@dataclass(frozen=True)
class WalkCountSeries:
    """Per-node count vectors for lengths ``0..L`` stacked as rows."""

    vectors: np.ndarray
    kind: SeriesKind
    target: int | None = None
    avoid: tuple = ()

    def __getitem__(self, r):
        return self.vectors[r]

    def __len__(self):
        return len(self.vectors)

    @property
    def max_length(self):
        return len(self.vectors) - 1


def _dtype(exact):
    return np.int64 if exact else np.float64


def _ones(g, exact):
    return np.ones(g.n, dtype=_dtype(exact))


def edge_pruned_spmv(g, edges, v):
    """``A_E v`` where ``edges`` is a ``(k, 2)`` array of deleted edges."""
    out = spmv(g, v)
    u, w = edges[:, 0], edges[:, 1]
    np.subtract.at(out, u, v[w])
    np.subtract.at(out, w, v[u])
    return out


def node_pruned_spmv(g, mask, v):
    """``A_N v`` where ``mask`` flags the deleted nodes."""
    v = v.copy()
    v[mask] = 0
    out = spmv(g, v)
    out[mask] = 0
    return out


def total_walks(g, L, exact=True):
    """``A^r 1`` for ``r = 0..L``."""
    if L < 0:
        raise ValueError("L must be nonnegative")
    out = np.empty((L + 1, g.n), dtype=_dtype(exact))
    out[0] = 1
    for r in range(1, L + 1):
        out[r] = spmv(g, out[r - 1])
    return WalkCountSeries(out, "total")


def lost_walks_oracle(g, s: RemovalSet, r, exact=True):
    """Walks of length ``r`` that meet ``s``, as ``(A^r - A_S^r) 1``.

    Computed from two independent power sequences on the full and the
    pruned graph.  This is the reference the faster formulas are checked
    against.
    """
    if r == 0:
        removed_edges(g, s)  # validate membership
        return np.zeros(g.n, dtype=_dtype(exact))
    h = remove_elements(g, s)
    return total_walks(g, r, exact)[r] - total_walks(h, r, exact)[r]


def _horner(apply, terms):
    # terms[j] multiplies apply^(len-1-j); evaluates sum_k apply^k terms[r-1-k]
    acc = terms[0].copy()
    for t in terms[1:]:
        acc = apply(acc) + t
    return acc


def lost_walks_edges(g, es: RemovalSet, r, exact=True, powers=None):
    """Walks of length ``r`` traversing at least one edge of ``es``.

    Evaluates ``sum_k A_E^k (A^{r-k} 1 - A_E A^{r-k-1} 1)`` by a Horner
    recursion over the cached vectors ``A^j 1``, so one call costs ``2r``
    sparse products.  ``powers`` may supply a precomputed
    :func:`total_walks` table.
    """
    if es.kind != "edges":
        raise ValueError("lost_walks_edges needs an edge set")
    drop = removed_edges(g, es)
    if r == 0:
        return np.zeros(g.n, dtype=_dtype(exact))
    p = powers.vectors if powers is not None else total_walks(g, r, exact).vectors
    apply = lambda v: edge_pruned_spmv(g, drop, v)  # noqa: E731
    # d_j = A^{j+1} 1 - A_E A^j 1 = (A - A_E) A^j 1
    terms = [p[j + 1] - apply(p[j]) for j in range(r)]
    return _horner(apply, terms)


def lost_walks_nodes(g, ns: RemovalSet, r, exact=True, mode="boundary", powers=None):
    """Walks of length ``r`` visiting at least one node of ``ns``.

    ``mode="boundary"`` splits the incident edges into internal and boundary
    parts and sums ``A_in A^{r-1} 1 + sum_k A_N^k A_out A^{r-k-1} 1``.
    ``mode="fpw"`` instead weights ``F``-avoiding first-passage counts into
    each ``w`` by the walks leaving ``w``.  The two must agree.
    """
    if ns.kind != "nodes":
        raise ValueError("lost_walks_nodes needs a node set")
    inner, outer = split_boundary(g, ns)
    if r == 0:
        return np.zeros(g.n, dtype=_dtype(exact))
    p = powers.vectors if powers is not None else total_walks(g, r, exact).vectors
    mask = np.zeros(g.n, dtype=bool)
    mask[list(ns.members)] = True
    if mode == "boundary":
        apply = lambda v: node_pruned_spmv(g, mask, v)  # noqa: E731
        terms = [spmv(outer, p[j]) for j in range(r)]
        return spmv(inner, p[r - 1]) + _horner(apply, terms)
    if mode == "fpw":
        out = np.zeros(g.n, dtype=_dtype(exact))
        for w in ns.members:
            f = [x for x in ns.members if x != w]
            q = favoiding_fpw_series(g, w, f, r, exact).vectors
            for k in range(1, r + 1):
                out += q[k] * p[r - k][w]
        out[mask] = p[r][mask]
        return out
    raise ValueError(f"unknown mode {mode!r}")


def naive_node_sum(g, ns: RemovalSet, r, exact=True):
    """``sum_w c_r^{w}`` over single nodes.

    Overcounts whenever two nodes of ``ns`` are adjacent; kept as a
    diagnostic for that effect.
    """
    return sum(lost_walks_nodes(g, RemovalSet.nodes([w]), r, exact) for w in ns.members)


def favoiding_fpw_series(g, w, f, L, exact=True):
    """Counts of ``F``-avoiding first-passage walks into ``w``, lengths ``0..L``.

    Row ``k`` holds, for every start node, the walks of length ``k`` that end
    at ``w`` and touch neither ``w`` nor any node of ``f`` before the end.
    One sparse product plus ``|f| + 1`` entry resets per length.
    """
    f = sorted({int(x) for x in f})
    if w in f:
        raise ValueError("target node must not be in the avoided set")
    hit = np.array([w] + f, dtype=np.int64)
    out = np.zeros((L + 1, g.n), dtype=_dtype(exact))
    out[0, w] = 1
    for k in range(L):
        nxt = spmv(g, out[k])
        nxt[hit] = 0
        out[k + 1] = nxt
    return WalkCountSeries(out, "favoiding_fpw" if f else "fpw", target=w, avoid=tuple(f))


def fpw_series(g, w, L, exact=True):
    """First-passage walk counts into ``w`` for lengths ``0..L``."""
    return favoiding_fpw_series(g, w, (), L, exact)


def lost_walks_node_single(g, w, r, exact=True):
    """``sum_{k=0}^{r} (A^{r-k} 1)_w q_k`` for a single node ``w``."""
    p = total_walks(g, r, exact).vectors
    q = fpw_series(g, w, r, exact).vectors
    out = np.zeros(g.n, dtype=_dtype(exact))
    for k in range(r + 1):
        out += p[r - k][w] * q[k]
    return out


# -- brute force ---------------------------------------------------------------


def enumerate_walks(g, length, start=None):
    """Yield every walk with ``length`` steps as a tuple of nodes.

    Exponential in ``length``; intended for graphs of a dozen nodes.
    """
    starts = range(g.n) if start is None else [start]
    nbrs = [tuple(int(x) for x in g.neighbors(i)) for i in range(g.n)]

    def extend(walk):
        if len(walk) == length + 1:
            yield tuple(walk)
            return
        for nb in nbrs[walk[-1]]:
            walk.append(nb)
            yield from extend(walk)
            walk.pop()

    for s in starts:
        yield from extend([s])


def brute_fpw_counts(g, w, f, L):
    """F-avoiding first-passage counts by explicit walk enumeration."""
    banned = set(f) | {w}
    out = np.zeros((L + 1, g.n), dtype=np.int64)
    out[0, w] = 1
    for k in range(1, L + 1):
        for walk in enumerate_walks(g, k):
            if walk[-1] == w and not banned.intersection(walk[:-1]):
                out[k, walk[0]] += 1
    return out


def brute_lost_walks(g, s: RemovalSet, r):
    """Walks of length ``r`` meeting ``s``, counted one by one."""
    out = np.zeros(g.n, dtype=np.int64)
    if r == 0:
        return out
    if s.kind == "nodes":
        hit = set(s.members)
        meets = lambda walk: not hit.isdisjoint(walk)  # noqa: E731
    else:
        hit = set(s.members)
        meets = lambda walk: any(  # noqa: E731
            (min(a, b), max(a, b)) in hit for a, b in zip(walk, walk[1:])
        )
    for walk in enumerate_walks(g, r):
        if meets(walk):
            out[walk[0]] += 1
    return out

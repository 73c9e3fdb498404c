"""Simple undirected graphs in CSR form, their loaders, generators and removals.

Nodes are numbered ``0 .. n-1`` throughout the library.  The text loaders take
a ``one_based`` flag because edge lists and Matrix Market files count from 1.
"""

from __future__ import annotations

import io
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Literal

import numpy as np
import scipy.sparse as sp
from scipy.sparse import csgraph

from .errors import (
    EmptyGraph,
    IndexOutOfRange,
    InvalidParameters,
    MalformedEntry,
    MalformedLine,
    MissingElement,
    SelfLoop,
    TooManyEdges,
    UnsupportedHeader,
)

log = logging.getLogger(__name__)


def _edge_keys(u, v, n):
    return u.astype(np.int64) * n + v.astype(np.int64)


class Graph:
    """Immutable simple undirected graph.

    Stored as a symmetric CSR pattern with sorted column indices.  Use
    :meth:`from_edges` to build one; the constructor trusts its input.
    """

    __slots__ = ("n", "m", "indptr", "indices", "duplicates_merged", "_adj", "_adj_int")

    def __init__(self, n, indptr, indices, duplicates_merged=0):
        self.n = int(n)
        self.indptr = np.asarray(indptr, dtype=np.int64)
        self.indices = np.asarray(indices, dtype=np.int64)
        self.indptr.setflags(write=False)
        self.indices.setflags(write=False)
        self.m = len(self.indices) // 2
        self.duplicates_merged = duplicates_merged
        self._adj = None
        self._adj_int = None

    @classmethod
    def from_edges(cls, n, edges, *, allow_duplicates=True):
        """Build a graph from an iterable or ``(k, 2)`` array of node pairs.

        Self-loops raise :class:`SelfLoop`; repeated edges (in either
        orientation) are merged and counted in ``duplicates_merged``.
        """
        n = int(n)
        arr = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        if arr.size == 0:
            arr = arr.reshape(0, 2)
        if arr.ndim != 2 or arr.shape[1] != 2:
            raise ValueError("edges must be pairs")
        if len(arr) and (arr.min() < 0 or arr.max() >= n):
            raise IndexOutOfRange(f"edge endpoint outside 0..{n - 1}")
        loops = arr[:, 0] == arr[:, 1]
        if loops.any():
            raise SelfLoop(int(arr[loops][0, 0]))
        lo = np.minimum(arr[:, 0], arr[:, 1])
        hi = np.maximum(arr[:, 0], arr[:, 1])
        keys = np.unique(_edge_keys(lo, hi, n))
        dups = len(arr) - len(keys)
        if dups and not allow_duplicates:
            raise ValueError(f"{dups} duplicate edges")
        lo, hi = keys // n, keys % n
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
        return cls(n, indptr, cols, duplicates_merged=dups)

    @classmethod
    def empty(cls, n):
        return cls(n, np.zeros(n + 1, dtype=np.int64), np.zeros(0, dtype=np.int64))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.m})"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and np.array_equal(self.indptr, other.indptr)
            and np.array_equal(self.indices, other.indices)
        )

    def __hash__(self):
        return hash((self.n, self.indices.tobytes()))

    # -- matrix views -------------------------------------------------------

    @property
    def adjacency(self) -> sp.csr_matrix:
        """Float64 adjacency matrix (cached)."""
        if self._adj is None:
            data = np.ones(len(self.indices))
            self._adj = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        return self._adj

    @property
    def adjacency_int(self) -> sp.csr_matrix:
        """Int64 adjacency matrix for exact walk counting (cached)."""
        if self._adj_int is None:
            data = np.ones(len(self.indices), dtype=np.int64)
            self._adj_int = sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))
        return self._adj_int

    def to_dense(self):
        return self.adjacency.toarray()

    # -- structural queries -------------------------------------------------

    def degree(self):
        return np.diff(self.indptr)

    def neighbors(self, i):
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def has_edge(self, u, v):
        nb = self.neighbors(u)
        k = np.searchsorted(nb, v)
        return bool(k < len(nb) and nb[k] == v)

    def edges(self):
        """``(m, 2)`` array of edges ``(u, v)`` with ``u < v``, lexicographically sorted."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), self.degree())
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def isolated(self):
        return np.flatnonzero(self.degree() == 0)


@dataclass(frozen=True)
class RemovalSet:
    """A nonempty set of nodes or of undirected edges to delete from a graph."""

    kind: Literal["nodes", "edges"]
    members: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("nodes", "edges"):
            raise ValueError(f"unknown removal kind {self.kind!r}")
        if not self.members:
            raise ValueError("removal set must be nonempty")

    @classmethod
    def nodes(cls, ids: Iterable[int]) -> "RemovalSet":
        return cls("nodes", tuple(sorted({int(i) for i in ids})))

    @classmethod
    def edges(cls, pairs: Iterable[tuple[int, int]]) -> "RemovalSet":
        norm = set()
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v:
                raise SelfLoop(u)
            norm.add((min(u, v), max(u, v)))
        return cls("edges", tuple(sorted(norm)))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)


# -- loaders -----------------------------------------------------------------


def _as_text(stream):
    if isinstance(stream, str):
        return io.StringIO(stream)
    return stream


def load_edge_list(text, one_based=True, n=None):
    """Parse a whitespace-separated edge list.

    ``#`` starts a comment, blank lines are skipped.  The node count is
    inferred from the largest index unless ``n`` is given.
    """
    offset = 1 if one_based else 0
    pairs = []
    for lineno, line in enumerate(_as_text(text), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tok = line.split()
        if len(tok) < 2:
            raise MalformedLine(f"line {lineno}: expected two node ids, got {line!r}")
        try:
            u, v = int(tok[0]) - offset, int(tok[1]) - offset
        except ValueError:
            raise MalformedLine(f"line {lineno}: non-integer token in {line!r}") from None
        if u < 0 or v < 0 or (n is not None and (u >= n or v >= n)):
            raise IndexOutOfRange(f"line {lineno}: node id out of range")
        if u == v:
            raise SelfLoop(u)
        pairs.append((u, v))
    if n is None:
        n = max((max(p) for p in pairs), default=-1) + 1
    g = Graph.from_edges(n, np.array(pairs, dtype=np.int64).reshape(-1, 2))
    if g.duplicates_merged:
        log.info("merged %d duplicate edges", g.duplicates_merged)
    return g


def load_matrix_market(text):
    """Read a symmetric coordinate Matrix Market file as an unweighted graph.

    Pattern, integer and real fields are accepted; values are ignored.
    """
    lines = _as_text(text)
    header = lines.readline().strip().lower().split()
    if (
        len(header) < 5
        or header[0] != "%%matrixmarket"
        or header[1] != "matrix"
        or header[2] != "coordinate"
        or header[3] not in ("pattern", "real", "integer")
        or header[4] != "symmetric"
    ):
        raise UnsupportedHeader(" ".join(header) or "<empty>")
    size = None
    pairs = []
    for lineno, line in enumerate(lines, 2):
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        tok = line.split()
        if size is None:
            try:
                rows, cols, _nnz = (int(t) for t in tok[:3])
            except ValueError:
                raise MalformedEntry(f"line {lineno}: bad size line {line!r}") from None
            if rows != cols:
                raise UnsupportedHeader("matrix is not square")
            size = rows
            continue
        try:
            i, j = int(tok[0]) - 1, int(tok[1]) - 1
        except (ValueError, IndexError):
            raise MalformedEntry(f"line {lineno}: {line!r}") from None
        if not (0 <= i < size and 0 <= j < size):
            raise IndexOutOfRange(f"line {lineno}: entry ({i + 1},{j + 1}) outside {size}x{size}")
        if i == j:
            raise SelfLoop(i)
        pairs.append((i, j))
    if size is None:
        raise MalformedEntry("missing size line")
    g = Graph.from_edges(size, np.array(pairs, dtype=np.int64).reshape(-1, 2))
    if g.duplicates_merged:
        log.info("merged %d duplicate entries", g.duplicates_merged)
    return g


def write_edge_list(g, stream, one_based=True):
    off = 1 if one_based else 0
    for u, v in g.edges():
        stream.write(f"{u + off} {v + off}\n")


# -- generators --------------------------------------------------------------


def _row_start(u, n):
    # index of pair (u, u+1) in the row-major listing of pairs u < v
    return u * (2 * n - u - 1) // 2


def _pair_row(idx, n):
    u = np.floor(n - 0.5 - np.sqrt((n - 0.5) ** 2 - 2.0 * idx)).astype(np.int64)
    u = np.clip(u, 0, n - 2)
    # float rounding can be off by one either way
    u -= _row_start(u, n) > idx
    u += _row_start(u + 1, n) <= idx
    return u


def gen_erdos_renyi(n, m, seed):
    """Uniform random simple graph with exactly ``m`` edges."""
    total = n * (n - 1) // 2
    if m > total:
        raise TooManyEdges(f"{m} edges requested, at most {total} possible for n={n}")
    rng = np.random.default_rng(seed)
    idx = np.sort(rng.choice(total, size=m, replace=False)).astype(np.int64)
    u = _pair_row(idx, n)
    v = idx - _row_start(u, n) + u + 1
    return Graph.from_edges(n, np.column_stack([u, v]))


def gen_preferential_attachment(n, d, seed):
    """Barabasi-Albert style graph grown from a ``(d+1)``-clique.

    Every later node picks ``d`` distinct targets, each draw proportional to
    the current degree.  The result is connected with
    ``d(d+1)/2 + (n-d-1)d`` edges.
    """
    if d < 1 or n <= d:
        raise InvalidParameters(f"need d >= 1 and n > d, got n={n}, d={d}")
    rng = np.random.default_rng(seed)
    edges = [(i, j) for i in range(d + 1) for j in range(i + 1, d + 1)]
    # one entry per edge endpoint, so uniform draws are degree-proportional
    stubs = [x for e in edges for x in e]
    for new in range(d + 1, n):
        chosen = set()
        while len(chosen) < d:
            chosen.add(stubs[int(rng.integers(len(stubs)))])
        for t in sorted(chosen):
            edges.append((t, new))
            stubs.extend((t, new))
    return Graph.from_edges(n, np.array(edges, dtype=np.int64))


def gen_connected_erdos_renyi(n, m, rng, retries=100):
    """Draw ER graphs from ``rng``-derived seeds until one is connected."""
    for _ in range(retries):
        g = gen_erdos_renyi(n, m, int(rng.integers(2**63 - 1)))
        if is_connected(g):
            return g
    raise InvalidParameters(f"no connected erdrey({n},{m}) in {retries} attempts")


# -- removals ----------------------------------------------------------------


def _check_members(g, s):
    if s.kind == "nodes":
        for w in s.members:
            if not 0 <= w < g.n:
                raise MissingElement(w)
    else:
        for u, v in s.members:
            if not (0 <= u < g.n and 0 <= v < g.n and g.has_edge(u, v)):
                raise MissingElement((u, v))


def removed_edges(g, s):
    """Edges of ``g`` deleted by ``s`` as a ``(k, 2)`` array with ``u < v``."""
    _check_members(g, s)
    if s.kind == "edges":
        return np.array(s.members, dtype=np.int64).reshape(-1, 2)
    e = g.edges()
    mask = np.zeros(g.n, dtype=bool)
    mask[list(s.members)] = True
    return e[mask[e[:, 0]] | mask[e[:, 1]]]


def _drop_edges(g, drop):
    e = g.edges()
    if len(drop) == 0:
        return g
    gone = np.isin(_edge_keys(e[:, 0], e[:, 1], g.n), _edge_keys(drop[:, 0], drop[:, 1], g.n))
    return Graph.from_edges(g.n, e[~gone])


def remove_elements(g: Graph, s: RemovalSet) -> Graph:
    """Copy of ``g`` without the edges (or all edges at the nodes) in ``s``.

    The node count is unchanged; removed nodes become isolated.
    """
    return _drop_edges(g, removed_edges(g, s))


def split_boundary(g, n_set):
    """Split the edges touching a node set into internal and boundary parts.

    Returns ``(inner, outer)`` graphs on the same node set: ``inner`` holds
    edges with both endpoints in ``n_set`` and ``outer`` the edges with
    exactly one.  Together with ``remove_elements(g, n_set)`` they add up to
    ``g``.
    """
    if n_set.kind != "nodes":
        raise ValueError("split_boundary needs a node set")
    drop = removed_edges(g, n_set)
    mask = np.zeros(g.n, dtype=bool)
    mask[list(n_set.members)] = True
    both = mask[drop[:, 0]] & mask[drop[:, 1]]
    return Graph.from_edges(g.n, drop[both]), Graph.from_edges(g.n, drop[~both])


# -- distances ---------------------------------------------------------------


def bfs_distance(g, source):
    """Geodesic distances from ``source``; unreachable nodes get ``inf``."""
    dist = np.full(g.n, np.inf)
    dist[source] = 0
    queue = deque([source])
    indptr, indices = g.indptr, g.indices
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in indices[indptr[u]:indptr[u + 1]]:
            if dist[v] == np.inf:
                dist[v] = du
                queue.append(v)
    return dist


def distance_to_set(g, sources):
    """Distance from every node to the nearest node of ``sources``."""
    dist = np.full(g.n, np.inf)
    queue = deque()
    for s in sources:
        dist[s] = 0
        queue.append(s)
    while queue:
        u = queue.popleft()
        for v in g.neighbors(u):
            if dist[v] == np.inf:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def is_connected(g):
    if g.n == 0:
        return True
    ncomp, _ = csgraph.connected_components(g.adjacency, directed=False)
    return ncomp == 1


@dataclass(frozen=True)
class GraphStats:
    diameter: int
    mean_eccentricity: float
    mean_degree: float
    connected: bool
    component_size: int


def graph_stats(g, batch=512):
    """Diameter, mean eccentricity and mean degree.

    For a disconnected graph the distance statistics describe the largest
    component and ``connected`` is False.
    """
    if g.n == 0:
        raise EmptyGraph("graph has no nodes")
    ncomp, labels = csgraph.connected_components(g.adjacency, directed=False)
    nodes = np.arange(g.n)
    adj = g.adjacency
    if ncomp > 1:
        big = np.argmax(np.bincount(labels))
        nodes = np.flatnonzero(labels == big)
        adj = adj[nodes][:, nodes]
    ecc = np.empty(len(nodes))
    for start in range(0, len(nodes), batch):
        idx = np.arange(start, min(start + batch, len(nodes)))
        d = csgraph.shortest_path(adj, directed=False, unweighted=True, indices=idx)
        ecc[idx] = d.max(axis=1)
    return GraphStats(
        diameter=int(ecc.max()),
        mean_eccentricity=float(ecc.mean()),
        mean_degree=float(2 * g.m / g.n),
        connected=ncomp == 1,
        component_size=len(nodes),
    )

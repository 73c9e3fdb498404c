"""Communicability bounds, the downdate edge choice, and ranking metrics."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, EmptyGraph, InvalidDepth

SLACK_TOL = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """Upper bound on a drop in total communicability.

    ``actual_drop``, ``slack`` and ``violated`` are filled only when the
    true drop is known.
    """

    bound: float
    actual_drop: float | None = None

    @property
    def slack(self):
        return None if self.actual_drop is None else self.bound - self.actual_drop

    @property
    def violated(self):
        return self.actual_drop is not None and self.slack < -SLACK_TOL


def tc_bound_node(state, w, deg_w, actual_drop=None):
    """Bound on ``TC - TC^{w}`` from the current scores only.

    ``(x_w^2 (1 - alpha^2 deg(w)) - 1) / n``.
    """
    x, a = state.x, state.alpha
    bound = (x[w] ** 2 * (1 - a**2 * deg_w) - 1) / len(x)
    return BoundReport(float(bound), actual_drop)


def tc_bound_edge(state, e, actual_drop=None):
    """Bound on ``TC - TC^{e}``: ``(2a x_u x_v - a^2 x_u^2 - a^2 x_v^2) / n``."""
    x, a = state.x, state.alpha
    xu, xv = x[e[0]], x[e[1]]
    bound = (2 * a * xu * xv - a**2 * xu**2 - a**2 * xv**2) / len(x)
    return BoundReport(float(bound), actual_drop)


class EdgePick(NamedTuple):
    edge: tuple
    product: float
    regime: bool


def downdate_edge_pick(state, g):
    """Edge minimising ``x_u x_v``, ties broken by ``(u, v)``.

    ``regime`` reports whether ``max x < (2 - alpha)/alpha * min x``, the
    condition under which this edge also minimises the edge bound.
    """
    if g.m == 0:
        raise EmptyGraph("graph has no edges")
    x = state.x
    e = g.edges()
    prod = x[e[:, 0]] * x[e[:, 1]]
    # edges() is sorted, so argmin returns the lexicographically first tie
    k = int(np.argmin(prod))
    a = state.alpha
    regime = bool(x.max() < (2 - a) / a * x.min())
    return EdgePick((int(e[k, 0]), int(e[k, 1])), float(prod[k]), regime)


def relative_error(x_exact, x_approx):
    """``||x - x_hat||_2 / ||x||_2``."""
    x_exact = np.asarray(x_exact, dtype=float)
    x_approx = np.asarray(x_approx, dtype=float)
    if x_exact.shape != x_approx.shape:
        raise DimensionMismatch(f"{x_exact.shape} vs {x_approx.shape}")
    return float(np.linalg.norm(x_exact - x_approx) / np.linalg.norm(x_exact))


def ranking(scores):
    """Node ids ordered by descending score, ties by ascending id."""
    scores = np.asarray(scores)
    return np.lexsort((np.arange(len(scores)), -scores))


def intersection_similarity(beta, gamma, p):
    """Mean over depths ``i <= p`` of ``|beta[:i] ^ gamma[:i]| / (2i)``.

    0 means the top-``i`` sets agree at every depth, 1 that they never share
    an element.
    """
    if not 1 <= p <= min(len(beta), len(gamma)):
        raise InvalidDepth(f"depth {p} outside 1..{min(len(beta), len(gamma))}")
    seen_b, seen_g = set(), set()
    common = 0
    total = 0.0
    for i in range(p):
        b, c = beta[i], gamma[i]
        if b == c:
            common += 1
        else:
            common += (b in seen_g) + (c in seen_b)
        seen_b.add(b)
        seen_g.add(c)
        depth = i + 1
        total += (2 * depth - 2 * common) / (2 * depth)
    return total / p

"""Matrix-free kernels and baseline solvers for ``(I - alpha A) x = b``."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, EmptyGraph, IntegerOverflow, NoConvergence, NotPositiveDefinite

_INT_LIMIT = np.iinfo(np.int64).max


def spmv(g, v):
    """Return ``A @ v`` for the adjacency matrix of ``g``.

    Integer input is multiplied in int64 with an up-front overflow check
    (every output entry is bounded by ``max degree * max |v|``).
    """
    v = np.asarray(v)
    if v.shape[0] != g.n:
        raise DimensionMismatch(f"vector of length {v.shape[0]} for graph with n={g.n}")
    if np.issubdtype(v.dtype, np.integer):
        if g.m and v.size:
            bound = int(np.abs(v).max()) * int(g.degree().max())
            if bound > _INT_LIMIT:
                raise IntegerOverflow("walk counts exceed int64 range")
        return g.adjacency_int @ v.astype(np.int64, copy=False)
    return g.adjacency @ v


@dataclass(frozen=True)
class SolveReport:
    solution: np.ndarray
    iterations: int
    residual_norm: float
    converged: bool


def spectral_radius(g, tol=1e-6, max_iter=1000):
    """Largest adjacency eigenvalue by power iteration on ``A^2``.

    Working with ``A^2`` keeps the iteration convergent on bipartite graphs,
    whose spectrum is symmetric about zero.  Stops once the eigen-residual of
    ``A^2`` relative to the Rayleigh quotient drops below ``tol``.
    """
    if g.m == 0:
        raise EmptyGraph("spectral radius of an edgeless graph")
    v = np.ones(g.n) / np.sqrt(g.n)
    for _ in range(max_iter):
        av = spmv(g, v)
        w = spmv(g, av)
        mu = av @ av  # Rayleigh quotient of A^2 at unit v
        res = np.linalg.norm(w - mu * v)
        v = w / np.linalg.norm(w)
        if res <= tol * mu:
            return float(np.sqrt(mu))
    raise NoConvergence(max_iter, "spectral radius")


def smallest_eigenvalue(g, rho, tol=1e-6, max_iter=5000):
    """Most negative adjacency eigenvalue via power iteration on ``rho I - A``."""
    rng = np.random.default_rng(0)
    v = rng.standard_normal(g.n)
    v /= np.linalg.norm(v)
    for _ in range(max_iter):
        w = rho * v - spmv(g, v)
        mu = v @ w
        res = np.linalg.norm(w - mu * v)
        v = w / np.linalg.norm(w)
        if res <= tol * mu:
            return float(rho - mu)
    raise NoConvergence(max_iter, "smallest eigenvalue")


def condition_estimate(g, alpha, rho=None):
    """2-norm condition number of ``I - alpha A`` from its extreme eigenvalues."""
    if g.m == 0:
        return 1.0
    rho = spectral_radius(g) if rho is None else rho
    lam_min = smallest_eigenvalue(g, rho)
    return (1 - alpha * lam_min) / (1 - alpha * rho)


def _resolvent_op(g, alpha):
    return lambda v: v - alpha * spmv(g, v)


def solve_resolvent_cg(g, alpha, rhs, x0=None, tol=1e-10, max_iter=1000, *, raise_on_fail=True):
    """Unpreconditioned conjugate gradient on ``(I - alpha A) x = rhs``.

    Stops when ``||rhs - (I - alpha A) x|| <= tol * ||rhs||``.  ``iterations``
    counts CG steps (one matrix-vector product each); a starting guess that
    already satisfies the tolerance costs zero steps.
    """
    op = _resolvent_op(g, alpha)
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != g.n:
        raise DimensionMismatch("rhs length does not match graph")
    x = np.zeros(g.n) if x0 is None else np.array(x0, dtype=float)
    bnorm = np.linalg.norm(b)
    if bnorm == 0:
        return SolveReport(np.zeros(g.n), 0, 0.0, True)
    target = tol * bnorm
    r = b - op(x) if x0 is not None else b.copy()
    rr = r @ r
    if np.sqrt(rr) <= target:
        return SolveReport(x, 0, float(np.sqrt(rr)), True)
    p = r.copy()
    for k in range(1, max_iter + 1):
        ap = op(p)
        curv = p @ ap
        if curv <= 0:
            raise NotPositiveDefinite(f"nonpositive curvature {curv:.3e} at step {k}")
        step = rr / curv
        x += step * p
        r -= step * ap
        rr_new = r @ r
        if np.sqrt(rr_new) <= target:
            return SolveReport(x, k, float(np.sqrt(rr_new)), True)
        p = r + (rr_new / rr) * p
        rr = rr_new
    if raise_on_fail:
        raise NoConvergence(max_iter, "conjugate gradient")
    return SolveReport(x, max_iter, float(np.sqrt(rr)), False)


def cg_iterates(g, alpha, rhs, x0=None, max_iter=100):
    """Yield ``(x_k, r_k)`` for every CG step; used for residual/step studies."""
    op = _resolvent_op(g, alpha)
    b = np.asarray(rhs, dtype=float)
    x = np.zeros(g.n) if x0 is None else np.array(x0, dtype=float)
    r = b - op(x)
    yield x.copy(), r.copy()
    p = r.copy()
    rr = r @ r
    for _ in range(max_iter):
        if rr == 0:
            return
        ap = op(p)
        step = rr / (p @ ap)
        x += step * p
        r -= step * ap
        yield x.copy(), r.copy()
        rr_new = r @ r
        p = r + (rr_new / rr) * p
        rr = rr_new


def solve_resolvent_neumann(g, alpha, rhs, tol=1e-4, max_iter=100):
    """Truncated series ``sum_r alpha^r A^r rhs``.

    Adds terms until the newest one is at most ``tol`` times the norm of the
    running sum, or ``max_iter`` products have been taken.  ``iterations`` is
    the number of terms after the zeroth, i.e. matrix-vector products.
    ``converged`` is False only when the cap was hit first.
    """
    b = np.asarray(rhs, dtype=float)
    if b.shape[0] != g.n:
        raise DimensionMismatch("rhs length does not match graph")
    total = b.copy()
    term = b.copy()
    if alpha == 0 or not term.any():
        return SolveReport(total, 0, 0.0, True)
    for k in range(1, max_iter + 1):
        term = alpha * spmv(g, term)
        total += term
        size = np.linalg.norm(term)
        if size <= tol * np.linalg.norm(total):
            return SolveReport(total, k, float(size), True)
    return SolveReport(total, max_iter, float(size), False)

"""Katz centrality, its damping parameter, and total communicability."""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .linalg import solve_resolvent_cg, solve_resolvent_neumann, spectral_radius


@dataclass(frozen=True)
class KatzState:
    """Damping, seed and centrality vector of one graph.

    ``approx_steps`` counts how many truncated updates produced ``x`` since
    the last exact solve; zero means ``x`` came from a solver.
    """

    alpha: float
    seed: np.ndarray
    x: np.ndarray
    approx_steps: int = 0
    iterations: int = 0

    @property
    def exact(self) -> bool:
        return self.approx_steps == 0

    @property
    def provenance(self) -> str:
        return "exact" if self.exact else f"approximate({self.approx_steps})"

    def advanced(self, x_new) -> "KatzState":
        """State after one more approximate update."""
        return replace(self, x=x_new, approx_steps=self.approx_steps + 1, iterations=0)


def choose_alpha(g, factor=0.85, rho=None):
    """``factor / rho(A)``; pass ``rho`` to reuse a known spectral radius."""
    if not 0 < factor < 1:
        raise ValueError(f"factor must lie in (0, 1), got {factor}")
    if rho is None:
        rho = spectral_radius(g)
    return factor / rho


def katz(g, alpha, seed=None, solver="cg", tol=1e-10, x0=None, max_iter=10_000):
    """Solve ``(I - alpha A) x = seed``.

    Parameters
    ----------
    g : Graph
    alpha : float
        Damping, must satisfy ``0 < alpha * rho(A) < 1``.
    seed : array, optional
        Nonnegative right-hand side; all ones by default.  An indicator vector
        gives the personalised variant.
    solver : {"cg", "neumann"}
    tol : float
        Relative residual (CG) or relative term size (Neumann).
    x0 : array, optional
        Starting guess for CG.

    Returns
    -------
    KatzState
        Isolated nodes carry ``x_i = seed_i`` exactly.
    """
    seed = np.ones(g.n) if seed is None else np.asarray(seed, dtype=float)
    if (seed < 0).any():
        raise ValueError("seed must be nonnegative")
    if g.m == 0:
        return KatzState(alpha, seed, seed.copy())
    if solver == "cg":
        rep = solve_resolvent_cg(g, alpha, seed, x0=x0, tol=tol, max_iter=max_iter)
    elif solver == "neumann":
        rep = solve_resolvent_neumann(g, alpha, seed, tol=tol, max_iter=max_iter)
    else:
        raise ValueError(f"unknown solver {solver!r}")
    x = rep.solution
    iso = g.isolated()
    x[iso] = seed[iso]
    return KatzState(alpha, seed, x, iterations=rep.iterations)


def total_communicability(state):
    """Mean Katz score ``1^T x / n``; accepts a state or a bare vector."""
    return float(np.mean(getattr(state, "x", state)))

"""Experiment configuration: dataclass, graph sources and the flat config file."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from ..graph import (
    gen_connected_erdos_renyi,
    gen_preferential_attachment,
    load_edge_list,
    load_matrix_market,
)


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class GraphSource:
    kind: str  # "erdrey" | "pref" | "file"
    params: tuple = ()
    path: str | None = None
    zero_based: bool = False

    @property
    def generated(self):
        return self.kind != "file"

    def build(self, rng=None):
        """Materialise the graph; generators draw their seed from ``rng``."""
        if self.kind == "file":
            return load_graph_file(self.path, self.zero_based)
        rng = np.random.default_rng(0) if rng is None else rng
        if self.kind == "erdrey":
            n, m = self.params
            return gen_connected_erdos_renyi(n, m, rng)
        n, d = self.params
        return gen_preferential_attachment(n, d, int(rng.integers(2**63 - 1)))

    def label(self):
        if self.kind == "file":
            return Path(self.path).stem
        return f"{self.kind}({','.join(map(str, self.params))})"


def load_graph_file(path, zero_based=False):
    path = Path(path)
    with path.open() as fh:
        first = fh.readline()
        fh.seek(0)
        if first.lower().startswith("%%matrixmarket"):
            return load_matrix_market(fh)
        return load_edge_list(fh, one_based=not zero_based)


def parse_graph_spec(gen=None, graph=None, zero_based=False):
    if (gen is None) == (graph is None):
        raise ConfigError("give exactly one of --gen and --graph")
    if graph is not None:
        return GraphSource("file", path=str(graph), zero_based=zero_based)
    try:
        kind, rest = gen.split(":", 1)
        a, b = (int(t) for t in rest.split(","))
    except ValueError:
        raise ConfigError(f"bad generator spec {gen!r}; expected erdrey:n,m or pref:n,d") from None
    if kind not in ("erdrey", "pref"):
        raise ConfigError(f"unknown generator {kind!r}")
    return GraphSource(kind, (a, b))


@dataclass(frozen=True)
class ExperimentConfig:
    source: GraphSource
    alpha_factor: float = 0.85
    tol: float = 1e-4
    tol_pcg: float | None = None
    exact_tol: float = 1e-10
    lmax_node: int = 30
    lmax_edge: int = 30
    neumann_max: int = 100
    fraction: float = 0.01
    policy: str = "random"
    kind: str = "nodes"
    trials: int = 30
    seed: int = 0
    stale_bounds: bool = False
    recompute_on_maxlen: bool = False

    def __post_init__(self):
        if not 0 < self.fraction <= 1:
            raise ConfigError("removal fraction must lie in (0, 1]")
        if self.trials < 1:
            raise ConfigError("trials must be at least 1")
        if self.tol <= 0 or (self.tol_pcg is not None and self.tol_pcg <= 0):
            raise ConfigError("tolerances must be positive")
        if not 0 < self.alpha_factor < 1:
            raise ConfigError("alpha factor must lie in (0, 1)")
        if self.policy not in ("random", "top-katz", "min-product"):
            raise ConfigError(f"unknown policy {self.policy!r}")
        if self.kind not in ("nodes", "edges"):
            raise ConfigError(f"unknown removal kind {self.kind!r}")
        if self.policy == "min-product" and self.kind == "nodes":
            raise ConfigError("min-product selects edges; use --kind edges")

    @property
    def pcg_tol(self):
        return self.tol / 10 if self.tol_pcg is None else self.tol_pcg

    def trial_rng(self, trial):
        # trial i draws from seed XOR i, independent of execution order
        return np.random.default_rng(self.seed ^ trial)

    def removal_count(self, g):
        total = g.n if self.kind == "nodes" else g.m
        return max(1, math.ceil(self.fraction * total))


CONFIG_KEYS = {f.name.replace("_", "-") for f in fields(ExperimentConfig)} | {
    "gen",
    "graph",
    "zero-based",
    "out",
}


def read_config_file(path):
    """Parse ``key = value`` lines (``#`` comments) into a dict keyed like CLI flags."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.lstrip("-")
        if key not in CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out

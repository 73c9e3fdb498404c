"""Katz centrality updates after node and edge removals, driven by walk counts."""

from .errors import *  # noqa: F401,F403
from .graph import (
    Graph,
    GraphStats,
    RemovalSet,
    bfs_distance,
    gen_erdos_renyi,
    gen_preferential_attachment,
    graph_stats,
    load_edge_list,
    load_matrix_market,
    remove_elements,
    split_boundary,
)
from .katz import KatzState, choose_alpha, katz, total_communicability
from .linalg import (
    SolveReport,
    condition_estimate,
    solve_resolvent_cg,
    solve_resolvent_neumann,
    spectral_radius,
    spmv,
)
from .metrics import (
    BoundReport,
    downdate_edge_pick,
    intersection_similarity,
    ranking,
    relative_error,
    tc_bound_edge,
    tc_bound_node,
)
from .update import (
    UpdateResult,
    exact_update_edges,
    exact_update_nodes,
    katz_difference,
    sequential_removal_driver,
    update_edge_removal,
    update_node_removal,
    update_set_removal,
)
from .walks import (
    WalkCountSeries,
    favoiding_fpw_series,
    fpw_series,
    lost_walks_edges,
    lost_walks_nodes,
    lost_walks_oracle,
    total_walks,
)

__version__ = "0.1.0"

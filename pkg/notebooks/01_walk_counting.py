# %% [markdown]
# # Counting the walks a removal destroys
#
# The five-node toy network: a 4-cycle 1-2-3-4 with a hub 5 joined to all.
# Every count below is an exact int64 vector, and each formula is checked
# against the plain difference of matrix powers.

# %%
import numpy as np

from walkloss import RemovalSet, load_edge_list, lost_walks_edges, lost_walks_nodes, lost_walks_oracle
from walkloss.walks import brute_fpw_counts, favoiding_fpw_series, fpw_series, naive_node_sum

toy = load_edge_list("1 2\n2 3\n3 4\n4 1\n1 5\n2 5\n3 5\n4 5")
print(toy, toy.degree())

# %% [markdown]
# Removing nodes 1 and 2 (ids 0 and 1 inside the library).  Length-1 walks
# that touch the pair:

# %%
pair = RemovalSet.nodes([0, 1])
print(lost_walks_oracle(toy, pair, 1))
print(lost_walks_nodes(toy, pair, 1))
print(lost_walks_nodes(toy, pair, 1, mode="fpw"))

# %% [markdown]
# Summing the single-node vectors counts the walk 1 -> 2 twice, which is why
# the set version needs the F-avoiding counts.

# %%
print(naive_node_sum(toy, pair, 1)[0], "vs", lost_walks_oracle(toy, pair, 1)[0])

# %% [markdown]
# Longer walks and an edge removal agree with the oracle as well.

# %%
edge = RemovalSet.edges([(0, 1)])
for r in range(1, 7):
    assert np.array_equal(lost_walks_edges(toy, edge, r), lost_walks_oracle(toy, edge, r))
    assert np.array_equal(lost_walks_nodes(toy, pair, r), lost_walks_oracle(toy, pair, r))
print(lost_walks_edges(toy, edge, 6))

# %% [markdown]
# First-passage walks into the hub, and walks into node 1 that avoid node 2.

# %%
print(fpw_series(toy, 4, 3).vectors)
q = favoiding_fpw_series(toy, 0, [1], 3)
print(q.vectors)
print(np.array_equal(q.vectors, brute_fpw_counts(toy, 0, [1], 3)))

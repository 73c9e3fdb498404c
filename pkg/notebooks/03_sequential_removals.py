# %% [markdown]
# # Sequential removals
#
# Feed each approximate update into the next and watch the error against
# exact recomputation, plus the communicability bound at every step.

# %%
import numpy as np

from walkloss import (
    RemovalSet,
    choose_alpha,
    intersection_similarity,
    katz,
    ranking,
    relative_error,
    sequential_removal_driver,
    tc_bound_node,
    total_communicability,
)
from walkloss.graph import gen_connected_erdos_renyi

rng = np.random.default_rng(7)
g = gen_connected_erdos_renyi(3200, 16000, rng)
alpha = choose_alpha(g)
state = katz(g, alpha)
targets = rng.choice(g.n, 32, replace=False)
trace = sequential_removal_driver(g, state, [RemovalSet.nodes([int(w)]) for w in targets])

# %%
exact = state
p = int(np.ceil(g.n / 100))
for k, step in enumerate(trace):
    w = step.removal.members[0]
    prev_graph = g if k == 0 else trace[k - 1].graph
    bound = tc_bound_node(exact, w, int(prev_graph.degree()[w])).bound
    new_exact = katz(step.graph, alpha, x0=exact.x)
    drop = total_communicability(exact) - total_communicability(new_exact)
    if k % 8 == 7:
        err = relative_error(new_exact.x, step.state.x)
        isim = intersection_similarity(ranking(new_exact.x), ranking(step.state.x), p)
        print(f"step {k + 1:2d}  L={step.result.L_used:2d}  err={err:.2e}  isim={isim:.3f}  "
              f"drop={drop:.4f}  bound={bound:.4f}")
    exact = new_exact

# %% [markdown]
# The provenance of the last state records how many approximate steps it
# has accumulated.

# %%
print(trace[-1].state.provenance)

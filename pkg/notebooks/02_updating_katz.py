# %% [markdown]
# # Updating Katz scores after a removal
#
# Start from exact scores on a random graph, remove a node and an edge, and
# compare the truncated updates with a fresh solve.

# %%
import numpy as np

from walkloss import (
    RemovalSet,
    choose_alpha,
    exact_update_edges,
    gen_erdos_renyi,
    katz,
    relative_error,
    remove_elements,
    update_edge_removal,
    update_node_removal,
    update_set_removal,
)

g = gen_erdos_renyi(2000, 10000, seed=1)
alpha = choose_alpha(g)
state = katz(g, alpha)
print(g, "alpha =", round(alpha, 5), "CG steps:", state.iterations)

# %% [markdown]
# Node removal.  ``L_used`` is the number of series terms; each costs one
# sparse product.

# %%
w = int(np.argmax(state.x))
res = update_node_removal(g, state, w)
truth = katz(remove_elements(g, RemovalSet.nodes([w])), alpha).x
print(res.L_used, res.converged_by, relative_error(truth, res.x_new))

# %%
for tol in (1e-2, 1e-4, 1e-6, 1e-8):
    r = update_node_removal(g, state, w, L_max=200, tol=tol)
    print(f"tol={tol:.0e}  L={r.L_used:3d}  err={relative_error(truth, r.x_new):.2e}")

# %% [markdown]
# Edge removal, truncated and exact.

# %%
e = tuple(g.edges()[123])
es = RemovalSet.edges([e])
truth = katz(remove_elements(g, es), alpha).x
approx = update_edge_removal(g, state, e)
exact = exact_update_edges(g, state, es)
print(approx.L_used, relative_error(truth, approx.x_new), relative_error(truth, exact.x))

# %% [markdown]
# Removing several adjacent nodes at once.

# %%
nb = g.neighbors(w)[:2]
s = RemovalSet.nodes([w, *nb])
res = update_set_removal(g, state, s, L_max=100, tol=1e-8)
truth = katz(remove_elements(g, s), alpha).x
print(res.L_used, res.work_spmv, relative_error(truth, res.x_new))

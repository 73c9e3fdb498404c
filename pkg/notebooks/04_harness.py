# %% [markdown]
# # The experiment harness from Python
#
# The same drivers the ``walkloss`` command uses, called directly.

# %%
from walkloss.harness.config import ExperimentConfig, GraphSource
from walkloss.harness.experiments import run_compare, run_tc_bounds

cfg = ExperimentConfig(GraphSource("erdrey", (3200, 16000)), trials=5, seed=1)
for r in run_compare(cfg):
    if r.trial == "mean":
        print(f"{r.target_kind:5s} {r.method:9s} L={r.L:6.2f} err={r.rel_err:.2e}")

# %% [markdown]
# Communicability bounds under 1% random edge removals, with the stale
# variant that keeps using the initial scores.

# %%
cfg = ExperimentConfig(GraphSource("pref", (3200, 5)), trials=1, kind="edges", stale_bounds=True)
records, violations = run_tc_bounds(cfg)
last = {r.method: r for r in records}
print("violations:", violations)
for name, r in last.items():
    print(f"{name}: lost {r.tc_drop:.4f} of TC, bound {r.tc_bound:.4f}")

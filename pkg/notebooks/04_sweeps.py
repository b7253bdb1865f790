# %% [markdown]
# # Randomised sweeps
#
# The harness runs a scenario over a grid of dimensions, norms and noise
# levels. The same config always yields the same report.

# %%
import json

from almostrep import ExperimentConfig, emit, run

config = ExperimentConfig("verify-lemmas", seed=3, dims=[2, 6], eps_grid=[0.0, 0.01], trials=25)
report = run(config)
print(len(report.records), "trials,", len(report.failures), "failures")
for key, val in sorted(report.aggregate.items())[:6]:
    print(f"{key:<32} max ratio {val['max_ratio']:.3f}")

# %%
cfg = ExperimentConfig("deligne", seed=1, norms=["schatten-1", "op"], eps_grid=[1e-3, 1e-2], trials=10)
rep = run(cfg, workers=4)
by_eps = {}
for rec in rep.records:
    by_eps.setdefault(rec.eps, []).append(rec.measured["final_J_distance"])
for eps, vals in by_eps.items():
    print(f"eps={eps}: max ||psi(J)+1|| = {max(vals):.2e}")

# %% [markdown]
# Reports are emitted as JSON or as CSV with one row per certificate.

# %%
text = emit(rep, "csv").decode()
print("\n".join(text.splitlines()[:4]))
assert emit(run(cfg), "json") == emit(rep, "json")
print(json.dumps(cfg.to_dict(), sort_keys=True))

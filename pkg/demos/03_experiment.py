"""
A small multi-seed experiment with a grid search
================================================

Tune gamma0 for the adaptive method over a short grid, aggregate five
stochastic seeds and render the curves to SVG.
"""

# %%
import json
import tempfile
from pathlib import Path

from vi_solve.bench import AlgorithmTemplate, ExperimentConfig, run_experiment
from vi_solve.cli import main

config = ExperimentConfig(
    experiment_id="demo",
    d=10, n=20, setting="stochastic", minibatch=4,
    domain="unconstrained", T=3000, num_seeds=5,
    algorithms=(
        AlgorithmTemplate("adapeg-unbounded", search="gamma0", grid=(0.1, 1.0, 10.0)),
        AlgorithmTemplate("eg", step_mode="decaying", decay_c=0.05),
    ),
)

# %%
result = run_experiment(config, workers=1)
for name, sel in result.selections.items():
    print(f"{name:18s} {sel.status:9s} value={sel.value} final err_D={sel.score:.3e}")

# %%
# The same experiment through the command line, including the SVG plot.
out = Path(tempfile.mkdtemp())
(out / "cfg.json").write_text(json.dumps(config.to_dict()))
main(["run", str(out / "cfg.json"), "--out", str(out / "run"), "--workers", "1"])
main(["plot", str(out / "run" / "aggregate.csv"), "--metric", "err_restricted", "--out", str(out / "plot.svg")])
print("wrote", out / "plot.svg")

"""
Checking step-size invariants on a recorded run
===============================================

Every run records iterates, oracle values and step sizes, which the
``metrics`` module turns into worst-case slacks.
"""

# %%
import numpy as np

from vi_solve import SolverConfig, default_domains, gen_bilinear, run
from vi_solve.metrics import (
    check_duality_bound,
    check_metric_recurrence,
    check_regret_bound,
    regret_samples,
)

inst = gen_bilinear(d=5, n=1, seed=3)
ball = default_domains(inst)["constrained"]
R = ball.radius

# %%
traj = run(SolverConfig("adapeg", eta=R), inst, ball, T=1000)
print("duality bound, worst lhs - rhs:", check_duality_bound(traj))

ys = regret_samples(ball, traj, k=100, mean_matrix=inst.mean_matrix)
print("regret bound, worst lhs - rhs:", check_regret_bound(traj, ball, ys, eta=R, gamma0=1.0, R=2 * R))

# %%
# The movement-based variant keeps a per-coordinate metric.
mv = run(SolverConfig("movement", gamma0=1.0), inst, ball, T=1000)
print("metric recurrence slacks:", check_metric_recurrence(mv, mv.R_inf))
print("final metric range:", np.round([mv.gammas[-1].min(), mv.gammas[-1].max()], 3))

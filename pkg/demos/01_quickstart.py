"""
Solving a random bilinear saddle-point problem
==============================================

Generate an instance, run the adaptive single-call method next to
extragradient, and compare the merit of the averaged iterate.
"""

# %%
import numpy as np

from vi_solve import SolverConfig, default_domains, gen_bilinear, run

inst = gen_bilinear(d=10, n=1, seed=0)
ball = default_domains(inst)["constrained"]
print(f"dimension {inst.dim}, beta = {inst.beta:.3f}, ball radius = {ball.radius:.3f}")

# %%
# The adaptive method needs no smoothness constant: eta is set to the radius.
ada = run(SolverConfig("adapeg", eta=ball.radius, gamma0=1.0), inst, ball, T=2000)

# Extragradient needs a step size tied to beta.
eg = run(SolverConfig("eg", step=1.0 / inst.beta), inst, ball, T=2000)

# %%
for name, traj in (("adapeg", ada), ("eg", eg)):
    print(f"{name:8s} err(x_bar) = {traj.err_bar:.3e}   oracle queries = {traj.queries}")

# %%
# The step size grows monotonically and settles once the oracle differences shrink.
print("gamma at t = 1, 10, 100, 1000, 2000:", np.round(ada.gammas[[1, 10, 100, 1000, 2000]], 3))

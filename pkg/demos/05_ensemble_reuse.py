"""
One preconditioner, many assimilations
======================================

An ensemble of data assimilations solves the same quadratic problem
many times with perturbed observations and backgrounds.  The member
Hessians differ only through their linearization trajectories, so one
preconditioner — built once from the control member's free ensemble
sketch — can be reused across every member.  This demo measures the
per-member payoff as the ratio J(no LMP) / J(LMP) at equal iteration
counts: above 1 means the shared preconditioner helps that member.
"""

import numpy as np

from edasketch.eda import TwinConfig, build_setup
from edasketch.krylov import SolverConfig, pcg
from edasketch.lmp import make_lmp
from edasketch.nystrom import NystromConfig, nystrom_evd
from edasketch.sketch import make_sketch
from edasketch.streams import substream

twin = TwinConfig(n=120, obs_grid_count=10, members=20)
setup = build_setup(twin, trial_seed=11)
iters = 8


def solve(member, precond):
    member.reset_matvecs()
    return pcg(member.hessian_apply, member.rhs(),
               SolverConfig(max_iters=iters), precond=precond,
               cost_fn=member.quadratic_cost)


# --- build the shared preconditioner from the control member ---------------
sk = make_sketch("rhsdiff", setup, twin.members,
                 substream(11, "demo", "sketch"))
approx = nystrom_evd(setup.control.a_apply, sk,
                     NystromConfig(ell=twin.members, k=15,
                                   shift_mode="trace"))
lmp = make_lmp(approx, "halfsum")
print(f"shared preconditioner: rank 15 of a width-{twin.members} "
      f"ensemble sketch, cluster theta = {lmp.theta:.1f}")

# --- apply it to every member ---------------------------------------------
ratios = np.empty((twin.members, iters))
for j, member in enumerate(setup.members):
    _, plain = solve(member, None)
    _, faster = solve(member, lmp)
    ratios[j] = [plain.cost[it] / faster.cost[it]
                 for it in range(1, iters + 1)]

print(f"\ncost ratio J(no LMP) / J(LMP) across {twin.members} members:")
print("  iter   median      min      max")
for it in range(iters):
    col = ratios[:, it]
    print(f"  {it + 1:4d} {np.median(col):8.2f} {col.min():8.2f} "
          f"{col.max():8.2f}")

helped = int(np.sum(ratios[:, -1] > 1.0))
print(f"\nafter {iters} iterations the shared preconditioner helps "
      f"{helped} of {twin.members} members")
print("(the control member paid for the decomposition; every other")
print("member gets the acceleration for free)")

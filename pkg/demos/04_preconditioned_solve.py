"""
Solving the assimilation with a spectral limited-memory preconditioner
======================================================================

Runs conjugate gradients on the control assimilation problem three
ways: unpreconditioned, with a preconditioner built from the free
ensemble sketch at full retained rank, and with the safer oversampled
rank.  The preconditioner moves the retained eigenvalues to a cluster
at theta, which shrinks the effective condition number; the quadratic
cost J tracks the payoff per iteration, and the ledger counts every
application of the system operator, including the ones spent building
the preconditioner.
"""

from edasketch.eda import TwinConfig, build_setup
from edasketch.krylov import SolverConfig, pcg
from edasketch.lmp import make_lmp
from edasketch.nystrom import NystromConfig, nystrom_evd
from edasketch.sketch import make_sketch
from edasketch.streams import substream

twin = TwinConfig(n=120, obs_grid_count=10, members=20)
setup = build_setup(twin, trial_seed=3)
control = setup.control
ell = twin.members
iters = 10


def solve(precond):
    control.reset_matvecs()
    return pcg(control.hessian_apply, control.rhs(),
               SolverConfig(max_iters=iters), precond=precond,
               cost_fn=control.quadratic_cost)


# --- baseline --------------------------------------------------------------
_, plain = solve(None)

# --- ensemble-sketch preconditioners --------------------------------------
sk = make_sketch("rhsdiff", setup, ell, substream(3, "demo", "sketch"))
runs = {"no LMP": (plain, 0)}
for k in (ell, 15):
    approx = nystrom_evd(control.a_apply, sk,
                         NystromConfig(ell=ell, k=k, shift_mode="trace"))
    lmp = make_lmp(approx, "halfsum")
    _, trace = solve(lmp)
    build = sk.n_build_matvecs + approx.n_build_matvecs
    runs[f"LMP k={k}"] = (trace, build)
    print(f"LMP k={k}: retained eigenvalue estimate "
          f"{approx.values[-1] + 1.0:8.1f}, cluster theta = {lmp.theta:.1f}")

# --- cost traces -----------------------------------------------------------
print(f"\nquadratic cost J per iteration (n={twin.n}, "
      f"{setup.net.p} observations):")
names = list(runs)
print("  iter " + "".join(f"{name:>14s}" for name in names))
for it in range(iters + 1):
    cells = "".join(f"{runs[name][0].cost[it]:14.1f}" for name in names)
    print(f"  {it:4d} {cells}")

print("\ntotal operator applications (sketch + decomposition + solve):")
for name in names:
    trace, build = runs[name]
    print(f"  {name:9s}: {build + trace.matvecs[-1]:3d}")
print("\n(the ensemble sketch is free, so both preconditioned runs pay")
print("only one extra application — the decomposition pass — and repay")
print("it within the first few iterations)")

"""
Five sketches, one randomized eigensolver
=========================================

The randomized decomposition sees the system operator A only through
products with a thin sketch matrix.  This demo builds the five sketch
choices on the same assimilation problem — a plain Gaussian draw, an
extra-pass sketch, two background-covariance-shaped draws, and the
free-of-charge ensemble sketch made of right-hand-side differences —
and compares the eigenvalue accuracy each one buys, against a Lanczos
oracle.  The punchline: the ensemble sketch, which costs zero extra
operator applications, rivals the extra-pass sketch, which costs one.
"""

import numpy as np

from edasketch.eda import TwinConfig, build_setup
from edasketch.krylov import lanczos_eigs
from edasketch.nystrom import NystromConfig, nystrom_evd
from edasketch.sketch import KINDS, make_sketch
from edasketch.streams import substream

twin = TwinConfig(n=120, obs_grid_count=10, members=20)
setup = build_setup(twin, trial_seed=7)
n, k, ell = twin.n, 10, twin.members

# --- oracle ---------------------------------------------------------------
oracle, _ = lanczos_eigs(setup.control.hessian_apply, n, 110, k,
                         seed=twin.seed)
print("oracle eigenvalues of I + A (Lanczos, full reorthogonalization):")
print("  " + "  ".join(f"{v:8.1f}" for v in oracle))

# --- sketches --------------------------------------------------------------
print(f"\nrelative eigenvalue errors after one decomposition pass "
      f"(sketch width {ell}, keep {k}):")
print(f"  {'sketch':9s} {'extra cost':>10s}   "
      + " ".join(f"{'eig ' + str(j + 1):>7s}" for j in range(0, k, 3)))
cfg = NystromConfig(ell=ell, k=k, shift_mode="trace")
for kind in KINDS:
    rng = substream(7, "demo", "sketch", kind)
    sk = make_sketch(kind, setup, ell, rng)
    approx = nystrom_evd(setup.control.a_apply, sk, cfg)
    errs = np.abs((approx.values + 1.0) - oracle) / oracle
    cells = " ".join(f"{errs[j]:7.1e}" for j in range(0, k, 3))
    print(f"  {kind:9s} {sk.n_build_matvecs:10d}   {cells}")

print("\nnotes:")
print("- 'extra cost' counts operator applications spent building the")
print("  sketch; the decomposition pass itself always costs one more")
print("- the ensemble sketch (rhsdiff) reuses the perturbed right-hand")
print("  sides of the assimilation ensemble, so its sketch is free")
print("- eigenvalues are recovered from below: the randomized values")
print("  never overestimate the true ones")

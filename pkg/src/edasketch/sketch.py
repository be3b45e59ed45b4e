"""Sketching matrices for randomized eigenvalue approximation.

Five ways to draw the test matrix Omega used by the randomized Nystrom
eigendecomposition of the Hessian term A:

- ``gaussian``:  standard normal columns (the classical choice);
- ``power``:     A times a Gaussian matrix (one extra pass over A);
- ``bcov``:      the background covariance B times a Gaussian matrix;
- ``bfactor``:   the covariance factor U_b^T times a Gaussian matrix;
- ``rhsdiff``:   differences of ensemble right-hand sides,
                 gamma_j = b_j - b_control.

The last one is the interesting case: the columns fall out of an ensemble
of assimilations that is being run anyway, so the sketch costs no extra
Hessian applications at all, yet (for members sharing the control
linearization) the columns have covariance A + A^2 and therefore
concentrate exactly along the dominant eigendirections of A.

Each constructor records how many batched applications of A it consumed so
solver traces can account for the true preconditioner setup cost.
"""

from dataclasses import dataclass

import numpy as np

KINDS = ("gaussian", "power", "bcov", "bfactor", "rhsdiff")


@dataclass
class SketchMatrix:
    """Test-matrix columns plus their construction cost in A-applications."""

    columns: np.ndarray
    kind: str
    n_build_matvecs: int = 0

    @property
    def ell(self):
        return self.columns.shape[1]


def gaussian_sketch(n, ell, rng):
    """Standard Gaussian test matrix."""
    return SketchMatrix(rng.standard_normal((n, ell)), "gaussian", 0)


def power_sketch(prob, ell, rng):
    """One power-iteration pass: A times a Gaussian test matrix."""
    cols = prob.a_apply(rng.standard_normal((prob.n, ell)))
    return SketchMatrix(cols, "power", 1)


def bcov_sketch(ub, ell, rng):
    """Background covariance B = U_b U_b^T times a Gaussian test matrix."""
    cols = ub.apply(ub.apply_t(rng.standard_normal((ub.n, ell))))
    return SketchMatrix(cols, "bcov", 0)


def bfactor_sketch(ub, ell, rng):
    """Covariance factor U_b^T times a Gaussian test matrix."""
    cols = ub.apply_t(rng.standard_normal((ub.n, ell)))
    return SketchMatrix(cols, "bfactor", 0)


def rhs_diff_sketch(control, members):
    """Ensemble right-hand-side differences, one column per member.

    The right-hand sides are by-products of the ensemble of assimilations,
    so this sketch is free in terms of Hessian applications.
    """
    b0 = control.rhs()
    cols = np.column_stack([m.rhs() - b0 for m in members])
    return SketchMatrix(cols, "rhsdiff", 0)


def make_sketch(kind, setup, ell, rng):
    """Build a sketch of the requested kind for a twin-experiment setup.

    For ``rhsdiff`` the width is the ensemble size; asking for a different
    ``ell`` is an error rather than a silent resize.
    """
    if kind == "gaussian":
        return gaussian_sketch(setup.cfg.n, ell, rng)
    if kind == "power":
        return power_sketch(setup.control, ell, rng)
    if kind == "bcov":
        return bcov_sketch(setup.ub, ell, rng)
    if kind == "bfactor":
        return bfactor_sketch(setup.ub, ell, rng)
    if kind == "rhsdiff":
        if ell != len(setup.members):
            raise ValueError(
                f"rhsdiff sketch width is the ensemble size "
                f"({len(setup.members)}), got ell={ell}")
        return rhs_diff_sketch(setup.control, setup.members)
    raise ValueError(f"unknown sketch kind {kind!r}; expected one of {KINDS}")

"""Randomized q-pass Nystrom eigendecomposition of an SPD operator.

Given a matrix-free SPD operator and a sketch matrix Omega, one pass
computes Y = A Omega and compresses A onto range(Y):

    A_N = Y (Omega^T Y)^-1 Y^T,

evaluated stably through an economic QR of Y, a Cholesky factor of the
small Gram matrix W = Omega^T Y, and an SVD of the small triangular
product.  Further passes re-sketch with the orthonormalized basis, which
is one step of subspace iteration per extra pass.  The output is the
leading eigenpair approximation (orthonormal vectors, nonnegative values)
truncated to the target rank.

The Gram matrix of an exactly rank-deficient operator is singular to
rounding, and its Cholesky factorization can break down.  Following
standard practice the factorization may retry with a small diagonal shift
grown geometrically from machine epsilon times an operator scale; the
plain unshifted path is always attempted first and the shift actually
used is reported, so callers can assert it stayed unused.
"""

from dataclasses import dataclass

import numpy as np
import scipy.linalg

SHIFT_MODES = (None, "trace", "ynorm")


class NystromBreakdownError(RuntimeError):
    """Sketch does not support a usable factorization of the operator."""


@dataclass
class NystromConfig:
    """Sketch width, target rank, number of passes, and shift policy."""

    ell: int
    k: int
    q: int = 1
    shift_mode: str | None = None

    def __post_init__(self):
        if not 1 <= self.k <= self.ell:
            raise ValueError(f"need 1 <= k <= ell, got k={self.k} ell={self.ell}")
        if self.q < 1:
            raise ValueError(f"need q >= 1, got {self.q}")
        if self.shift_mode not in SHIFT_MODES:
            raise ValueError(f"shift_mode must be one of {SHIFT_MODES}")


@dataclass
class EigenApproximation:
    """Approximate leading eigenpairs: orthonormal vectors, values >= 0."""

    vectors: np.ndarray
    values: np.ndarray
    shift: float = 0.0
    n_build_matvecs: int = 0

    @property
    def k(self):
        return self.values.size


def shifted_cholesky(w, mode, scale):
    """Upper Cholesky factor of ``w``, shifted on breakdown if allowed.

    The plain factorization of ``w`` is tried first.  If it breaks down
    and ``mode`` is not None, retries factor ``w + nu I`` with
    ``nu = eps * scale`` grown by factors of 10 (a single epsilon-sized
    shift often still lands inside the rounding noise of a singular Gram
    matrix).  Returns ``(c, nu_used)`` with ``nu_used = 0.0`` for the
    plain path; raises :class:`NystromBreakdownError` otherwise.
    """
    try:
        return scipy.linalg.cholesky(w, lower=False), 0.0
    except scipy.linalg.LinAlgError:
        pass
    nu = np.finfo(float).eps * scale
    if mode is None or nu <= 0.0:
        raise NystromBreakdownError(
            "Cholesky of the sketched Gram matrix broke down and no "
            "usable shift is available")
    eye = np.eye(w.shape[0])
    for _ in range(5):
        try:
            return scipy.linalg.cholesky(w + nu * eye, lower=False), nu
        except scipy.linalg.LinAlgError:
            nu *= 10.0
    raise NystromBreakdownError(
        "sketched Gram matrix stayed indefinite after shifting")


def nystrom_evd(a_apply, sketch, cfg):
    """Approximate the leading eigenpairs of an SPD operator.

    Parameters
    ----------
    a_apply : callable
        Applies the operator to a block of columns.
    sketch : SketchMatrix or ndarray
        Test matrix with ``cfg.ell`` columns.
    cfg : NystromConfig

    Returns
    -------
    EigenApproximation
        Top ``cfg.k`` pairs; ``n_build_matvecs`` counts the ``q`` batched
        operator applications consumed here (sketch construction cost is
        carried by the sketch itself).
    """
    phi = np.asarray(getattr(sketch, "columns", sketch), dtype=float)
    if phi.shape[1] != cfg.ell:
        raise ValueError(f"sketch has {phi.shape[1]} columns, cfg.ell={cfg.ell}")
    y = a_apply(phi)
    q_y, r_y = np.linalg.qr(y)
    _check_rank(r_y)
    for _ in range(cfg.q - 1):
        phi = q_y
        y = a_apply(phi)
        q_y, r_y = np.linalg.qr(y)
        _check_rank(r_y)
    w = phi.T @ y
    scale = np.trace(w) if cfg.shift_mode == "trace" else np.linalg.norm(y)
    c, nu = shifted_cholesky(w, cfg.shift_mode, scale)
    # T = R_Y C^-1 via a triangular solve on the transposed system.
    t = scipy.linalg.solve_triangular(c, r_y.T, trans="T", lower=False).T
    u_t, sig, _ = np.linalg.svd(t, full_matrices=False)
    return EigenApproximation(vectors=q_y @ u_t[:, :cfg.k],
                              values=sig[:cfg.k] ** 2,
                              shift=nu, n_build_matvecs=cfg.q)


def _check_rank(r):
    dead = np.flatnonzero(np.diag(r) == 0.0)
    if dead.size:
        raise NystromBreakdownError(
            f"sketch column {dead[0]} was annihilated by the operator")


def reconstruct(approx):
    """Dense rank-k reconstruction S diag(D) S^T (small-problem oracle)."""
    return (approx.vectors * approx.values) @ approx.vectors.T

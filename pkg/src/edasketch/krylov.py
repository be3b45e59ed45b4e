"""Krylov solvers: preconditioned conjugate gradients with cost tracing,
and a Lanczos eigensolver with full reorthogonalization.

The PCG variant tracks the quadratic cost J along the iterates (the
quantity the experiments plot) and the cumulative count of operator
applications; stopping is a fixed iteration budget with an optional
residual tolerance, because the experiments compare solvers at equal
iteration counts rather than solving to convergence.

The Lanczos routine is the reference eigensolver at sizes where dense
assembly is wasteful.  The operators here have at most p + 1 distinct
eigenvalues, so the Krylov space becomes invariant early; on (lucky)
breakdown the recurrence restarts with a fresh random vector orthogonal
to the basis so far, which simply opens a new diagonal block of the
tridiagonal matrix.
"""

from dataclasses import dataclass, field

import numpy as np

from .streams import substream


@dataclass
class SolverConfig:
    """Iteration budget, optional relative residual tolerance, tracing."""

    max_iters: int = 40
    residual_rtol: float | None = None
    trace_cost: bool = True

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass
class SolveTrace:
    """Per-iteration history of one solve (index 0 is the initial state)."""

    iterations: list = field(default_factory=list)
    cost: list = field(default_factory=list)
    resnorm: list = field(default_factory=list)
    matvecs: list = field(default_factory=list)
    status: str = "max_iters"


def pcg(apply_h, b, cfg, precond=None, cost_fn=None):
    """Preconditioned conjugate gradients on the SPD system H x = b.

    Parameters
    ----------
    apply_h : callable
        Applies the system matrix (here I + A) to a vector.
    b : ndarray
        Right-hand side; the initial iterate is zero.
    cfg : SolverConfig
    precond : object with ``apply``, or callable, or None
        SPD preconditioner; None means identity.
    cost_fn : callable, optional
        Quadratic cost evaluated at each iterate when ``cfg.trace_cost``.

    Returns
    -------
    (x, SolveTrace)
    """
    apply_p = _as_apply(precond)
    x = np.zeros_like(b)
    r = b.astype(float).copy()
    z = apply_p(r)
    rz = r @ z
    if rz < 0:
        raise RuntimeError("preconditioner is not positive definite")
    trace = SolveTrace()
    _record(trace, 0, x, rz, 0, cfg, cost_fn)
    rz0 = rz
    p = z
    for it in range(1, cfg.max_iters + 1):
        hp = apply_h(p)
        php = p @ hp
        if php <= 0:
            raise RuntimeError(
                f"system matrix is not positive definite (iteration {it})")
        alpha = rz / php
        x = x + alpha * p
        r = r - alpha * hp
        z = apply_p(r)
        rz_new = r @ z
        _record(trace, it, x, rz_new, it, cfg, cost_fn)
        if rz_new <= 0 or (cfg.residual_rtol is not None
                           and np.sqrt(rz_new) <= cfg.residual_rtol * np.sqrt(rz0)):
            trace.status = "converged"
            break
        p = z + (rz_new / rz) * p
        rz = rz_new
    return x, trace


def _as_apply(precond):
    if precond is None:
        return lambda v: v
    if callable(precond):
        return precond
    return precond.apply


def _record(trace, it, x, rz, matvecs, cfg, cost_fn):
    trace.iterations.append(it)
    trace.cost.append(float(cost_fn(x)) if (cfg.trace_cost and cost_fn)
                      else np.nan)
    trace.resnorm.append(float(np.sqrt(max(rz, 0.0))))
    trace.matvecs.append(matvecs)


def lanczos_eigs(apply_h, n, m, n_eigs, seed=0):
    """Leading Ritz values of a symmetric operator, with residual bounds.

    Runs ``m`` Lanczos steps with full reorthogonalization, restarting
    with a fresh random vector whenever the recurrence hits an invariant
    subspace.  Returns the ``n_eigs`` largest Ritz values (descending)
    and upper bounds on their eigenpair residual norms.
    """
    m = min(m, n)
    if not 1 <= n_eigs <= m:
        raise ValueError("need 1 <= n_eigs <= m")
    rng = substream(seed, "lanczos")
    basis = np.empty((m, n))
    alphas = np.zeros(m)
    betas = np.zeros(m)  # betas[j] couples steps j and j+1; 0 at block ends
    block_end_residuals = {}
    v = _fresh_vector(rng, basis, 0, n)
    basis[0] = v
    scale = 0.0
    j = 0
    while j < m:
        w = apply_h(basis[j])
        alphas[j] = basis[j] @ w
        w -= alphas[j] * basis[j]
        # full reorthogonalization (twice) against everything so far
        for _ in range(2):
            w -= basis[: j + 1].T @ (basis[: j + 1] @ w)
        beta = np.linalg.norm(w)
        scale = max(scale, abs(alphas[j]), beta)
        if j + 1 == m:
            block_end_residuals[j] = beta
            break
        if beta <= 1e-12 * max(scale, 1.0):
            # invariant subspace: close this block, restart with a new vector
            block_end_residuals[j] = beta
            nxt = _fresh_vector(rng, basis, j + 1, n)
            if nxt is None:
                m = j + 1
                break
            basis[j + 1] = nxt
        else:
            betas[j] = beta
            basis[j + 1] = w / beta
        j += 1
    tri = (np.diag(alphas[:m]) + np.diag(betas[: m - 1], 1)
           + np.diag(betas[: m - 1], -1))
    theta, s = np.linalg.eigh(tri)
    order = np.argsort(theta)[::-1][:n_eigs]
    values = theta[order]
    bounds = np.array([
        sum(abs(beta_e * s[pos, i]) for pos, beta_e in block_end_residuals.items())
        for i in order])
    return values, bounds


def _fresh_vector(rng, basis, j, n):
    """Random unit vector orthogonal to the first ``j`` basis vectors."""
    for _ in range(5):
        v = rng.standard_normal(n)
        for _ in range(2):
            v -= basis[:j].T @ (basis[:j] @ v)
        norm = np.linalg.norm(v)
        if norm > 1e-8 * np.sqrt(n):
            return v / norm
    return None

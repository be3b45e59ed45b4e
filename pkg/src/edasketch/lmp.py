"""Scaled spectral limited-memory preconditioner.

From k (approximate) eigenpairs (S, Lambda) of the Hessian term A, the
preconditioner for the system matrix I + A is

    P = I + S ( theta (Lambda + I)^-1 - I ) S^T,

with symmetric factor P = U U^T,

    U = I + S ( sqrt(theta) (Lambda + I)^-1/2 - I ) S^T.

With exact pairs this moves the k targeted eigenvalues of I + A to a
cluster at the scaling factor theta and leaves every other eigenvalue
unchanged.  The stored values are eigenvalues of A; the +1 offset to
I + A happens internally, exactly once.
"""

from dataclasses import dataclass

import numpy as np

THETA_RULES = ("halfsum", "lambdak", "one")


def choose_theta(rule, lam_k_of_system):
    """Scaling factor from the smallest retained eigenvalue of I + A.

    ``halfsum`` takes (lam_k + 1)/2, an approximate average of the largest
    and smallest eigenvalues of the preconditioned matrix; ``lambdak``
    takes lam_k itself; ``one`` always returns 1 (no scaling).
    """
    if lam_k_of_system < 1.0 - 1e-8:
        raise ValueError(
            f"I + A has eigenvalues >= 1, got lam_k={lam_k_of_system}")
    if rule == "halfsum":
        return 0.5 * (lam_k_of_system + 1.0)
    if rule == "lambdak":
        return float(lam_k_of_system)
    if rule == "one":
        return 1.0
    raise ValueError(f"unknown theta rule {rule!r}; expected {THETA_RULES}")


@dataclass
class SpectralLmp:
    """Preconditioner data: eigenpairs of A and the scaling factor."""

    vectors: np.ndarray
    values: np.ndarray
    theta: float

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if np.any(self.values < -1e-12):
            raise ValueError("eigenvalue estimates of A must be >= 0")

    @property
    def k(self):
        return self.values.size

    def _project(self, coef, v):
        w = self.vectors.T @ v
        w = coef[:, None] * w if w.ndim == 2 else coef * w
        return v + self.vectors @ w

    def apply_sqrt(self, v):
        """Apply the symmetric factor U."""
        coef = np.sqrt(self.theta / (self.values + 1.0)) - 1.0
        return self._project(coef, v)

    def apply(self, v):
        """Apply P = U U^T, i.e. the factor twice."""
        return self.apply_sqrt(self.apply_sqrt(v))


def make_lmp(approx, rule):
    """Preconditioner from an eigenpair approximation and a theta rule."""
    lam_k_system = float(approx.values[-1]) + 1.0
    theta = choose_theta(rule, lam_k_system)
    return SpectralLmp(approx.vectors, approx.values, theta)

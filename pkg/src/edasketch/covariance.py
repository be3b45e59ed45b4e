"""Background and observation error covariances.

The background covariance is a homogeneous correlation on the cyclic grid,
built as the M-fold application of an implicit diffusion smoother.  Its
symmetric square-root factor is circulant, so it is applied in O(n log n)
through real FFTs.  The spectral symbol is

    u(m) = sigma_b * gamma * (1 + 4 kappa sin^2(pi m / n))^(-M),

with kappa = D^2 / (4 M) calibrated so the correlation has Daley length
scale ~ D grid points, and gamma chosen so the implied covariance has
exactly unit correlation diagonal (marginal variance sigma_b^2).

Observation errors are uncorrelated with a single standard deviation, so
their covariance is a scaled identity.
"""

import numpy as np
import scipy.linalg


class GridCovFactor:
    """Symmetric square-root factor of the background covariance.

    ``apply`` computes ``U_b v`` where ``B = U_b U_b^T`` and ``U_b`` is
    symmetric, so the same method serves for the transpose.
    """

    def __init__(self, n, sigma_b, length_scale, n_passes):
        self.n = n
        self.sigma_b = sigma_b
        self.length_scale = length_scale
        self.n_passes = n_passes
        kappa = length_scale ** 2 / (4.0 * n_passes)
        m = np.arange(n)
        shape = (1.0 + 4.0 * kappa * np.sin(np.pi * m / n) ** 2) ** (-n_passes)
        gamma = np.sqrt(n / np.sum(shape ** 2))
        # Real-FFT half of the (real, even) symbol.
        self.symbol = (sigma_b * gamma * shape)[: n // 2 + 1]

    def apply(self, v):
        """Apply the factor to a vector, or column-wise to a matrix."""
        vhat = np.fft.rfft(v, axis=0)
        vhat *= self.symbol[:, None] if vhat.ndim == 2 else self.symbol
        return np.fft.irfft(vhat, n=self.n, axis=0)

    apply_t = apply  # the factor is symmetric

    def correlation(self):
        """First row of the correlation matrix B / sigma_b^2."""
        return np.fft.irfft(self.symbol ** 2, n=self.n) / self.sigma_b ** 2

    def dense(self):
        """Materialize the factor as a dense matrix (small n only)."""
        first_col = np.fft.irfft(self.symbol, n=self.n)
        return scipy.linalg.circulant(first_col)


class DiagonalNoise:
    """Scaled-identity covariance ``sigma^2 I`` with its trivial factor."""

    def __init__(self, sigma):
        self.sigma = sigma

    def apply(self, w):
        """Apply the square-root factor ``sigma I``."""
        return self.sigma * w

    def solve(self, w):
        """Apply the inverse covariance ``w / sigma^2``."""
        return w / self.sigma ** 2

"""Observation network and the window observation operator.

A network observes a fixed subset of grid points at a fixed subset of time
levels inside the assimilation window.  The nonlinear operator maps an
initial condition's trajectory to the stacked vector of observed values
(time-major ordering); its tangent-linear and adjoint reuse the stored
RK4 stages of the linearization trajectory.
"""

from dataclasses import dataclass

import numpy as np

from . import model


def strided_grid(n, n_observed):
    """Indices of ``n_observed`` evenly strided points on a cyclic grid."""
    stride = n // n_observed
    return np.arange(n_observed) * stride


@dataclass
class ObsNetwork:
    """Observed grid indices and observed time levels (within the window)."""

    grid: np.ndarray
    times: np.ndarray

    def __post_init__(self):
        self.grid = np.asarray(self.grid, dtype=int)
        self.times = np.asarray(self.times, dtype=int)
        if np.unique(self.grid).size != self.grid.size:
            raise ValueError("observed grid points must be distinct")
        if np.unique(self.times).size != self.times.size:
            raise ValueError("observed time levels must be distinct")

    @property
    def p(self):
        """Total number of scalar observations in the window."""
        return self.grid.size * self.times.size

    def observe(self, traj):
        """Nonlinear map: sample the trajectory at observed times/points."""
        return traj.states[np.ix_(self.times, self.grid)].ravel()

    def observe_tlm(self, traj, v):
        """Tangent-linear of :meth:`observe` around ``traj`` applied to ``v``."""
        perts = model.tlm(traj, v)
        return perts[np.ix_(self.times, self.grid)].ravel()

    def observe_adj(self, traj, w):
        """Adjoint of :meth:`observe_tlm`: observation space back to time zero."""
        w_all = np.zeros_like(traj.states)
        w_all[np.ix_(self.times, self.grid)] = np.reshape(
            w, (self.times.size, self.grid.size))
        return model.adjoint(traj, w_all)

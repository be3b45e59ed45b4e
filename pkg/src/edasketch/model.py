"""Lorenz-96 model: nonlinear propagation, tangent-linear and adjoint.

The model is the cyclic quadratic ODE

    dx[i]/dt = (x[i+1] - x[i-2]) * x[i-1] - x[i] + forcing,

integrated with the classical fourth-order Runge-Kutta scheme.  The
tangent-linear and adjoint models differentiate the *discrete* scheme
stage by stage, so the adjoint identity <M v, w> = <v, M^T w> holds to
machine precision for any window length.  ``integrate`` stores the four
stage states of every step so that linearizations can be replayed without
re-running the nonlinear model.
"""

from dataclasses import dataclass

import numpy as np


def tendency(x, forcing):
    """Time derivative of the cyclic Lorenz-96 state ``x``."""
    return (np.roll(x, -1) - np.roll(x, 2)) * np.roll(x, 1) - x + forcing


def tendency_tlm(x, v):
    """Jacobian of :func:`tendency` at ``x`` applied to a perturbation ``v``."""
    return ((np.roll(v, -1) - np.roll(v, 2)) * np.roll(x, 1)
            + (np.roll(x, -1) - np.roll(x, 2)) * np.roll(v, 1) - v)


def tendency_adj(x, w):
    """Transpose of the :func:`tendency` Jacobian at ``x`` applied to ``w``."""
    return (np.roll(x, 2) * np.roll(w, 1)
            + (np.roll(x, -2) - np.roll(x, 1)) * np.roll(w, -1)
            - np.roll(x, -1) * np.roll(w, -2) - w)


def _rk4_stages(x, dt, forcing):
    """One RK4 step; returns the new state and the four stage states."""
    k1 = tendency(x, forcing)
    x2 = x + 0.5 * dt * k1
    k2 = tendency(x2, forcing)
    x3 = x + 0.5 * dt * k2
    k3 = tendency(x3, forcing)
    x4 = x + dt * k3
    k4 = tendency(x4, forcing)
    x_next = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    return x_next, (x, x2, x3, x4)


def rk4_step(x, dt, forcing):
    """Advance ``x`` by one RK4 step of size ``dt``."""
    return _rk4_stages(x, dt, forcing)[0]


def step_tlm(stages, dt, v):
    """Tangent-linear of one RK4 step, linearized around stored ``stages``."""
    x1, x2, x3, x4 = stages
    a1 = tendency_tlm(x1, v)
    a2 = tendency_tlm(x2, v + 0.5 * dt * a1)
    a3 = tendency_tlm(x3, v + 0.5 * dt * a2)
    a4 = tendency_tlm(x4, v + dt * a3)
    return v + (dt / 6.0) * (a1 + 2.0 * a2 + 2.0 * a3 + a4)


def step_adj(stages, dt, w):
    """Adjoint of :func:`step_tlm` around the same ``stages``."""
    x1, x2, x3, x4 = stages
    vhat = w.copy()
    a4 = (dt / 6.0) * w
    a3 = (2.0 * dt / 6.0) * w
    a2 = (2.0 * dt / 6.0) * w
    a1 = (dt / 6.0) * w
    u4 = tendency_adj(x4, a4)
    vhat += u4
    a3 = a3 + dt * u4
    u3 = tendency_adj(x3, a3)
    vhat += u3
    a2 = a2 + 0.5 * dt * u3
    u2 = tendency_adj(x2, a2)
    vhat += u2
    a1 = a1 + 0.5 * dt * u2
    vhat += tendency_adj(x1, a1)
    return vhat


@dataclass
class Trajectory:
    """A nonlinear model run with everything needed to relinearize it.

    Attributes
    ----------
    states : ndarray, shape (n_steps + 1, n)
        Model states at every time level, ``states[0]`` being the initial
        condition.
    stages : ndarray, shape (n_steps, 4, n)
        The four RK4 stage states of each step.
    dt : float
        Step size.
    forcing : float
        Lorenz-96 forcing parameter.
    """

    states: np.ndarray
    stages: np.ndarray
    dt: float
    forcing: float

    @property
    def n_steps(self):
        return self.states.shape[0] - 1

    @property
    def n(self):
        return self.states.shape[1]


def integrate(x0, dt, n_steps, forcing):
    """Run the nonlinear model for ``n_steps`` steps from ``x0``.

    Returns a :class:`Trajectory` holding all time levels and RK4 stages.
    """
    x0 = np.asarray(x0, dtype=float)
    n = x0.shape[0]
    states = np.empty((n_steps + 1, n))
    stages = np.empty((n_steps, 4, n))
    states[0] = x0
    for s in range(n_steps):
        states[s + 1], stg = _rk4_stages(states[s], dt, forcing)
        stages[s] = stg
    return Trajectory(states, stages, dt, forcing)


def tlm(traj, v0):
    """Propagate a perturbation ``v0`` through the stored trajectory.

    Returns an array of shape ``(n_steps + 1, n)`` with the tangent-linear
    state at every time level.
    """
    perts = np.empty_like(traj.states)
    perts[0] = v0
    for s in range(traj.n_steps):
        perts[s + 1] = step_tlm(traj.stages[s], traj.dt, perts[s])
    return perts


def adjoint(traj, w_all):
    """Adjoint of :func:`tlm`: map per-time-level forcings to time zero.

    ``w_all`` has shape ``(n_steps + 1, n)``; the result ``g`` satisfies
    ``<tlm(traj, v), w_all> == <v, g>`` with the sum taken over all time
    levels.
    """
    g = np.asarray(w_all[traj.n_steps], dtype=float).copy()
    for s in range(traj.n_steps - 1, -1, -1):
        g = step_adj(traj.stages[s], traj.dt, g) + w_all[s]
    return g


def spinup(n, dt, forcing, n_steps, rng):
    """An on-attractor state: perturb the rest state and integrate freely."""
    x = np.full(n, forcing, dtype=float)
    x += 1e-3 * rng.standard_normal(n)
    for _ in range(n_steps):
        x = rk4_step(x, dt, forcing)
    return x

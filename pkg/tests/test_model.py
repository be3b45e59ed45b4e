"""Model tests: hand-checked tendency values, finite-difference Jacobian
oracle, Taylor ratio of the tangent-linear, and adjoint identities."""

import numpy as np
import numpy.testing as npt

from edasketch import model
from edasketch.streams import substream


def _attractor_state(n=40, seed=7):
    return model.spinup(n, 0.025, 8.0, 600, substream(seed, "spinup"))


def test_tendency_hand_values():
    # Worked by hand from the cyclic rule (x[i+1]-x[i-2])*x[i-1] - x[i] + F.
    x = np.array([1.0, 0.0, 0.0, 0.0])
    npt.assert_allclose(model.tendency(x, 0.0), [-1.0, 0.0, 0.0, 0.0], atol=0)
    x = np.array([1.0, 2.0, 3.0, 4.0, 5.0])
    npt.assert_allclose(model.tendency(x, 8.0), [-3.0, 4.0, 11.0, 13.0, -5.0],
                        atol=0)


def test_rest_state_is_fixed_point():
    x = np.full(12, 8.0)
    npt.assert_allclose(model.tendency(x, 8.0), 0.0, atol=1e-14)
    npt.assert_allclose(model.rk4_step(x, 0.025, 8.0), x, atol=1e-13)


def test_tendency_tlm_matches_finite_differences():
    # The tendency is quadratic, so central differences are exact up to
    # rounding; this is an independent oracle for the hand-coded Jacobian.
    rng = substream(0, "fd")
    x = _attractor_state()
    h = 1e-6
    n = x.size
    jac_fd = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = h
        jac_fd[:, j] = (model.tendency(x + e, 8.0)
                        - model.tendency(x - e, 8.0)) / (2 * h)
    for _ in range(20):
        v = rng.standard_normal(n)
        npt.assert_allclose(model.tendency_tlm(x, v), jac_fd @ v,
                            rtol=0, atol=1e-6)


def test_step_tlm_matches_finite_differences():
    x = _attractor_state()
    dt, forcing = 0.025, 8.0
    _, stages = model._rk4_stages(x, dt, forcing)
    rng = substream(1, "fd")
    h = 1e-6
    for _ in range(10):
        v = rng.standard_normal(x.size)
        fd = (model.rk4_step(x + h * v, dt, forcing)
              - model.rk4_step(x - h * v, dt, forcing)) / (2 * h)
        npt.assert_allclose(model.step_tlm(stages, dt, v), fd,
                            rtol=0, atol=1e-5)


def test_tlm_taylor_ratio():
    # || M(x + eps v) - M(x) - eps * TLM v || should shrink like eps^2:
    # halving eps divides the error by ~4.
    x = _attractor_state()
    dt, forcing, n_steps = 0.025, 8.0, 10
    traj = model.integrate(x, dt, n_steps, forcing)
    v = substream(2, "taylor").standard_normal(x.size)
    v /= np.linalg.norm(v)
    base = traj.states[-1]
    lin = model.tlm(traj, v)[-1]

    def err(eps):
        pert = model.integrate(x + eps * v, dt, n_steps, forcing).states[-1]
        return np.linalg.norm(pert - base - eps * lin)

    for eps in [1e-2, 1e-3, 1e-4]:
        ratio = err(eps) / err(eps / 2)
        assert 3.5 < ratio < 4.5, (eps, ratio)


def test_step_adjoint_is_transpose_of_step_tlm():
    x = _attractor_state(n=12)
    dt = 0.025
    _, stages = model._rk4_stages(x, dt, 8.0)
    n = x.size
    m_fwd = np.empty((n, n))
    m_adj = np.empty((n, n))
    for j in range(n):
        e = np.zeros(n)
        e[j] = 1.0
        m_fwd[:, j] = model.step_tlm(stages, dt, e)
        m_adj[:, j] = model.step_adj(stages, dt, e)
    npt.assert_allclose(m_adj, m_fwd.T, rtol=0, atol=1e-13)


def test_window_adjoint_identity_all_lengths():
    # <TLM v, w> == <v, ADJ w> to machine precision for windows of 1..10
    # steps, with forcings at every time level.
    x = _attractor_state()
    rng = substream(3, "adj")
    for n_steps in range(1, 11):
        traj = model.integrate(x, 0.025, n_steps, 8.0)
        for _ in range(10):
            v = rng.standard_normal(x.size)
            w_all = rng.standard_normal((n_steps + 1, x.size))
            lhs = np.sum(model.tlm(traj, v) * w_all)
            rhs = v @ model.adjoint(traj, w_all)
            assert abs(lhs - rhs) <= 1e-11 * (abs(lhs) + 1.0)


def test_trajectory_stage_storage():
    x = _attractor_state(n=20)
    traj = model.integrate(x, 0.025, 5, 8.0)
    assert traj.n_steps == 5 and traj.n == 20
    npt.assert_allclose(traj.stages[:, 0, :], traj.states[:-1], atol=0)


def test_chaotic_divergence():
    # F = 8 is chaotic: a tiny perturbation grows by orders of magnitude.
    x = _attractor_state()
    y = x.copy()
    y[0] += 1e-8
    for _ in range(500):
        x = model.rk4_step(x, 0.025, 8.0)
        y = model.rk4_step(y, 0.025, 8.0)
    assert np.linalg.norm(x - y) > 1e-4

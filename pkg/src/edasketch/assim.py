"""One member's incremental assimilation problem in preconditioned form.

After the change of variables increment = U_b z, the quadratic cost of an
incremental four-dimensional variational assimilation reads

    J(z) = 1/2 ||z||^2 + 1/2 || G U_b z - d ||^2_(R^-1),

whose gradient system is (I + A) z = b with the background-preconditioned
Hessian term A = U_b^T G^T R^-1 G U_b and right-hand side
b = U_b^T G^T R^-1 d.  A is symmetric positive semidefinite of rank at
most p (the number of observations), so I + A has smallest eigenvalue 1.

Everything is matrix-free: one application of A costs one tangent-linear
sweep and one adjoint sweep of the model plus two FFT covariance factors.
The class counts its A-applications, where one call on a block of columns
counts once (columns are independent and would run in parallel).
"""

import numpy as np


class MemberProblem:
    """Preconditioned Hessian, right-hand side and cost for one member.

    Parameters
    ----------
    traj : Trajectory
        Nonlinear trajectory around which the operator is linearized.
    net : ObsNetwork
        Observation network over the window.
    ub : GridCovFactor
        Background covariance square-root factor.
    rn : DiagonalNoise
        Observation error covariance.
    innovation : ndarray, shape (p,)
        Observation-space misfit d = y - G(background).
    """

    def __init__(self, traj, net, ub, rn, innovation):
        self.traj = traj
        self.net = net
        self.ub = ub
        self.rn = rn
        self.innovation = np.asarray(innovation, dtype=float)
        self.n_matvecs = 0

    @property
    def n(self):
        return self.traj.n

    @property
    def p(self):
        return self.net.p

    def a_apply(self, z):
        """Apply A = U_b^T G^T R^-1 G U_b to a vector or block of columns."""
        self.n_matvecs += 1
        z = np.asarray(z, dtype=float)
        if z.ndim == 1:
            return self._a_one(z)
        out = np.empty_like(z)
        for j in range(z.shape[1]):
            out[:, j] = self._a_one(z[:, j])
        return out

    def _a_one(self, z):
        gu = self.net.observe_tlm(self.traj, self.ub.apply(z))
        return self.ub.apply_t(self.net.observe_adj(self.traj, self.rn.solve(gu)))

    def hessian_apply(self, z):
        """Apply I + A."""
        return z + self.a_apply(z)

    def rhs(self):
        """Right-hand side b = U_b^T G^T R^-1 d of the gradient system."""
        return self.ub.apply_t(
            self.net.observe_adj(self.traj, self.rn.solve(self.innovation)))

    def quadratic_cost(self, z):
        """Cost J(z); one tangent-linear sweep, not counted as a matvec."""
        misfit = self.net.observe_tlm(self.traj, self.ub.apply(z)) - self.innovation
        return 0.5 * (z @ z) + 0.5 * (misfit @ self.rn.solve(misfit))

    def reset_matvecs(self):
        self.n_matvecs = 0


def dense_hessian_term(prob):
    """Materialize A column by column (small problems; test oracle)."""
    n = prob.n
    return prob.a_apply(np.eye(n))

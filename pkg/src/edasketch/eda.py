"""Identical-twin ensembles of assimilations.

A twin experiment draws a truth run from a spun-up model state, synthesizes
noisy observations of it over the window, and forms a control assimilation
problem plus an ensemble of member problems with perturbed observations and
perturbed backgrounds:

    y_j = y + U_r eta_j^o,      x_j^b = x^b + U_b eta_j^b.

Member innovations are always computed against the member's own nonlinear
run, d_j = y_j - G(x_j^b).  By default each member is linearized around its
own background; in shared-linearization mode all members reuse the control
trajectory, so every member has exactly the same Hessian term A and the
right-hand-side differences carry only perturbation information.

Randomness is split into named substreams: the base seed fixes the truth,
the observations and the control background, while a trial seed (defaulting
to the base seed) drives member perturbations, so repeated trials of one
experiment share their underlying problem.
"""

from dataclasses import dataclass, field

from . import model
from .assim import MemberProblem
from .covariance import DiagonalNoise, GridCovFactor
from .obs import ObsNetwork, strided_grid
from .streams import substream


@dataclass
class TwinConfig:
    """Configuration of one identical-twin ensemble experiment."""

    n: int = 1500
    dt: float = 0.025
    n_steps: int = 10
    forcing: float = 8.0
    spinup_steps: int = 1000
    obs_grid_count: int = 50
    obs_times: tuple = (3, 6, 9)
    sigma_obs: float = 0.05
    sigma_bg: float = 0.8
    cov_length: float = 6.0
    cov_passes: int = 10
    members: int = 20
    seed: int = 1234

    @property
    def p(self):
        return self.obs_grid_count * len(self.obs_times)


@dataclass
class EnsembleSetup:
    """A built twin experiment: operators, control problem and members."""

    cfg: TwinConfig
    net: ObsNetwork
    ub: GridCovFactor
    rn: DiagonalNoise
    truth: model.Trajectory
    y: object
    control: MemberProblem
    members: list = field(default_factory=list)


def build_setup(cfg, trial_seed=None, shared_linearization=False):
    """Build truth, control and ensemble members for a twin experiment.

    Parameters
    ----------
    cfg : TwinConfig
    trial_seed : int, optional
        Seed for member perturbations only; the truth, observations and
        control background always come from ``cfg.seed``.
    shared_linearization : bool
        If true, member operators are linearized around the control
        trajectory instead of each member's own background run.
    """
    if trial_seed is None:
        trial_seed = cfg.seed
    net = ObsNetwork(strided_grid(cfg.n, cfg.obs_grid_count), cfg.obs_times)
    ub = GridCovFactor(cfg.n, cfg.sigma_bg, cfg.cov_length, cfg.cov_passes)
    rn = DiagonalNoise(cfg.sigma_obs)

    x_true = model.spinup(cfg.n, cfg.dt, cfg.forcing, cfg.spinup_steps,
                          substream(cfg.seed, "spinup"))
    truth = model.integrate(x_true, cfg.dt, cfg.n_steps, cfg.forcing)
    y = net.observe(truth) + rn.apply(
        substream(cfg.seed, "obsnoise").standard_normal(net.p))

    x_bg = x_true + ub.apply(
        substream(cfg.seed, "bg", 0).standard_normal(cfg.n))
    control_traj = model.integrate(x_bg, cfg.dt, cfg.n_steps, cfg.forcing)
    control = MemberProblem(control_traj, net, ub, rn,
                            y - net.observe(control_traj))

    members = []
    for j in range(1, cfg.members + 1):
        x_j = x_bg + ub.apply(
            substream(trial_seed, "bg", j).standard_normal(cfg.n))
        y_j = y + rn.apply(
            substream(trial_seed, "obsnoise", j).standard_normal(net.p))
        traj_j = model.integrate(x_j, cfg.dt, cfg.n_steps, cfg.forcing)
        oper_traj = control_traj if shared_linearization else traj_j
        members.append(MemberProblem(oper_traj, net, ub, rn,
                                     y_j - net.observe(traj_j)))
    return EnsembleSetup(cfg, net, ub, rn, truth, y, control, members)

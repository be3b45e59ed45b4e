"""Experiment driver: runs the numerical studies and writes CSV results.

Six experiments are available, each writing one long-format CSV file with
the fixed header ``experiment,seed,member,variant,theta_rule,k,index,
metric,value`` plus a JSON manifest (configuration echo, build info, wall
time):

- ``eig-sensitivity``: leading eigenvalues of I + A over a grid of
  correlation shapes (length scale and smoother passes);
- ``eig-error``: relative eigenvalue approximation error of the Nystrom
  decomposition for every sketch kind, against a Lanczos oracle;
- ``control-lmp``: quadratic-cost traces of the control assimilation,
  preconditioned by each sketch kind, versus no preconditioner, reported
  per iteration and per cumulative operator application;
- ``theta-sensitivity``: cost traces over scaling rules and retained
  ranks at a fixed sketch budget;
- ``ensemble-lmp``: per-member cost ratios (no LMP over LMP) when one
  ensemble-sketch preconditioner is reused across all members;
- ``validate``: one-shot oracle checks at the dense-verifiable size.

Rows are emitted in a fixed serial order and floats are written with
shortest round-trip formatting, so a rerun with the same spec and seeds
produces a byte-identical CSV.

Matvec accounting convention: columns of one sketch are independent, so
building a sketch costs one batched application of A when the sketch
itself applies A (none otherwise), and the Nystrom pass Y = A Omega
always costs one more.  Each PCG iteration then costs one application.
"""

import csv
import json
import os
import platform
import time
from dataclasses import dataclass, field, fields, replace

import numpy as np

from . import __version__, model
from .assim import dense_hessian_term
from .eda import TwinConfig, build_setup
from .krylov import SolverConfig, lanczos_eigs, pcg
from .lmp import make_lmp
from .nystrom import (EigenApproximation, NystromConfig, nystrom_evd,
                      reconstruct)
from .sketch import KINDS, gaussian_sketch, make_sketch, rhs_diff_sketch
from .streams import substream

EXPERIMENTS = ("eig-sensitivity", "eig-error", "control-lmp",
               "theta-sensitivity", "ensemble-lmp", "validate")

CSV_COLUMNS = ("experiment", "seed", "member", "variant", "theta_rule",
               "k", "index", "metric", "value")


@dataclass
class ExperimentSpec:
    """Everything needed to run one experiment deterministically."""

    experiment: str
    twin: TwinConfig = field(default_factory=TwinConfig)
    seeds: list = field(default_factory=lambda: list(range(20)))
    kinds: list = field(default_factory=lambda: list(KINDS))
    theta_rules: list = field(default_factory=lambda: ["halfsum"])
    k_list: list = field(default_factory=lambda: [20])
    ell: int = 20
    max_iters: int = 40
    length_grid: list = field(default_factory=lambda: [2.0, 4.0, 6.0, 8.0])
    passes_grid: list = field(default_factory=lambda: [2, 6, 10, 14])
    out_dir: str = "results"

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ValueError(f"unknown experiment {self.experiment!r}; "
                             f"expected one of {EXPERIMENTS}")
        if not self.seeds:
            raise ValueError("need at least one seed")


def default_spec(experiment, **overrides):
    """Experiment spec with per-experiment defaults applied."""
    spec = ExperimentSpec(experiment=experiment)
    if experiment == "theta-sensitivity":
        spec.kinds = ["rhsdiff"]
        spec.theta_rules = ["halfsum", "lambdak", "one"]
        spec.k_list = [20, 15]
    elif experiment == "ensemble-lmp":
        spec.kinds = ["rhsdiff"]
        spec.k_list = [15, 20]
        spec.seeds = [0]
    return replace(spec, **overrides) if overrides else spec


@dataclass
class ResultTable:
    """Long-format result rows in their final output order."""

    rows: list = field(default_factory=list)
    ok: bool = True

    def add(self, seed="", member="", variant="", theta_rule="", k="",
            index="", metric="", value="", experiment=""):
        self.rows.append((experiment, seed, member, variant, theta_rule,
                          k, index, metric, value))


def _emitter(table, experiment, **fixed):
    def emit(**kw):
        merged = dict(fixed)
        merged.update(kw)
        table.add(experiment=experiment, **merged)
    return emit


# ---------------------------------------------------------------------------
# experiments


def _lanczos_budget(twin):
    # the operator has at most p + 1 distinct eigenvalues; leave slack for
    # the restart blocks that enumerate the unit/zero eigenspace
    return min(twin.n, twin.p + 80)


def run_eig_sensitivity(spec):
    """Leading eigenvalues of I + A over correlation-shape grids."""
    table = ResultTable()
    seed = spec.seeds[0]
    base = spec.twin
    n_top_length = min(150, base.p)
    n_top_passes = min(40, base.p)
    cells = ([("D", length, base.cov_passes) for length in spec.length_grid]
             + [("M", base.cov_length, passes) for passes in spec.passes_grid])
    for axis, length, passes in cells:
        twin = replace(base, cov_length=length, cov_passes=passes)
        setup = build_setup(twin)
        n_top = n_top_length if axis == "D" else n_top_passes
        values, _ = lanczos_eigs(setup.control.hessian_apply, twin.n,
                                 _lanczos_budget(twin), n_top, seed=twin.seed)
        label = (f"D={length:g}" if axis == "D" else f"M={passes:g}")
        emit = _emitter(table, spec.experiment, seed=seed, variant=label)
        for i, lam in enumerate(values, start=1):
            emit(index=i, metric="eigenvalue", value=lam)
    return table


def run_eig_error(spec):
    """Relative Nystrom eigenvalue errors per sketch kind and seed.

    Errors are reported on eigenvalues of the full system matrix I + A
    (the sketch approximates A; the unit offset is added to both sides).
    """
    table = ResultTable()
    k = spec.k_list[0]
    oracle_setup = build_setup(spec.twin)
    twin = spec.twin
    oracle, _ = lanczos_eigs(oracle_setup.control.hessian_apply, twin.n,
                             _lanczos_budget(twin), k, seed=twin.seed)
    emit0 = _emitter(table, spec.experiment, seed=twin.seed,
                     variant="oracle", k=k)
    for i, lam in enumerate(oracle, start=1):
        emit0(index=i, metric="eigenvalue", value=lam)
    ncfg = NystromConfig(ell=spec.ell, k=k, shift_mode="trace")
    for seed in spec.seeds:
        setup = build_setup(spec.twin, trial_seed=seed)
        for kind in spec.kinds:
            sk = make_sketch(kind, setup, spec.ell, substream(seed, "sketch"))
            approx = nystrom_evd(setup.control.a_apply, sk, ncfg)
            emit = _emitter(table, spec.experiment, seed=seed, variant=kind,
                            k=k)
            for i in range(k):
                err = abs((approx.values[i] + 1.0) - oracle[i]) / oracle[i]
                emit(index=i + 1, metric="rel_error", value=err)
    return table


def _solve_with_lmp(prob, precond, max_iters):
    prob.reset_matvecs()
    return pcg(prob.hessian_apply, prob.rhs(),
               SolverConfig(max_iters=max_iters), precond=precond,
               cost_fn=prob.quadratic_cost)


def _emit_trace(emit, trace, build_matvecs):
    for it, cost in zip(trace.iterations, trace.cost):
        emit(index=it, metric="J", value=cost)
    for it, mv in zip(trace.iterations, trace.matvecs):
        emit(index=it, metric="matvecs", value=build_matvecs + mv)


def run_control_lmp(spec):
    """Control-problem cost traces: each sketch kind versus no LMP."""
    table = ResultTable()
    rule = spec.theta_rules[0]
    k = spec.k_list[0]
    ncfg = NystromConfig(ell=spec.ell, k=k, shift_mode="trace")
    for seed in spec.seeds:
        setup = build_setup(spec.twin, trial_seed=seed)
        control = setup.control
        _, trace = _solve_with_lmp(control, None, spec.max_iters)
        _emit_trace(_emitter(table, spec.experiment, seed=seed,
                             variant="none"), trace, 0)
        for kind in spec.kinds:
            sk = make_sketch(kind, setup, spec.ell, substream(seed, "sketch"))
            approx = nystrom_evd(control.a_apply, sk, ncfg)
            precond = make_lmp(approx, rule)
            _, trace = _solve_with_lmp(control, precond, spec.max_iters)
            build = sk.n_build_matvecs + approx.n_build_matvecs
            _emit_trace(_emitter(table, spec.experiment, seed=seed,
                                 variant=kind, theta_rule=rule, k=k),
                        trace, build)
    return table


def run_theta_sensitivity(spec):
    """Cost traces over scaling rules and retained ranks, fixed budget."""
    table = ResultTable()
    kind = spec.kinds[0]
    for seed in spec.seeds:
        setup = build_setup(spec.twin, trial_seed=seed)
        control = setup.control
        _, trace = _solve_with_lmp(control, None, spec.max_iters)
        _emit_trace(_emitter(table, spec.experiment, seed=seed,
                             variant="none"), trace, 0)
        sk = make_sketch(kind, setup, spec.ell, substream(seed, "sketch"))
        for k in spec.k_list:
            ncfg = NystromConfig(ell=spec.ell, k=k, shift_mode="trace")
            approx = nystrom_evd(control.a_apply, sk, ncfg)
            build = sk.n_build_matvecs + approx.n_build_matvecs
            for rule in spec.theta_rules:
                precond = make_lmp(approx, rule)
                _, trace = _solve_with_lmp(control, precond, spec.max_iters)
                _emit_trace(_emitter(table, spec.experiment, seed=seed,
                                     variant=kind, theta_rule=rule, k=k),
                            trace, build)
    return table


def run_ensemble_lmp(spec):
    """Reuse one control-sketch LMP across all ensemble members."""
    table = ResultTable()
    rule = spec.theta_rules[0]
    kind = spec.kinds[0]
    seed = spec.seeds[0]
    setup = build_setup(spec.twin, trial_seed=seed)
    sk = make_sketch(kind, setup, spec.ell, substream(seed, "sketch"))
    traces_plain = []
    for j, member in enumerate(setup.members, start=1):
        _, trace = _solve_with_lmp(member, None, spec.max_iters)
        traces_plain.append(trace)
        _emit_trace(_emitter(table, spec.experiment, seed=seed, member=j,
                             variant="none"), trace, 0)
    for k in spec.k_list:
        ncfg = NystromConfig(ell=spec.ell, k=k, shift_mode="trace")
        approx = nystrom_evd(setup.control.a_apply, sk, ncfg)
        build = sk.n_build_matvecs + approx.n_build_matvecs
        precond = make_lmp(approx, rule)
        for j, member in enumerate(setup.members, start=1):
            _, trace = _solve_with_lmp(member, precond, spec.max_iters)
            emit = _emitter(table, spec.experiment, seed=seed, member=j,
                            variant=kind, theta_rule=rule, k=k)
            _emit_trace(emit, trace, build)
            plain = traces_plain[j - 1]
            for it, (j_no, j_p) in enumerate(zip(plain.cost, trace.cost)):
                emit(index=it, metric="J_ratio", value=j_no / j_p)
    return table


def run_validate(spec):
    """One-shot oracle checks at the dense-verifiable size."""
    table = ResultTable()
    twin = replace(spec.twin, n=120, obs_grid_count=10, members=20)
    emit = _emitter(table, spec.experiment, seed=twin.seed)
    checks = []

    # adjoint identity of the window observation operator
    setup = build_setup(twin)
    rng = substream(twin.seed, "validate")
    worst = 0.0
    for _ in range(20):
        v = rng.standard_normal(twin.n)
        w = rng.standard_normal(setup.net.p)
        lhs = setup.net.observe_tlm(setup.control.traj, v) @ w
        rhs = v @ setup.net.observe_adj(setup.control.traj, w)
        worst = max(worst, abs(lhs - rhs) / (abs(lhs) + 1.0))
    checks.append(("adjoint_error", worst, worst <= 1e-10))

    # second-order Taylor decay of the tangent-linear model
    x0 = setup.control.traj.states[0]
    v = rng.standard_normal(twin.n)
    v /= np.linalg.norm(v)
    base = setup.control.traj.states[-1]
    lin = model.tlm(setup.control.traj, v)[-1]

    def taylor_err(eps):
        pert = model.integrate(x0 + eps * v, twin.dt, twin.n_steps,
                               twin.forcing).states[-1]
        return np.linalg.norm(pert - base - eps * lin)

    ratio = taylor_err(1e-3) / taylor_err(5e-4)
    checks.append(("taylor_ratio", ratio, 3.5 < ratio < 4.5))

    # Nystrom exactness on a low-rank operator
    x = rng.standard_normal((50, 10))
    a_low = x @ x.T
    sk = gaussian_sketch(50, 10, rng)
    approx = nystrom_evd(lambda z: a_low @ z, sk,
                         NystromConfig(ell=10, k=10, shift_mode="trace"))
    nys_err = (np.linalg.norm(reconstruct(approx) - a_low)
               / np.linalg.norm(a_low))
    checks.append(("nystrom_error", nys_err, nys_err <= 1e-8))

    # spectrum surgery with exact pairs
    a = dense_hessian_term(setup.control)
    a = 0.5 * (a + a.T)
    vals, vecs = np.linalg.eigh(a)
    order = np.argsort(vals)[::-1][:10]
    precond = make_lmp(EigenApproximation(vecs[:, order],
                                          np.maximum(vals[order], 0.0)),
                       "halfsum")
    u = precond.apply_sqrt(np.eye(twin.n))
    h_eigs = np.sort(1.0 + vals)[::-1]
    got = np.sort(np.linalg.eigvalsh(u @ (np.eye(twin.n) + a) @ u.T))[::-1]
    expected = np.sort(np.concatenate([np.full(10, precond.theta),
                                       h_eigs[10:]]))[::-1]
    surgery = np.max(np.abs(got - expected) / np.maximum(expected, 1.0))
    checks.append(("surgery_error", surgery, surgery <= 1e-8))

    # ensemble right-hand-side differences have covariance A + A^2
    big = replace(twin, members=2000)
    shared = build_setup(big, shared_linearization=True)
    g = rhs_diff_sketch(shared.control, shared.members).columns
    sample = (g @ g.T) / g.shape[1]
    target = a + a @ a
    gamma_err = (np.linalg.norm(sample - target, 2)
                 / np.linalg.norm(target, 2))
    checks.append(("gamma_cov_error", gamma_err, gamma_err <= 0.2))

    for name, value, ok in checks:
        emit(variant=name, index=1, metric="value", value=value)
        emit(variant=name, index=1, metric="pass", value=1 if ok else 0)
    table.ok = all(ok for _, _, ok in checks)
    return table


_RUNNERS = {
    "eig-sensitivity": run_eig_sensitivity,
    "eig-error": run_eig_error,
    "control-lmp": run_control_lmp,
    "theta-sensitivity": run_theta_sensitivity,
    "ensemble-lmp": run_ensemble_lmp,
    "validate": run_validate,
}


def run_experiment(spec):
    """Run one experiment and return its result table."""
    return _RUNNERS[spec.experiment](spec)


# ---------------------------------------------------------------------------
# config files and output


def parse_config(path):
    """Read a ``key = value`` config file; '#' starts a comment."""
    options = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            key, _, value = line.partition("=")
            options[key.strip()] = value.strip()
    return options


_TWIN_INT_KEYS = ("n", "n_steps", "spinup_steps", "obs_grid_count",
                  "cov_passes", "members", "seed")
_TWIN_FLOAT_KEYS = ("dt", "forcing", "sigma_obs", "sigma_bg", "cov_length")


def apply_options(spec, options):
    """Apply parsed config options (strings) onto an experiment spec."""
    twin_kw = {}
    for key, value in options.items():
        if key in _TWIN_INT_KEYS:
            twin_kw[key] = int(value)
        elif key in _TWIN_FLOAT_KEYS:
            twin_kw[key] = float(value)
        elif key == "obs_times":
            twin_kw[key] = tuple(int(v) for v in value.split(","))
        elif key == "seeds":
            spec.seeds = [int(v) for v in value.split(",")]
        elif key == "kinds":
            spec.kinds = [v.strip() for v in value.split(",")]
        elif key == "theta_rules":
            spec.theta_rules = [v.strip() for v in value.split(",")]
        elif key == "k":
            spec.k_list = [int(v) for v in value.split(",")]
        elif key == "ell":
            spec.ell = int(value)
        elif key == "max_iters":
            spec.max_iters = int(value)
        elif key == "length_grid":
            spec.length_grid = [float(v) for v in value.split(",")]
        elif key == "passes_grid":
            spec.passes_grid = [int(v) for v in value.split(",")]
        elif key == "out":
            spec.out_dir = value
        else:
            raise ValueError(f"unknown config key {key!r}")
    if twin_kw:
        spec.twin = replace(spec.twin, **twin_kw)
    return spec


def _format_value(value):
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def write_csv(table, path):
    """Write a result table as UTF-8 CSV with a fixed header."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in table.rows:
            writer.writerow([_format_value(v) for v in row])


def write_manifest(spec, path, wall_time, n_rows, csv_name):
    """Write the JSON run manifest next to the CSV."""
    config = {f.name: getattr(spec.twin, f.name) for f in fields(spec.twin)}
    manifest = {
        "experiment": spec.experiment,
        "config": config,
        "seeds": spec.seeds,
        "kinds": spec.kinds,
        "theta_rules": spec.theta_rules,
        "k_list": spec.k_list,
        "ell": spec.ell,
        "max_iters": spec.max_iters,
        "length_grid": spec.length_grid,
        "passes_grid": spec.passes_grid,
        "csv": csv_name,
        "rows": n_rows,
        "package_version": __version__,
        "python_version": platform.python_version(),
        "numpy_version": np.__version__,
        "started_utc": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "wall_time_s": round(wall_time, 3),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run_and_write(spec):
    """Run an experiment and write CSV + manifest into ``spec.out_dir``.

    Returns the result table (with ``ok`` set for validate runs).
    """
    started = time.monotonic()
    table = run_experiment(spec)
    os.makedirs(spec.out_dir, exist_ok=True)
    csv_name = f"{spec.experiment}.csv"
    write_csv(table, os.path.join(spec.out_dir, csv_name))
    write_manifest(spec, os.path.join(spec.out_dir,
                                      f"{spec.experiment}_manifest.json"),
                   time.monotonic() - started, len(table.rows), csv_name)
    return table

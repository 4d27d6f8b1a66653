"""FISTA reconstruction loop, step sizing by power iteration, cost terms."""

import time
from dataclasses import dataclass, field

import numpy as np

from .core import ComplexField, Volume
from .errors import DimensionMismatchError, DivergenceError, ParameterError
from .propagation import _adjoint_arr, _forward_arr
from .regularizers import Regularizer, RegKind, penalty_value, prox, tv_dual_state


@dataclass(frozen=True)
class SolverConfig:
    alpha: float
    max_iterations: int
    regularizer: Regularizer
    power_iterations: int = 100
    power_tolerance: float = 1e-8
    seed: int = 0
    step_override: float = None
    record_every: int = 10
    early_stop_tol: float = None

    def __post_init__(self):
        if not self.alpha > 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1")
        if self.power_iterations < 1:
            raise ParameterError("power_iterations must be >= 1")
        if self.step_override is not None and not self.step_override > 0:
            raise ParameterError("step_override must be positive")
        if self.record_every < 1:
            raise ParameterError("record_every must be >= 1")


@dataclass
class RunReport:
    """Per-iteration histories plus the constants needed to reproduce a run."""

    kappa: float
    cost_history: list = field(default_factory=list)  # (iter, C1, C2, total)
    data_error_history: list = field(default_factory=list)  # (iter, err)
    object_error_history: list = field(default_factory=list)  # (iter, err)
    iterations: int = 0
    wall_time: float = 0.0

    def to_dict(self):
        return {
            "kappa": self.kappa,
            "iterations": self.iterations,
            "cost_history": [list(t) for t in self.cost_history],
            "data_error_history": [list(t) for t in self.data_error_history],
            "object_error_history": [list(t) for t in self.object_error_history],
            "wall_time": self.wall_time,
        }


def spectral_norm(plan, cfg):
    """Largest eigenvalue of the normal operator adjoint(forward(.)).

    Power iteration from a seeded random start; returns the Rayleigh
    quotient once its relative change drops below cfg.power_tolerance or
    the iteration cap is reached.  Deterministic for a fixed seed.
    """
    s = plan.setup
    shape = (s.grid.nx, s.grid.ny, s.num_planes)
    rng = np.random.default_rng(cfg.seed)
    u = rng.random(shape) + 1j * rng.random(shape)
    while not np.linalg.norm(u) > 0:  # probability-zero restart path
        u = rng.random(shape) + 1j * rng.random(shape) + 0.5
    u /= np.linalg.norm(u)
    est = 0.0
    for _ in range(cfg.power_iterations):
        w = _adjoint_arr(_forward_arr(u, plan), plan)
        new_est = float(np.real(np.vdot(u, w)))
        nw = np.linalg.norm(w)
        if nw == 0:
            return 0.0
        u = w / nw
        if est > 0 and abs(new_est - est) <= cfg.power_tolerance * est:
            return new_est
        est = new_est
    return est


def grad_data_term(volume, data, plan):
    """Gradient of the data-fidelity term: adjoint(forward(U) - V)."""
    s = plan.setup
    if volume.grid != s.grid or volume.zplanes != s.zplanes:
        raise DimensionMismatchError("volume does not match the plan geometry")
    if data.grid != s.grid:
        raise DimensionMismatchError("data field does not match the plan geometry")
    g = _adjoint_arr(_forward_arr(volume.values, plan) - data.values, plan)
    return Volume(s.grid, s.zplanes, g)


def cost(volume, data, plan, cfg):
    """(C1, C2, total): 0.5*||V - A U||_F^2, penalty value, C1 + alpha*C2."""
    s = plan.setup
    if volume.grid != s.grid or volume.zplanes != s.zplanes:
        raise DimensionMismatchError("volume does not match the plan geometry")
    resid = data.values - _forward_arr(volume.values, plan)
    c1 = 0.5 * float(np.linalg.norm(resid)) ** 2
    c2 = penalty_value(volume, cfg.regularizer)
    return c1, c2, c1 + cfg.alpha * c2


def fista(data, plan, cfg, initial=None, truth=None):
    """Accelerated proximal-gradient reconstruction of the object volume.

    Gradient step on the data term with step 1/kappa, prox of the configured
    penalty with threshold alpha/kappa, and the usual momentum schedule
    t_{n+1} = (1 + sqrt(1 + 4 t_n^2)) / 2 starting at t_1 = 1.
    Returns (volume estimate, RunReport).
    """
    s = plan.setup
    if data.grid != s.grid:
        raise DimensionMismatchError("data field does not match the plan geometry")
    t0 = time.perf_counter()
    kappa = cfg.step_override if cfg.step_override is not None else spectral_norm(plan, cfg)
    tau = 1.0 / kappa
    mu = cfg.alpha * tau

    if initial is None:
        u = np.zeros((s.grid.nx, s.grid.ny, s.num_planes), dtype=np.complex128)
    else:
        if initial.grid != s.grid or initial.zplanes != s.zplanes:
            raise DimensionMismatchError("initial volume does not match the plan geometry")
        u = initial.values.copy()

    v = data.values
    v_norm = np.linalg.norm(v)
    truth_vals = truth.values if truth is not None else None
    truth_norm = np.linalg.norm(truth_vals) if truth_vals is not None else None

    report = RunReport(kappa=float(kappa))
    z = u
    t = 1.0
    n_done = 0
    # warm-started FGP dual state: successive TV prox problems differ only
    # by one FISTA step, so carrying the duals over lets a modest number of
    # inner iterations track the exact prox instead of stalling the outer
    # iteration on accumulated prox error
    dual_state = (tv_dual_state(Volume(s.grid, s.zplanes, u))
                  if cfg.regularizer.kind is RegKind.TV_SLICEWISE else None)
    for n in range(1, cfg.max_iterations + 1):
        grad = _adjoint_arr(_forward_arr(z, plan) - v, plan)
        try:
            u_new = prox(Volume(s.grid, s.zplanes, z - tau * grad), mu,
                         cfg.regularizer, dual_state).values
        except ParameterError as exc:
            raise DivergenceError(n) from exc
        t_new = (1.0 + np.sqrt(1.0 + 4.0 * t * t)) / 2.0
        z = u_new + ((t - 1.0) / t_new) * (u_new - u)
        step_change = np.linalg.norm(u_new - u)
        u_prev_norm = np.linalg.norm(u)
        u = u_new
        t = t_new
        n_done = n

        if n % cfg.record_every == 0 or n == cfg.max_iterations:
            resid = _forward_arr(u, plan) - v
            c1 = 0.5 * float(np.linalg.norm(resid)) ** 2
            if not np.isfinite(c1):
                raise DivergenceError(n)
            c2 = penalty_value(Volume(s.grid, s.zplanes, u), cfg.regularizer)
            report.cost_history.append((n, c1, c2, c1 + cfg.alpha * c2))
            if v_norm > 0:
                report.data_error_history.append((n, float(np.linalg.norm(resid)) / float(v_norm)))
            if truth_vals is not None:
                report.object_error_history.append(
                    (n, float(np.linalg.norm(truth_vals - u)) / float(truth_norm))
                )
        if cfg.early_stop_tol is not None and u_prev_norm > 0:
            if step_change <= cfg.early_stop_tol * u_prev_norm:
                break

    report.iterations = n_done
    report.wall_time = time.perf_counter() - t0
    if not np.all(np.isfinite(u.view(np.float64))):
        raise DivergenceError(n_done)
    return Volume(s.grid, s.zplanes, u), report

"""First- and second-order interior-point solvers for the constrained design.

Both methods minimize the barrier-penalized cost for a geometrically growing
sequence of barrier weights.  The inner loop is gradient descent (first
order) or a modified Newton method (second order) with Armijo backtracking;
candidate steps that leave the relaxed feasible set or the Schur region are
treated as failed decrease and backtracked past.
"""

import time
from dataclasses import dataclass, field

import numpy as np

from . import h2cost
from .barrier import DEFAULT_EPS_R, eval_objective, relaxed_slack, stack_maps
from .exceptions import (
    InfeasiblePoint,
    InfeasibleStart,
    LineSearchFailed,
    NotSchur,
)
from .linalg import mat, spectral_radius, sym_eig, vec
from .model import as_gain, constraint_stack, min_slack

# Iterates closer than this (relative) are considered repeats; bitwise
# equality would be representation-fragile.
REPEAT_TOL = 1e-15


@dataclass
class SolverConfig:
    """Barrier schedule, tolerances, and line-search parameters.

    ``max_inner`` of ``None`` resolves per method: 50000 for the first-order
    loop, 200 for the Newton loop.
    """

    t0: float = 1.0
    mu: float = 4.0
    eps1: float = 1e-5
    eps2: float = 1e-5
    eps_r: float = DEFAULT_EPS_R
    delta: float = 1e-9
    armijo_sigma: float = 1e-4
    armijo_beta: float = 0.5
    armijo_s0_fipm: float = 1.0
    max_inner: int | None = None
    max_outer: int = 60
    max_backtracks: int = 60

    def __post_init__(self):
        if self.t0 <= 0:
            raise ValueError("t0 must be positive")
        if self.mu <= 1:
            raise ValueError("mu must exceed 1")
        for name in ("eps1", "eps2", "delta", "armijo_s0_fipm"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.eps_r < 0:
            raise ValueError("eps_r must be nonnegative")
        if not 0 < self.armijo_sigma < 1:
            raise ValueError("armijo_sigma must lie in (0, 1)")
        if not 0 < self.armijo_beta < 1:
            raise ValueError("armijo_beta must lie in (0, 1)")
        for name in ("max_outer", "max_backtracks"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be a positive integer")
        if self.max_inner is not None and self.max_inner < 1:
            raise ValueError("max_inner must be a positive integer")

    def resolved_max_inner(self, second_order):
        if self.max_inner is not None:
            return self.max_inner
        return 200 if second_order else 50000


@dataclass(frozen=True)
class KktResidual:
    """Nonnegative residuals of the four first-order optimality conditions."""

    stationarity: float
    dual_feasibility: float
    primal_feasibility: float
    complementarity: float


@dataclass(frozen=True)
class OuterRecord:
    """One outer iteration of the barrier schedule."""

    t: float
    inner_iterations: int
    grad_norm: float
    J: float
    cumulative_seconds: float


@dataclass(frozen=True)
class InnerIterate:
    """Payload handed to the instrumentation callback after each accepted step."""

    outer_index: int
    t: float
    inner_index: int
    gain: np.ndarray
    objective_value: float


@dataclass
class SolveReport:
    """Outcome of one interior-point solve."""

    final_gain: np.ndarray
    objective: float
    jlbf_grad_norm: float
    multiplier: np.ndarray
    kkt: KktResidual
    trace: list = field(default_factory=list)
    converged: bool = False
    method: str = ""

    @property
    def total_inner_iterations(self):
        return sum(rec.inner_iterations for rec in self.trace)


def _clamped_spectrum(h, delta):
    eig = sym_eig(h)
    clamped = np.where(eig.eigenvalues < delta, delta, eig.eigenvalues)
    return clamped, eig.eigenvectors


def modify_hessian(h, delta):
    """Replace every eigenvalue below ``delta`` by ``delta``.

    The input must be symmetric within 1e-8 relative Frobenius error; the
    result is symmetric positive definite with smallest eigenvalue at least
    ``delta`` (up to roundoff), and agrees with the input on the eigenspace
    of eigenvalues at or above ``delta``.
    """
    h = np.asarray(h, dtype=float)
    asym = float(np.linalg.norm(h - h.T))
    if asym > 1e-8 * max(1.0, float(np.linalg.norm(h))):
        raise ValueError(f"Hessian is not symmetric (asymmetry {asym:.3e})")
    clamped, q = _clamped_spectrum(h, delta)
    out = (q * clamped) @ q.T
    return 0.5 * (out + out.T)


class _PenalizedH2:
    """Objective hooks the descent loops consume, bound to one plant."""

    def __init__(self, plant, eps_r):
        self.plant = plant
        self.eps_r = eps_r
        self.shape = (plant.m, plant.n)

    def value(self, k, t):
        return eval_objective(self.plant, k, t, self.eps_r, order=0).value

    def value_grad(self, k, t):
        out = eval_objective(self.plant, k, t, self.eps_r, order=1)
        return out.value, out.vec_grad

    def hessian(self, k, t):
        return eval_objective(self.plant, k, t, self.eps_r, order=2).vec_hessian

    def cost(self, k):
        return h2cost.eval_cost(self.plant, k).J


def _armijo_core(value_fn, k, direction, vec_grad, cfg, s_init, val0):
    """Backtracking search for the update ``k - s * direction``.

    Returns ``(s, value_at_accepted)``.  Candidates raising
    :class:`InfeasiblePoint` or :class:`NotSchur` count as failed decrease.
    """
    descent = float(np.dot(vec_grad, vec(direction)))
    if descent <= 0.0:
        raise ValueError(
            f"direction is not a descent direction (<grad, d> = {descent:.3e})"
        )
    s = float(s_init)
    for _ in range(cfg.max_backtracks + 1):
        candidate = k - s * direction
        try:
            val = value_fn(candidate)
        except (InfeasiblePoint, NotSchur):
            val = None
        if val is not None and val <= val0 - cfg.armijo_sigma * s * descent:
            return s, val
        s *= cfg.armijo_beta
    raise LineSearchFailed(
        f"no sufficient-decrease step within {cfg.max_backtracks} backtracks "
        f"from s = {s_init:g}"
    )


def armijo(plant, k, direction, vec_grad, t, eps_r, cfg, s_init):
    """Armijo step size for the penalized objective at barrier weight ``t``.

    ``direction`` is subtracted from the gain, so it must have positive inner
    product with ``vec_grad``.  The accepted step keeps the iterate strictly
    inside the relaxed feasible set and the Schur region.
    """
    k = as_gain(plant, k)
    val0 = eval_objective(plant, k, t, eps_r, order=0).value

    def value_fn(candidate):
        return eval_objective(plant, candidate, t, eps_r, order=0).value

    s, _ = _armijo_core(value_fn, k, direction, vec_grad, cfg, s_init, val0)
    return s


def _descend(objective, k0, cfg, second_order, callback=None):
    """Shared double loop: inner descent per barrier weight, geometric outer
    schedule, termination on a small outer step."""
    m, n = objective.shape
    k = np.array(k0, dtype=float)
    t = cfg.t0
    max_inner = cfg.resolved_max_inner(second_order)
    trace = []
    start = time.perf_counter()
    converged = False
    s_warm = cfg.armijo_s0_fipm
    grad_norm = np.inf
    for outer in range(cfg.max_outer):
        k_outer_start = k
        inner = 0
        while True:
            val, grad = objective.value_grad(k, t)
            grad_norm = float(np.linalg.norm(grad))
            if grad_norm < cfg.eps1 or inner >= max_inner:
                break
            if second_order:
                hess = objective.hessian(k, t)
                clamped, q = _clamped_spectrum(hess, cfg.delta)
                direction = mat(q @ ((q.T @ grad) / clamped), m, n)
                s_init = 1.0
            else:
                direction = mat(grad, m, n)
                s_init = s_warm
            try:
                s, val_new = _armijo_core(
                    lambda cand: objective.value(cand, t),
                    k, direction, grad, cfg, s_init, val,
                )
            except LineSearchFailed as exc:
                raise LineSearchFailed(
                    f"{exc} (outer iteration {outer}, t = {t:g}, "
                    f"inner iteration {inner})"
                ) from exc
            if not second_order:
                # Warm start: let the next step regrow past the accepted one.
                s_warm = 2.0 * s
            k_new = k - s * direction
            inner += 1
            if callback is not None:
                callback(
                    InnerIterate(
                        outer_index=outer,
                        t=t,
                        inner_index=inner,
                        gain=k_new.copy(),
                        objective_value=val_new,
                    )
                )
            repeated = float(np.linalg.norm(k_new - k)) <= REPEAT_TOL * (
                1.0 + float(np.linalg.norm(k_new))
            )
            k = k_new
            if repeated:
                break
        trace.append(
            OuterRecord(
                t=t,
                inner_iterations=inner,
                grad_norm=grad_norm,
                J=objective.cost(k),
                cumulative_seconds=time.perf_counter() - start,
            )
        )
        if float(np.linalg.norm(k - k_outer_start)) < cfg.eps2:
            converged = True
            break
        t = cfg.mu * t
    return k, trace, converged


def _require_start(plant, k0, eps_r):
    reasons = []
    slack = min_slack(plant, k0)
    if not slack + eps_r > 0:
        reasons.append(f"min slack {slack:.6g} <= -eps_r ({eps_r:g})")
    radius = spectral_radius(plant.A - plant.B @ k0)
    if radius >= 1.0:
        reasons.append(f"closed loop not Schur (spectral radius {radius:.6g})")
    if reasons:
        raise InfeasibleStart("; ".join(reasons))


def _finish(plant, objective, k, trace, converged, cfg, method):
    t_final = trace[-1].t
    _, grad = objective.value_grad(k, t_final)
    q = recover_multiplier(plant, k, t_final, cfg.eps_r)
    return SolveReport(
        final_gain=k,
        objective=objective.cost(k),
        jlbf_grad_norm=float(np.linalg.norm(grad)),
        multiplier=q,
        kkt=kkt_residual(plant, k, q),
        trace=trace,
        converged=converged,
        method=method,
    )


def fipm(plant, k0, cfg=None, callback=None):
    """First-order interior-point method: gradient descent per barrier weight."""
    cfg = cfg if cfg is not None else SolverConfig()
    k0 = as_gain(plant, k0)
    _require_start(plant, k0, cfg.eps_r)
    objective = _PenalizedH2(plant, cfg.eps_r)
    k, trace, converged = _descend(objective, k0, cfg, False, callback)
    return _finish(plant, objective, k, trace, converged, cfg, "FIPM")


def sipm(plant, k0, cfg=None, callback=None):
    """Second-order interior-point method: modified Newton per barrier weight.

    The Newton system is solved in the eigenbasis of the modified Hessian, so
    the direction is a descent direction whenever the gradient is nonzero.
    """
    cfg = cfg if cfg is not None else SolverConfig()
    k0 = as_gain(plant, k0)
    _require_start(plant, k0, cfg.eps_r)
    objective = _PenalizedH2(plant, cfg.eps_r)
    k, trace, converged = _descend(objective, k0, cfg, True, callback)
    return _finish(plant, objective, k, trace, converged, cfg, "SIPM")


def recover_multiplier(plant, k, t, eps_r=DEFAULT_EPS_R):
    """Multiplier estimate from the barrier: elementwise ``1 / (t * slack)``."""
    if t <= 0:
        raise ValueError("barrier weight t must be positive")
    slack = relaxed_slack(plant, k, eps_r)
    if slack.min() <= 0.0:
        raise InfeasiblePoint(
            f"cannot recover multiplier: relaxed slack min {slack.min():.3e} <= 0"
        )
    return (1.0 / t) / slack


def kkt_residual(plant, k, q):
    """Residuals of the first-order optimality conditions at ``(k, q)``.

    Stationarity is reported as ``inf`` when the closed loop is not Schur
    stable (the cost gradient does not exist there); the other three
    residuals are always finite.
    """
    k = as_gain(plant, k)
    q = np.asarray(q, dtype=float)
    if q.shape != (plant.n + 1, plant.n):
        raise ValueError(
            f"multiplier must be {plant.n + 1}x{plant.n}, got {q.shape}"
        )
    stack = constraint_stack(plant, k)
    _, factor = stack_maps(plant)
    try:
        cache = h2cost.eval_cost(plant, k)
        grad = h2cost.cost_gradient(plant, k, cache)
        stationarity = float(np.linalg.norm(grad - factor.T @ q))
    except NotSchur:
        stationarity = np.inf
    return KktResidual(
        stationarity=stationarity,
        dual_feasibility=max(0.0, -float(q.min())),
        primal_feasibility=max(0.0, -float(stack.min())),
        complementarity=abs(float(np.tensordot(q, stack))),
    )

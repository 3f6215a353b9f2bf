"""Log-barrier term for the compartmental constraints, and the penalized cost.

The constraint stack is affine in the gain, ``S(K) = S0 + M K`` with
``S0 = [A; 1 - colsum(A)]`` and ``M = [-B; colsum(B)]``.  The barrier weight
``t`` divides the whole term, so value, gradient, and Hessian are all exactly
linear in ``1/t``.  A relaxation ``eps_r`` is added inside every logarithm,
which implements the relaxed constraint ``S(K) >= -eps_r`` and keeps the
barrier finite on boundary points whose slack is exactly zero.
"""

from dataclasses import dataclass

import numpy as np

from . import h2cost
from .exceptions import InfeasiblePoint
from .linalg import vec
from .model import as_gain, constraint_stack

DEFAULT_EPS_R = 1e-9


@dataclass(frozen=True)
class BarrierEval:
    """Barrier value and derivatives at one gain."""

    value: float
    grad_matrix: np.ndarray
    vec_grad: np.ndarray
    vec_hessian: np.ndarray
    slack: np.ndarray


@dataclass(frozen=True)
class ObjectiveEval:
    """Penalized objective (cost plus barrier) and its derivatives.

    ``vec_grad`` / ``vec_hessian`` are ``None`` when a lower ``order`` was
    requested.  ``cost`` is the barrier-free H2 value at the same gain.
    """

    value: float
    vec_grad: np.ndarray | None
    vec_hessian: np.ndarray | None
    cost: float


def stack_maps(plant):
    """Affine description of the constraint stack: (offset, gain factor)."""
    offset = np.vstack([plant.A, 1.0 - plant.A.sum(axis=0)])
    factor = np.vstack([-plant.B, plant.B.sum(axis=0)])
    return offset, factor


def relaxed_slack(plant, k, eps_r):
    """Constraint stack shifted by the relaxation; must be positive to log."""
    return constraint_stack(plant, k) + eps_r


def eval_barrier(plant, k, t, eps_r=DEFAULT_EPS_R):
    """Evaluate the log-barrier term, its gradient, and its Hessian.

    Raises :class:`InfeasiblePoint` when any relaxed slack is nonpositive;
    during a line search that signals an overshoot, never a normal state.
    """
    if t <= 0:
        raise ValueError("barrier weight t must be positive")
    k = as_gain(plant, k)
    slack = relaxed_slack(plant, k, eps_r)
    if slack.min() <= 0.0:
        bad = np.argwhere(slack <= 0.0)
        raise InfeasiblePoint(
            f"relaxed slack nonpositive at stack entries {bad.tolist()} "
            f"(min {slack.min():.3e})"
        )
    _, factor = stack_maps(plant)
    inv_t = 1.0 / t
    value = -inv_t * float(np.log(slack).sum())
    grad_matrix = -inv_t * factor.T @ (1.0 / slack)
    factor_big = np.kron(np.eye(plant.n), factor)
    s = vec(slack)
    vec_grad = -inv_t * (factor_big.T @ (1.0 / s))
    hess = inv_t * (factor_big.T * (1.0 / s**2)) @ factor_big
    return BarrierEval(
        value=value,
        grad_matrix=grad_matrix,
        vec_grad=vec_grad,
        vec_hessian=0.5 * (hess + hess.T),
        slack=slack,
    )


def eval_objective(plant, k, t, eps_r=DEFAULT_EPS_R, order=2):
    """Cost plus barrier at gain ``k`` and weight ``t``.

    ``order`` selects how much derivative information to assemble: 0 for the
    value only, 1 to add the gradient, 2 (default) to add the Hessian as well.
    Raises :class:`NotSchur` or :class:`InfeasiblePoint` when the gain is
    outside the solvable region.
    """
    if t <= 0:
        raise ValueError("barrier weight t must be positive")
    k = as_gain(plant, k)
    slack = relaxed_slack(plant, k, eps_r)
    if slack.min() <= 0.0:
        raise InfeasiblePoint(f"relaxed slack nonpositive (min {slack.min():.3e})")
    cache = h2cost.eval_cost(plant, k)  # raises NotSchur outside the domain
    inv_t = 1.0 / t
    value = cache.J - inv_t * float(np.log(slack).sum())
    if order == 0:
        return ObjectiveEval(value=value, vec_grad=None, vec_hessian=None, cost=cache.J)
    _, factor = stack_maps(plant)
    grad = h2cost.vec_cost_gradient(plant, k, cache) + vec(
        -inv_t * factor.T @ (1.0 / slack)
    )
    if order == 1:
        return ObjectiveEval(value=value, vec_grad=grad, vec_hessian=None, cost=cache.J)
    bar = eval_barrier(plant, k, t, eps_r)
    hess = h2cost.cost_hessian(plant, k, cache) + bar.vec_hessian
    return ObjectiveEval(value=value, vec_grad=grad, vec_hessian=hess, cost=cache.J)

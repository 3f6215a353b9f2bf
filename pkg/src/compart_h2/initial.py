"""Starting gains: rank-one construction, phase-I slack maximization, checks.

The interior-point loops need a starting gain whose closed loop is Schur and
(at least under the ``eps_r`` relaxation) inside the compartmental constraint
set.  Because a strictly feasible closed loop with all column sums below one
is automatically Schur, maximizing the minimum constraint slack is a complete
phase-I for this constraint class.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp, softmax

from .exceptions import PhaseOneFailed
from .linalg import spectral_radius
from .model import as_gain, constraint_stack, min_slack
from .barrier import stack_maps

DEFAULT_TARGET_SLACK = 1e-3
DEFAULT_BETA_SCHEDULE = (1.0, 10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class StartCheck:
    """Outcome of the strict-feasibility check for a starting gain."""

    ok: bool
    reasons: tuple
    slack: float
    radius: float


def rank_one_gain(vectors):
    """Gain whose i-th column is the i-th supplied vector.

    Equivalent to summing the rank-one products of each vector with the
    matching standard basis row.
    """
    cols = [np.asarray(v, dtype=float).reshape(-1) for v in vectors]
    m = cols[0].size
    for i, c in enumerate(cols):
        if c.size != m:
            raise ValueError(
                f"vector {i} has length {c.size}, expected {m} like the first"
            )
    return np.column_stack(cols)


def check_start(plant, k):
    """Strict feasibility check: positive slack and Schur closed loop.

    Deliberately applies no relaxation; a gain sitting exactly on the
    constraint boundary is rejected here even though the solvers accept it
    under ``eps_r``.
    """
    k = as_gain(plant, k)
    slack = min_slack(plant, k)
    radius = spectral_radius(plant.A - plant.B @ k)
    reasons = []
    if not slack > 0.0:
        stack = constraint_stack(plant, k)
        worst = np.unravel_index(np.argmin(stack), stack.shape)
        reasons.append(
            f"not strictly feasible: min slack {slack:.6g} at stack entry {worst}"
        )
    if not radius < 1.0:
        reasons.append(f"not Schur: spectral radius {radius:.6g}")
    return StartCheck(
        ok=not reasons, reasons=tuple(reasons), slack=slack, radius=radius
    )


def smoothed_min_slack(plant, k, beta):
    """Soft-min of the constraint stack: a concave lower bound on the true
    minimum slack, within ``log(num_entries)/beta`` of it."""
    s = constraint_stack(plant, k).reshape(-1)
    return float(-logsumexp(-beta * s) / beta)


def _ascent(plant, k, beta, target, sigma=1e-4, shrink=0.5, max_steps=500):
    """Gradient ascent on the soft-min; concave, so plain backtracking works."""
    _, factor = stack_maps(plant)
    value = smoothed_min_slack(plant, k, beta)
    for _ in range(max_steps):
        if min_slack(plant, k) >= target:
            break
        weights = softmax(-beta * constraint_stack(plant, k))
        grad = factor.T @ weights
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= 1e-12 * (1.0 + abs(value)):
            break
        step = 1.0
        gg = gnorm**2
        improved = False
        for _ in range(60):
            cand = k + step * grad
            cand_val = smoothed_min_slack(plant, cand, beta)
            if cand_val >= value + sigma * step * gg:
                k, value, improved = cand, cand_val, True
                break
            step *= shrink
        if not improved:
            break
    return k


def phase1(
    plant,
    k_start=None,
    target_slack=DEFAULT_TARGET_SLACK,
    beta_schedule=DEFAULT_BETA_SCHEDULE,
):
    """Find a gain with minimum constraint slack at least ``target_slack``.

    Maximizes a smoothed minimum slack by gradient ascent, sharpening the
    smoothing along ``beta_schedule``.  The smoothed problem is concave, so
    the ascent reaches its global maximum; if even that cannot deliver the
    target, :class:`PhaseOneFailed` is raised carrying the best gain found.
    """
    if target_slack <= 0:
        raise ValueError("target_slack must be positive")
    k = (
        np.zeros((plant.m, plant.n))
        if k_start is None
        else as_gain(plant, k_start)
    )
    best_k, best_slack = k, min_slack(plant, k)
    if best_slack >= target_slack:
        return best_k
    for beta in beta_schedule:
        k = _ascent(plant, k, beta, target_slack)
        slack = min_slack(plant, k)
        if slack > best_slack:
            best_k, best_slack = k, slack
        if best_slack >= target_slack:
            return best_k
    raise PhaseOneFailed(best_k, best_slack, target_slack)

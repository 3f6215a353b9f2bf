"""Closed-loop H2 cost, its gradient, and its vectorized Hessian.

The cost of a stabilizing gain is ``J(K) = Tr(G^T X G)`` where ``X`` is the
observability-type Gramian of the closed loop.  Both Gramians here follow the
positive-semidefinite convention::

    A_K^T X A_K - X + C_K^T C_K = 0
    A_K  Y A_K^T - Y + G G^T    = 0

With that convention the gradient is ``2 (D^T D K - B^T X A_K) Y`` and the
Hessian is assembled column by column from three auxiliary Lyapunov solves
per gain entry; both formulas are validated against finite differences in the
test suite.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .linalg import DlyapSolver, vec
from .model import as_gain, closed_loop

THREADS_ENV = "COMPART_H2_THREADS"


@dataclass(frozen=True)
class CostCache:
    """Gramian pair and cost value at one gain."""

    X: np.ndarray
    Y: np.ndarray
    J: float


@dataclass(frozen=True)
class HessianWorkspace:
    """Auxiliary Lyapunov solutions for one gain-entry direction.

    With ``L P = A_K^T P A_K - P`` and ``L* P = A_K P A_K^T - P``::

        L  X_ij = -A_K^T X B S_ij
        L* Y_ij = -A_K Y S_ij^T B^T
        L  Z_ij = -K^T D^T D S_ij

    where ``S_ij`` is the m x n indicator of entry (i, j).
    """

    X_ij: np.ndarray
    Y_ij: np.ndarray
    Z_ij: np.ndarray


def eval_cost(plant, k):
    """Evaluate the squared H2 norm of the closed loop.

    Raises :class:`~compart_h2.exceptions.NotSchur` when ``A - BK`` is not
    Schur stable (the cost is infinite outside the stability region).
    """
    cl = closed_loop(plant, k)
    solver = DlyapSolver(cl.A_K)
    x = solver.solve_transposed(cl.C_K.T @ cl.C_K)
    x = 0.5 * (x + x.T)
    y = solver.solve(plant.G @ plant.G.T)
    y = 0.5 * (y + y.T)
    j = float(np.trace(plant.G.T @ x @ plant.G))
    return CostCache(X=x, Y=y, J=j)


def cost_gradient(plant, k, cache):
    """Gradient of the cost with respect to the gain, as an m x n matrix."""
    k = as_gain(plant, k)
    a_k = plant.A - plant.B @ k
    r = plant.D.T @ plant.D
    return 2.0 * (r @ k - plant.B.T @ cache.X @ a_k) @ cache.Y


def vec_cost_gradient(plant, k, cache):
    """Column-major vectorization of :func:`cost_gradient`."""
    return vec(cost_gradient(plant, k, cache))


def hessian_workspace(plant, k, cache, i, j, solver=None):
    """Solve the three auxiliary Lyapunov equations for gain entry (i, j)."""
    k = as_gain(plant, k)
    if not (0 <= i < plant.m and 0 <= j < plant.n):
        raise IndexError(f"gain entry ({i}, {j}) outside {plant.m}x{plant.n}")
    a_k = plant.A - plant.B @ k
    if solver is None:
        solver = DlyapSolver(a_k)
    s_ij = np.zeros((plant.m, plant.n))
    s_ij[i, j] = 1.0
    x_ij = solver.solve_transposed(a_k.T @ cache.X @ plant.B @ s_ij)
    y_ij = solver.solve(a_k @ cache.Y @ s_ij.T @ plant.B.T)
    z_ij = solver.solve_transposed(k.T @ (plant.D.T @ plant.D) @ s_ij)
    return HessianWorkspace(X_ij=x_ij, Y_ij=y_ij, Z_ij=z_ij)


def _hessian_column(plant, k, cache, i, j, solver, parts):
    ws = hessian_workspace(plant, k, cache, i, j, solver=solver)
    a_k_y, core, curv = parts
    s_ij = np.zeros((plant.m, plant.n))
    s_ij[i, j] = 1.0
    block = (
        2.0 * plant.B.T @ (ws.X_ij + ws.X_ij.T) @ a_k_y
        + 2.0 * core @ (ws.Y_ij + ws.Y_ij.T)
        + 2.0 * curv @ s_ij @ cache.Y
        - 2.0 * plant.B.T @ (ws.Z_ij + ws.Z_ij.T) @ a_k_y
    )
    return block


def _shared_parts(plant, k, cache):
    a_k = plant.A - plant.B @ k
    r = plant.D.T @ plant.D
    a_k_y = a_k @ cache.Y
    core = plant.B.T @ cache.X @ a_k - r @ k
    curv = plant.B.T @ cache.X @ plant.B + r
    return a_k_y, core, curv


def hessian_block(plant, k, cache, i, j):
    """Second derivative of the cost: d(gradient)/d(K[i, j]) as m x n."""
    k = as_gain(plant, k)
    solver = DlyapSolver(plant.A - plant.B @ k)
    parts = _shared_parts(plant, k, cache)
    return _hessian_column(plant, k, cache, i, j, solver, parts)


def _column_threads(n_columns):
    raw = os.environ.get(THREADS_ENV, "0")
    try:
        requested = int(raw)
    except ValueError:
        requested = 0
    if requested < 0:
        requested = 0
    if requested == 0:
        # Auto: threading only pays off once there are many columns.
        if n_columns < 64:
            return 1
        return min(8, os.cpu_count() or 1, n_columns)
    return min(requested, n_columns)


def cost_hessian(plant, k, cache):
    """Full (mn) x (mn) Hessian of the cost over vec(K), symmetrized.

    Column ``j*m + i`` holds ``vec`` of the (i, j) block, i.e. columns are
    ordered column-major over the gain entries.  One Lyapunov factorization
    is shared across all gain entries; columns may be computed by a small
    thread pool capped by the ``COMPART_H2_THREADS`` environment variable
    (0 = auto) and are always written in deterministic index order.
    """
    k = as_gain(plant, k)
    m, n = plant.m, plant.n
    solver = DlyapSolver(plant.A - plant.B @ k)
    parts = _shared_parts(plant, k, cache)
    h = np.empty((m * n, m * n))

    def fill(col):
        i, j = col % m, col // m
        h[:, col] = vec(_hessian_column(plant, k, cache, i, j, solver, parts))

    threads = _column_threads(m * n)
    if threads <= 1:
        for col in range(m * n):
            fill(col)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(fill, range(m * n)))
    return 0.5 * (h + h.T)

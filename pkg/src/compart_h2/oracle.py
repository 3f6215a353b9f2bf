"""Independent verification oracles: finite differences, series H2, Riccati.

These deliberately avoid the analytic derivative code paths so they can serve
as cross-checks in tests and in the ``grad-check`` command.
"""

import numpy as np

from .exceptions import ConvergenceError
from .linalg import spectral_radius
from .model import as_gain, closed_loop

FD_STENCIL = ((-2, 1.0), (-1, -8.0), (1, 8.0), (2, -1.0))  # 5-point central


def fd_gradient(f, k, h=1e-5):
    """Entrywise 5-point central differences of a scalar field over gains.

    The step for entry (i, j) is ``h * (1 + |k[i, j]|)``.
    """
    k = np.asarray(k, dtype=float)
    grad = np.zeros_like(k)
    for i in range(k.shape[0]):
        for j in range(k.shape[1]):
            step = h * (1.0 + abs(k[i, j]))
            acc = 0.0
            for offset, weight in FD_STENCIL:
                kp = k.copy()
                kp[i, j] += offset * step
                acc += weight * f(kp)
            grad[i, j] = acc / (12.0 * step)
    return grad


def fd_jacobian(g, k, h=1e-4, symmetrize=False):
    """Column-major Jacobian of a vector field over gains by central differences.

    Column ``j*m + i`` differentiates with respect to gain entry (i, j).  Set
    ``symmetrize=True`` when ``g`` is a gradient field, so the result is a
    Hessian estimate.
    """
    k = np.asarray(k, dtype=float)
    m, n = k.shape
    size = m * n
    jac = np.zeros((np.asarray(g(k)).size, size))
    for j in range(n):
        for i in range(m):
            step = h * (1.0 + abs(k[i, j]))
            acc = np.zeros(jac.shape[0])
            for offset, weight in FD_STENCIL:
                kp = k.copy()
                kp[i, j] += offset * step
                acc += weight * np.asarray(g(kp), dtype=float)
            jac[:, j * m + i] = acc / (12.0 * step)
    if symmetrize:
        jac = 0.5 * (jac + jac.T)
    return jac


def truncated_h2(plant, k, tol=1e-14):
    """Squared H2 norm by direct summation of the impulse-response energy.

    The truncation horizon is chosen from the geometric decay of the
    closed-loop powers so the neglected tail is below ``tol`` relative to the
    leading terms.
    """
    cl = closed_loop(plant, as_gain(plant, k))
    radius = spectral_radius(cl.A_K)
    if radius >= 1.0:
        from .exceptions import NotSchur
        from .linalg import SCHUR_TOL

        raise NotSchur(radius, SCHUR_TOL)
    scale = max(
        1.0, float(np.linalg.norm(cl.C_K)) ** 2 * float(np.linalg.norm(plant.G)) ** 2
    )
    if radius < 1e-12:
        horizon = plant.n + 1  # nilpotent-like: powers vanish quickly
    else:
        horizon = int(np.ceil(np.log(tol / scale) / (2.0 * np.log(radius))))
        horizon = min(max(horizon, plant.n + 1), 200000)
    total = 0.0
    power = plant.G.copy()
    for _ in range(horizon + 1):
        total += float(np.linalg.norm(cl.C_K @ power) ** 2)
        power = cl.A_K @ power
    return total


def riccati_gain(plant, tol=1e-12, max_iter=200000):
    """Unconstrained H2-optimal state-feedback gain by fixed-point iteration.

    Iterates the Riccati map until the fixed-point residual drops below
    ``tol`` (relative).  Serves as an independent stationarity oracle for the
    cost gradient on instances whose optimum is interior.
    """
    a, b = plant.A, plant.B
    q = plant.C.T @ plant.C
    r = plant.D.T @ plant.D
    x = q.copy()
    for _ in range(max_iter):
        gain = np.linalg.solve(r + b.T @ x @ b, b.T @ x @ a)
        x_next = q + a.T @ x @ a - a.T @ x @ b @ gain
        x_next = 0.5 * (x_next + x_next.T)
        if not np.all(np.isfinite(x_next)):
            raise ConvergenceError("Riccati iteration diverged to non-finite values")
        if float(np.linalg.norm(x_next - x)) <= tol * max(
            1.0, float(np.linalg.norm(x))
        ):
            x = x_next
            break
        x = x_next
    else:
        raise ConvergenceError(
            f"Riccati iteration did not reach residual {tol:g} "
            f"within {max_iter} steps"
        )
    return np.linalg.solve(r + b.T @ x @ b, b.T @ x @ a)

"""Dense matrix primitives and discrete Lyapunov solvers.

Everything here operates on plain ``numpy.ndarray`` values.  Vectorization is
column-major throughout; the Hessian assembly in :mod:`compart_h2.h2cost`
relies on that ordering.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .exceptions import ConvergenceError, NotSchur, SingularSystem

# Spectral radii within this margin of 1 are treated as not Schur stable:
# barrier coerciveness makes near-unit-circle iterates numerically explosive.
SCHUR_TOL = 1e-9

# Relative residual allowed on every Lyapunov solve.
LYAP_RESIDUAL_TOL = 1e-10


def kron(a, b):
    """Kronecker product of two dense matrices."""
    return np.kron(np.asarray(a, dtype=float), np.asarray(b, dtype=float))


def vec(m):
    """Stack the columns of ``m`` into a 1-d vector (column-major)."""
    return np.asarray(m, dtype=float).reshape(-1, order="F")


def mat(v, rows, cols):
    """Inverse of :func:`vec`: reshape a vector into ``rows`` x ``cols``."""
    v = np.asarray(v, dtype=float)
    if v.size != rows * cols:
        raise ValueError(f"cannot reshape length-{v.size} vector to {rows}x{cols}")
    return v.reshape(rows, cols, order="F")


def spectral_radius(m):
    """Largest eigenvalue modulus of a square matrix."""
    m = np.asarray(m, dtype=float)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"spectral radius needs a square matrix, got {m.shape}")
    return float(np.max(np.abs(np.linalg.eigvals(m))))


@dataclass
class SymmetricEigen:
    """Spectral decomposition of a symmetric matrix.

    ``eigenvalues`` are sorted ascending and ``eigenvectors`` holds the
    matching orthonormal columns, so ``Q diag(w) Q^T`` reconstructs the input.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def sym_eig(m):
    """Eigendecomposition of a (numerically) symmetric matrix.

    The input is symmetrized as ``(m + m^T)/2`` before decomposition, so mild
    asymmetry from accumulated roundoff is tolerated.
    """
    m = np.asarray(m, dtype=float)
    sym = 0.5 * (m + m.T)
    try:
        w, q = np.linalg.eigh(sym)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise ConvergenceError(f"symmetric eigendecomposition failed: {exc}") from exc
    return SymmetricEigen(eigenvalues=w, eigenvectors=q)


class DlyapSolver:
    """Factorized solver for discrete Lyapunov equations with a fixed map ``f``.

    Solves ``f^T P f - P + q = 0`` (:meth:`solve_transposed`) and
    ``f P f^T - P + q = 0`` (:meth:`solve`) for arbitrary, possibly
    nonsymmetric, right-hand sides ``q``.  Both orientations share one LU
    factorization of the Kronecker system ``f^T (x) f^T - I``, which is the
    dominant cost; reuse this object when solving many equations with the
    same ``f``.
    """

    def __init__(self, f):
        f = np.asarray(f, dtype=float)
        n = f.shape[0]
        if f.shape != (n, n):
            raise ValueError(f"Lyapunov map must be square, got {f.shape}")
        radius = spectral_radius(f)
        if radius >= 1.0 - SCHUR_TOL:
            raise NotSchur(radius, SCHUR_TOL)
        self.f = f
        self.n = n
        try:
            self._lu = lu_factor(np.kron(f.T, f.T) - np.eye(n * n))
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"Kronecker Lyapunov system is singular: {exc}") from exc

    def _solve(self, q, trans):
        q = np.asarray(q, dtype=float)
        if q.shape != (self.n, self.n):
            raise ValueError(f"right-hand side must be {self.n}x{self.n}, got {q.shape}")
        rhs = -q.reshape(-1, order="F")
        sol = lu_solve(self._lu, rhs, trans=trans)
        if not np.all(np.isfinite(sol)):
            raise SingularSystem("Lyapunov solve produced non-finite entries")
        p = sol.reshape(self.n, self.n, order="F")
        if trans == 0:
            resid = self.f.T @ p @ self.f - p + q
        else:
            resid = self.f @ p @ self.f.T - p + q
        scale = max(1.0, float(np.linalg.norm(q)))
        if float(np.linalg.norm(resid)) > LYAP_RESIDUAL_TOL * scale:
            raise SingularSystem(
                "Lyapunov solve residual "
                f"{float(np.linalg.norm(resid)):.3e} exceeds "
                f"{LYAP_RESIDUAL_TOL:g} * max(1, ||q||)"
            )
        return p

    def solve_transposed(self, q):
        """Return ``P`` with ``f^T P f - P + q = 0``."""
        return self._solve(q, trans=0)

    def solve(self, q):
        """Return ``P`` with ``f P f^T - P + q = 0``."""
        return self._solve(q, trans=1)


def solve_dlyap_T(f, q):
    """Solve ``f^T P f - P + q = 0`` for ``P``.

    ``f`` must be Schur stable; ``q`` may be nonsymmetric.  The equation is
    vectorized as ``(f^T (x) f^T - I) vec(P) = -vec(q)`` and solved densely.
    """
    return DlyapSolver(f).solve_transposed(q)


def solve_dlyap(f, q):
    """Solve ``f P f^T - P + q = 0`` for ``P`` (transposed-map variant)."""
    return DlyapSolver(f).solve(q)

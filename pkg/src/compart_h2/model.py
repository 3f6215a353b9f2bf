"""Plant representation, closed-loop assembly, and compartmental predicates."""

from dataclasses import dataclass

import numpy as np

from .linalg import spectral_radius

# Tolerances for the two standing assumptions on (C, D).
ASSUME_TOL = 1e-9
PD_TOL = 1e-12


@dataclass(frozen=True)
class PlantModel:
    """Discrete-time LTI plant ``x+ = Ax + Bu + Gd``, ``y = Cx + Du``.

    Dimensions are inferred from the matrices: ``A`` is n x n, ``B`` is n x m,
    ``C`` is r x n, ``D`` is r x m and ``G`` is n x q.  Construction validates
    shapes and finiteness only; use :func:`validate_plant` for the standing
    assumptions ``D^T C = 0`` and ``D^T D`` positive definite.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    G: np.ndarray
    name: str = ""

    def __post_init__(self):
        for field in ("A", "B", "C", "D", "G"):
            arr = np.atleast_2d(np.asarray(getattr(self, field), dtype=float))
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"plant matrix {field} has non-finite entries")
            object.__setattr__(self, field, arr)
        n = self.A.shape[0]
        if self.A.shape != (n, n):
            raise ValueError(f"A must be square, got {self.A.shape}")
        if self.B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {self.B.shape}")
        if self.C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {self.C.shape}")
        if self.D.shape != (self.C.shape[0], self.B.shape[1]):
            raise ValueError(
                f"D must be {self.C.shape[0]}x{self.B.shape[1]}, got {self.D.shape}"
            )
        if self.G.shape[0] != n:
            raise ValueError(f"G must have {n} rows, got {self.G.shape}")

    @property
    def n(self):
        return self.A.shape[0]

    @property
    def m(self):
        return self.B.shape[1]

    @property
    def r(self):
        return self.C.shape[0]

    @property
    def q(self):
        return self.G.shape[1]


@dataclass(frozen=True)
class ClosedLoop:
    """State and output maps of the loop closed with ``u = -Kx``."""

    A_K: np.ndarray
    C_K: np.ndarray


@dataclass(frozen=True)
class AssumptionViolation:
    assumption: str
    residual: float

    def __str__(self):
        return f"{self.assumption} (residual {self.residual:.3e})"


def as_gain(plant, k):
    """Validate and normalize a feedback gain for ``plant``."""
    k = np.atleast_2d(np.asarray(k, dtype=float))
    if k.shape != (plant.m, plant.n):
        raise ValueError(f"gain must be {plant.m}x{plant.n}, got {k.shape}")
    if not np.all(np.isfinite(k)):
        raise ValueError("gain has non-finite entries")
    return k


def validate_plant(plant):
    """Check the standing assumptions; return a list of violations.

    An empty list means ``D^T C = 0`` holds within ``ASSUME_TOL`` and
    ``D^T D`` is positive definite within ``PD_TOL``.
    """
    violations = []
    dtc = plant.D.T @ plant.C
    cross = float(np.linalg.norm(dtc))
    scale = 1.0 + float(np.linalg.norm(plant.C)) * float(np.linalg.norm(plant.D))
    if cross > ASSUME_TOL * scale:
        violations.append(AssumptionViolation("D^T C != 0", cross))
    dtd = plant.D.T @ plant.D
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (dtd + dtd.T))))
    if min_eig < PD_TOL:
        violations.append(
            AssumptionViolation("D^T D not positive definite", min_eig)
        )
    return violations


def closed_loop(plant, k):
    """Assemble ``A - BK`` and ``C - DK``."""
    k = as_gain(plant, k)
    return ClosedLoop(A_K=plant.A - plant.B @ k, C_K=plant.C - plant.D @ k)


def constraint_stack(plant, k):
    """Stacked constraint values: the closed-loop state map over its residual
    column capacities.

    Returns the (n+1) x n matrix whose top n rows are ``A - BK`` and whose
    bottom row holds ``1 - column sums``; the gain is feasible when every
    entry is nonnegative, strictly feasible when all are positive.
    """
    a_k = plant.A - plant.B @ as_gain(plant, k)
    return np.vstack([a_k, 1.0 - a_k.sum(axis=0)])


def min_slack(plant, k):
    """Smallest entry of the constraint stack; positive iff strictly feasible."""
    return float(constraint_stack(plant, k).min())


def is_compartmental(plant, k, tol=0.0):
    """True iff the closed loop is compartmental within an entrywise ``tol``."""
    return min_slack(plant, k) >= -tol


def replicate(plant, n_copies, mode="blockdiag"):
    """Build the N-fold replicated plant used by the scaling benchmark.

    ``blockdiag`` block-diagonalizes all five matrices, which keeps both
    standing assumptions and makes the replicated cost exactly additive over
    copies.  ``paper_concat`` block-diagonalizes A and B but concatenates C
    and D horizontally and replaces G by the identity of the replicated state
    dimension; for ``n_copies >= 2`` this makes ``D^T D`` singular, which is
    reported as a warning because the solvers never invert it.
    """
    if n_copies < 1:
        raise ValueError("n_copies must be >= 1")
    if mode not in ("blockdiag", "paper_concat"):
        raise ValueError(f"unknown replication mode {mode!r}")
    eye = np.eye(n_copies)
    a_n = np.kron(eye, plant.A)
    b_n = np.kron(eye, plant.B)
    if mode == "blockdiag":
        rep = PlantModel(
            A=a_n,
            B=b_n,
            C=np.kron(eye, plant.C),
            D=np.kron(eye, plant.D),
            G=np.kron(eye, plant.G),
            name=f"{plant.name}_x{n_copies}" if plant.name else f"x{n_copies}",
        )
    else:
        rep = PlantModel(
            A=a_n,
            B=b_n,
            C=np.tile(plant.C, (1, n_copies)),
            D=np.tile(plant.D, (1, n_copies)),
            G=np.eye(plant.n * n_copies),
            name=f"{plant.name}_cat{n_copies}" if plant.name else f"cat{n_copies}",
        )
        violations = validate_plant(rep)
        if violations:
            import warnings

            warnings.warn(
                "replicated plant violates standing assumptions: "
                + "; ".join(str(v) for v in violations),
                RuntimeWarning,
                stacklevel=2,
            )
    return rep


def is_schur(plant, k):
    """True iff the closed-loop state map is Schur stable."""
    return spectral_radius(plant.A - plant.B @ as_gain(plant, k)) < 1.0

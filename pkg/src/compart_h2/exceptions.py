"""Exception types shared across the package."""


class CompartH2Error(Exception):
    """Base class for all errors raised by compart_h2."""


class NotSchur(CompartH2Error):
    """A matrix required to be Schur stable has spectral radius >= 1 - tol."""

    def __init__(self, radius, tol):
        super().__init__(
            f"matrix is not Schur stable: spectral radius {radius:.12g} "
            f"exceeds 1 - {tol:g}"
        )
        self.radius = radius


class SingularSystem(CompartH2Error):
    """A linear system arising from a Lyapunov equation is numerically singular."""


class InfeasiblePoint(CompartH2Error):
    """A gain left the (relaxed) interior of the compartmental constraint set."""


class InfeasibleStart(CompartH2Error):
    """The starting gain handed to a solver is not strictly feasible."""


class LineSearchFailed(CompartH2Error):
    """Backtracking exhausted its budget without a sufficient-decrease step."""


class PhaseOneFailed(CompartH2Error):
    """Slack maximization could not reach the requested constraint slack.

    Carries the best gain found and its slack so callers can decide whether
    a boundary point is still usable under relaxation.
    """

    def __init__(self, best_gain, best_slack, target_slack):
        super().__init__(
            f"phase-I could not reach slack {target_slack:g}; "
            f"best achievable minimum slack was {best_slack:.6g}"
        )
        self.best_gain = best_gain
        self.best_slack = best_slack
        self.target_slack = target_slack


class PlantAssumptionError(CompartH2Error):
    """A plant violates a standing assumption and the caller required validity."""

    def __init__(self, violations):
        super().__init__(
            "plant violates standing assumptions: "
            + "; ".join(str(v) for v in violations)
        )
        self.violations = violations


class ConvergenceError(CompartH2Error):
    """An iterative numerical routine failed to converge."""

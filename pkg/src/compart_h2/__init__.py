"""H2-optimal state feedback with a compartmental closed loop.

Synthesizes static state-feedback gains minimizing the closed-loop H2 norm of
a discrete-time LTI plant while keeping ``A - BK`` elementwise nonnegative
with column sums at most one, using first-order (gradient) and second-order
(modified Newton) log-barrier interior-point methods with exact analytic
derivatives.
"""

from .barrier import BarrierEval, ObjectiveEval, eval_barrier, eval_objective
from .exceptions import (
    CompartH2Error,
    ConvergenceError,
    InfeasiblePoint,
    InfeasibleStart,
    LineSearchFailed,
    NotSchur,
    PhaseOneFailed,
    PlantAssumptionError,
    SingularSystem,
)
from .h2cost import (
    CostCache,
    cost_gradient,
    cost_hessian,
    eval_cost,
    hessian_block,
    vec_cost_gradient,
)
from .initial import StartCheck, check_start, phase1, rank_one_gain
from .io import load_gain, load_plant, save_gain, save_plant, save_report
from .linalg import (
    SymmetricEigen,
    kron,
    mat,
    solve_dlyap,
    solve_dlyap_T,
    spectral_radius,
    sym_eig,
    vec,
)
from .model import (
    ClosedLoop,
    PlantModel,
    closed_loop,
    constraint_stack,
    is_compartmental,
    min_slack,
    replicate,
    validate_plant,
)
from .oracle import fd_gradient, fd_jacobian, riccati_gain, truncated_h2
from .solver import (
    KktResidual,
    SolveReport,
    SolverConfig,
    armijo,
    fipm,
    kkt_residual,
    modify_hessian,
    recover_multiplier,
    sipm,
)

__version__ = "0.1.0"

"""impedfit: estimate, tune, and evaluate gait-cycle impedance controllers.

Fits phase-varying joint impedance (polynomial stiffness and damping
over stance, constants over swing, sectioned equilibrium angles) to
one gait cycle of torque data under positivity, cycle-continuity, and
torque-rate constraints, then evaluates and tunes the result.
"""

from impedfit.kernels import backend_name
from impedfit.impedance import (
    ImpedanceProfile,
    EquilibriumSchedule,
    ImpedanceParameters,
    ConstraintCheck,
    ValidationReport,
    eval_profile,
    profile_curve,
    equilibrium_at,
    equilibrium_curve,
    impedance_torque,
    torque_trajectory,
    joint_power,
    validate,
    params_to_dict,
    params_from_dict,
    save_params,
    load_params,
)
from impedfit.gait_data import (
    GaitCycleData,
    SyntheticSpec,
    GaitDataError,
    MissingColumnError,
    NonMonotonePhaseError,
    InvalidCellError,
    TooFewRowsError,
    load_gait_csv,
    estimate_velocity,
    resample,
    synthesize,
)
from impedfit.estimator import (
    EstimationProblem,
    EstimationResult,
    EstimationError,
    build_problem,
    solve,
    multi_start,
    order_sweep,
    fit_cost,
    lipschitz_margin,
)
from impedfit.qp import (
    QPError,
    QPInfeasibleError,
    QPMaxIterationsError,
    solve_qp,
    projected_gradient_qp,
)
from impedfit.tuning import TuningSpec, tune
from impedfit.reporting import (
    FitMetrics,
    TrendReport,
    metrics,
    trend_report,
    compare_sets,
)
from impedfit import presets

__version__ = "0.1.0"

__all__ = [
    "backend_name",
    "ImpedanceProfile",
    "EquilibriumSchedule",
    "ImpedanceParameters",
    "ConstraintCheck",
    "ValidationReport",
    "eval_profile",
    "profile_curve",
    "equilibrium_at",
    "equilibrium_curve",
    "impedance_torque",
    "torque_trajectory",
    "joint_power",
    "validate",
    "params_to_dict",
    "params_from_dict",
    "save_params",
    "load_params",
    "GaitCycleData",
    "SyntheticSpec",
    "GaitDataError",
    "MissingColumnError",
    "NonMonotonePhaseError",
    "InvalidCellError",
    "TooFewRowsError",
    "load_gait_csv",
    "estimate_velocity",
    "resample",
    "synthesize",
    "EstimationProblem",
    "EstimationResult",
    "EstimationError",
    "build_problem",
    "solve",
    "multi_start",
    "order_sweep",
    "fit_cost",
    "lipschitz_margin",
    "QPError",
    "QPInfeasibleError",
    "QPMaxIterationsError",
    "solve_qp",
    "projected_gradient_qp",
    "TuningSpec",
    "tune",
    "FitMetrics",
    "TrendReport",
    "metrics",
    "trend_report",
    "compare_sets",
    "presets",
    "__version__",
]

"""Shot-budget-aware Bayesian optimization for variational quantum circuits.

The package couples exact GP regression (Matern and angle-periodic
kernels) with two budgeted optimization loops -- vanilla LCB-driven BO
and a low-shot-residual variant that turns many cheap, noisy circuit
measurements into a frozen topological prior -- plus a simulated
shot-noisy objective layer and an ablation experiment harness.
"""

from .acquisition import (
    AcquisitionSpec,
    FrozenMean,
    lcb_value,
    lsr_lcb_value,
    optimize_acquisition,
)
from .engine import (
    BudgetLedger,
    RunOptions,
    RunRecord,
    incumbent,
    read_jsonl,
    run_arm,
    run_lsr_bo,
    run_vanilla_bo,
)
from .gp import FactorizationError, FitConfig, FitResult, GpModel, fit_gp, fit_hyperparameters
from .harness import (
    ArmConfig,
    ExperimentConfig,
    RegretCurve,
    compare_arms,
    compute_regret,
    load_experiment_config,
    run_experiment,
)
from .kernels import KernelSpec, kernel_eval, kernel_matrix, wrap_angles
from .objective import (
    CircuitObjective,
    ShotSample,
    SyntheticObjective,
    evaluate,
    load_objective,
    objective_from_dict,
    sample_values,
)
from .stats import RankSumResult, rank_sum_test

__version__ = "0.1.0"

__all__ = [
    "AcquisitionSpec",
    "ArmConfig",
    "BudgetLedger",
    "CircuitObjective",
    "ExperimentConfig",
    "FactorizationError",
    "FitConfig",
    "FitResult",
    "FrozenMean",
    "GpModel",
    "KernelSpec",
    "RankSumResult",
    "RegretCurve",
    "RunOptions",
    "RunRecord",
    "ShotSample",
    "SyntheticObjective",
    "compare_arms",
    "compute_regret",
    "evaluate",
    "fit_gp",
    "fit_hyperparameters",
    "incumbent",
    "kernel_eval",
    "kernel_matrix",
    "lcb_value",
    "load_experiment_config",
    "load_objective",
    "lsr_lcb_value",
    "objective_from_dict",
    "optimize_acquisition",
    "read_jsonl",
    "rank_sum_test",
    "run_arm",
    "run_experiment",
    "run_lsr_bo",
    "run_vanilla_bo",
    "sample_values",
    "wrap_angles",
]

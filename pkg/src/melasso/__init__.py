"""Sparse regression with additive covariate measurement error.

Naive lasso, corrected (non-convex) lasso, conditional-scores lasso for
logistic and Poisson models, selection diagnostics, and a simulation
harness.
"""

from .corrected import (
    CorrectedConfig, CorrectedProblem, corrected_lasso_constrained, corrected_lasso_regularized,
    corrected_multistart, kkt_residual_corrected,
)
from .covariance import CovarianceSpec, realize
from .diagnostics import (
    DiagnosticsReport, SelectionMetrics, beta_min_condition, detectable_set, diagnose, ic_cl, ic_me,
    mec_residual, selection_metrics,
)
from .errors import (
    ConfigError, ContractError, MelassoError, NumericError, SimulationError, ValidationError,
)
from .experiment import ExperimentConfig, FitRequest, fit_arrays, fit_file, run_experiment, run_roc
from .glm import GlmConfig, conditional_score, conditional_score_lasso, naive_glm_lasso
from .lasso import LassoConfig, kkt_residual_naive, lambda_grid, lambda_max, lasso_path, naive_lasso
from .projection import L1Ball, project_l1
from .report import ReplicateRecord, aggregate, fp_reduction
from .results import FitResult
from .simulate import SimulatedDataset, TrueModel, draw_model, export_dataset, simulate_glm, simulate_linear
from .tuning import CvPlan, cv_select, elbow_grid, elbow_select, kappa_grid

__version__ = "0.1.0"

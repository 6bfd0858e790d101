"""Proximal stochastic Newton-type optimizers for L1-regularized model learning."""

from .prox import RegularizerConfig, l1_norm, nnz, soft_threshold
from .datasets import (
    LabeledDataset,
    MiniBatchPartition,
    MulticlassDataset,
    load_libsvm,
    partition,
    synth_logistic,
    synth_multiclass,
)
from .objectives import LogisticComponent, MlpComponent, full_objective, make_components
from .hessian import (
    CurvatureHistory,
    DenseHessian,
    ScaledIdentity,
    bfgs_rebuild,
    bfgs_rebuild_subspace,
    constant_diagonal,
)
from .surrogate import QuadraticSurrogate, SharedSubspace, SubspaceSurrogate
from .subproblem import SubproblemConfig, SubproblemError, solve_lasso, solve_lasso_inexact
from .optimizers import (
    DivergedError,
    Proxtone,
    ProxtonePlus,
    ProxSAG,
    ProxSGD,
    RunTrace,
    TraceRow,
    run,
)
from .harness import ExperimentConfig, compare, run_experiment, sweep_eta
from .estimator import SparseLogisticClassifier

__version__ = "0.1.0"

__all__ = [
    "RegularizerConfig", "l1_norm", "nnz", "soft_threshold",
    "LabeledDataset", "MiniBatchPartition", "MulticlassDataset",
    "load_libsvm", "partition", "synth_logistic", "synth_multiclass",
    "LogisticComponent", "MlpComponent", "full_objective", "make_components",
    "CurvatureHistory", "DenseHessian", "ScaledIdentity",
    "bfgs_rebuild", "bfgs_rebuild_subspace", "constant_diagonal",
    "QuadraticSurrogate", "SharedSubspace", "SubspaceSurrogate",
    "SubproblemConfig", "SubproblemError", "solve_lasso", "solve_lasso_inexact",
    "DivergedError", "Proxtone", "ProxtonePlus", "ProxSAG", "ProxSGD",
    "RunTrace", "TraceRow", "run",
    "ExperimentConfig", "compare", "run_experiment", "sweep_eta",
    "SparseLogisticClassifier",
]

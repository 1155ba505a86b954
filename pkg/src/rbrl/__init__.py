"""Joint binary-relevance and ranking-loss multi-label classifier with trace-norm regularization."""

from .core import (Dataset, HyperParams, KernelModel, LabelPredictions, LinearModel,
                   PredictionScores, augment_bias, sign, validate_dataset)
from .kernel import KernelSpec, cross_gram, gram
from .metrics import EvalReport, evaluate_all
from .solver import SolveTrace, fit, fit_kernel, fit_linear, predict

__version__ = "0.1.0"

__all__ = [
    "Dataset", "HyperParams", "KernelModel", "KernelSpec", "LabelPredictions", "LinearModel",
    "PredictionScores", "SolveTrace", "EvalReport", "augment_bias", "cross_gram", "evaluate_all",
    "fit", "fit_kernel", "fit_linear", "gram", "predict", "sign", "validate_dataset",
]

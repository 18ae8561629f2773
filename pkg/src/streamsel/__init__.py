"""Online group feature selection with streaming baselines and a k-NN evaluation harness."""
from .baselines import alpha_investing_run, grafting_run
from .classify import cross_validate, knn_predict
from .data import (
    Dataset,
    FeatureStream,
    GroupPlan,
    load_dataset,
    make_group_plan,
    normalize_features,
    stream_groups,
)
from .errors import ConfigError, DataError, StreamselError
from .harness import ExperimentConfig, ExperimentReport, run_experiment
from .lasso import RegressionProblem, SparseSolution, lasso_solve, support
from .ogfs import OgfsConfig, SelectionResult, check_stop, inter_group_select, ogfs_run
from .synthetic import make_planted

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "DataError", "Dataset", "ExperimentConfig", "ExperimentReport",
    "FeatureStream", "GroupPlan", "OgfsConfig", "RegressionProblem", "SelectionResult",
    "SparseSolution", "StreamselError", "alpha_investing_run", "check_stop", "cross_validate",
    "grafting_run", "inter_group_select", "knn_predict", "lasso_solve", "load_dataset",
    "make_group_plan", "make_planted", "normalize_features", "ogfs_run", "run_experiment",
    "stream_groups", "support",
]

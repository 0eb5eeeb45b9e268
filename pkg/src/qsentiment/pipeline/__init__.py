"""Dataset ingestion, experiment orchestration and reporting."""
from .config import ExperimentConfig, config_from_dict, load_config
from .data import LabeledDocument, load_dataset, train_test_split
from .experiment import FitLog, FittedPipeline, prepare, run_experiment, run_sweep
from .metrics import MetricsReport, SplitMetrics, compute_metrics
from .report import emit_report, load_reports, render_report

__all__ = [
    "ExperimentConfig", "config_from_dict", "load_config",
    "LabeledDocument", "load_dataset", "train_test_split",
    "FitLog", "FittedPipeline", "prepare", "run_experiment", "run_sweep",
    "MetricsReport", "SplitMetrics", "compute_metrics",
    "emit_report", "load_reports", "render_report",
]

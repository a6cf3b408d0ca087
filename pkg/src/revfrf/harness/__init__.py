"""End-user harness: datasets, metrics, cost model, experiment sweeps."""

from revfrf.harness.dataset import DatasetSpec, PartitionPlan, ingest_csv, synth_dataset
from revfrf.harness.metrics import MetricsReport, compute_metrics
from revfrf.harness.experiment import ExperimentConfig, run_experiment

__all__ = [
    "DatasetSpec",
    "PartitionPlan",
    "ingest_csv",
    "synth_dataset",
    "MetricsReport",
    "compute_metrics",
    "ExperimentConfig",
    "run_experiment",
]

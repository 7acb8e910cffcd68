"""Experiment harness: metrics, sweep grids, report emission, and the toy
encoders that make everything runnable at desk scale."""

from .metrics import compute_metrics
from .reports import (REFERENCE_ROWS, MetricReport, ReferenceRow, emit_report,
                      reports_from_json, summarize)
from .sweep import (SweepConfig, run_compression_sweep,
                    run_distillation_comparison, split_records)
from .toy import random_lookup_embeddings, toy_teacher_embeddings

__all__ = [
    "compute_metrics", "REFERENCE_ROWS", "MetricReport", "ReferenceRow",
    "emit_report", "reports_from_json", "summarize",
    "SweepConfig", "run_compression_sweep", "run_distillation_comparison",
    "split_records", "random_lookup_embeddings", "toy_teacher_embeddings",
]

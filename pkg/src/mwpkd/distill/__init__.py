"""Distillation: temperature-scaled MSE between teacher and student vectors,
the Adam optimizer, and the two-stage training procedure."""

from .loss import kd_loss
from .adam import AdamConfig, OptimizerState, adam_step, clip_global_norm, init_state
from .trainer import DistillConfig, TrainResult, train_distill

__all__ = [
    "kd_loss", "AdamConfig", "OptimizerState", "adam_step", "init_state",
    "clip_global_norm", "DistillConfig", "TrainResult", "train_distill",
]

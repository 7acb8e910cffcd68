"""The small transformer encoder: embedding layer plus three post-norm
transformer layers, with exact reverse-mode gradients."""

from .model import (GradientSet, StudentConfig, StudentParams, ffn,
                    init_student, multi_head_attention, param_count,
                    scaled_dot_attention, sinusoidal_encoding, student_backward,
                    student_forward)
from .serialize import read_student, write_student

__all__ = [
    "GradientSet", "StudentConfig", "StudentParams", "ffn", "init_student",
    "multi_head_attention", "param_count", "scaled_dot_attention",
    "sinusoidal_encoding", "student_backward", "student_forward",
    "read_student", "write_student",
]

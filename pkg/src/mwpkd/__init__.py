"""mwpkd: embedding compression, student distillation, and MWP task evaluation.

The pipeline: a teacher encoder produces per-token vectors for math word
problems; a compressor reduces them to a target width; a small transformer
student is distilled against the compressed targets; relation / equation /
answer / POS heads score any of the three vector sources on downstream tasks.

Everything runs at desk scale on synthetic data. Hot numeric kernels are
numba-jitted when numba is importable; set MWPKD_BACKEND=numpy to force the
pure-numpy fallback (see mwpkd.backend).
"""

__version__ = "0.1.0"

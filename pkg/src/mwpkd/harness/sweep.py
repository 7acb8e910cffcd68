"""Experiment grids: the compression sweep and the distilled-versus-fresh
student comparison. Every grid cell owns a seed derived from the base seed
and its position, so reruns are reproducible cell by cell."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..compress import fit_compressor
from ..decode.train import HeadConfig, init_linear_compressor, train_decoder
from ..errors import ConfigError, ParamError
from ..student.model import StudentParams, student_forward
from .reports import MetricReport, attach_references


@dataclass
class SweepConfig:
    methods: list[str] = field(default_factory=lambda: ["PCA"])
    dims: list[int] = field(default_factory=lambda: [64])
    tasks: list[str] = field(default_factory=lambda: ["RELATION"])
    seed: int = 0
    epochs: int = 20
    learning_rate: float = 1e-2
    batch_size: int = 0
    train_fraction: float = 0.8
    n_neighbors: int = 10
    eval_every: int = 1
    max_depth: int = 6
    qran_hidden: int | None = None

    def cells(self):
        for mi, method in enumerate(self.methods):
            for di, dim in enumerate(self.dims):
                for ti, task in enumerate(self.tasks):
                    index = (mi * len(self.dims) + di) * len(self.tasks) + ti
                    yield index, method, dim, task


def split_records(records, train_fraction: float, seed: int):
    """Deterministic shuffled split into (train, eval)."""
    if not (0.0 < train_fraction <= 1.0):
        raise ParamError(f"train_fraction={train_fraction} not in (0, 1]")
    order = np.random.default_rng(seed).permutation(len(records))
    cut = max(1, int(round(train_fraction * len(records))))
    train = [records[i] for i in order[:cut]]
    eval_ = [records[i] for i in order[cut:]] or train
    return train, eval_


def _token_matrix(source, records) -> np.ndarray:
    """Stack every token vector of the given records (for compressor fits)."""
    mats = []
    for rec in records:
        if isinstance(source, StudentParams):
            mats.append(student_forward(source, rec.token_ids))
        else:
            mats.append(source.matrix_for(rec.id).astype(np.float64))
    return np.vstack(mats)


def run_compression_sweep(cfg: SweepConfig, data, encoder_source
                          ) -> list[MetricReport]:
    """One report per (method, dim, task) cell against a fixed encoder."""
    if not (cfg.methods and cfg.dims and cfg.tasks):
        raise ParamError("sweep grid is empty")
    data = list(data)
    train, eval_ = split_records(data, cfg.train_fraction, cfg.seed)
    pool = _token_matrix(encoder_source, train)

    reports = []
    for index, method, dim, task in cfg.cells():
        cell_seed = cfg.seed + 1000 * (index + 1)
        m = method.upper()
        if m == "LINEAR":
            compressor = init_linear_compressor(pool.shape[1], dim,
                                                seed=cell_seed)
        else:
            compressor = fit_compressor(m, pool, dim, seed=cell_seed,
                                        n_neighbors=cfg.n_neighbors)
        head_cfg = HeadConfig(learning_rate=cfg.learning_rate,
                              epochs=cfg.epochs, batch_size=cfg.batch_size,
                              seed=cell_seed, eval_every=cfg.eval_every,
                              max_depth=cfg.max_depth,
                              qran_hidden=cfg.qran_hidden)
        tic = time.perf_counter()
        result = train_decoder(task, encoder_source, train, head_cfg,
                               eval_data=eval_, compressor=compressor)
        met = result.metrics
        report = MetricReport(
            task=task.upper(), method=m, dim=dim, distilled=False,
            seed=cell_seed,
            initial_accuracy=met["initial_accuracy"],
            final_accuracy=met["final_accuracy"],
            curve=met["curve"], epochs=met["epochs"],
            wall_ms=(time.perf_counter() - tic) * 1e3)
        reports.append(attach_references(report))
    return reports


def run_distillation_comparison(cfg: SweepConfig, data,
                                distilled: StudentParams,
                                fresh: StudentParams
                                ) -> list[MetricReport]:
    """Identical downstream training for a distilled and a fresh student."""
    if distilled.cfg.__dict__ != fresh.cfg.__dict__:
        raise ConfigError(
            f"architecture mismatch: {distilled.cfg} vs {fresh.cfg}")
    data = list(data)
    train, eval_ = split_records(data, cfg.train_fraction, cfg.seed)

    reports = []
    for arm, student in (("distilled", distilled), ("fresh", fresh)):
        for ti, task in enumerate(cfg.tasks):
            # head seeds depend on the task only, so both arms train
            # identically initialized heads
            head_cfg = HeadConfig(learning_rate=cfg.learning_rate,
                                  epochs=cfg.epochs,
                                  batch_size=cfg.batch_size,
                                  seed=cfg.seed + 17 * (ti + 1),
                                  eval_every=cfg.eval_every,
                                  max_depth=cfg.max_depth)
            tic = time.perf_counter()
            result = train_decoder(task, student, train, head_cfg,
                                   eval_data=eval_)
            met = result.metrics
            report = MetricReport(
                task=task.upper(), method="student", dim=student.cfg.d_model,
                distilled=(arm == "distilled"), seed=head_cfg.seed,
                initial_accuracy=met["initial_accuracy"],
                final_accuracy=met["final_accuracy"],
                curve=met["curve"], epochs=met["epochs"],
                wall_ms=(time.perf_counter() - tic) * 1e3)
            reports.append(attach_references(report))
    return reports

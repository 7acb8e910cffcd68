"""Head training for the three evaluation tasks.

The encoder under test is either a frozen embedding set or a student whose
parameters may be frozen or trainable; an optional compressor sits in
between (a fitted projection applied once, or a jointly trained linear map).
Training is full-batch by default and deterministic for a fixed seed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .. import autograd as ag
from ..compress import Projection, apply_projection
from ..errors import (AlignmentError, DimMismatchError, LabelError,
                      ParamError)
from ..distill.adam import AdamConfig, adam_step, clip_global_norm, init_state
from ..student.model import StudentParams, build_forward, student_forward
from ..postags import tags_to_indices
from . import pos as pos_mod
from . import qran as qran_mod
from . import tree as tree_mod
from .expr import parse_prefix, to_prefix


def record_pos_indices(rec) -> np.ndarray:
    return tags_to_indices(rec.pos_tags)

TASKS = ("RELATION", "EQUATION", "POS")


@dataclass
class HeadConfig:
    learning_rate: float = 1e-2
    epochs: int = 50
    batch_size: int = 0          # 0 means full batch
    seed: int = 0
    encoder_trainable: bool = False
    eval_every: int = 1
    max_depth: int = 6
    constants: tuple = tree_mod.DEFAULT_CONSTANTS
    qran_hidden: int | None = None
    grad_clip: float = 5.0


@dataclass
class HeadResult:
    head: object
    metrics: dict
    linear: dict[str, np.ndarray] | None = None


def init_linear_compressor(in_dim: int, out_dim: int,
                           seed: int = 0) -> dict[str, np.ndarray]:
    """Trainable linear map usable as the compressor argument of
    train_decoder; its parameters join the head's optimizer."""
    rng = np.random.default_rng(seed)
    limit = np.sqrt(6.0 / (in_dim + out_dim))
    return {"w": rng.uniform(-limit, limit, size=(in_dim, out_dim)),
            "b": np.zeros(out_dim)}


@dataclass
class _Encoder:
    """Resolves per-record token vectors for every source/compressor combo."""
    source: object
    compressor: object = None       # None | Projection | {"w": ..., "b": ...}
    _cache: dict = field(default_factory=dict)

    def trainable_student(self, cfg: HeadConfig) -> bool:
        return isinstance(self.source, StudentParams) and cfg.encoder_trainable

    def raw(self, rec) -> np.ndarray:
        key = rec.id
        if key not in self._cache:
            if isinstance(self.source, StudentParams):
                self._cache[key] = student_forward(self.source, rec.token_ids)
            else:
                try:
                    mat = self.source.matrix_for(rec.id)
                except KeyError:
                    raise AlignmentError(f"no embedding for record {rec.id!r}")
                if mat.shape[0] != len(rec.tokens):
                    raise AlignmentError(
                        f"record {rec.id!r}: {len(rec.tokens)} tokens vs "
                        f"{mat.shape[0]} embedding rows")
                self._cache[key] = mat.astype(np.float64)
        return self._cache[key]

    def invalidate(self) -> None:
        self._cache.clear()

    def out_dim(self, rec) -> int:
        if isinstance(self.compressor, Projection):
            return self.compressor.out_dim
        if isinstance(self.compressor, dict):
            return self.compressor["w"].shape[1]
        return self.raw(rec).shape[1]

    def vectors(self, rec) -> np.ndarray:
        V = self.raw(rec)
        if isinstance(self.compressor, Projection):
            return apply_projection(self.compressor, V)
        if isinstance(self.compressor, dict):
            return V @ self.compressor["w"] + self.compressor["b"]
        return V

    def vectors_graph(self, rec, student_t, lin_t) -> ag.Tensor:
        if student_t is not None:
            src = self.source
            v = build_forward(student_t, src.positional_encoding,
                              np.asarray(rec.token_ids, dtype=np.intp), src.cfg)
        else:
            v = ag.const(self.raw(rec))
        if lin_t is not None:
            return ag.add(ag.matmul(v, lin_t["head_linear.w"]),
                          lin_t["head_linear.b"])
        if isinstance(self.compressor, Projection):
            return ag.const(self.vectors(rec))
        return v


def _check_labels(task: str, data) -> None:
    for rec in data:
        if task == "RELATION" and rec.relation_label not in (0, 1):
            raise LabelError(f"record {rec.id!r} lacks a relation label")
        if task == "EQUATION" and not rec.equation_prefix:
            raise LabelError(f"record {rec.id!r} lacks an equation")
        if task == "POS" and len(rec.pos_tags) != len(rec.tokens):
            raise LabelError(f"record {rec.id!r} lacks aligned POS tags")


def _init_head(task: str, d: int, cfg: HeadConfig):
    if task == "RELATION":
        return qran_mod.init_qran(d, h=cfg.qran_hidden, seed=cfg.seed)
    if task == "EQUATION":
        return tree_mod.init_tree_decoder(d, constants=cfg.constants,
                                          seed=cfg.seed)
    return pos_mod.init_pos_head(d, seed=cfg.seed)


def evaluate_head(task: str, head, encoder: _Encoder, data,
                  cfg: HeadConfig) -> float:
    """Task accuracy of the current head over a record list."""
    good = 0
    total = 0
    for rec in data:
        V = encoder.vectors(rec)
        if task == "RELATION":
            N = qran_mod.quantity_vectors(V, rec.quantity_indices)
            v_g, _ = qran_mod.qran_goal_vector(V, N, head)
            pred = 1 if qran_mod.qran_predict(v_g, head) >= 0.5 else 0
            good += int(pred == rec.relation_label)
            total += 1
        elif task == "EQUATION":
            out = tree_mod.tree_decode(V, rec.quantity_indices, head,
                                       max_depth=cfg.max_depth)
            good += int(to_prefix(out.tree) == list(rec.equation_prefix))
            total += 1
        else:
            probs = pos_mod.pos_predict(V, head)
            pred = probs.argmax(axis=1)
            gold = record_pos_indices(rec)
            good += int(np.sum(pred == gold))
            total += len(gold)
    return good / total if total else 0.0


def _batch_loss(task: str, head, encoder: _Encoder, batch, cfg: HeadConfig,
                pt, student_t, lin_t) -> ag.Tensor:
    if task == "RELATION":
        logits = []
        labels = []
        for rec in batch:
            V = encoder.vectors_graph(rec, student_t, lin_t)
            v_g, _ = qran_mod.goal_graph(V, rec.quantity_indices, pt)
            logits.append(qran_mod.logit_graph(v_g, pt))
            labels.append(rec.relation_label)
        return ag.bce_with_logits_vec(ag.stack_vec(logits), labels)
    if task == "EQUATION":
        total = None
        nodes = 0
        for rec in batch:
            V = encoder.vectors_graph(rec, student_t, lin_t)
            gold = parse_prefix(list(rec.equation_prefix))
            part, count = tree_mod.teacher_forced_loss(
                V, rec.quantity_indices, gold, head, pt)
            total = part if total is None else ag.add(total, part)
            nodes += count
        return ag.scale(total, 1.0 / nodes)
    total = None
    tokens = 0
    for rec in batch:
        V = encoder.vectors_graph(rec, student_t, lin_t)
        ce = ag.cross_entropy_rows(pos_mod.logits_graph(V, pt),
                                   record_pos_indices(rec))
        n = len(rec.tokens)
        part = ag.scale(ce, float(n))
        total = part if total is None else ag.add(total, part)
        tokens += n
    return ag.scale(total, 1.0 / tokens)


def train_decoder(task: str, source, data, cfg: HeadConfig | None = None,
                  eval_data=None, compressor=None) -> HeadResult:
    """Train one task head against an encoder source.

    source is an EmbeddingSet or a StudentParams; compressor is None, a
    fitted Projection, or the string "linear-joint" for a trainable map onto
    the head width given by cfg (see linear_out_dim below).
    """
    cfg = cfg or HeadConfig()
    task = task.upper()
    if task not in TASKS:
        raise ParamError(f"unknown task {task!r}; expected one of {TASKS}")
    data = list(data)
    if not data:
        raise ParamError("no training records")
    _check_labels(task, data)
    eval_data = list(eval_data) if eval_data is not None else data
    _check_labels(task, eval_data)

    encoder = _Encoder(source=source, compressor=compressor)
    d = encoder.out_dim(data[0])
    if isinstance(compressor, Projection):
        raw_d = encoder.raw(data[0]).shape[1]
        if compressor.in_dim != raw_d:
            raise DimMismatchError(
                f"compressor in_dim {compressor.in_dim} vs encoder dim {raw_d}")

    head = _init_head(task, d, cfg)
    named: dict[str, np.ndarray] = dict(head.tensors())
    linear = compressor if isinstance(compressor, dict) else None
    if linear is not None:
        named.update({"head_linear.w": linear["w"], "head_linear.b": linear["b"]})
    trainable_student = encoder.trainable_student(cfg)
    if trainable_student:
        named.update(source.tensors)

    opt = AdamConfig(learning_rate=cfg.learning_rate)
    state = init_state(named)
    rng = np.random.default_rng(cfg.seed)

    t0 = time.perf_counter()
    initial = evaluate_head(task, head, encoder, eval_data, cfg)
    curve: list[float] = []
    losses: list[float] = []
    n = len(data)
    bs = cfg.batch_size if cfg.batch_size > 0 else n

    for epoch in range(cfg.epochs):
        order = rng.permutation(n)
        epoch_loss = 0.0
        nb = 0
        for b0 in range(0, n, bs):
            batch = [data[i] for i in order[b0:b0 + bs]]
            pt = {k: ag.param(v, k) for k, v in head.tensors().items()}
            lin_t = None
            if linear is not None:
                lin_t = {"head_linear.w": ag.param(linear["w"]),
                         "head_linear.b": ag.param(linear["b"])}
            student_t = None
            if trainable_student:
                student_t = {k: ag.param(v, k) for k, v in source.tensors.items()}

            loss = _batch_loss(task, head, encoder, batch, cfg, pt,
                               student_t, lin_t)
            ag.backward(loss)

            grads = {}
            for k, tt in pt.items():
                grads[k] = tt.grad if tt.grad is not None else np.zeros_like(tt.data)
            if lin_t is not None:
                grads["head_linear.w"] = lin_t["head_linear.w"].grad
                grads["head_linear.b"] = lin_t["head_linear.b"].grad
            if student_t is not None:
                for k, tt in student_t.items():
                    grads[k] = (tt.grad if tt.grad is not None
                                else np.zeros_like(tt.data))
            clip_global_norm(grads, cfg.grad_clip)
            adam_step(named, grads, state, opt)
            head.update_from(named)
            if linear is not None:
                linear = {"w": named["head_linear.w"], "b": named["head_linear.b"]}
            if trainable_student:
                encoder.invalidate()
            epoch_loss += float(loss.data)
            nb += 1
        losses.append(epoch_loss / nb)
        if (epoch + 1) % cfg.eval_every == 0 or epoch == cfg.epochs - 1:
            curve.append(evaluate_head(task, head, encoder, eval_data, cfg))
        else:
            curve.append(curve[-1] if curve else initial)

    final = curve[-1] if curve else initial
    metrics = {
        "task": task,
        "initial_accuracy": initial,
        "final_accuracy": final,
        "curve": curve,
        "losses": losses,
        "epochs": cfg.epochs,
        "seed": cfg.seed,
        "wall_ms": (time.perf_counter() - t0) * 1e3,
    }
    return HeadResult(head=head, metrics=metrics, linear=linear)

"""Two-stage distillation.

Stage 1 trains the freshly initialized student against compressed targets
from the first embedding file; stage 2 continues from the stage-1 parameters
against the second file's targets. Targets for fitted compressors are
projected once up front; in linear-joint mode the compressing map is trained
with the same optimizer as the student. Per-token MSE is averaged over every
real token element in the batch.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field

import numpy as np

from .. import autograd as ag
from .._io import write_atomic_text
from ..compress import Projection, apply_projection
from ..corpus.emb_io import EmbeddingSet, read_embeddings
from ..errors import DimMismatchError, ParamError
from ..student.model import StudentParams, build_forward
from .adam import AdamConfig, adam_step, clip_global_norm, init_state

LINEAR_JOINT = "linear-joint"


@dataclass
class DistillConfig:
    stage1_path: str | None = None
    stage2_path: str | None = None
    temperature: float = 1.0
    learning_rate: float = 1e-3
    adam_beta1: float = 0.9
    adam_beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 8
    max_steps: int | None = None     # per stage; otherwise epochs applies
    epochs: int = 10
    seed: int = 0
    compressor: Projection | str | None = None
    grad_clip: float = 5.0
    log_path: str | None = None

    def validate(self) -> None:
        if self.temperature <= 0:
            raise ParamError("temperature must be positive")
        if self.learning_rate <= 0:
            raise ParamError("learning_rate must be positive")
        if self.batch_size < 1:
            raise ParamError("batch_size must be >= 1")


@dataclass
class TrainResult:
    params: StudentParams
    log: list[dict] = field(default_factory=list)
    linear: dict[str, np.ndarray] | None = None


def _stage_problems(es: EmbeddingSet, cfg: DistillConfig, d_model: int):
    """Token ids plus (possibly compressed) target matrices for one stage."""
    comp = cfg.compressor
    if not es.problems:
        raise ParamError("stage embedding file holds no problems")
    if comp is not None and comp != LINEAR_JOINT and comp.out_dim != d_model:
        raise DimMismatchError(
            f"compressor out_dim {comp.out_dim} vs student d_model {d_model}")
    problems = []
    for p in es.problems:
        if not p.token_ids:
            raise DimMismatchError(f"problem {p.id!r} has no token ids in "
                                   f"the sidecar")
        mat = p.matrix.astype(np.float64)
        if comp is None or comp == LINEAR_JOINT:
            pass  # raw; joint mode compresses inside the graph
        else:
            if es.dim != comp.in_dim:
                raise DimMismatchError(
                    f"embedding dim {es.dim} vs compressor in_dim {comp.in_dim}")
            mat = apply_projection(comp, mat)
        problems.append((np.asarray(p.token_ids, dtype=np.intp), mat))

    if comp is None and problems[0][1].shape[1] != d_model:
        raise DimMismatchError(
            f"stage file dim {problems[0][1].shape[1]} vs student "
            f"d_model {d_model}")
    return problems


def _init_linear(in_dim: int, out_dim: int, seed: int) -> dict[str, np.ndarray]:
    rng = np.random.default_rng(seed)
    limit = np.sqrt(6.0 / (in_dim + out_dim))
    return {"kd_linear.w": rng.uniform(-limit, limit, size=(in_dim, out_dim)),
            "kd_linear.b": np.zeros(out_dim)}


def train_distill(student: StudentParams, cfg: DistillConfig) -> TrainResult:
    """Run the configured stages; the log carries one row per step plus a
    parameter-checksum row at each stage boundary."""
    cfg.validate()
    if not cfg.stage1_path:
        raise ParamError("stage1_path is required")

    params = student.copy()
    joint = cfg.compressor == LINEAR_JOINT
    linear: dict[str, np.ndarray] | None = None
    all_named = dict(params.tensors)
    if joint:
        es1 = read_embeddings(cfg.stage1_path)
        linear = _init_linear(es1.dim, params.cfg.d_model, cfg.seed)
        all_named.update(linear)
    opt_cfg = AdamConfig(cfg.learning_rate, cfg.adam_beta1, cfg.adam_beta2,
                         cfg.adam_eps)
    state = init_state(all_named)
    log: list[dict] = []
    step = 0

    stages = [(1, cfg.stage1_path)]
    if cfg.stage2_path:
        stages.append((2, cfg.stage2_path))

    for stage_no, path in stages:
        es = read_embeddings(path)
        problems = _stage_problems(es, cfg, params.cfg.d_model)
        if joint and es.dim != linear["kd_linear.w"].shape[0]:
            raise DimMismatchError(
                f"stage {stage_no} dim {es.dim} does not match the joint "
                f"linear map input {linear['kd_linear.w'].shape[0]}")
        if stage_no == 2:
            log.append({"step": step, "stage": 2, "loss": None,
                        "lr": cfg.learning_rate, "wall_ms": 0.0,
                        "param_checksum": params.checksum()})
        step = _run_stage(params, linear, problems, cfg, opt_cfg, state, log,
                          stage_no, step)
        log.append({"step": step, "stage": stage_no, "loss": None,
                    "lr": cfg.learning_rate, "wall_ms": 0.0,
                    "param_checksum": params.checksum()})

    if cfg.log_path:
        write_atomic_text(cfg.log_path,
                          "\n".join(json.dumps(r) for r in log) + "\n")
    return TrainResult(params=params, log=log, linear=linear)


def _run_stage(params: StudentParams, linear, problems, cfg: DistillConfig,
               opt_cfg: AdamConfig, state, log, stage_no: int,
               step: int) -> int:
    n = len(problems)
    rng = np.random.default_rng(cfg.seed + 7919 * stage_no)
    steps_per_epoch = max(1, (n + cfg.batch_size - 1) // cfg.batch_size)
    budget = (cfg.max_steps if cfg.max_steps is not None
              else cfg.epochs * steps_per_epoch)
    t = cfg.temperature

    done = 0
    while done < budget:
        order = rng.permutation(n)
        for b0 in range(0, n, cfg.batch_size):
            if done >= budget:
                break
            tic = time.perf_counter()
            batch = [problems[i] for i in order[b0:b0 + cfg.batch_size]]

            lifted = {k: ag.param(v, k) for k, v in params.tensors.items()}
            lin_t = ({k: ag.param(v, k) for k, v in linear.items()}
                     if linear is not None else None)
            total = None
            count = 0
            for ids, target in batch:
                hidden = build_forward(lifted, params.positional_encoding,
                                       ids, params.cfg)
                if lin_t is not None:
                    proj = ag.add(ag.matmul(ag.const(target),
                                            lin_t["kd_linear.w"]),
                                  lin_t["kd_linear.b"])
                    diff = ag.sub(ag.scale(hidden, 1.0 / t),
                                  ag.scale(proj, 1.0 / t))
                    part = ag.sum_all(ag.mul(diff, diff))
                    count += hidden.data.size
                else:
                    part = ag.sq_error_sum(ag.scale(hidden, 1.0 / t),
                                           target / t)
                    count += target.size
                total = part if total is None else ag.add(total, part)
            loss = ag.scale(total, 1.0 / count)
            ag.backward(loss)

            grads = {k: (tt.grad if tt.grad is not None
                         else np.zeros_like(tt.data))
                     for k, tt in lifted.items()}
            if lin_t is not None:
                grads.update({k: (tt.grad if tt.grad is not None
                                  else np.zeros_like(tt.data))
                              for k, tt in lin_t.items()})
            clip_global_norm(grads, cfg.grad_clip)

            named = dict(params.tensors)
            if linear is not None:
                named.update(linear)
            adam_step(named, grads, state, opt_cfg)

            done += 1
            step += 1
            log.append({"step": step, "stage": stage_no,
                        "loss": float(loss.data), "lr": cfg.learning_rate,
                        "wall_ms": (time.perf_counter() - tic) * 1e3})
    return step

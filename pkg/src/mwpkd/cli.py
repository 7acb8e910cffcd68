"""Command-line entry point.

Conventions: long-form flags only; diagnostics go to stderr; machine output
goes to files or stdout; every stochastic subcommand is fully determined by
--seed. Exit codes: 0 success, 1 usage error, 2 data or validation error,
3 numerical failure. A config file (INI sections named after subcommands)
may supply any flag; explicit flags win.
"""

from __future__ import annotations

import argparse
import configparser
import json
import sys

import numpy as np

from . import __version__, backend, errors
from ._io import write_atomic_text
from .compress import (apply_projection, dim_stats, fit_compressor,
                       read_projection, self_similarity_gap, write_projection)
from .corpus.emb_io import (EmbeddingSet, EmbProblem, read_embeddings,
                            write_embeddings)
from .corpus.records import load_dataset, save_dataset
from .corpus.synth import synth_generate, template_names
from .decode.expr import eval_expr, to_prefix
from .decode.pos import pos_predict
from .decode.qran import qran_goal_vector, qran_predict, quantity_vectors
from .decode.serialize import head_kind, read_head, write_head
from .decode.train import HeadConfig, train_decoder
from .decode.tree import tree_decode
from .distill.trainer import DistillConfig, train_distill
from .harness.reports import emit_report
from .harness.sweep import (SweepConfig, run_compression_sweep,
                            run_distillation_comparison)
from .harness.toy import random_lookup_embeddings
from .harness.metrics import compute_metrics
from .postags import tags_to_indices
from .student.model import StudentConfig, init_student, student_forward
from .student.serialize import read_student, write_student

USAGE_ERRORS = (errors.ParamError, errors.ConfigError, errors.UnsupportedError)
DATA_ERRORS = (errors.SchemaError, errors.ValidationError, errors.FormatError,
               errors.ShapeError, errors.DimMismatchError, errors.LabelError,
               errors.AlignmentError, errors.TokenRangeError,
               errors.LengthError, errors.IndexRangeError,
               errors.EmptyQuantityError, errors.NeighborError,
               errors.GraphError, errors.ZeroVectorError, errors.DecodeError,
               errors.IoError, FileNotFoundError)
NUMERIC_ERRORS = (errors.NumericalError, errors.NonFiniteError,
                  errors.DivZeroError, errors.DomainError)


def _err(msg: str) -> None:
    print(f"mwpkd: {msg}", file=sys.stderr)


def _info(msg: str, quiet: bool) -> None:
    if not quiet:
        print(msg, file=sys.stderr)


def _parse_int_list(text: str) -> list[int]:
    return [int(x) for x in text.split(",") if x.strip()]


def _parse_str_list(text: str) -> list[str]:
    return [x.strip() for x in text.split(",") if x.strip()]


def _load_config(path: str | None) -> configparser.ConfigParser:
    cp = configparser.ConfigParser()
    if path:
        read = cp.read(path)
        if not read:
            raise errors.ParamError(f"config file {path!r} not readable")
    return cp


def _resolve(args, cfgfile, section: str, name: str, default, cast):
    cli_val = getattr(args, name.replace("-", "_"), None)
    if cli_val is not None:
        return cli_val
    if cfgfile.has_option(section, name):
        raw = cfgfile.get(section, name)
        return cast(raw) if cast is not None else raw
    return default


class _Opts:
    """Flag values after the config-file overlay."""

    def __init__(self, args, cfgfile, section):
        self._args = args
        self._cfg = cfgfile
        self._section = section

    def get(self, name, default=None, cast=None):
        return _resolve(self._args, self._cfg, self._section, name,
                        default, cast)

    def require(self, name, cast=None):
        val = self.get(name, None, cast)
        if val is None:
            raise errors.ParamError(f"--{name} is required")
        return val


def _sentence_pool(es: EmbeddingSet) -> np.ndarray:
    return np.vstack([p.matrix.mean(axis=0) for p in es.problems])


def _token_pool(es: EmbeddingSet) -> np.ndarray:
    return np.vstack([p.matrix for p in es.problems]).astype(np.float64)


def _encoder_from_opts(o: _Opts, records):
    """--emb, --student, or --toy-dim (with --seed) select the source."""
    emb = o.get("emb")
    student = o.get("student")
    toy_dim = o.get("toy-dim", cast=int)
    chosen = [x for x in (emb, student, toy_dim) if x is not None]
    if len(chosen) != 1:
        raise errors.ParamError(
            "exactly one of --emb, --student, --toy-dim is required")
    if emb is not None:
        return read_embeddings(emb)
    if student is not None:
        return read_student(student)
    vocab = max(max(r.token_ids) for r in records) + 1
    return random_lookup_embeddings(records, int(toy_dim), vocab,
                                    seed=int(o.get("seed", 0, int)))


# ------------------------------------------------------------- subcommands

def cmd_synth(o: _Opts, quiet: bool) -> int:
    n = int(o.require("n", int))
    seed = int(o.get("seed", 0, int))
    out = o.require("out")
    mix = o.get("mix")
    mix_map = None
    if mix:
        mix_map = {}
        for part in mix.split(","):
            name, _, w = part.partition("=")
            if not _:
                raise errors.ParamError(f"bad mix entry {part!r}; use name=weight")
            mix_map[name.strip()] = float(w)
    records = synth_generate(n, seed, mix_map)
    save_dataset(records, out)
    _info(f"wrote {len(records)} records to {out} "
          f"(templates: {', '.join(template_names())})", quiet)
    return 0


def cmd_stats(o: _Opts, quiet: bool) -> int:
    es = read_embeddings(o.require("in"))
    pooling = o.get("pooling", "token")
    X = _token_pool(es) if pooling == "token" else _sentence_pool(es)
    st = dim_stats(X)
    payload = {
        "dim": es.dim,
        "pooling": pooling,
        "rows": int(X.shape[0]),
        "per_dim_mean_range": [float(st.per_dim_mean.min()),
                               float(st.per_dim_mean.max())],
        "per_dim_var_range": [float(st.per_dim_var.min()),
                              float(st.per_dim_var.max())],
        "pooled_skewness": st.pooled_skewness,
        "pooled_excess_kurtosis": st.pooled_excess_kurtosis,
        "approx_normal": bool(st.approx_normal),
        "constant_dims": int(st.constant_dims.sum()),
        "histogram": st.histogram.tolist(),
    }
    text = json.dumps(payload, indent=2) + "\n"
    out = o.get("out")
    if out:
        write_atomic_text(out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_compress(o: _Opts, quiet: bool) -> int:
    es = read_embeddings(o.require("in"))
    method = o.require("method").upper()
    dim = int(o.require("dim", int))
    seed = int(o.get("seed", 0, int))
    X = _token_pool(es)
    proj = fit_compressor(method, X, dim, seed=seed,
                          n_neighbors=int(o.get("n-neighbors", 10, int)))
    problems = [EmbProblem(id=p.id,
                           matrix=apply_projection(
                               proj, p.matrix.astype(np.float64)
                           ).astype(np.float32),
                           tokens=p.tokens, token_ids=p.token_ids)
                for p in es.problems]
    out_set = EmbeddingSet(dim=dim, problems=problems,
                           vocab_size=es.vocab_size,
                           source_tag=f"{es.source_tag}+{method.lower()}{dim}")
    write_embeddings(out_set, o.require("out"))
    proj_out = o.get("proj")
    if proj_out:
        write_projection(proj, proj_out)
    _info(f"compressed {es.dim} -> {dim} with {method} "
          f"({len(problems)} problems)", quiet)
    return 0


def cmd_gap(o: _Opts, quiet: bool) -> int:
    orig = read_embeddings(o.require("original"))
    red = read_embeddings(o.require("reduced"))
    pooling = o.get("pooling", "token")
    if pooling == "token":
        X, Y = _token_pool(orig), _token_pool(red)
    else:
        X, Y = _sentence_pool(orig), _sentence_pool(red)
    gap = self_similarity_gap(X, Y)
    sys.stdout.write(f"{gap:.6f}\n")
    return 0


def cmd_prune(o: _Opts, quiet: bool) -> int:
    from .compress import prune_dims
    es = read_embeddings(o.require("in"))
    k = int(o.require("k", int))
    criterion = o.get("criterion", "VARIANCE").upper()
    proj = prune_dims(_token_pool(es), k, criterion)
    problems = [EmbProblem(id=p.id,
                           matrix=apply_projection(
                               proj, p.matrix.astype(np.float64)
                           ).astype(np.float32),
                           tokens=p.tokens, token_ids=p.token_ids)
                for p in es.problems]
    out_set = EmbeddingSet(dim=k, problems=problems,
                           vocab_size=es.vocab_size,
                           source_tag=f"{es.source_tag}+prune{k}")
    write_embeddings(out_set, o.require("out"))
    proj_out = o.get("proj")
    if proj_out:
        write_projection(proj, proj_out)
    _info(f"kept dimensions {proj.selected_indices.tolist()[:8]}... "
          f"by {criterion}", quiet)
    return 0


def cmd_distill(o: _Opts, quiet: bool) -> int:
    stage1 = o.require("stage1")
    es = read_embeddings(stage1)
    d_model = int(o.get("d-model", 256, int))
    cfg = StudentConfig(
        vocab_size=es.vocab_size,
        d_model=d_model,
        n_layers=int(o.get("n-layers", 3, int)),
        n_heads=int(o.get("n-heads", 16, int)),
        d_ff=int(o.get("d-ff", 4 * d_model, int)),
        max_len=int(o.get("max-len", 128, int)),
        seed=int(o.get("seed", 0, int)))
    compressor = None
    comp_opt = o.get("compressor")
    if comp_opt == "linear-joint":
        compressor = "linear-joint"
    elif comp_opt:
        compressor = read_projection(comp_opt)
    steps = o.get("steps", None, int)
    dcfg = DistillConfig(
        stage1_path=stage1,
        stage2_path=o.get("stage2"),
        temperature=float(o.get("temperature", 1.0, float)),
        learning_rate=float(o.get("lr", 1e-3, float)),
        batch_size=int(o.get("batch", 8, int)),
        max_steps=int(steps) if steps is not None else None,
        epochs=int(o.get("epochs", 10, int)),
        seed=int(o.get("seed", 0, int)),
        compressor=compressor,
        log_path=o.get("log"))
    student = init_student(cfg)
    result = train_distill(student, dcfg)
    write_student(result.params, o.require("out"))
    last = [r for r in result.log if r["loss"] is not None]
    if last:
        _info(f"final loss {last[-1]['loss']:.6f} after {last[-1]['step']} "
              f"steps", quiet)
    return 0


def _head_source(o: _Opts, records, allow_joint: bool = True):
    src = _encoder_from_opts(o, records)
    comp_opt = o.get("compressor")
    compressor = None
    if comp_opt == "linear-joint":
        if not allow_joint:
            raise errors.ParamError(
                "linear-joint is a training-time compressor; pass a fitted "
                ".prj file here")
        from .decode.train import init_linear_compressor
        if isinstance(src, EmbeddingSet):
            in_dim = src.dim
        else:
            in_dim = src.cfg.d_model
        compressor = init_linear_compressor(
            in_dim, int(o.require("dim", int)), seed=int(o.get("seed", 0, int)))
    elif comp_opt:
        compressor = read_projection(comp_opt)
    return src, compressor


def cmd_train_head(o: _Opts, quiet: bool) -> int:
    records = load_dataset(o.require("data"))
    task = o.require("task").upper()
    src, compressor = _head_source(o, records)
    cfg = HeadConfig(learning_rate=float(o.get("lr", 1e-2, float)),
                     epochs=int(o.get("epochs", 50, int)),
                     batch_size=int(o.get("batch", 0, int)),
                     seed=int(o.get("seed", 0, int)),
                     encoder_trainable=bool(int(o.get("trainable", 0, int))))
    result = train_decoder(task, src, records, cfg, compressor=compressor)
    write_head(result.head, o.require("out"))
    _info(f"{task}: initial {result.metrics['initial_accuracy']:.4f} "
          f"final {result.metrics['final_accuracy']:.4f}", quiet)
    return 0


def cmd_eval(o: _Opts, quiet: bool) -> int:
    records = load_dataset(o.require("data"))
    task = o.require("task").upper()
    head = read_head(o.require("head"))
    src, compressor = _head_source(o, records, allow_joint=False)
    dtype = np.float32 if o.get("mode", "64") == "32" else np.float64
    from .compress import Projection

    def vectors(rec):
        if isinstance(src, EmbeddingSet):
            V = src.matrix_for(rec.id).astype(np.float64)
        else:
            V = student_forward(src, rec.token_ids, dtype=dtype).astype(np.float64)
        if isinstance(compressor, Projection):
            V = apply_projection(compressor, V)
        elif isinstance(compressor, dict):
            V = V @ compressor["w"] + compressor["b"]
        return V

    preds = {}
    gold = {}
    rows = []
    for rec in records:
        V = vectors(rec)
        if task == "RELATION":
            N = quantity_vectors(V, rec.quantity_indices)
            v_g, _ = qran_goal_vector(V, N, head)
            score = qran_predict(v_g, head)
            preds[rec.id] = score
            gold[rec.id] = rec.relation_label
            rows.append({"id": rec.id, "task": "relation",
                         "prediction": int(score >= 0.5), "score": score})
        elif task in ("EQUATION", "ANSWER"):
            out = tree_decode(V, rec.quantity_indices, head,
                              max_depth=int(o.get("max-depth", 6, int)))
            tokens = to_prefix(out.tree)
            if task == "EQUATION":
                preds[rec.id] = tokens
                gold[rec.id] = list(rec.equation_prefix)
                rows.append({"id": rec.id, "task": "equation",
                             "prediction": tokens, "score": None})
            else:
                try:
                    value = eval_expr(out.tree, rec.quantity_values)
                except NUMERIC_ERRORS:
                    value = float("nan")
                preds[rec.id] = value
                gold[rec.id] = rec.answer
                rows.append({"id": rec.id, "task": "answer",
                             "prediction": None if value != value else value,
                             "score": None})
        elif task == "POS":
            probs = pos_predict(V, head)
            pred = probs.argmax(axis=1).tolist()
            preds[rec.id] = pred
            gold[rec.id] = tags_to_indices(rec.pos_tags).tolist()
            rows.append({"id": rec.id, "task": "pos", "prediction": pred,
                         "score": None})
        else:
            raise errors.ParamError(f"unknown eval task {task!r}")

    metric_task = task if task != "ANSWER" else "ANSWER"
    metrics = compute_metrics(metric_task, preds, gold)
    out = o.get("out")
    if out:
        write_atomic_text(out, "\n".join(json.dumps(r) for r in rows) + "\n")
    sys.stdout.write(json.dumps({"task": task, **metrics}) + "\n")
    return 0


def cmd_sweep(o: _Opts, quiet: bool) -> int:
    records = load_dataset(o.require("data"))
    src = _encoder_from_opts(o, records)
    cfg = SweepConfig(
        methods=_parse_str_list(o.get("methods", "PCA")),
        dims=_parse_int_list(str(o.get("dims", "16"))),
        tasks=_parse_str_list(o.get("tasks", "RELATION")),
        seed=int(o.get("seed", 0, int)),
        epochs=int(o.get("epochs", 20, int)),
        learning_rate=float(o.get("lr", 1e-2, float)),
        train_fraction=float(o.get("train-fraction", 0.8, float)),
        n_neighbors=int(o.get("n-neighbors", 10, int)))
    reports = run_compression_sweep(cfg, records, src)
    emit_report(reports, o.get("format", "JSON").upper(), o.require("out"),
                include_timing=bool(int(o.get("timing", 0, int))))
    _info(f"wrote {len(reports)} reports", quiet)
    return 0


def cmd_compare_distill(o: _Opts, quiet: bool) -> int:
    records = load_dataset(o.require("data"))
    distilled = read_student(o.require("distilled"))
    fresh_path = o.get("fresh")
    fresh = read_student(fresh_path) if fresh_path else init_student(distilled.cfg)
    cfg = SweepConfig(
        tasks=_parse_str_list(o.get("tasks", "RELATION")),
        seed=int(o.get("seed", 0, int)),
        epochs=int(o.get("epochs", 10, int)),
        learning_rate=float(o.get("lr", 1e-2, float)),
        train_fraction=float(o.get("train-fraction", 0.8, float)))
    reports = run_distillation_comparison(cfg, records, distilled, fresh)
    emit_report(reports, o.get("format", "JSON").upper(), o.require("out"),
                include_timing=bool(int(o.get("timing", 0, int))))
    return 0


def cmd_tsne2d(o: _Opts, quiet: bool) -> int:
    from .compress import fit_tsne2d
    es = read_embeddings(o.require("in"))
    pooling = o.get("pooling", "sentence")
    X = _sentence_pool(es) if pooling == "sentence" else _token_pool(es)
    proj = fit_tsne2d(X, perplexity=float(o.get("perplexity", 15.0, float)),
                      iters=int(o.get("iters", 500, int)),
                      seed=int(o.get("seed", 0, int)))
    lines = ["index,x,y"]
    for i, (x, y) in enumerate(proj.fitted_embedding):
        lines.append(f"{i},{float(x)!r},{float(y)!r}")
    write_atomic_text(o.require("out"), "\n".join(lines) + "\n")
    _info(f"embedded {X.shape[0]} points", quiet)
    return 0


def cmd_inspect(o: _Opts, quiet: bool) -> int:
    path = o.require("in")
    magic = open(path, "rb").read(4)
    if magic == b"EMB1":
        es = read_embeddings(path)
        payload = {"format": "EMB1", "dim": es.dim,
                   "problem_count": len(es.problems),
                   "vocab_size": es.vocab_size, "source_tag": es.source_tag,
                   "seq_lens": [p.matrix.shape[0] for p in es.problems][:16]}
    elif magic == b"STU1":
        sp = read_student(path)
        payload = {"format": "STU1", **sp.cfg.__dict__,
                   "trainable_tensors": len(sp.tensors)}
    elif magic == b"PRJ1":
        pr = read_projection(path)
        payload = {"format": "PRJ1", "method": pr.method,
                   "in_dim": pr.in_dim, "out_dim": pr.out_dim,
                   "neighbors_k": pr.neighbors_k,
                   "has_components": pr.components is not None,
                   "fitted_points": (0 if pr.fitted_points is None
                                     else int(pr.fitted_points.shape[0]))}
    elif magic == b"HDR1":
        head = read_head(path)
        payload = {"format": "HDR1", "kind": head_kind(head),
                   "dim": head.dim}
    else:
        raise errors.FormatError(f"unrecognized magic {magic!r} at byte offset 0")
    sys.stdout.write(json.dumps(payload) + "\n")
    return 0


_COMMANDS = {
    "synth": (cmd_synth, "generate a synthetic dataset"),
    "stats": (cmd_stats, "distribution diagnostics of an embedding file"),
    "compress": (cmd_compress, "fit a compressor and re-emit embeddings"),
    "gap": (cmd_gap, "self-similarity gap between two embedding files"),
    "prune": (cmd_prune, "keep the top-k dimensions by a statistic"),
    "distill": (cmd_distill, "train a student against teacher embeddings"),
    "train-head": (cmd_train_head, "train a task head on an encoder"),
    "eval": (cmd_eval, "evaluate a head; emit predictions and metrics"),
    "sweep": (cmd_sweep, "run the method x dim x task grid"),
    "compare-distill": (cmd_compare_distill,
                        "distilled vs fresh student comparison"),
    "tsne2d": (cmd_tsne2d, "2-D diagnostic embedding"),
    "inspect": (cmd_inspect, "dump a binary file header"),
}

_FLAGS: dict[str, list[str]] = {
    "synth": ["n", "seed", "out", "mix"],
    "stats": ["in", "out", "pooling"],
    "compress": ["in", "out", "method", "dim", "seed", "n-neighbors", "proj"],
    "gap": ["original", "reduced", "pooling"],
    "prune": ["in", "out", "k", "criterion", "proj"],
    "distill": ["stage1", "stage2", "out", "d-model", "n-layers", "n-heads",
                "d-ff", "max-len", "temperature", "lr", "batch", "steps",
                "epochs", "seed", "compressor", "log"],
    "train-head": ["task", "data", "emb", "student", "toy-dim", "out", "lr",
                   "epochs", "batch", "seed", "compressor", "dim", "trainable"],
    "eval": ["task", "data", "emb", "student", "toy-dim", "head", "out",
             "compressor", "dim", "seed", "max-depth", "mode"],
    "sweep": ["data", "emb", "student", "toy-dim", "methods", "dims", "tasks",
              "seed", "epochs", "lr", "train-fraction", "n-neighbors", "out",
              "format", "timing"],
    "compare-distill": ["data", "distilled", "fresh", "tasks", "seed",
                        "epochs", "lr", "train-fraction", "out", "format",
                        "timing"],
    "tsne2d": ["in", "out", "perplexity", "iters", "seed", "pooling"],
    "inspect": ["in"],
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mwpkd", add_help=True,
        description="embedding compression, student distillation, and MWP "
                    "task evaluation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command")
    for name, (_fn, help_text) in _COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", default=None)
        p.add_argument("--quiet", action="store_true")
        p.add_argument("--threads", type=int, default=None)
        for flag in _FLAGS[name]:
            p.add_argument(f"--{flag}", default=None,
                           dest=flag.replace("-", "_"))
    return parser


def run_command(argv: list[str]) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help/--version, 2 for usage problems
        return 0 if exc.code == 0 else 1
    if not args.command:
        parser.print_usage(sys.stderr)
        return 1
    try:
        cfgfile = _load_config(args.config)
        if args.threads:
            backend.set_threads(args.threads)
        opts = _Opts(args, cfgfile, args.command)
        fn = _COMMANDS[args.command][0]
        return fn(opts, args.quiet)
    except USAGE_ERRORS as exc:
        _err(str(exc))
        return 1
    except DATA_ERRORS as exc:
        _err(str(exc))
        return 2
    except NUMERIC_ERRORS as exc:
        _err(str(exc))
        return 3


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()

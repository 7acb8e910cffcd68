"""STU1 checkpoint format: config block, then every trainable tensor in
declaration order as row-major little-endian float32."""

from __future__ import annotations

import struct

import numpy as np

from .._io import write_atomic
from ..errors import FormatError
from .model import StudentConfig, StudentParams, sinusoidal_encoding, tensor_layout

_MAGIC = b"STU1"
_VERSION = 1
_CFG = struct.Struct("<4sIIIIIIIfq")


def write_student(params: StudentParams, path) -> None:
    cfg = params.cfg
    chunks = [_CFG.pack(_MAGIC, _VERSION, cfg.vocab_size, cfg.d_model,
                        cfg.n_layers, cfg.n_heads, cfg.d_ff, cfg.max_len,
                        cfg.dropout_rate, cfg.seed)]
    for name, _shape in tensor_layout(cfg):
        arr = np.ascontiguousarray(params.tensors[name], dtype=np.float32)
        chunks.append(arr.tobytes())
    write_atomic(path, b"".join(chunks))


def read_student(path) -> StudentParams:
    blob = open(path, "rb").read()
    if len(blob) < _CFG.size:
        raise FormatError(f"truncated header at byte offset {len(blob)}")
    (magic, version, vocab, d_model, n_layers, n_heads, d_ff, max_len,
     dropout, seed) = _CFG.unpack_from(blob, 0)
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte offset 0")
    if version != _VERSION:
        raise FormatError(f"unsupported version {version} at byte offset 4")
    cfg = StudentConfig(vocab_size=vocab, d_model=d_model, n_layers=n_layers,
                        n_heads=n_heads, d_ff=d_ff, max_len=max_len,
                        dropout_rate=float(dropout), seed=int(seed))
    cfg.validate()

    tensors = {}
    off = _CFG.size
    for name, shape in tensor_layout(cfg):
        count = int(np.prod(shape))
        nbytes = count * 4
        if off + nbytes > len(blob):
            raise FormatError(f"truncated tensor {name!r} at byte offset {off}")
        arr = np.frombuffer(blob, dtype="<f4", count=count, offset=off)
        tensors[name] = arr.reshape(shape).astype(np.float64)
        off += nbytes
    if off != len(blob):
        raise FormatError(f"{len(blob) - off} trailing bytes at byte offset {off}")
    return StudentParams(cfg=cfg, tensors=tensors,
                         positional_encoding=sinusoidal_encoding(max_len, d_model))

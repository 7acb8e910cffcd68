"""EMB1 binary embedding files plus their JSON sidecar.

Layout (little-endian):
    magic "EMB1" | version u32 = 1 | dim u32 | problem_count u32
    then per problem: seq_len u32, seq_len*dim float32 row-major.

Sidecar "<name>.meta.json" next to the payload:
    {"vocab_size": int, "source_tag": str,
     "problems": [{"id": str, "tokens": [str], "token_ids": [int]}]}
in file order. Write-then-read is the identity down to float bit patterns.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .._io import write_atomic, write_atomic_text
from ..errors import FormatError, ValidationError

MAGIC = b"EMB1"
VERSION = 1
HEADER = struct.Struct("<4sIII")


@dataclass
class EmbProblem:
    id: str
    matrix: np.ndarray  # seq_len x dim, float32
    tokens: list[str] = field(default_factory=list)
    token_ids: list[int] = field(default_factory=list)


@dataclass
class EmbeddingSet:
    dim: int
    problems: list[EmbProblem]
    vocab_size: int
    source_tag: str

    def validate(self) -> None:
        if self.dim < 1:
            raise ValidationError("dim must be positive")
        if self.vocab_size < 1:
            raise ValidationError("vocab_size must be positive")
        seen = set()
        for p in self.problems:
            if p.id in seen:
                raise ValidationError(f"duplicate problem id {p.id!r}")
            seen.add(p.id)
            if p.matrix.ndim != 2 or p.matrix.shape[1] != self.dim:
                raise ValidationError(
                    f"problem {p.id!r}: matrix shape {p.matrix.shape} "
                    f"does not have {self.dim} columns")
            if p.tokens and len(p.tokens) != p.matrix.shape[0]:
                raise ValidationError(
                    f"problem {p.id!r}: {len(p.tokens)} tokens vs "
                    f"{p.matrix.shape[0]} matrix rows")
            if p.token_ids and len(p.token_ids) != p.matrix.shape[0]:
                raise ValidationError(
                    f"problem {p.id!r}: {len(p.token_ids)} token ids vs "
                    f"{p.matrix.shape[0]} matrix rows")

    def matrix_for(self, problem_id: str) -> np.ndarray:
        for p in self.problems:
            if p.id == problem_id:
                return p.matrix
        raise KeyError(problem_id)


def sidecar_path(path: str | Path) -> Path:
    return Path(str(path) + ".meta.json")


def write_embeddings(es: EmbeddingSet, path: str | Path) -> None:
    es.validate()
    chunks = [HEADER.pack(MAGIC, VERSION, es.dim, len(es.problems))]
    for p in es.problems:
        mat = np.ascontiguousarray(p.matrix, dtype=np.float32)
        chunks.append(struct.pack("<I", mat.shape[0]))
        chunks.append(mat.tobytes(order="C"))
    write_atomic(path, b"".join(chunks))
    meta = {
        "vocab_size": es.vocab_size,
        "source_tag": es.source_tag,
        "problems": [{"id": p.id, "tokens": list(p.tokens),
                      "token_ids": list(p.token_ids)} for p in es.problems],
    }
    write_atomic_text(sidecar_path(path), json.dumps(meta, ensure_ascii=False))


def read_embeddings(path: str | Path) -> EmbeddingSet:
    path = Path(path)
    blob = path.read_bytes()
    if len(blob) < HEADER.size:
        raise FormatError(f"truncated header at byte offset {len(blob)}")
    magic, version, dim, count = HEADER.unpack_from(blob, 0)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte offset 0")
    if version != VERSION:
        raise FormatError(f"unsupported version {version} at byte offset 4")
    if dim < 1:
        raise FormatError(f"non-positive dim {dim} at byte offset 8")

    meta_path = sidecar_path(path)
    if not meta_path.exists():
        raise FormatError(f"missing sidecar {meta_path}")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    metas = meta.get("problems", [])
    if len(metas) != count:
        raise FormatError(
            f"sidecar lists {len(metas)} problems, header says {count} "
            f"at byte offset 12")

    problems = []
    off = HEADER.size
    for k in range(count):
        if off + 4 > len(blob):
            raise FormatError(f"truncated seq_len of problem {k} at byte offset {off}")
        (seq_len,) = struct.unpack_from("<I", blob, off)
        off += 4
        nbytes = seq_len * dim * 4
        if off + nbytes > len(blob):
            raise FormatError(f"truncated matrix of problem {k} at byte offset {off}")
        mat = np.frombuffer(blob, dtype="<f4", count=seq_len * dim, offset=off)
        mat = mat.reshape(seq_len, dim).copy()
        off += nbytes
        pm = metas[k]
        problems.append(EmbProblem(id=pm["id"], matrix=mat,
                                   tokens=list(pm.get("tokens", [])),
                                   token_ids=list(pm.get("token_ids", []))))
    if off != len(blob):
        raise FormatError(f"{len(blob) - off} trailing bytes at byte offset {off}")

    es = EmbeddingSet(dim=dim, problems=problems,
                      vocab_size=int(meta["vocab_size"]),
                      source_tag=str(meta["source_tag"]))
    es.validate()
    return es

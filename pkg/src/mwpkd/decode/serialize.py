"""HDR1 binary format for task-head parameters (quantity-relation head,
tree decoder, POS head), same tensor conventions as the student checkpoint:
row-major little-endian float32 in declaration order."""

from __future__ import annotations

import struct

import numpy as np

from .._io import write_atomic
from ..errors import FormatError
from .pos import PosHeadParams
from .qran import QranParams
from .tree import TreeDecoderParams

_MAGIC = b"HDR1"
_VERSION = 1
_KINDS = {"QRAN": 0, "TREE": 1, "POS": 2}
_KIND_NAMES = {v: k for k, v in _KINDS.items()}


def head_kind(head) -> str:
    if isinstance(head, QranParams):
        return "QRAN"
    if isinstance(head, TreeDecoderParams):
        return "TREE"
    if isinstance(head, PosHeadParams):
        return "POS"
    raise FormatError(f"unknown head object {type(head).__name__}")


def _pack_arr(a: np.ndarray) -> bytes:
    a = np.ascontiguousarray(a, dtype=np.float32)
    shape = a.shape if a.ndim else (1,)
    return (struct.pack("<I", len(shape))
            + struct.pack(f"<{len(shape)}I", *shape)
            + a.tobytes())


def write_head(head, path) -> None:
    kind = head_kind(head)
    chunks = [struct.pack("<4sIB", _MAGIC, _VERSION, _KINDS[kind])]
    if kind == "TREE":
        consts = np.asarray(head.constants, dtype=np.float64)
        chunks.append(struct.pack("<I", consts.size))
        chunks.append(consts.astype("<f8").tobytes())
    named = head.tensors()
    chunks.append(struct.pack("<I", len(named)))
    for name in named:
        raw = name.encode("utf-8")
        chunks.append(struct.pack("<I", len(raw)) + raw)
        chunks.append(_pack_arr(np.asarray(named[name])))
    write_atomic(path, b"".join(chunks))


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.off = 0

    def take(self, fmt):
        size = struct.calcsize(fmt)
        if self.off + size > len(self.blob):
            raise FormatError(f"truncated file at byte offset {self.off}")
        out = struct.unpack_from(fmt, self.blob, self.off)
        self.off += size
        return out

    def take_bytes(self, n):
        if self.off + n > len(self.blob):
            raise FormatError(f"truncated file at byte offset {self.off}")
        out = self.blob[self.off:self.off + n]
        self.off += n
        return out


def read_head(path):
    blob = open(path, "rb").read()
    r = _Reader(blob)
    magic, version, kind_code = r.take("<4sIB")
    if magic != _MAGIC:
        raise FormatError(f"bad magic {magic!r} at byte offset 0")
    if version != _VERSION:
        raise FormatError(f"unsupported version {version} at byte offset 4")
    kind = _KIND_NAMES.get(kind_code)
    if kind is None:
        raise FormatError(f"unknown head kind {kind_code} at byte offset 8")

    constants = ()
    if kind == "TREE":
        (nc,) = r.take("<I")
        constants = tuple(np.frombuffer(r.take_bytes(nc * 8), dtype="<f8"))

    (ntensors,) = r.take("<I")
    named: dict[str, np.ndarray] = {}
    for _ in range(ntensors):
        (nlen,) = r.take("<I")
        name = r.take_bytes(nlen).decode("utf-8")
        (ndim,) = r.take("<I")
        shape = r.take(f"<{ndim}I")
        count = int(np.prod(shape))
        arr = np.frombuffer(r.take_bytes(count * 4), dtype="<f4")
        named[name] = arr.reshape(shape).astype(np.float64)
    if r.off != len(blob):
        raise FormatError(f"{len(blob) - r.off} trailing bytes at byte "
                          f"offset {r.off}")

    if kind == "QRAN":
        return QranParams(w_r=named["qran.w_r"], alpha=named["qran.alpha"],
                          w_c=named["qran.w_c"],
                          beta_c=float(named["qran.beta_c"].ravel()[0]))
    if kind == "TREE":
        return TreeDecoderParams(
            constants=constants, embeddings=named["tree.embeddings"],
            w_s=named["tree.w_s"], v_s=named["tree.v_s"],
            w_left=named["tree.w_left"], w_right=named["tree.w_right"],
            w_merge=named["tree.w_merge"], u_pool=named["tree.u_pool"])
    return PosHeadParams(w_p=named["pos.w_p"], b_p=named["pos.b_p"])

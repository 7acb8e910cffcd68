"""Atomic file writing: write to a temp file in the target directory, then
rename. No consumer ever observes a partial file."""

import os
import tempfile
from pathlib import Path

from .errors import IoError


def write_atomic(path: str | Path, data: bytes) -> None:
    path = Path(path)
    try:
        fd, tmp = tempfile.mkstemp(dir=path.parent or ".", prefix=path.name + ".tmp")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_atomic_text(path: str | Path, text: str) -> None:
    write_atomic(path, text.encode("utf-8"))

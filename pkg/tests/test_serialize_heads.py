"""HDR1 round-trips for every head kind."""

import numpy as np
import pytest

from mwpkd.decode import init_pos_head, init_qran, init_tree_decoder
from mwpkd.decode.serialize import read_head, write_head
from mwpkd.errors import FormatError


def test_qran_roundtrip(tmp_path):
    head = init_qran(6, seed=1)
    head.w_c = np.linspace(-1, 1, 6)
    head.beta_c = 0.25
    write_head(head, tmp_path / "q.hd1")
    back = read_head(tmp_path / "q.hd1")
    assert back.beta_c == pytest.approx(0.25)
    for k, v in head.tensors().items():
        assert np.allclose(back.tensors()[k], v, atol=1e-6), k


def test_tree_roundtrip(tmp_path):
    head = init_tree_decoder(8, constants=(1.0, 2.0, 3.14), seed=2)
    write_head(head, tmp_path / "t.hd1")
    back = read_head(tmp_path / "t.hd1")
    assert back.constants == head.constants
    for k, v in head.tensors().items():
        assert np.allclose(back.tensors()[k], v, atol=1e-6), k


def test_pos_roundtrip(tmp_path):
    head = init_pos_head(5, seed=3)
    write_head(head, tmp_path / "p.hd1")
    back = read_head(tmp_path / "p.hd1")
    assert np.allclose(back.w_p, head.w_p, atol=1e-6)
    assert np.allclose(back.b_p, head.b_p, atol=1e-6)


def test_truncation_reports_offset(tmp_path):
    head = init_pos_head(4, seed=0)
    path = tmp_path / "x.hd1"
    write_head(head, path)
    blob = path.read_bytes()
    path.write_bytes(blob[:-5])
    with pytest.raises(FormatError, match="byte offset"):
        read_head(path)

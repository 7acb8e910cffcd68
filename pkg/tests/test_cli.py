"""CLI contracts: exit codes, determinism, pipelines, and atomic output."""

import json
import subprocess
import sys

import pytest

from mwpkd.cli import run_command

PY = [sys.executable, "-m", "mwpkd.cli"]


def run(argv, capsys):
    code = run_command(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_unknown_subcommand_exit_1():
    proc = subprocess.run(PY + ["frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert proc.stdout == ""
    assert "usage" in proc.stderr.lower() or "invalid" in proc.stderr.lower()


def test_no_subcommand_usage(capsys):
    code, out, err = run([], capsys)
    assert code == 1
    assert out == ""
    assert "usage" in err.lower()


def test_version():
    assert run_command(["--version"]) == 0


def test_synth_deterministic_files(tmp_path, capsys):
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    for path in (a, b):
        code, _, _ = run(["synth", "--n", "10", "--seed", "7",
                          "--out", str(path), "--quiet"], capsys)
        assert code == 0
    assert a.read_bytes() == b.read_bytes()


def test_synth_missing_n_exit_1(tmp_path, capsys):
    code, _out, err = run(["synth", "--out", str(tmp_path / "x.jsonl")], capsys)
    assert code == 1
    assert "--n" in err


def test_compress_then_inspect_pipeline(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    code, _, _ = run(["synth", "--n", "12", "--seed", "3", "--out", str(data),
                      "--quiet"], capsys)
    assert code == 0

    # teacher stand-in: random lookup vectors written through the library
    from mwpkd.corpus.records import load_dataset
    from mwpkd.corpus.emb_io import write_embeddings
    from mwpkd.corpus.synth import synth_vocab_size
    from mwpkd.harness.toy import random_lookup_embeddings
    records = load_dataset(data)
    emb = tmp_path / "t.emb"
    write_embeddings(random_lookup_embeddings(records, 24, synth_vocab_size(),
                                              seed=0), emb)

    out = tmp_path / "c.emb"
    code, _, _ = run(["compress", "--method", "pca", "--dim", "8",
                      "--in", str(emb), "--out", str(out), "--quiet"], capsys)
    assert code == 0

    code, stdout, _ = run(["inspect", "--in", str(out)], capsys)
    assert code == 0
    info = json.loads(stdout)
    assert info["dim"] == 8
    assert info["problem_count"] == 12


def test_failed_compress_leaves_no_partial_file(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "6", "--seed", "1", "--out", str(data), "--quiet"],
        capsys)
    from mwpkd.corpus.records import load_dataset
    from mwpkd.corpus.emb_io import write_embeddings
    from mwpkd.corpus.synth import synth_vocab_size
    from mwpkd.harness.toy import random_lookup_embeddings
    emb = tmp_path / "t.emb"
    write_embeddings(random_lookup_embeddings(load_dataset(data), 8,
                                              synth_vocab_size(), 0), emb)
    out = tmp_path / "never.emb"
    code, _, err = run(["compress", "--method", "pca", "--dim", "99",
                        "--in", str(emb), "--out", str(out)], capsys)
    assert code == 1  # k out of range: usage error
    assert not out.exists()
    assert err


def test_gap_command(tmp_path, capsys):
    from mwpkd.corpus.records import load_dataset
    from mwpkd.corpus.emb_io import write_embeddings
    from mwpkd.corpus.synth import synth_vocab_size
    from mwpkd.harness.toy import random_lookup_embeddings
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "8", "--seed", "2", "--out", str(data), "--quiet"],
        capsys)
    records = load_dataset(data)
    emb = tmp_path / "t.emb"
    write_embeddings(random_lookup_embeddings(records, 16, synth_vocab_size(),
                                              0), emb)
    ce = tmp_path / "c.emb"
    run(["compress", "--method", "pca", "--dim", "4", "--in", str(emb),
         "--out", str(ce), "--quiet"], capsys)
    code, stdout, _ = run(["gap", "--original", str(emb), "--reduced",
                           str(ce)], capsys)
    assert code == 0
    val = float(stdout.strip())
    assert 0.0 <= val <= 2.0


def test_truncated_file_exit_2(tmp_path, capsys):
    bad = tmp_path / "bad.emb"
    bad.write_bytes(b"EMB1\x01\x00\x00")
    code, _, err = run(["inspect", "--in", str(bad)], capsys)
    assert code == 2
    assert "byte offset" in err


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_numerical_failure_exit_3(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "4", "--seed", "1", "--out", str(data), "--quiet"],
        capsys)
    emb = _toy_embedding_file(tmp_path, data, 8, 0, capsys, name="n.emb")
    # an absurd learning rate overflows the very first Adam update
    code, _, err = run(["distill", "--stage1", str(emb), "--out",
                        str(tmp_path / "s.stu"), "--d-model", "8",
                        "--n-layers", "1", "--n-heads", "2", "--d-ff", "16",
                        "--steps", "2", "--lr", "1e300", "--seed", "0",
                        "--quiet"], capsys)
    assert code == 3
    assert err
    assert not (tmp_path / "s.stu").exists()


def test_full_head_train_eval_roundtrip(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "30", "--seed", "5", "--out", str(data), "--quiet"],
        capsys)
    head = tmp_path / "rel.hd1"
    code, _, _ = run(["train-head", "--task", "relation", "--data", str(data),
                      "--toy-dim", "24", "--seed", "3", "--epochs", "40",
                      "--lr", "0.03", "--out", str(head), "--quiet"], capsys)
    assert code == 0
    preds = tmp_path / "preds.jsonl"
    code, stdout, _ = run(["eval", "--task", "relation", "--data", str(data),
                           "--toy-dim", "24", "--seed", "3",
                           "--head", str(head), "--out", str(preds)], capsys)
    assert code == 0
    metrics = json.loads(stdout)
    assert metrics["task"] == "RELATION"
    assert metrics["accuracy"] >= 0.9
    rows = [json.loads(x) for x in preds.read_text().splitlines()]
    assert len(rows) == 30
    assert set(rows[0]) == {"id", "task", "prediction", "score"}


def test_sweep_cli_deterministic(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "24", "--seed", "6", "--out", str(data), "--quiet"],
        capsys)
    outs = []
    for name in ("r1.json", "r2.json"):
        out = tmp_path / name
        code, _, _ = run(["sweep", "--data", str(data), "--toy-dim", "20",
                          "--methods", "PCA", "--dims", "6", "--tasks",
                          "RELATION", "--epochs", "2", "--seed", "4",
                          "--out", str(out), "--quiet"], capsys)
        assert code == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def _toy_embedding_file(tmp_path, records_path, dim, seed, capsys, name="t.emb"):
    from mwpkd.corpus.records import load_dataset
    from mwpkd.corpus.emb_io import write_embeddings
    from mwpkd.corpus.synth import synth_vocab_size
    from mwpkd.harness.toy import random_lookup_embeddings
    records = load_dataset(records_path)
    emb = tmp_path / name
    write_embeddings(random_lookup_embeddings(records, dim, synth_vocab_size(),
                                              seed=seed), emb)
    return emb


def test_stats_prune_tsne2d_smoke(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "10", "--seed", "4", "--out", str(data), "--quiet"],
        capsys)
    emb = _toy_embedding_file(tmp_path, data, 12, 0, capsys)

    code, stdout, _ = run(["stats", "--in", str(emb)], capsys)
    assert code == 0
    st = json.loads(stdout)
    assert st["dim"] == 12 and len(st["histogram"]) == 64

    pruned = tmp_path / "p.emb"
    code, _, _ = run(["prune", "--in", str(emb), "--k", "5",
                      "--out", str(pruned), "--quiet"], capsys)
    assert code == 0
    code, stdout, _ = run(["inspect", "--in", str(pruned)], capsys)
    assert json.loads(stdout)["dim"] == 5

    coords = tmp_path / "c.csv"
    code, _, _ = run(["tsne2d", "--in", str(emb), "--perplexity", "4",
                      "--iters", "30", "--seed", "1", "--out", str(coords),
                      "--quiet"], capsys)
    assert code == 0
    lines = coords.read_text().splitlines()
    assert lines[0] == "index,x,y"
    assert len(lines) == 11  # header + 10 problems (sentence pooling)


def test_distill_cli_and_student_inspect(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "8", "--seed", "2", "--out", str(data), "--quiet"],
        capsys)
    emb = _toy_embedding_file(tmp_path, data, 16, 1, capsys)
    stu = tmp_path / "s.stu"
    log = tmp_path / "log.jsonl"
    code, _, _ = run(["distill", "--stage1", str(emb), "--out", str(stu),
                      "--d-model", "16", "--n-layers", "1", "--n-heads", "2",
                      "--d-ff", "24", "--steps", "3", "--batch", "4",
                      "--seed", "0", "--log", str(log), "--quiet"], capsys)
    assert code == 0
    code, stdout, _ = run(["inspect", "--in", str(stu)], capsys)
    info = json.loads(stdout)
    assert info["format"] == "STU1" and info["d_model"] == 16
    assert len(log.read_text().splitlines()) == 4  # 3 steps + boundary row


def test_equation_train_eval_answer_pipeline(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "12", "--seed", "8", "--out", str(data), "--quiet"],
        capsys)
    head = tmp_path / "eq.hd1"
    code, _, _ = run(["train-head", "--task", "equation", "--data", str(data),
                      "--toy-dim", "32", "--seed", "5", "--epochs", "80",
                      "--lr", "0.02", "--out", str(head), "--quiet"], capsys)
    assert code == 0
    code, stdout, _ = run(["eval", "--task", "answer", "--data", str(data),
                           "--toy-dim", "32", "--seed", "5",
                           "--head", str(head)], capsys)
    assert code == 0
    metrics = json.loads(stdout)
    assert metrics["accuracy"] >= 0.75  # overfit decode, answers re-evaluated


def test_compare_distill_cli(tmp_path, capsys):
    data = tmp_path / "d.jsonl"
    run(["synth", "--n", "16", "--seed", "3", "--out", str(data), "--quiet"],
        capsys)
    emb = _toy_embedding_file(tmp_path, data, 16, 2, capsys)
    stu = tmp_path / "s.stu"
    run(["distill", "--stage1", str(emb), "--out", str(stu), "--d-model", "16",
         "--n-layers", "1", "--n-heads", "2", "--d-ff", "24", "--steps", "5",
         "--batch", "4", "--seed", "0", "--quiet"], capsys)
    out = tmp_path / "cmp.json"
    code, _, _ = run(["compare-distill", "--distilled", str(stu), "--data",
                      str(data), "--tasks", "RELATION", "--epochs", "2",
                      "--seed", "1", "--out", str(out), "--quiet"], capsys)
    assert code == 0
    payload = json.loads(out.read_text())
    assert len(payload["reports"]) == 2
    flags = sorted(r["distilled"] for r in payload["reports"])
    assert flags == [False, True]


def test_config_file_overlay(tmp_path, capsys):
    cfgfile = tmp_path / "conf.ini"
    cfgfile.write_text("[synth]\nn = 5\nseed = 9\n")
    out = tmp_path / "o.jsonl"
    code, _, _ = run(["synth", "--config", str(cfgfile), "--out", str(out),
                      "--quiet"], capsys)
    assert code == 0
    assert len(out.read_text().splitlines()) == 5
    # CLI flag wins over the config file
    out2 = tmp_path / "o2.jsonl"
    code, _, _ = run(["synth", "--config", str(cfgfile), "--n", "3",
                      "--out", str(out2), "--quiet"], capsys)
    assert code == 0
    assert len(out2.read_text().splitlines()) == 3

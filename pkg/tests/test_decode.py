"""Relation head, tree decoder, POS head, and attribution: hand cases,
structural invariants, and teacher-forced gradient checks."""

import numpy as np
import pytest

import mwpkd.autograd as ag
from mwpkd.corpus.synth import synth_generate, synth_vocab_size
from mwpkd.decode import (init_pos_head, init_qran, init_tree_decoder,
                          parse_prefix, pos_predict, qran_goal_vector,
                          qran_predict, quantity_vectors, to_prefix,
                          top_token_attribution, train_decoder, tree_decode)
from mwpkd.decode.expr import NumberSlot, Operator, Constant
from mwpkd.decode.train import HeadConfig
from mwpkd.decode.tree import teacher_forced_loss, gold_candidate_index
from mwpkd.decode.qran import QranParams
from mwpkd.errors import (EmptyQuantityError, IndexRangeError, LabelError,
                          ShapeError)
from mwpkd.harness.toy import random_lookup_embeddings


# ------------------------------------------------------------- quantities

def test_quantity_selection_order():
    V = np.arange(12.0).reshape(4, 3)
    assert np.array_equal(quantity_vectors(V, [0]), V[:1])
    out = quantity_vectors(V, [2, 0])
    assert np.array_equal(out, V[[2, 0]])


def test_quantity_errors():
    V = np.zeros((3, 2))
    with pytest.raises(EmptyQuantityError):
        quantity_vectors(V, [])
    with pytest.raises(IndexRangeError):
        quantity_vectors(V, [3])


# ------------------------------------------------------------- QRAN

def test_single_quantity_gets_full_attention(rng):
    d = 4
    params = init_qran(d, seed=0)
    params.w_c = rng.standard_normal(d)
    V = rng.standard_normal((6, d))
    N = V[2:3]
    v_g, a = qran_goal_vector(V, N, params)
    assert np.allclose(a, [1.0])
    assert np.allclose(v_g, V[2], atol=1e-12)


def test_attention_sums_to_one_positive(rng):
    d = 5
    params = init_qran(d, seed=1)
    V = rng.standard_normal((8, d))
    N = V[[1, 4, 6]]
    _, a = qran_goal_vector(V, N, params)
    assert a.shape == (3,)
    assert np.all(a > 0)
    assert a.sum() == pytest.approx(1.0, abs=1e-12)


def test_zero_relation_matrix_uniform_attention():
    d = 2
    params = QranParams(w_r=np.zeros((2, 4)), alpha=np.array([0.7, -0.3]),
                        w_c=np.zeros(2), beta_c=0.0)
    V = np.array([[1.0, 0.0], [0.0, 1.0]])
    v_g, a = qran_goal_vector(V, V, params)
    assert np.allclose(a, [0.5, 0.5], atol=1e-15)
    assert np.allclose(v_g, [0.5, 0.5], atol=1e-15)


def test_predict_hand_values():
    d = 3
    params = QranParams(w_r=np.zeros((3, 6)), alpha=np.zeros(3),
                        w_c=np.zeros(d), beta_c=0.0)
    assert qran_predict(np.ones(d), params) == 0.5
    params.beta_c = 20.0
    assert qran_predict(np.ones(d), params) > 0.999999
    with pytest.raises(ShapeError):
        qran_predict(np.ones(d + 1), params)


def test_softmax_shift_invariance_at_logit_level(rng):
    mu = rng.standard_normal(5)
    a = ag.softmax_rows(ag.const(mu)).data
    b = ag.softmax_rows(ag.const(mu + 13.7)).data
    assert np.allclose(a, b, atol=1e-12)


def test_decision_depends_only_on_logit_sign(rng):
    d = 4
    params = init_qran(d, seed=2)
    params.w_c = rng.standard_normal(d)
    for _ in range(20):
        v_g = rng.standard_normal(d)
        logit = params.w_c @ v_g + params.beta_c
        decision = qran_predict(v_g, params) >= 0.5
        assert decision == (logit >= 0)


# ------------------------------------------------------------- tree decoder

def test_greedy_decode_deterministic(rng):
    d = 8
    params = init_tree_decoder(d, seed=3)
    V = rng.standard_normal((7, d))
    a = tree_decode(V, [1, 3], params, max_depth=3)
    b = tree_decode(V, [1, 3], params, max_depth=3)
    assert to_prefix(a.tree) == to_prefix(b.tree)
    assert a.depth_cap_hits == b.depth_cap_hits


def test_depth_zero_forces_single_leaf(rng):
    d = 6
    params = init_tree_decoder(d, seed=4)
    V = rng.standard_normal((5, d))
    out = tree_decode(V, [0, 2], params, max_depth=0)
    assert isinstance(out.tree, (NumberSlot, Constant))
    assert out.depth_cap_hits == 1


def test_decoded_tree_satisfies_invariants(rng):
    d = 8
    for seed in range(6):
        params = init_tree_decoder(d, seed=seed)
        n_q = int(rng.integers(1, 5))
        V = rng.standard_normal((10, d))
        idx = rng.choice(10, size=n_q, replace=False).tolist()
        out = tree_decode(V, idx, params, max_depth=4)
        toks = to_prefix(out.tree)
        tree = parse_prefix(toks)  # arity check passes

        def walk(t, depth):
            assert depth <= 4
            if isinstance(t, NumberSlot):
                assert t.index < n_q
            elif isinstance(t, Operator):
                walk(t.left, depth + 1)
                walk(t.right, depth + 1)
        walk(tree, 0)


def test_gold_candidate_indices():
    params = init_tree_decoder(4, constants=(1.0, 2.0), seed=0)
    assert gold_candidate_index(Operator("+", NumberSlot(0), NumberSlot(1)),
                                params) == 0
    assert gold_candidate_index(Constant(2.0), params) == 6
    assert gold_candidate_index(NumberSlot(3), params) == 7 + 3 - 1 + 1
    with pytest.raises(LabelError):
        gold_candidate_index(Constant(9.0), params)


def test_teacher_forced_loss_gradients_fd(rng):
    d = 6
    params = init_tree_decoder(d, constants=(1.0, 2.0), seed=7)
    V = rng.standard_normal((6, d))
    gold = parse_prefix(["-", "*", "N0", "N1", "C:1"])
    q_idx = [1, 4]

    def loss_value(p):
        pt = {k: ag.const(v) for k, v in p.tensors().items()}
        total, count = teacher_forced_loss(ag.const(V), q_idx, gold, p, pt)
        return float(total.data) / count

    pt = {k: ag.param(v, k) for k, v in params.tensors().items()}
    total, count = teacher_forced_loss(ag.const(V), q_idx, gold, params, pt)
    loss = ag.scale(total, 1.0 / count)
    ag.backward(loss)

    rng2 = np.random.default_rng(1)
    import copy
    for name, tensor in pt.items():
        grad = tensor.grad
        if grad is None:
            continue
        arr = params.tensors()[name]
        flat = arr.ravel()
        picks = rng2.choice(flat.size, size=min(5, flat.size), replace=False)
        for i in picks:
            p2 = copy.deepcopy(params)
            p2.tensors()[name]  # same layout
            ref = dict(p2.tensors())
            ref[name] = ref[name].copy()
            ref[name].ravel()[i] += 1e-5
            p2.update_from(ref)
            up = loss_value(p2)
            ref[name].ravel()[i] -= 2e-5
            p2.update_from(ref)
            dn = loss_value(p2)
            fd = (up - dn) / 2e-5
            an = grad.ravel()[i]
            rel = abs(an - fd) / max(abs(an), abs(fd), 1e-6)
            assert rel < 1e-4, f"{name}[{i}]: {an} vs {fd}"


def test_overfit_tree_decoder_small():
    records = synth_generate(6, 31)
    emb = random_lookup_embeddings(records, 24, synth_vocab_size(), seed=1)
    cfg = HeadConfig(learning_rate=2e-2, epochs=60, seed=0, eval_every=10,
                     constants=(1.0, 2.0, 3.14))
    res = train_decoder("EQUATION", emb, records, cfg)
    assert res.metrics["final_accuracy"] == 1.0


# ------------------------------------------------------------- POS head

def test_pos_rows_sum_to_one(rng):
    head = init_pos_head(5, seed=0)
    V = rng.standard_normal((7, 5))
    probs = pos_predict(V, head)
    assert probs.shape == (7, 12)
    assert np.allclose(probs.sum(axis=1), 1.0, atol=1e-6)


def test_pos_zero_params_uniform(rng):
    from mwpkd.decode import PosHeadParams
    head = PosHeadParams(w_p=np.zeros((12, 4)), b_p=np.zeros(12))
    probs = pos_predict(rng.standard_normal((3, 4)), head)
    assert np.allclose(probs, 1.0 / 12.0, atol=1e-15)


def test_pos_overfit_ten_sentences():
    records = synth_generate(10, 41)
    emb = random_lookup_embeddings(records, 96, synth_vocab_size(), seed=2)
    cfg = HeadConfig(learning_rate=5e-2, epochs=120, seed=0, eval_every=20)
    res = train_decoder("POS", emb, records, cfg)
    assert res.metrics["final_accuracy"] == 1.0


# ------------------------------------------------------------- train_decoder

def test_relation_initial_loss_near_ln2():
    records = synth_generate(60, 8)
    labels = [r.relation_label for r in records]
    # generator interleaves templates: both labels well represented
    assert 0.25 <= np.mean(labels) <= 0.75
    emb = random_lookup_embeddings(records, 16, synth_vocab_size(), seed=3)
    cfg = HeadConfig(learning_rate=1e-2, epochs=1, seed=0)
    res = train_decoder("RELATION", emb, records, cfg)
    first_loss = res.metrics["losses"][0]
    assert abs(first_loss - np.log(2.0)) < 0.1 * np.log(2.0)


def test_relation_trains_to_high_accuracy():
    records = synth_generate(80, 12)
    emb = random_lookup_embeddings(records, 32, synth_vocab_size(), seed=4)
    cfg = HeadConfig(learning_rate=3e-2, epochs=60, seed=0, eval_every=10)
    res = train_decoder("RELATION", emb, records, cfg)
    assert res.metrics["final_accuracy"] >= 0.95


def test_freezing_student_encoder_leaves_checksum(rng):
    from mwpkd.student import StudentConfig, init_student
    records = synth_generate(8, 3)
    cfg = StudentConfig(vocab_size=synth_vocab_size(), d_model=16, n_layers=1,
                        n_heads=2, d_ff=24, max_len=64, seed=0)
    student = init_student(cfg)
    before = student.checksum()
    hcfg = HeadConfig(learning_rate=1e-2, epochs=2, seed=0,
                      encoder_trainable=False)
    train_decoder("RELATION", student, records, hcfg)
    assert student.checksum() == before


def test_trainable_student_encoder_changes(rng):
    from mwpkd.student import StudentConfig, init_student
    records = synth_generate(6, 3)
    cfg = StudentConfig(vocab_size=synth_vocab_size(), d_model=16, n_layers=1,
                        n_heads=2, d_ff=24, max_len=64, seed=0)
    student = init_student(cfg)
    before = student.checksum()
    hcfg = HeadConfig(learning_rate=1e-2, epochs=2, seed=0,
                      encoder_trainable=True)
    train_decoder("RELATION", student, records, hcfg)
    assert student.checksum() != before


def test_eval_curve_length_matches_epochs():
    records = synth_generate(12, 6)
    emb = random_lookup_embeddings(records, 8, synth_vocab_size(), seed=5)
    cfg = HeadConfig(learning_rate=1e-2, epochs=7, seed=0, eval_every=3)
    res = train_decoder("RELATION", emb, records, cfg)
    assert len(res.metrics["curve"]) == 7


def test_minibatch_training_deterministic():
    records = synth_generate(16, 19)
    emb = random_lookup_embeddings(records, 12, synth_vocab_size(), seed=6)
    outs = []
    for _ in range(2):
        cfg = HeadConfig(learning_rate=1e-2, epochs=4, batch_size=5, seed=3)
        res = train_decoder("RELATION", emb, records, cfg)
        outs.append((res.metrics["losses"], res.head.w_r.copy()))
    assert outs[0][0] == outs[1][0]
    assert np.array_equal(outs[0][1], outs[1][1])


# ------------------------------------------------------------- attribution

def test_attribution_single_token_corpus():
    records = synth_generate(4, 2)
    # make every problem the same single token
    for rec in records:
        rec.tokens = ["apples"]
        rec.token_ids = [0]
        rec.pos_tags = ["NOUN"]
    emb = random_lookup_embeddings(records, 6, 4, seed=0)
    table = top_token_attribution(emb, records)
    counts = dict(table)
    assert counts["noun"] == 6
    assert sum(counts.values()) == 6


def test_attribution_categories_exact_and_sum():
    records = synth_generate(30, 15)
    emb = random_lookup_embeddings(records, 20, synth_vocab_size(), seed=1)
    table = top_token_attribution(emb, records)
    names = [c for c, _ in table]
    assert sorted(names) == sorted(["punctuation", "noun", "number",
                                    "keyword", "quantity-word", "other"])
    assert sum(c for _, c in table) == 20
    # ranked descending
    vals = [c for _, c in table]
    assert vals == sorted(vals, reverse=True)


def test_attribution_alignment_error():
    from mwpkd.errors import AlignmentError
    records = synth_generate(3, 1)
    emb = random_lookup_embeddings(records, 4, synth_vocab_size(), seed=0)
    with pytest.raises(AlignmentError):
        top_token_attribution(emb, records[:2])

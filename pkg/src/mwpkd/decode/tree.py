"""Goal-driven top-down tree decoder.

A goal vector (attention pooling of the problem vectors) scores every
candidate: the five operators and the configured constants through learned
embeddings, and each number slot through its contextual token vector. Picking
an operator splits the goal into a left goal, then, once the left subtree is
built and merged into a subtree embedding, a right goal. Greedy decoding is
deterministic with ties to the lower candidate index; operators are masked
out beyond the depth cap.

Candidate index order: operators (+ - * / ^), then constants, then slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .. import autograd as ag
from ..errors import DecodeError, LabelError, ShapeError
from .expr import OPERATORS, Constant, ExprTree, NumberSlot, Operator

DEFAULT_CONSTANTS = (1.0, 2.0, 3.14)


@dataclass
class TreeDecoderParams:
    constants: tuple[float, ...]
    embeddings: np.ndarray  # (5 + len(constants), d): operators then constants
    w_s: np.ndarray         # (d, 2d) candidate scoring
    v_s: np.ndarray         # (d,)   scoring output vector
    w_left: np.ndarray      # (d, 2d)
    w_right: np.ndarray     # (d, 3d)
    w_merge: np.ndarray     # (d, 3d)
    u_pool: np.ndarray      # (d,)   root attention query

    @property
    def dim(self) -> int:
        return self.embeddings.shape[1]

    def tensors(self) -> dict[str, np.ndarray]:
        return {"tree.embeddings": self.embeddings, "tree.w_s": self.w_s,
                "tree.v_s": self.v_s, "tree.w_left": self.w_left,
                "tree.w_right": self.w_right, "tree.w_merge": self.w_merge,
                "tree.u_pool": self.u_pool}

    def update_from(self, named: dict[str, np.ndarray]) -> None:
        self.embeddings = named["tree.embeddings"]
        self.w_s = named["tree.w_s"]
        self.v_s = named["tree.v_s"]
        self.w_left = named["tree.w_left"]
        self.w_right = named["tree.w_right"]
        self.w_merge = named["tree.w_merge"]
        self.u_pool = named["tree.u_pool"]


@dataclass
class DecodeResult:
    tree: ExprTree
    depth_cap_hits: int = 0
    metadata: dict = field(default_factory=dict)


def init_tree_decoder(d: int, constants=DEFAULT_CONSTANTS,
                      seed: int = 0) -> TreeDecoderParams:
    rng = np.random.default_rng(seed)

    def xav(shape):
        limit = np.sqrt(6.0 / sum(shape))
        return rng.uniform(-limit, limit, size=shape)

    m = len(constants)
    return TreeDecoderParams(
        constants=tuple(float(c) for c in constants),
        embeddings=xav((5 + m, d)),
        w_s=xav((d, 2 * d)),
        v_s=xav((d, 1)).ravel(),
        w_left=xav((d, 2 * d)),
        w_right=xav((d, 3 * d)),
        w_merge=xav((d, 3 * d)),
        u_pool=xav((d, 1)).ravel(),
    )


def candidate_count(params: TreeDecoderParams, n_slots: int) -> int:
    return 5 + len(params.constants) + n_slots


def gold_candidate_index(node: ExprTree, params: TreeDecoderParams) -> int:
    if isinstance(node, Operator):
        return OPERATORS.index(node.op)
    if isinstance(node, Constant):
        for j, c in enumerate(params.constants):
            if abs(c - node.value) < 1e-12:
                return 5 + j
        raise LabelError(f"constant {node.value!r} not in decoder vocabulary "
                         f"{params.constants}")
    return 5 + len(params.constants) + node.index


# ---------------------------------------------------------------- graph side

def _candidate_matrix(V: ag.Tensor, quantity_indices,
                      pt: dict[str, ag.Tensor]) -> ag.Tensor:
    idx = np.asarray(list(quantity_indices), dtype=np.intp)
    emb = pt["tree.embeddings"]
    if idx.size:
        slots = ag.gather_rows(V, idx)
        return ag.concat_rows(emb, slots)
    return emb


def _scores(q: ag.Tensor, cands: ag.Tensor, pt: dict[str, ag.Tensor]) -> ag.Tensor:
    c = cands.data.shape[0]
    cat = ag.concat_cols(ag.tile_row(q, c), cands)
    return ag.matmul(ag.tanh(ag.matmul(cat, ag.transpose(pt["tree.w_s"]))),
                     pt["tree.v_s"])


def _root_goal(V: ag.Tensor, pt: dict[str, ag.Tensor]) -> ag.Tensor:
    attn = ag.softmax_rows(ag.matmul(V, pt["tree.u_pool"]))
    return ag.matmul(attn, V)


def _left_goal(q, e_op, pt):
    return ag.tanh(ag.matmul(pt["tree.w_left"], ag.concat_vec([q, e_op])))


def _right_goal(q, e_op, t_left, pt):
    return ag.tanh(ag.matmul(pt["tree.w_right"],
                             ag.concat_vec([q, e_op, t_left])))


def _merge(e_op, t_left, t_right, pt):
    return ag.tanh(ag.matmul(pt["tree.w_merge"],
                             ag.concat_vec([e_op, t_left, t_right])))


def teacher_forced_loss(V: ag.Tensor, quantity_indices, gold: ExprTree,
                        params: TreeDecoderParams,
                        pt: dict[str, ag.Tensor]) -> tuple[ag.Tensor, int]:
    """Sum of per-node cross-entropies along the gold traversal, plus the
    node count. Goals and subtree embeddings are computed with gold choices."""
    cands = _candidate_matrix(V, quantity_indices, pt)
    terms: list[ag.Tensor] = []

    def visit(q: ag.Tensor, node: ExprTree) -> ag.Tensor:
        gi = gold_candidate_index(node, params)
        logits = ag.stack_rows([_scores(q, cands, pt)])
        terms.append(ag.cross_entropy_rows(logits, [gi]))
        if isinstance(node, Operator):
            e_op = ag.row(pt["tree.embeddings"], OPERATORS.index(node.op))
            t_l = visit(_left_goal(q, e_op, pt), node.left)
            t_r = visit(_right_goal(q, e_op, t_l, pt), node.right)
            return _merge(e_op, t_l, t_r, pt)
        return ag.row(cands, gi)

    visit(_root_goal(V, pt), gold)
    total = terms[0]
    for term in terms[1:]:
        total = ag.add(total, term)
    return total, len(terms)


# ---------------------------------------------------------------- greedy side

def tree_decode(V: np.ndarray, quantity_indices, params: TreeDecoderParams,
                max_depth: int = 6) -> DecodeResult:
    """Greedy top-down decode; operators are masked at the depth cap and the
    number of capped positions is recorded on the result."""
    V = np.asarray(V, dtype=np.float64)
    if V.ndim != 2 or V.shape[1] != params.dim:
        raise ShapeError(f"vectors have shape {V.shape}, decoder expects "
                         f"(*, {params.dim})")
    idx = list(quantity_indices)
    n_operands = len(params.constants) + len(idx)
    if n_operands == 0:
        raise DecodeError("no operand candidates: no constants, no quantities")

    pt = {k: ag.const(v) for k, v in params.tensors().items()}
    vt = ag.const(V)
    cands_t = _candidate_matrix(vt, idx, pt)
    cands = cands_t.data
    cap_hits = 0

    def scores_for(q: np.ndarray) -> np.ndarray:
        return _scores(ag.const(q), cands_t, pt).data

    def decode(q: np.ndarray, depth: int) -> tuple[ExprTree, np.ndarray]:
        nonlocal cap_hits
        s = scores_for(q)
        if depth >= max_depth:
            s = s.copy()
            s[:5] = -np.inf
            cap_hits += 1
        choice = int(np.argmax(s))  # argmax takes the first max: lower index
        if choice < 5:
            op = OPERATORS[choice]
            e_op = ag.const(cands[choice])
            qt = ag.const(q)
            q_l = _left_goal(qt, e_op, pt).data
            left, t_l = decode(q_l, depth + 1)
            q_r = _right_goal(qt, e_op, ag.const(t_l), pt).data
            right, t_r = decode(q_r, depth + 1)
            t = _merge(e_op, ag.const(t_l), ag.const(t_r), pt).data
            return Operator(op, left, right), t
        if choice < 5 + len(params.constants):
            return Constant(params.constants[choice - 5]), cands[choice]
        return NumberSlot(choice - 5 - len(params.constants)), cands[choice]

    tree, _ = decode(_root_goal(vt, pt).data, 0)
    return DecodeResult(tree=tree, depth_cap_hits=cap_hits)

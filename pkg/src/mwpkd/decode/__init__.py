"""Evaluation decoders: relation head, equation tree decoder, answer
evaluation, POS head, and token attribution."""

from .expr import (Constant, ExprTree, NumberSlot, Operator, eval_expr,
                   eval_prefix, parse_prefix, prefix_is_wellformed, to_prefix)
from .qran import (QranParams, init_qran, qran_goal_vector, qran_predict,
                   quantity_vectors)
from .tree import (DEFAULT_CONSTANTS, DecodeResult, TreeDecoderParams,
                   init_tree_decoder, tree_decode)
from .pos import PosHeadParams, init_pos_head, pos_predict
from .train import (HeadConfig, HeadResult, evaluate_head,
                    init_linear_compressor, train_decoder)
from .attribution import CATEGORIES, top_token_attribution

__all__ = [
    "Constant", "ExprTree", "NumberSlot", "Operator", "eval_expr",
    "eval_prefix", "parse_prefix", "prefix_is_wellformed", "to_prefix",
    "QranParams", "init_qran", "qran_goal_vector", "qran_predict",
    "quantity_vectors",
    "DEFAULT_CONSTANTS", "DecodeResult", "TreeDecoderParams",
    "init_tree_decoder", "tree_decode",
    "PosHeadParams", "init_pos_head", "pos_predict",
    "HeadConfig", "HeadResult", "evaluate_head", "init_linear_compressor",
    "train_decoder",
    "CATEGORIES", "top_token_attribution",
]

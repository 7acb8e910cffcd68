"""Binary expression trees over number slots and constants.

Token alphabet for the prefix form: operators {+ - * / ^}, number slots
N0..N9 indexing the problem's quantities in quantity_indices order, and
constants written C:<decimal> (C:1, C:3.14). ^ is real exponentiation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..errors import DivZeroError, DomainError, NonFiniteError, ValidationError

OPERATORS = ("+", "-", "*", "/", "^")
MAX_SLOTS = 10
DENOM_EPS = 1e-12


@dataclass(frozen=True)
class Operator:
    op: str
    left: "ExprTree"
    right: "ExprTree"


@dataclass(frozen=True)
class NumberSlot:
    index: int


@dataclass(frozen=True)
class Constant:
    value: float


ExprTree = Operator | NumberSlot | Constant


def _parse_leaf(token: str) -> ExprTree | None:
    if len(token) == 2 and token[0] == "N" and token[1].isdigit():
        return NumberSlot(int(token[1]))
    if token.startswith("C:"):
        try:
            return Constant(float(token[2:]))
        except ValueError:
            return None
    return None


def parse_prefix(tokens: list[str]) -> ExprTree:
    """Parse a prefix token list into a tree.

    Raises ValidationError on unknown tokens, missing operands, or trailing
    tokens (the arity check).
    """
    pos = 0

    def parse() -> ExprTree:
        nonlocal pos
        if pos >= len(tokens):
            raise ValidationError("prefix expression ended while expecting an operand")
        tok = tokens[pos]
        pos += 1
        if tok in OPERATORS:
            left = parse()
            right = parse()
            return Operator(tok, left, right)
        leaf = _parse_leaf(tok)
        if leaf is None:
            raise ValidationError(f"unknown equation token {tok!r}")
        return leaf

    tree = parse()
    if pos != len(tokens):
        raise ValidationError(
            f"trailing tokens after position {pos} in prefix expression")
    return tree


def prefix_is_wellformed(tokens: list[str]) -> bool:
    try:
        parse_prefix(tokens)
        return True
    except ValidationError:
        return False


def to_prefix(tree: ExprTree) -> list[str]:
    if isinstance(tree, Operator):
        return [tree.op] + to_prefix(tree.left) + to_prefix(tree.right)
    if isinstance(tree, NumberSlot):
        return [f"N{tree.index}"]
    return [_format_const(tree.value)]


def _format_const(v: float) -> str:
    if v == int(v) and abs(v) < 1e15:
        return f"C:{int(v)}"
    return f"C:{v!r}"


def tree_depth(tree: ExprTree) -> int:
    """Operator nesting depth; a bare leaf has depth 0."""
    if isinstance(tree, Operator):
        return 1 + max(tree_depth(tree.left), tree_depth(tree.right))
    return 0


def slot_indices(tree: ExprTree) -> list[int]:
    if isinstance(tree, Operator):
        return slot_indices(tree.left) + slot_indices(tree.right)
    if isinstance(tree, NumberSlot):
        return [tree.index]
    return []


def eval_expr(tree: ExprTree, quantity_values: list[float]) -> float:
    """Recursively evaluate the tree over the problem's quantity values."""
    if isinstance(tree, NumberSlot):
        if tree.index >= len(quantity_values):
            raise ValidationError(
                f"number slot N{tree.index} but only "
                f"{len(quantity_values)} quantities")
        return float(quantity_values[tree.index])
    if isinstance(tree, Constant):
        return float(tree.value)
    a = eval_expr(tree.left, quantity_values)
    b = eval_expr(tree.right, quantity_values)
    op = tree.op
    if op == "+":
        out = a + b
    elif op == "-":
        out = a - b
    elif op == "*":
        out = a * b
    elif op == "/":
        if abs(b) < DENOM_EPS:
            raise DivZeroError(f"division by {b!r}")
        out = a / b
    elif op == "^":
        if a == 0.0 and b < 0.0:
            raise DomainError("0 raised to a negative power")
        if a < 0.0 and b != int(b):
            raise DomainError(f"negative base {a!r} with non-integer exponent {b!r}")
        out = a ** b
    else:  # unreachable for parsed trees
        raise ValidationError(f"unknown operator {op!r}")
    if not math.isfinite(out):
        raise NonFiniteError(f"expression evaluated to {out!r}")
    return out


def eval_prefix(tokens: list[str], quantity_values: list[float]) -> float:
    return eval_expr(parse_prefix(tokens), quantity_values)

"""Problem records, the fixed POS tagset, and the JSONL dataset format.

One record per line, UTF-8, fields exactly:
id, text, tokens, token_ids, quantity_indices, quantity_values, pos_tags,
equation_prefix, answer, relation_label.

The answer is written as a decimal string (locale-proof); numeric values are
accepted on input.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .._io import write_atomic_text
from ..decode.expr import eval_prefix, parse_prefix
from ..errors import (DivZeroError, DomainError, NonFiniteError, SchemaError,
                      ValidationError)
from ..postags import POS_TAGS, _INDEX as _POS_INDEX, tag_index as pos_tag_index


@dataclass
class MwpRecord:
    id: str
    text: str
    tokens: list[str]
    token_ids: list[int]
    quantity_indices: list[int]
    quantity_values: list[float]
    pos_tags: list[str]
    equation_prefix: list[str]
    answer: float
    relation_label: int
    # anything loaders should ignore lands here, never in the schema
    extras: dict = field(default_factory=dict, repr=False, compare=False)


_FIELDS = ("id", "text", "tokens", "token_ids", "quantity_indices",
           "quantity_values", "pos_tags", "equation_prefix", "answer",
           "relation_label")

ANSWER_REL_TOL = 1e-6


def _require(cond: bool, msg: str, cls=SchemaError):
    if not cond:
        raise cls(msg)


def _as_float(value, field_name: str) -> float:
    if isinstance(value, bool):
        raise SchemaError(f"field {field_name!r} has wrong type bool")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            pass
    raise SchemaError(f"field {field_name!r} is not numeric: {value!r}")


def _str_list(value, field_name: str) -> list[str]:
    _require(isinstance(value, list) and all(isinstance(x, str) for x in value),
             f"field {field_name!r} must be a list of strings")
    return list(value)


def _int_list(value, field_name: str) -> list[int]:
    ok = isinstance(value, list) and all(
        isinstance(x, int) and not isinstance(x, bool) for x in value)
    _require(ok, f"field {field_name!r} must be a list of integers")
    return list(value)


def record_from_dict(obj: dict) -> MwpRecord:
    """Build a record from a parsed JSON object; schema errors name the field."""
    if not isinstance(obj, dict):
        raise SchemaError("record is not a JSON object")
    missing = [f for f in _FIELDS if f not in obj]
    if missing:
        raise SchemaError(f"missing field {missing[0]!r}")
    extra = [k for k in obj if k not in _FIELDS]
    if extra:
        raise SchemaError(f"unexpected field {extra[0]!r}")
    _require(isinstance(obj["id"], str), "field 'id' must be a string")
    _require(isinstance(obj["text"], str), "field 'text' must be a string")
    label = obj["relation_label"]
    _require(isinstance(label, int) and not isinstance(label, bool)
             and label in (0, 1), "field 'relation_label' must be 0 or 1")
    rec = MwpRecord(
        id=obj["id"],
        text=obj["text"],
        tokens=_str_list(obj["tokens"], "tokens"),
        token_ids=_int_list(obj["token_ids"], "token_ids"),
        quantity_indices=_int_list(obj["quantity_indices"], "quantity_indices"),
        quantity_values=[_as_float(v, "quantity_values")
                         for v in _require_list(obj["quantity_values"], "quantity_values")],
        pos_tags=_str_list(obj["pos_tags"], "pos_tags"),
        equation_prefix=_str_list(obj["equation_prefix"], "equation_prefix"),
        answer=_as_float(obj["answer"], "answer"),
        relation_label=label,
    )
    return rec


def _require_list(value, field_name: str) -> list:
    _require(isinstance(value, list), f"field {field_name!r} must be a list")
    return value


def validate_record(rec: MwpRecord) -> None:
    """Check every record invariant; raises ValidationError with the id."""
    rid = rec.id

    def bad(reason: str):
        raise ValidationError(f"record {rid!r}: {reason}")

    n = len(rec.tokens)
    if len(rec.pos_tags) != n or len(rec.token_ids) != n:
        bad(f"tokens/token_ids/pos_tags lengths differ "
            f"({n}/{len(rec.token_ids)}/{len(rec.pos_tags)})")
    for t in rec.pos_tags:
        if t not in _POS_INDEX:
            bad(f"unknown POS tag {t!r}")
    for tid in rec.token_ids:
        if tid < 0:
            bad(f"negative token id {tid}")
    if len(rec.quantity_values) != len(rec.quantity_indices):
        bad("quantity_values and quantity_indices lengths differ")
    for qi in rec.quantity_indices:
        if not (0 <= qi < n):
            bad(f"quantity index {qi} out of range for {n} tokens")
    try:
        tree = parse_prefix(rec.equation_prefix)
    except ValidationError as exc:
        bad(f"malformed equation: {exc}")
    for slot in _slots(tree):
        if slot >= len(rec.quantity_values):
            bad(f"equation uses N{slot} but only "
                f"{len(rec.quantity_values)} quantities")
    try:
        value = eval_prefix(rec.equation_prefix, rec.quantity_values)
    except (DivZeroError, DomainError, NonFiniteError) as exc:
        bad(f"equation does not evaluate: {exc}")
    tol = ANSWER_REL_TOL * max(1.0, abs(rec.answer))
    if abs(value - rec.answer) > tol:
        bad(f"equation evaluates to {value!r}, answer says {rec.answer!r}")


def _slots(tree):
    from ..decode.expr import slot_indices
    return slot_indices(tree)


def record_to_dict(rec: MwpRecord) -> dict:
    return {
        "id": rec.id,
        "text": rec.text,
        "tokens": list(rec.tokens),
        "token_ids": list(rec.token_ids),
        "quantity_indices": list(rec.quantity_indices),
        "quantity_values": [float(v) for v in rec.quantity_values],
        "pos_tags": list(rec.pos_tags),
        "equation_prefix": list(rec.equation_prefix),
        "answer": repr(float(rec.answer)),
        "relation_label": int(rec.relation_label),
    }


def load_dataset(path: str | Path) -> list[MwpRecord]:
    """Read and validate a JSONL dataset; records come back in file order."""
    path = Path(path)
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"line {lineno}: invalid JSON: {exc}") from exc
            try:
                rec = record_from_dict(obj)
            except SchemaError as exc:
                raise SchemaError(f"line {lineno}: {exc}") from exc
            validate_record(rec)
            records.append(rec)
    return records


def save_dataset(records: list[MwpRecord], path: str | Path) -> None:
    lines = [json.dumps(record_to_dict(r), ensure_ascii=False) for r in records]
    write_atomic_text(path, "\n".join(lines) + ("\n" if lines else ""))

"""Which token categories dominate the embedding dimensions.

For every embedding dimension, find the corpus token whose vector has the
largest absolute value in that dimension (top_m tokens when top_m > 1), then
bucket those tokens into six categories and rank the counts.
"""

from __future__ import annotations

import numpy as np

from ..errors import AlignmentError, ParamError

CATEGORIES = ("punctuation", "noun", "number", "keyword", "quantity-word",
              "other")

# words that carry the mathematical skeleton of a problem
KEYWORDS = frozenset({
    "how", "many", "much", "more", "less", "than", "total", "together",
    "altogether", "each", "every", "left", "remain", "remains", "plus",
    "minus", "times", "sum", "difference", "extra", "equally", "rest",
})

QUANTITY_WORDS = frozenset({
    "half", "double", "twice", "quarter", "third", "triple", "dozen",
})

_NUMERIC = set("0123456789")


def _looks_numeric(token: str) -> bool:
    return bool(token) and bool(set(token) & _NUMERIC)


def categorize_token(token: str, pos_tag: str) -> str:
    low = token.lower()
    if pos_tag == "PUNCT":
        return "punctuation"
    if low in QUANTITY_WORDS:
        return "quantity-word"
    if pos_tag == "NUM" or _looks_numeric(token):
        return "number"
    if low in KEYWORDS:
        return "keyword"
    if pos_tag == "NOUN":
        return "noun"
    return "other"


def top_token_attribution(E, dataset, top_m: int = 1) -> list[tuple[str, int]]:
    """Ranked (category, count) pairs, all six categories present; counts sum
    to dim * top_m. Problem ids and lengths must align with the dataset."""
    if top_m < 1:
        raise ParamError(f"top_m must be >= 1, got {top_m}")
    by_id = {rec.id: rec for rec in dataset}
    mats = []
    tokens: list[str] = []
    tags: list[str] = []
    for p in E.problems:
        rec = by_id.get(p.id)
        if rec is None:
            raise AlignmentError(f"embedding problem {p.id!r} not in dataset")
        if p.matrix.shape[0] != len(rec.tokens):
            raise AlignmentError(
                f"problem {p.id!r}: {p.matrix.shape[0]} rows vs "
                f"{len(rec.tokens)} tokens")
        mats.append(np.abs(p.matrix.astype(np.float64)))
        tokens.extend(rec.tokens)
        tags.extend(rec.pos_tags)
    if not mats:
        raise AlignmentError("embedding set holds no problems")

    stacked = np.vstack(mats)  # (total_tokens, dim)
    counts = {c: 0 for c in CATEGORIES}
    m = min(top_m, stacked.shape[0])
    for j in range(stacked.shape[1]):
        col = stacked[:, j]
        if m == 1:
            winners = [int(col.argmax())]
        else:
            part = np.argpartition(-col, m - 1)[:m]
            winners = part[np.argsort(-col[part], kind="stable")]
        for w in winners:
            counts[categorize_token(tokens[w], tags[w])] += 1

    order = sorted(CATEGORIES, key=lambda c: (-counts[c], CATEGORIES.index(c)))
    return [(c, counts[c]) for c in order]

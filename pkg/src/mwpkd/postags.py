"""The fixed 12-tag POS inventory. Indices are stable in this order."""

import numpy as np

from .errors import ValidationError

POS_TAGS = ("NOUN", "VERB", "NUM", "ADJ", "ADV", "PRON", "DET", "ADP",
            "CONJ", "PART", "PUNCT", "X")
_INDEX = {t: i for i, t in enumerate(POS_TAGS)}


def tag_index(tag: str) -> int:
    try:
        return _INDEX[tag]
    except KeyError:
        raise ValidationError(f"unknown POS tag {tag!r}") from None


def tags_to_indices(tags) -> np.ndarray:
    return np.array([tag_index(t) for t in tags], dtype=np.intp)

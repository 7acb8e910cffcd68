"""Toy encoders for desk-scale runs.

A random lookup table maps every vocabulary id to a fixed random vector, so
"encoding" a problem is a gather over its token ids. This doubles as the toy
distillation teacher: a random linear map applied to one-hot token ids is
exactly such a table lookup.
"""

from __future__ import annotations

import numpy as np

from ..corpus.emb_io import EmbeddingSet, EmbProblem


def _table(vocab_size: int, dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.standard_normal((vocab_size, dim))


def random_lookup_embeddings(records, dim: int, vocab_size: int, seed: int = 0,
                             source_tag: str = "toy-lookup") -> EmbeddingSet:
    """Frozen random encoder: one fixed random vector per token id."""
    table = _table(vocab_size, dim, seed)
    problems = []
    for rec in records:
        ids = np.asarray(rec.token_ids, dtype=np.intp)
        problems.append(EmbProblem(
            id=rec.id, matrix=table[ids].astype(np.float32),
            tokens=list(rec.tokens), token_ids=list(rec.token_ids)))
    es = EmbeddingSet(dim=dim, problems=problems, vocab_size=vocab_size,
                      source_tag=source_tag)
    es.validate()
    return es


def toy_teacher_embeddings(records, dim: int, vocab_size: int, seed: int = 0,
                           source_tag: str = "toy-teacher") -> EmbeddingSet:
    """Distillation targets from a random linear map of one-hot token ids."""
    return random_lookup_embeddings(records, dim, vocab_size, seed=seed,
                                    source_tag=source_tag)

"""Data model, file formats, and the synthetic problem generator."""

from .records import (POS_TAGS, MwpRecord, load_dataset, pos_tag_index,
                      save_dataset, validate_record)
from .emb_io import EmbeddingSet, EmbProblem, read_embeddings, write_embeddings
from .synth import SYNTH_VOCAB, synth_generate, synth_vocab_size, template_names

__all__ = [
    "POS_TAGS", "MwpRecord", "load_dataset", "save_dataset", "validate_record",
    "pos_tag_index",
    "EmbeddingSet", "EmbProblem", "read_embeddings", "write_embeddings",
    "SYNTH_VOCAB", "synth_generate", "synth_vocab_size", "template_names",
]

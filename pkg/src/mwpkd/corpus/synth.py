"""Deterministic synthetic math-word-problem generator.

Nine hand-tagged templates span one- to three-operator equations over two to
four quantities, all four basic operators, and both relation labels. Every
template contains all 12 POS tags, so any sample window covers the full
inventory. Quantity surfaces mix integers, decimals, fraction numerals
("1/2"), and descriptive words ("half", "double", "twice"); descriptive
quantity words only occur in relation-positive templates, which is what makes
the relation task linearly separable from token identity alone.

Template selection is a deterministic weighted credit scheduler, so every
template with positive weight appears within any window of len(templates)
records, and generation is reproducible for a fixed (n, seed, mix).
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from ..decode.expr import eval_prefix
from ..errors import ParamError
from .records import MwpRecord, validate_record

# Descriptive quantity words implying a relation; value attached.
RELATION_WORDS = {"half": 0.5, "double": 2.0, "twice": 2.0}

_INT_SURFACES = [str(v) for v in range(2, 100)]
_DEC_SURFACES = ["0.5", "1.5", "2.5", "3.5", "4.5", "5.5", "7.5", "12.5"]
_FRACNUM_SURFACES = [("1/2", 0.5), ("1/4", 0.25), ("3/4", 0.75)]


@dataclass(frozen=True)
class _Slot:
    kind: str  # "int" | "smallint" | "bigint" | "dec" | "num" | "rel"
    choices: tuple = ()


def _sample_slot(slot: _Slot, rng: random.Random) -> tuple[str, float]:
    if slot.kind == "int":
        s = rng.choice(_INT_SURFACES[:28])  # 2..29
        return s, float(s)
    if slot.kind == "smallint":
        s = str(rng.randint(2, 6))
        return s, float(s)
    if slot.kind == "bigint":
        s = str(rng.randint(40, 99))
        return s, float(s)
    if slot.kind == "dec":
        s = rng.choice(_DEC_SURFACES)
        return s, float(s)
    if slot.kind == "num":
        roll = rng.random()
        if roll < 0.5:
            s = rng.choice(_INT_SURFACES[:28])
            return s, float(s)
        if roll < 0.8:
            s = rng.choice(_DEC_SURFACES)
            return s, float(s)
        return rng.choice(_FRACNUM_SURFACES)
    if slot.kind == "rel":
        word = rng.choice(slot.choices)
        return word, RELATION_WORDS[word]
    raise AssertionError(slot.kind)


@dataclass(frozen=True)
class _Template:
    name: str
    body: tuple  # of (word, tag) or (_Slot, "NUM")
    equation: tuple[str, ...]
    label: int

    def constraint(self, values: list[float]) -> bool:
        try:
            ans = eval_prefix(list(self.equation), values)
        except Exception:
            return False
        return 0.0 < ans < 1e6


def _t(*pairs):
    return tuple(pairs)


TEMPLATES: tuple[_Template, ...] = (
    _Template(
        "add_weights", _t(
            ("Leo", "NOUN"), ("bought", "VERB"), (_Slot("int"), "NUM"),
            ("kg", "X"), ("of", "ADP"), ("fresh", "ADJ"), ("apples", "NOUN"),
            ("and", "CONJ"), (_Slot("num"), "NUM"), ("kg", "X"), ("of", "ADP"),
            ("ripe", "ADJ"), ("pears", "NOUN"), (";", "PUNCT"), ("he", "PRON"),
            ("wants", "VERB"), ("to", "PART"), ("weigh", "VERB"),
            ("the", "DET"), ("fruit", "NOUN"), ("together", "ADV"),
            (",", "PUNCT"), ("how", "ADV"), ("many", "ADJ"), ("kg", "X"),
            ("does", "VERB"), ("he", "PRON"), ("carry", "VERB"), ("?", "PUNCT")),
        ("+", "N0", "N1"), 0),
    _Template(
        "cut_ribbon", _t(
            ("Mia", "NOUN"), ("had", "VERB"), ("a", "DET"), ("long", "ADJ"),
            ("ribbon", "NOUN"), ("of", "ADP"), (_Slot("bigint"), "NUM"),
            ("cm", "X"), ("and", "CONJ"), ("quickly", "ADV"), ("cut", "VERB"),
            (_Slot("dec"), "NUM"), ("cm", "X"), ("away", "ADV"), (";", "PUNCT"),
            ("she", "PRON"), ("hopes", "VERB"), ("to", "PART"), ("keep", "VERB"),
            ("the", "DET"), ("rest", "NOUN"), (",", "PUNCT"), ("how", "ADV"),
            ("many", "ADJ"), ("cm", "X"), ("are", "VERB"), ("left", "VERB"),
            ("?", "PUNCT")),
        ("-", "N0", "N1"), 0),
    _Template(
        "juice_boxes", _t(
            ("A", "DET"), ("small", "ADJ"), ("shop", "NOUN"), ("sells", "VERB"),
            (_Slot("int"), "NUM"), ("boxes", "NOUN"), ("daily", "ADV"),
            ("and", "CONJ"), ("each", "DET"), ("box", "NOUN"), ("holds", "VERB"),
            (_Slot("num"), "NUM"), ("ml", "X"), ("of", "ADP"), ("juice", "NOUN"),
            (";", "PUNCT"), ("we", "PRON"), ("want", "VERB"), ("to", "PART"),
            ("know", "VERB"), ("the", "DET"), ("total", "NOUN"), (",", "PUNCT"),
            ("how", "ADV"), ("much", "ADJ"), ("juice", "NOUN"), ("is", "VERB"),
            ("sold", "VERB"), ("?", "PUNCT")),
        ("*", "N0", "N1"), 0),
    _Template(
        "share_candy", _t(
            ("Nina", "NOUN"), ("shares", "VERB"), (_Slot("bigint"), "NUM"),
            ("g", "X"), ("of", "ADP"), ("sweet", "ADJ"), ("candy", "NOUN"),
            ("equally", "ADV"), ("among", "ADP"), (_Slot("smallint"), "NUM"),
            ("kids", "NOUN"), ("and", "CONJ"), ("they", "PRON"),
            ("agree", "VERB"), ("to", "PART"), ("start", "VERB"), ("the", "DET"),
            ("game", "NOUN"), ("now", "ADV"), (",", "PUNCT"), ("how", "ADV"),
            ("many", "ADJ"), ("g", "X"), ("does", "VERB"), ("each", "DET"),
            ("kid", "NOUN"), ("get", "VERB"), ("?", "PUNCT")),
        ("/", "N0", "N1"), 0),
    _Template(
        "book_half", _t(
            ("Ben", "NOUN"), ("read", "VERB"), (_Slot("int"), "NUM"),
            ("pages", "NOUN"), ("of", "ADP"), ("a", "DET"), ("thick", "ADJ"),
            ("book", "NOUN"), ("today", "ADV"), ("and", "CONJ"),
            ("then", "ADV"), ("exactly", "ADV"),
            (_Slot("rel", ("half",)), "NUM"), ("of", "ADP"), ("the", "DET"),
            ("next", "ADJ"), (_Slot("int"), "NUM"), ("pages", "NOUN"),
            (";", "PUNCT"), ("he", "PRON"), ("tries", "VERB"), ("to", "PART"),
            ("finish", "VERB"), ("them", "PRON"), (",", "PUNCT"), ("pp", "X"),
            ("how", "ADV"), ("many", "ADJ"), ("pages", "NOUN"), ("did", "VERB"),
            ("he", "PRON"), ("read", "VERB"), ("?", "PUNCT")),
        ("+", "N0", "*", "N1", "N2"), 1),
    _Template(
        "saved_twice", _t(
            ("Sara", "NOUN"), ("saved", "VERB"), (_Slot("int"), "NUM"),
            ("$", "X"), ("this", "DET"), ("sunny", "ADJ"), ("week", "NOUN"),
            (";", "PUNCT"), ("her", "PRON"), ("brother", "NOUN"),
            ("saved", "VERB"), (_Slot("rel", ("twice", "double")), "NUM"),
            (_Slot("int"), "NUM"), ("$", "X"), ("by", "ADP"),
            ("working", "VERB"), ("hard", "ADV"), ("and", "CONJ"),
            ("fast", "ADV"), (",", "PUNCT"), ("we", "PRON"), ("need", "VERB"),
            ("to", "PART"), ("compare", "VERB"), ("the", "DET"),
            ("amounts", "NOUN"), (",", "PUNCT"), ("how", "ADV"),
            ("much", "ADJ"), ("extra", "ADJ"), ("did", "VERB"), ("he", "PRON"),
            ("save", "VERB"), ("?", "PUNCT")),
        ("-", "*", "N1", "N2", "N0"), 1),
    _Template(
        "egg_trays", _t(
            ("A", "DET"), ("busy", "ADJ"), ("farmer", "NOUN"), ("packs", "VERB"),
            (_Slot("smallint"), "NUM"), ("trays", "NOUN"), ("of", "ADP"),
            (_Slot("int"), "NUM"), ("white", "ADJ"), ("eggs", "NOUN"),
            ("and", "CONJ"), (_Slot("smallint"), "NUM"), ("boxes", "NOUN"),
            ("of", "ADP"), (_Slot("int"), "NUM"), ("brown", "ADJ"),
            ("eggs", "NOUN"), ("daily", "ADV"), (";", "PUNCT"),
            ("buyers", "NOUN"), ("come", "VERB"), ("to", "PART"),
            ("collect", "VERB"), ("them", "PRON"), ("quickly", "ADV"),
            (",", "PUNCT"), ("pcs", "X"), ("how", "ADV"), ("many", "ADJ"),
            ("eggs", "NOUN"), ("does", "VERB"), ("she", "PRON"),
            ("pack", "VERB"), ("?", "PUNCT")),
        ("+", "*", "N0", "N1", "*", "N2", "N3"), 0),
    _Template(
        "tank_drain", _t(
            ("A", "DET"), ("steel", "ADJ"), ("tank", "NOUN"), ("holds", "VERB"),
            (_Slot("bigint"), "NUM"), ("L", "X"), ("of", "ADP"),
            ("cold", "ADJ"), ("water", "NOUN"), (";", "PUNCT"), ("a", "DET"),
            ("pump", "NOUN"), ("drains", "VERB"), (_Slot("smallint"), "NUM"),
            ("L", "X"), ("every", "DET"), ("minute", "NOUN"), ("for", "ADP"),
            (_Slot("rel", ("double",)), "NUM"), (_Slot("smallint"), "NUM"),
            ("minutes", "NOUN"), ("without", "ADP"), ("stopping", "VERB"),
            ("and", "CONJ"), ("then", "ADV"), ("rests", "VERB"), (",", "PUNCT"),
            ("we", "PRON"), ("want", "VERB"), ("to", "PART"), ("know", "VERB"),
            ("the", "DET"), ("rest", "NOUN"), ("now", "ADV"), (",", "PUNCT"),
            ("how", "ADV"), ("much", "ADJ"), ("water", "NOUN"), ("is", "VERB"),
            ("left", "VERB"), ("?", "PUNCT")),
        ("-", "N0", "*", "N1", "*", "N2", "N3"), 1),
    _Template(
        "library_one", _t(
            ("The", "DET"), ("town", "NOUN"), ("library", "NOUN"),
            ("adds", "VERB"), (_Slot("smallint"), "NUM"), ("new", "ADJ"),
            ("shelves", "NOUN"), ("of", "ADP"), (_Slot("int"), "NUM"),
            ("books", "NOUN"), ("plus", "CONJ"), ("one", "NUM"),
            ("signed", "ADJ"), ("copy", "NOUN"), ("from", "ADP"), ("a", "DET"),
            ("kind", "ADJ"), ("donor", "NOUN"), ("today", "ADV"), (";", "PUNCT"),
            ("staff", "NOUN"), ("hope", "VERB"), ("to", "PART"), ("sort", "VERB"),
            ("them", "PRON"), ("soon", "ADV"), (",", "PUNCT"), ("vol", "X"),
            ("how", "ADV"), ("many", "ADJ"), ("books", "NOUN"),
            ("arrive", "VERB"), ("?", "PUNCT")),
        ("+", "*", "N0", "N1", "C:1"), 0),
)


def template_names() -> list[str]:
    return [t.name for t in TEMPLATES]


def _build_vocab() -> list[str]:
    words = set()
    for t in TEMPLATES:
        for item, _tag in t.body:
            if isinstance(item, str):
                words.add(item)
    words.update(_INT_SURFACES)
    words.update(_DEC_SURFACES)
    words.update(s for s, _ in _FRACNUM_SURFACES)
    words.update(RELATION_WORDS)
    return sorted(words)


SYNTH_VOCAB: list[str] = _build_vocab()
_VOCAB_INDEX = {w: i for i, w in enumerate(SYNTH_VOCAB)}


def synth_vocab_size() -> int:
    return len(SYNTH_VOCAB)


def _normalize_mix(template_mix) -> list[float]:
    if template_mix is None:
        return [1.0] * len(TEMPLATES)
    if isinstance(template_mix, dict):
        unknown = set(template_mix) - set(template_names())
        if unknown:
            raise ParamError(f"unknown template names in mix: {sorted(unknown)}")
        weights = [float(template_mix.get(t.name, 0.0)) for t in TEMPLATES]
    else:
        weights = [float(w) for w in template_mix]
        if len(weights) != len(TEMPLATES):
            raise ParamError(
                f"mix has {len(weights)} weights, expected {len(TEMPLATES)}")
    if any(w < 0 for w in weights):
        raise ParamError("mix weights must be non-negative")
    if sum(weights) <= 0:
        raise ParamError("mix weights are all zero")
    return weights


def synth_generate(n: int, seed: int, template_mix=None) -> list[MwpRecord]:
    """Generate n validated records, deterministically for (n, seed, mix)."""
    if n < 0:
        raise ParamError(f"negative record count {n}")
    if n == 0:
        if template_mix is not None:
            _normalize_mix(template_mix)
        return []
    weights = _normalize_mix(template_mix)
    total = sum(weights)
    shares = [w / total for w in weights]

    rng = random.Random(seed)
    credits = [0.0] * len(TEMPLATES)
    records = []
    for i in range(n):
        for j, s in enumerate(shares):
            credits[j] += s
        pick = max(range(len(TEMPLATES)), key=lambda j: (credits[j], -j))
        credits[pick] -= 1.0
        records.append(_instantiate(TEMPLATES[pick], rng, f"s{seed}-{i:05d}"))
    return records


def _instantiate(tpl: _Template, rng: random.Random, rec_id: str) -> MwpRecord:
    for _attempt in range(1000):
        tokens, tags, q_idx, q_val = [], [], [], []
        for item, tag in tpl.body:
            if isinstance(item, _Slot):
                surface, value = _sample_slot(item, rng)
                q_idx.append(len(tokens))
                q_val.append(value)
                tokens.append(surface)
            else:
                tokens.append(item)
            tags.append(tag)
        surfaces = [tokens[i] for i in q_idx]
        # distinct quantity surfaces keep number slots identifiable for any
        # encoder, contextual or not
        if len(set(surfaces)) == len(surfaces) and tpl.constraint(q_val):
            break
    else:
        raise ParamError(f"template {tpl.name!r} could not satisfy its constraint")
    answer = eval_prefix(list(tpl.equation), q_val)
    rec = MwpRecord(
        id=rec_id,
        text=" ".join(tokens),
        tokens=tokens,
        token_ids=[_VOCAB_INDEX[t] for t in tokens],
        quantity_indices=q_idx,
        quantity_values=q_val,
        pos_tags=tags,
        equation_prefix=list(tpl.equation),
        answer=answer,
        relation_label=tpl.label,
    )
    validate_record(rec)
    rec.extras["template"] = tpl.name
    return rec

"""Task metric computation over aligned prediction/gold maps."""

from __future__ import annotations

import numpy as np

from ..errors import AlignmentError, ParamError

ANSWER_TOL = 1e-4

TASKS = ("EQUATION", "ANSWER", "RELATION", "POS")


def answer_matches(pred: float, gold: float) -> bool:
    return abs(pred - gold) <= ANSWER_TOL * max(1.0, abs(gold))


def _aligned(predictions: dict, gold: dict):
    if set(predictions) != set(gold):
        missing = set(gold) - set(predictions)
        extra = set(predictions) - set(gold)
        raise AlignmentError(f"ids differ (missing={sorted(missing)[:3]}, "
                             f"extra={sorted(extra)[:3]})")
    for k in sorted(predictions):
        yield predictions[k], gold[k]


def compute_metrics(task: str, predictions: dict, gold: dict) -> dict:
    """Accuracy metrics for one task; RELATION adds precision and recall.

    EQUATION: prediction/gold are prefix token lists, exact-match fraction.
    ANSWER:   numeric values matched within 1e-4 relative tolerance.
    RELATION: prediction is a probability (or 0/1), thresholded at 0.5.
    POS:      per-problem tag-index sequences, token-level accuracy.
    """
    task = task.upper()
    if task not in TASKS:
        raise ParamError(f"unknown task {task!r}")
    pairs = list(_aligned(predictions, gold))
    if not pairs:
        raise AlignmentError("no aligned predictions")

    if task == "EQUATION":
        hits = sum(list(p) == list(g) for p, g in pairs)
        return {"accuracy": hits / len(pairs)}
    if task == "ANSWER":
        hits = sum(answer_matches(float(p), float(g)) for p, g in pairs)
        return {"accuracy": hits / len(pairs)}
    if task == "POS":
        good = 0
        total = 0
        for p, g in pairs:
            p = np.asarray(p)
            g = np.asarray(g)
            if p.shape != g.shape:
                raise AlignmentError(f"POS length mismatch {p.shape} vs {g.shape}")
            good += int(np.sum(p == g))
            total += g.size
        return {"accuracy": good / total}

    tp = fp = fn = tn = 0
    for p, g in pairs:
        pred = 1 if float(p) >= 0.5 else 0
        if pred and g:
            tp += 1
        elif pred and not g:
            fp += 1
        elif not pred and g:
            fn += 1
        else:
            tn += 1
    acc = (tp + tn) / len(pairs)
    precision = tp / (tp + fp) if (tp + fp) else 0.0
    recall = tp / (tp + fn) if (tp + fn) else 0.0
    return {"accuracy": acc, "precision": precision, "recall": recall}

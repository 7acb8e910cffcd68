"""Metric reports and their emission.

Published full-scale results ship as data rows with source keys so every
emitted table can show them next to the desk-scale numbers. They are flagged
and never enter computed statistics; they are context, not targets.

Emitted files are reproducible byte for byte: wall-clock fields are blanked
unless timing output is explicitly requested.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

from .._io import write_atomic_text
from ..errors import ParamError, ValidationError

_NOT_REPRODUCED = "published (not reproduced)"


@dataclass(frozen=True)
class ReferenceRow:
    label: str
    value: float            # fraction in [0, 1] for accuracy-like values
    source_key: str
    is_reference: bool = True


# Published full-scale accuracies, stored as fractions.
REFERENCE_ROWS: dict[str, tuple[ReferenceRow, ...]] = {
    "EQUATION": (
        ReferenceRow("final accuracy, 768-dim encoder, full scale", 0.2776,
                     "compression-sweep/equation/dim-768"),
        ReferenceRow("final accuracy, 256-dim encoder, full scale", 0.2104,
                     "compression-sweep/equation/dim-256"),
        ReferenceRow("final accuracy, 128-dim encoder, full scale", 0.1293,
                     "compression-sweep/equation/dim-128"),
        ReferenceRow("final accuracy, 64-dim encoder, full scale", 0.0752,
                     "compression-sweep/equation/dim-64"),
        ReferenceRow("initial accuracy, undistilled student, full scale",
                     0.0471, "distill-comparison/equation/initial-undistilled"),
        ReferenceRow("initial accuracy, distilled student, full scale",
                     0.0571, "distill-comparison/equation/initial-distilled"),
        ReferenceRow("final accuracy, undistilled student, full scale",
                     0.2695, "distill-comparison/equation/final-undistilled"),
        ReferenceRow("final accuracy, distilled student, full scale",
                     0.2725, "distill-comparison/equation/final-distilled"),
    ),
    "ANSWER": (
        ReferenceRow("final accuracy, 768-dim encoder, full scale", 0.3327,
                     "compression-sweep/answer/dim-768"),
        ReferenceRow("final accuracy, 256-dim encoder, full scale", 0.2375,
                     "compression-sweep/answer/dim-256"),
        ReferenceRow("final accuracy, 128-dim encoder, full scale", 0.1433,
                     "compression-sweep/answer/dim-128"),
        ReferenceRow("final accuracy, 64-dim encoder, full scale", 0.0852,
                     "compression-sweep/answer/dim-64"),
        ReferenceRow("answer accuracy, top-300 dimension pruning, full scale",
                     0.12, "pruning-baseline/answer/top-300"),
        ReferenceRow("initial accuracy, undistilled student, full scale",
                     0.0521, "distill-comparison/answer/initial-undistilled"),
        ReferenceRow("initial accuracy, distilled student, full scale",
                     0.0731, "distill-comparison/answer/initial-distilled"),
        ReferenceRow("final accuracy, undistilled student, full scale",
                     0.3287, "distill-comparison/answer/final-undistilled"),
        ReferenceRow("final accuracy, distilled student, full scale",
                     0.3337, "distill-comparison/answer/final-distilled"),
    ),
    "RELATION": (
        ReferenceRow("final accuracy, 768-dim encoder, full scale", 0.9325,
                     "compression-sweep/relation/dim-768"),
        ReferenceRow("final accuracy, PCA 256-dim encoder, full scale", 0.9341,
                     "compression-sweep/relation/pca-dim-256"),
    ),
    "POS": (),
    "GAP": (
        ReferenceRow("self-similarity gap, PCA", 0.1349, "gap-table/pca"),
        ReferenceRow("self-similarity gap, KPCA", 0.1350, "gap-table/kpca"),
        ReferenceRow("self-similarity gap, LLE", 0.1393, "gap-table/lle"),
        ReferenceRow("self-similarity gap, MDS", 0.1375, "gap-table/mds"),
        ReferenceRow("self-similarity gap, ISOMAP", 0.2124, "gap-table/isomap"),
        ReferenceRow("self-similarity gap, t-SNE", 0.2599, "gap-table/tsne"),
    ),
}

CSV_COLUMNS = ("task", "method", "dim", "distilled", "seed", "initial_acc",
               "final_acc", "epochs", "wall_ms")


@dataclass
class MetricReport:
    task: str
    method: str
    dim: int
    distilled: bool
    seed: int
    initial_accuracy: float
    final_accuracy: float
    curve: list[float] = field(default_factory=list)
    epochs: int = 0
    wall_ms: float = 0.0
    reference_rows: tuple[ReferenceRow, ...] = ()

    def validate(self) -> None:
        for name in ("initial_accuracy", "final_accuracy"):
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"{name}={v} outside [0, 1]")
        for v in self.curve:
            if not (0.0 <= v <= 1.0):
                raise ValidationError(f"curve value {v} outside [0, 1]")
        if len(self.curve) != self.epochs:
            raise ValidationError(
                f"curve length {len(self.curve)} != epochs {self.epochs}")


def attach_references(report: MetricReport) -> MetricReport:
    report.reference_rows = REFERENCE_ROWS.get(report.task.upper(), ())
    return report


def summarize(reports: list[MetricReport]) -> dict:
    """Mean initial/final accuracy per task over computed rows only."""
    out: dict = {}
    for r in reports:
        r.validate()
        for row in r.reference_rows:
            if not row.is_reference:
                raise ValidationError(
                    f"reference row {row.label!r} lost its flag")
        bucket = out.setdefault(r.task, {"n": 0, "initial": 0.0, "final": 0.0})
        bucket["n"] += 1
        bucket["initial"] += r.initial_accuracy
        bucket["final"] += r.final_accuracy
    for task, b in out.items():
        b["initial"] /= b["n"]
        b["final"] /= b["n"]
    return out


def _report_dict(r: MetricReport, include_timing: bool) -> dict:
    return {
        "task": r.task,
        "method": r.method,
        "dim": r.dim,
        "distilled": r.distilled,
        "seed": r.seed,
        "initial_accuracy": r.initial_accuracy,
        "final_accuracy": r.final_accuracy,
        "curve": list(r.curve),
        "epochs": r.epochs,
        "wall_ms": r.wall_ms if include_timing else None,
        "reference_rows": [
            {"label": row.label, "value": row.value,
             "source_key": row.source_key, "is_reference": True}
            for row in r.reference_rows],
    }


def render_json(reports: list[MetricReport], include_timing: bool = False) -> str:
    return json.dumps({"reports": [_report_dict(r, include_timing)
                                   for r in reports]}, indent=2) + "\n"


def reports_from_json(text: str) -> list[MetricReport]:
    data = json.loads(text)
    out = []
    for d in data["reports"]:
        out.append(MetricReport(
            task=d["task"], method=d["method"], dim=d["dim"],
            distilled=d["distilled"], seed=d["seed"],
            initial_accuracy=d["initial_accuracy"],
            final_accuracy=d["final_accuracy"], curve=list(d["curve"]),
            epochs=d["epochs"], wall_ms=d["wall_ms"] or 0.0,
            reference_rows=tuple(
                ReferenceRow(x["label"], x["value"], x["source_key"])
                for x in d.get("reference_rows", ()))))
    return out


def render_csv(reports: list[MetricReport], include_timing: bool = False) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, quoting=csv.QUOTE_MINIMAL)
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([r.task, r.method, r.dim, int(r.distilled), r.seed,
                    f"{r.initial_accuracy:.6f}", f"{r.final_accuracy:.6f}",
                    r.epochs, f"{r.wall_ms:.3f}" if include_timing else ""])
    return buf.getvalue()


def render_markdown(reports: list[MetricReport],
                    include_timing: bool = False) -> str:
    lines = []
    tasks = sorted({r.task for r in reports})
    for task in tasks:
        rows = [r for r in reports if r.task == task]
        lines.append(f"## {task}")
        lines.append("")
        lines.append("| source | method | dim | distilled | seed | "
                     "initial | final |")
        lines.append("|---|---|---|---|---|---|---|")
        for r in rows:
            lines.append(
                f"| computed | {r.method} | {r.dim} | "
                f"{'yes' if r.distilled else 'no'} | {r.seed} | "
                f"{r.initial_accuracy:.4f} | {r.final_accuracy:.4f} |")
        seen = set()
        for r in rows:
            for ref in r.reference_rows:
                if ref.source_key in seen:
                    continue
                seen.add(ref.source_key)
                lines.append(f"| {_NOT_REPRODUCED} | {ref.label} | | | | | "
                             f"{ref.value:.4f} |")
        lines.append("")
    return "\n".join(lines) + "\n"


def emit_report(reports: list[MetricReport], fmt: str, path,
                include_timing: bool = False) -> None:
    """Write reports in JSON, CSV, or MARKDOWN with a stable field order."""
    for r in reports:
        r.validate()
    fmt = fmt.upper()
    if fmt == "JSON":
        text = render_json(reports, include_timing)
    elif fmt == "CSV":
        text = render_csv(reports, include_timing)
    elif fmt == "MARKDOWN":
        text = render_markdown(reports, include_timing)
    else:
        raise ParamError(f"unknown report format {fmt!r}")
    write_atomic_text(path, text)

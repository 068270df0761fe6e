"""Normalized defective area, the NDA threshold classifier and batch
evaluation against an independent thresholding oracle."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .imaging import BinaryMask

DEFAULT_TAU = 0.0065


class GradeLabel(str, Enum):
    HEALTHY = "Healthy"
    DEFECTIVE = "Defective"

    @classmethod
    def parse(cls, text: str) -> "GradeLabel":
        key = text.strip().lower()
        for label in cls:
            if label.value.lower() == key:
                return label
        if key in ("sound", "healthy", "0"):
            return cls.HEALTHY
        if key in ("defect", "defective", "1"):
            return cls.DEFECTIVE
        raise ValueError(f"unknown grade label {text!r}")


@dataclass(frozen=True)
class NdaRecord:
    image_id: str
    nda: float
    label: GradeLabel

    def __post_init__(self):
        if not 0.0 <= self.nda <= 1.0:
            raise ValueError(f"NDA must lie in [0, 1], got {self.nda}")


@dataclass(frozen=True)
class BatchRecord:
    """One image of an evaluation batch: NDA under the method being evaluated,
    NDA under the oracle thresholds, and the known grade."""

    image_id: str
    method_nda: float
    oracle_nda: float
    true_label: GradeLabel


@dataclass(frozen=True)
class Confusion:
    """Counts with Defective as the positive class."""

    tp: int = 0
    tn: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    @property
    def correct(self) -> int:
        return self.tp + self.tn


@dataclass(frozen=True)
class EvaluationReport:
    total_nda_method: float
    total_nda_oracle: float
    error_percent: float
    confusion: Confusion
    rows: tuple[dict, ...] = field(default=(), repr=False)

    @property
    def extraction_accuracy_percent(self) -> float:
        return 100.0 - abs(self.error_percent)

    @property
    def classification_accuracy_percent(self) -> float:
        return 100.0 * self.confusion.correct / self.confusion.total

    def to_dict(self, digits: int = 6) -> dict:
        r = lambda x: round(float(x), digits)  # noqa: E731
        c = self.confusion
        return {
            "total_nda_method": r(self.total_nda_method),
            "total_nda_oracle": r(self.total_nda_oracle),
            "error_percent": r(self.error_percent),
            "extraction_accuracy_percent": r(self.extraction_accuracy_percent),
            "classification_accuracy_percent": r(self.classification_accuracy_percent),
            "confusion": {"tp": c.tp, "tn": c.tn, "fp": c.fp, "fn": c.fn},
            "records": [
                {k: (r(v) if isinstance(v, float) else v) for k, v in row.items()}
                for row in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    def records_csv(self) -> str:
        buf = io.StringIO()
        fields = ["image_id", "method_nda", "oracle_nda", "true_label", "predicted_label"]
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields)
        for row in self.rows:
            writer.writerow(
                [
                    row["image_id"],
                    f"{row['method_nda']:.6f}",
                    f"{row['oracle_nda']:.6f}",
                    row["true_label"],
                    row["predicted_label"],
                ]
            )
        return buf.getvalue()


def compute_nda(mask: BinaryMask) -> float:
    """Fraction of mask pixels equal to 1."""
    size = mask.pixels.size
    if size == 0:
        raise ValueError("cannot compute NDA of an empty mask")
    return mask.ones / size


def classify_nda(nda: float, tau: float = DEFAULT_TAU) -> GradeLabel:
    """Healthy when ``nda <= tau``; smaller foreground areas are calyx or stem."""
    return GradeLabel.HEALTHY if nda <= tau else GradeLabel.DEFECTIVE


def extraction_error(nda_ts: float, nda_hb: float) -> float:
    """Relative error in percent of a method total against the oracle total."""
    if nda_hb <= 0:
        raise ValueError("oracle total NDA must be positive")
    return (nda_ts - nda_hb) / nda_hb * 100.0


def tally(pairs: Iterable[tuple[GradeLabel, GradeLabel]]) -> Confusion:
    """Confusion counts from ``(true, predicted)`` label pairs."""
    tp = tn = fp = fn = 0
    for true, pred in pairs:
        if true is GradeLabel.DEFECTIVE:
            if pred is GradeLabel.DEFECTIVE:
                tp += 1
            else:
                fn += 1
        elif pred is GradeLabel.DEFECTIVE:
            fp += 1
        else:
            tn += 1
    return Confusion(tp, tn, fp, fn)


def evaluate_batch(records: Sequence[BatchRecord], tau: float = DEFAULT_TAU) -> EvaluationReport:
    if not records:
        raise ValueError("cannot evaluate an empty batch")
    total_method = sum(r.method_nda for r in records)
    total_oracle = sum(r.oracle_nda for r in records)
    error = extraction_error(total_method, total_oracle)

    rows = []
    labels = []
    for r in records:
        pred = classify_nda(r.method_nda, tau)
        labels.append((r.true_label, pred))
        rows.append(
            {
                "image_id": r.image_id,
                "method_nda": float(r.method_nda),
                "oracle_nda": float(r.oracle_nda),
                "true_label": r.true_label.value,
                "predicted_label": pred.value,
            }
        )
    return EvaluationReport(
        total_nda_method=total_method,
        total_nda_oracle=total_oracle,
        error_percent=error,
        confusion=tally(labels),
        rows=tuple(rows),
    )


def tau_sweep(ndas: Sequence[float], labels: Sequence[GradeLabel], taus: Iterable[float]):
    """Yield ``(tau, Confusion)`` for each candidate threshold."""
    for tau in taus:
        yield tau, tally((t, classify_nda(x, tau)) for x, t in zip(ndas, labels))

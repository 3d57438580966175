"""SER evaluation metrics: UA (macro recall), WA (overall accuracy), macro-F1.

Predictions that are absent or outside the label set land in an extra
"invalid" column.  They are never correct but still count towards the row
totals, so they drag recall and accuracy down.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, EmptyMatrix, UnknownGoldLabel, UnknownRun
from .geometry import EmotionLabel, LabelSet

AVERAGING = ("observed", "all")


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are gold classes, columns predicted classes plus a trailing invalid column."""

    counts: np.ndarray
    label_set: LabelSet

    def __post_init__(self):
        c = len(self.label_set)
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (c, c + 1):
            raise ValueError(f"counts must have shape {(c, c + 1)}, got {counts.shape}")
        if (counts < 0).any():
            raise ValueError("counts must be non-negative")
        counts = counts.copy()
        counts.setflags(write=False)
        object.__setattr__(self, "counts", counts)

    @classmethod
    def zeros(cls, label_set: LabelSet) -> "ConfusionMatrix":
        c = len(label_set)
        return cls(np.zeros((c, c + 1), dtype=np.int64), label_set)

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def invalid(self) -> int:
        return int(self.counts[:, -1].sum())

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        if self.label_set.names != other.label_set.names:
            raise ValueError("cannot merge confusion matrices over different label sets")
        return ConfusionMatrix(self.counts + other.counts, self.label_set)


def _name(x) -> str | None:
    if x is None:
        return None
    return x.name if isinstance(x, EmotionLabel) else str(x)


def accumulate(records: Iterable[tuple], label_set: LabelSet,
               matrix: ConfusionMatrix | None = None) -> ConfusionMatrix:
    """Count ``(gold, pred)`` pairs; ``pred`` may be ``None`` or an out-of-set string."""
    c = len(label_set)
    counts = np.zeros((c, c + 1), dtype=np.int64) if matrix is None else matrix.counts.copy()
    for gold, pred in records:
        g = _name(gold)
        if g not in label_set:
            raise UnknownGoldLabel(f"gold label {g!r} is not in label set {list(label_set.names)}")
        p = _name(pred)
        j = label_set.index(p) if p in label_set else c
        counts[label_set.index(g), j] += 1
    return ConfusionMatrix(counts, label_set)


@dataclass(frozen=True)
class ClassScores:
    precision: float
    recall: float | None  # None when the class never occurs in gold
    f1: float
    support: int


@dataclass(frozen=True)
class MetricsReport:
    ua: float
    wa: float
    macro_f1: float
    n: int
    invalid: int = 0
    per_class: Mapping[str, ClassScores] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "ua": self.ua,
            "wa": self.wa,
            "macro_f1": self.macro_f1,
            "n": self.n,
            "invalid": self.invalid,
            "per_class": {k: vars(v) for k, v in self.per_class.items()},
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "MetricsReport":
        per_class = {k: ClassScores(**v) for k, v in doc.get("per_class", {}).items()}
        return cls(float(doc["ua"]), float(doc["wa"]), float(doc["macro_f1"]), int(doc["n"]),
                   int(doc.get("invalid", 0)), per_class)

    def pretty(self) -> str:
        lines = [f"n={self.n}  invalid={self.invalid}",
                 f"UA={self.ua:.4f}  WA={self.wa:.4f}  macro-F1={self.macro_f1:.4f}",
                 f"{'class':<14}{'P':>8}{'R':>8}{'F1':>8}{'support':>9}"]
        for name, s in self.per_class.items():
            r = "-" if s.recall is None else f"{s.recall:.4f}"
            lines.append(f"{name:<14}{s.precision:>8.4f}{r:>8}{s.f1:>8.4f}{s.support:>9d}")
        return "\n".join(lines)


def report(matrix: ConfusionMatrix, average_over: str = "observed") -> MetricsReport:
    """Summarise a confusion matrix.

    ``average_over="observed"`` averages recall over classes present in gold
    and F1 over classes present in gold or predictions.  ``"all"`` averages
    both over every class, scoring undefined recall as 0.
    """
    if average_over not in AVERAGING:
        raise ConfigError(f"average_over must be one of {AVERAGING}")
    n = matrix.total
    if n == 0:
        raise EmptyMatrix("cannot report on an empty confusion matrix")
    c = len(matrix.label_set)
    counts = matrix.counts
    tp = np.diag(counts[:, :c]).astype(float)
    support = counts.sum(axis=1)
    predicted = counts[:, :c].sum(axis=0)

    per_class, recalls, f1s = {}, [], []
    for i, name in enumerate(matrix.label_set.names):
        p = tp[i] / predicted[i] if predicted[i] else 0.0
        r = tp[i] / support[i] if support[i] else None
        rr = 0.0 if r is None else r
        f1 = 2 * p * rr / (p + rr) if p + rr > 0 else 0.0
        per_class[name] = ClassScores(float(p), None if r is None else float(r), float(f1), int(support[i]))
        if r is not None or average_over == "all":
            recalls.append(rr)
        if support[i] or predicted[i] or average_over == "all":
            f1s.append(f1)

    return MetricsReport(
        ua=float(np.mean(recalls)),
        wa=float(tp.sum() / n),
        macro_f1=float(np.mean(f1s)),
        n=n,
        invalid=matrix.invalid,
        per_class=per_class,
    )


def evaluate(records: Iterable[tuple], label_set: LabelSet, average_over: str = "observed") -> MetricsReport:
    return report(accumulate(records, label_set), average_over)


@dataclass(frozen=True)
class ComparisonRow:
    name: str
    ua: float
    wa: float
    macro_f1: float
    delta_ua: float  # relative change vs baseline, percent
    delta_wa: float
    delta_f1: float


def _relative(x: float, base: float) -> float:
    if base == 0:
        return 0.0 if x == 0 else math.copysign(math.inf, x)
    return 100.0 * (x - base) / base


def compare_runs(reports: Mapping[str, MetricsReport], baseline: str) -> list[ComparisonRow]:
    """Rank runs by UA, each with its relative change (%) against ``baseline``."""
    if len(reports) < 2:
        raise ConfigError("need at least two runs to compare")
    if baseline not in reports:
        raise UnknownRun(f"baseline {baseline!r} not among runs {sorted(reports)}")
    b = reports[baseline]
    rows = [
        ComparisonRow(name, r.ua, r.wa, r.macro_f1,
                      _relative(r.ua, b.ua), _relative(r.wa, b.wa), _relative(r.macro_f1, b.macro_f1))
        for name, r in reports.items()
    ]
    return sorted(rows, key=lambda row: (-row.ua, row.name))


def format_comparison(rows: list[ComparisonRow], baseline: str) -> str:
    def arrow(d):
        return f"{'↑' if d >= 0 else '↓'}{abs(d):.2f}"

    lines = [f"{'run':<20}{'UA(%)':>9}{'WA(%)':>9}{'F1(%)':>9}",]
    for r in rows:
        lines.append(f"{r.name:<20}{100 * r.ua:>9.2f}{100 * r.wa:>9.2f}{100 * r.macro_f1:>9.2f}")
    for r in rows:
        if r.name != baseline:
            lines.append(f"{r.name + ' VS ' + baseline:<20}{arrow(r.delta_ua):>9}"
                         f"{arrow(r.delta_wa):>9}{arrow(r.delta_f1):>9}")
    return "\n".join(lines)

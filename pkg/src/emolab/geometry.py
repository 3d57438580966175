"""Plutchik's wheel, label inventories and the emotion similarity matrix.

The wheel is the eight-sector primary ring with 45 degree spacing.  A pair of
emotions is scored by the cosine of the minor arc between them, shifted into
[0, 1]; neutral sits off the wheel and is half-similar to everything.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .errors import ConfigError, LabelNotInSet, MissingPlacement, NeutralAngleQuery

# Single table of wheel positions; correct here if a different layout is wanted.
CANONICAL_ANGLES: Mapping[str, float] = MappingProxyType({
    "joy": 0.0,
    "trust": 45.0,
    "fear": 90.0,
    "surprise": 135.0,
    "sadness": 180.0,
    "disgust": 225.0,
    "anger": 270.0,
    "anticipation": 315.0,
})

# Dataset spellings -> canonical primary emotion.
SYNONYMS: Mapping[str, str] = MappingProxyType({
    "happy": "joy",
    "happiness": "joy",
    "angry": "anger",
    "sad": "sadness",
    "fearful": "fear",
    "surprised": "surprise",
    "disgusted": "disgust",
})

NEUTRAL_NAME = "neutral"


@dataclass(frozen=True)
class EmotionLabel:
    name: str
    is_neutral: bool = False

    def __post_init__(self):
        if not self.name or self.name != self.name.strip().lower():
            raise ConfigError(f"label names must be non-empty lowercase identifiers, got {self.name!r}")

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class WheelPlacement:
    label: EmotionLabel
    angle: float

    def __post_init__(self):
        if self.label.is_neutral:
            raise NeutralAngleQuery("neutral labels have no wheel placement")
        if not (0.0 <= self.angle < 360.0):
            raise ConfigError(f"angle must lie in [0, 360), got {self.angle}")


def canonical_angle(name: str) -> float | None:
    """Wheel angle for a label name or one of its dataset synonyms."""
    name = name.lower()
    return CANONICAL_ANGLES.get(SYNONYMS.get(name, name))


@dataclass(frozen=True)
class LabelSet:
    """Ordered label inventory; position ``i`` is class index ``i``."""

    labels: tuple[EmotionLabel, ...]
    placements: Mapping[str, WheelPlacement] = field(default_factory=dict)
    name: str = "custom"

    def __post_init__(self):
        labels = tuple(self.labels)
        object.__setattr__(self, "labels", labels)
        if len(labels) < 2:
            raise ConfigError("a label set needs at least two labels")
        names = [lab.name for lab in labels]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate label names in {names}")
        if sum(lab.is_neutral for lab in labels) > 1:
            raise ConfigError("at most one label may be neutral")
        placements = dict(self.placements)
        for key, pl in placements.items():
            if key not in names or pl.label.name != key:
                raise ConfigError(f"placement for {key!r} does not match a label in the set")
        object.__setattr__(self, "placements", MappingProxyType(placements))
        object.__setattr__(self, "_index", {n: i for i, n in enumerate(names)})

    @classmethod
    def from_names(cls, names: Iterable[str], neutral: str | None = NEUTRAL_NAME,
                   angles: Mapping[str, float] | None = None, name: str = "custom") -> "LabelSet":
        """Build a set from plain names.

        Angles not given explicitly fall back to the canonical wheel (through
        the synonym table); labels with neither stay unplaced.
        """
        angles = {k.lower(): float(v) for k, v in (angles or {}).items()}
        labels, placements = [], {}
        for raw in names:
            n = raw.strip().lower()
            lab = EmotionLabel(n, is_neutral=(neutral is not None and n == neutral.lower()))
            labels.append(lab)
            if lab.is_neutral:
                if n in angles:
                    raise NeutralAngleQuery(f"neutral label {n!r} cannot have an angle")
                continue
            angle = angles.get(n, canonical_angle(n))
            if angle is not None:
                placements[n] = WheelPlacement(lab, angle % 360.0)
        unknown = set(angles) - {lab.name for lab in labels}
        if unknown:
            raise ConfigError(f"angles given for labels not in the set: {sorted(unknown)}")
        return cls(tuple(labels), placements, name)

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(self.labels)

    def __contains__(self, item):
        if isinstance(item, EmotionLabel):
            return item in self.labels
        return item in self._index

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(lab.name for lab in self.labels)

    @property
    def neutral(self) -> EmotionLabel | None:
        return next((lab for lab in self.labels if lab.is_neutral), None)

    def index(self, label: EmotionLabel | str) -> int:
        key = label.name if isinstance(label, EmotionLabel) else label
        try:
            return self._index[key]
        except KeyError:
            raise LabelNotInSet(f"{key!r} is not in label set {self.name!r} {list(self.names)}") from None

    def get(self, label: EmotionLabel | str) -> EmotionLabel:
        return self.labels[self.index(label)]

    def match(self, text: str | None) -> EmotionLabel | None:
        """Case-insensitive, whitespace-trimmed lookup; ``None`` if no label matches."""
        if text is None:
            return None
        i = self._index.get(text.strip().lower())
        return None if i is None else self.labels[i]

    def angle(self, label: EmotionLabel | str) -> float:
        lab = self.get(label)
        if lab.is_neutral:
            raise NeutralAngleQuery(f"{lab.name!r} is neutral and has no wheel angle")
        try:
            return self.placements[lab.name].angle
        except KeyError:
            raise MissingPlacement(f"{lab.name!r} has no wheel placement") from None

    def permuted(self, order: Iterable[int]) -> "LabelSet":
        labels = tuple(self.labels[i] for i in order)
        return LabelSet(labels, dict(self.placements), self.name)

    def to_dict(self) -> dict:
        out = {"labels": list(self.names), "angles": {k: p.angle for k, p in self.placements.items()}}
        if self.neutral is not None:
            out["neutral"] = self.neutral.name
        return out


def plutchik_angle(a: EmotionLabel | str, b: EmotionLabel | str, label_set: LabelSet) -> float:
    """Minor arc between two placed emotions, in degrees within [0, 180]."""
    diff = abs(label_set.angle(a) - label_set.angle(b)) % 360.0
    return min(diff, 360.0 - diff)


@dataclass(frozen=True)
class TransitionMatrix:
    values: np.ndarray
    label_set: LabelSet

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __call__(self, a: EmotionLabel | str, b: EmotionLabel | str) -> float:
        return float(self.values[self.label_set.index(a), self.label_set.index(b)])

    def to_csv(self, decimals: int = 6) -> str:
        names = self.label_set.names
        rows = ["," + ",".join(names)]
        for name, row in zip(names, self.values):
            rows.append(name + "," + ",".join(f"{v:.{decimals}f}" for v in row))
        return "\n".join(rows) + "\n"


def build_transition_matrix(label_set: LabelSet) -> TransitionMatrix:
    """Similarity matrix over ``label_set``.

    Diagonal entries are 1 (neutral included, so an exact hit always earns
    full credit); any off-diagonal pair touching neutral is 1/2; everything
    else is ``(cos(angle) + 1) / 2``.
    """
    n = len(label_set)
    S = np.empty((n, n))
    labels = label_set.labels
    for i in range(n):
        for j in range(i, n):
            if i == j:
                s = 1.0
            elif labels[i].is_neutral or labels[j].is_neutral:
                s = 0.5
            else:
                s = 0.5 * (math.cos(math.radians(plutchik_angle(labels[i], labels[j], label_set))) + 1.0)
            S[i, j] = S[j, i] = s
    return TransitionMatrix(S, label_set)


def adjacent_labels(label: EmotionLabel | str, label_set: LabelSet, arc: float = 45.0) -> list[EmotionLabel]:
    """Non-neutral members of ``label_set`` sitting exactly ``arc`` degrees away."""
    lab = label_set.get(label)
    if lab.is_neutral:
        return []
    return [other for other in label_set
            if not other.is_neutral and other != lab
            and abs(plutchik_angle(lab, other, label_set) - arc) < 1e-9]


def default_label_sets() -> dict[str, LabelSet]:
    return {
        "meld7": LabelSet.from_names(
            ["anger", "disgust", "fear", "joy", "neutral", "sadness", "surprise"], name="meld7"),
        "iemocap4": LabelSet.from_names(["angry", "happy", "neutral", "sad"], name="iemocap4"),
    }


def load_label_set(source: str | Path | Mapping) -> LabelSet:
    """Resolve a built-in set name, a JSON file path, or an already-parsed document."""
    if isinstance(source, Mapping):
        doc = dict(source)
        name = doc.pop("name", "custom")
    else:
        builtin = default_label_sets()
        if str(source) in builtin:
            return builtin[str(source)]
        path = Path(source)
        if not path.is_file():
            raise ConfigError(f"unknown label set {str(source)!r} (built-ins: {sorted(builtin)})")
        doc = json.loads(path.read_text())
        name = path.stem
    extra = set(doc) - {"labels", "neutral", "angles"}
    if extra:
        raise ConfigError(f"unknown label-set keys: {sorted(extra)}")
    if "labels" not in doc:
        raise ConfigError("label-set document needs a 'labels' list")
    return LabelSet.from_names(doc["labels"], neutral=doc.get("neutral", NEUTRAL_NAME), angles=doc.get("angles"), name=name)

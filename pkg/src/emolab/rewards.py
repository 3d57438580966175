"""Verifiable rewards: binary format compliance plus emotion accuracy.

A response is scored as ``format + accuracy``.  Format is 1 only when the
whole string matches the grammar of the active reasoning pattern.  Accuracy
is either exact-match (BCR) or similarity-weighted (ESWR), where near-miss
emotions earn ``alpha * S`` as long as their similarity clears ``gamma``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Mapping

from .errors import ConfigError, InvalidSchedule
from .geometry import EmotionLabel, LabelSet, TransitionMatrix


class ReasoningPattern(str, enum.Enum):
    IR = "ir"
    EUR = "eur"
    ESR = "esr"

    @classmethod
    def parse(cls, value: "str | ReasoningPattern") -> "ReasoningPattern":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).strip().lower())
        except ValueError:
            raise ConfigError(f"unknown reasoning pattern {value!r}; expected one of ir, eur, esr") from None


# Structured-reasoning section tags, in the order they must appear.
ESR_SECTIONS: tuple[str, ...] = ("transcript", "keywords", "acoustic", "integration")

_WS = r"\s*"
_ANSWER = r"<answer>([^<>]*)</answer>"
# free text that does not open or close a think/answer block
_FREE = r"((?:(?!</?(?:think|answer)>).)*)"
# each piece excludes the delimiter that ends it, so matching never
# backtracks; non-blank content is checked after the match
_SECTION = r"<{0}>([^<>]*)</{0}>"

_GRAMMARS = {
    ReasoningPattern.IR: re.compile(rf"{_WS}{_ANSWER}{_WS}", re.DOTALL),
    ReasoningPattern.EUR: re.compile(rf"{_WS}<think>{_FREE}</think>{_WS}{_ANSWER}{_WS}", re.DOTALL),
    ReasoningPattern.ESR: re.compile(
        _WS + "<think>" + _WS
        + _WS.join(_SECTION.format(tag) for tag in ESR_SECTIONS)
        + _WS + "</think>" + _WS + _ANSWER + _WS,
        re.DOTALL,
    ),
}
_ANSWER_SCAN = re.compile(_ANSWER, re.DOTALL)


@dataclass(frozen=True)
class ParsedResponse:
    raw: str
    pattern: ReasoningPattern
    format_valid: bool
    answer: EmotionLabel | None
    sections: Mapping[str, str] = field(default_factory=dict)


def parse_response(raw: str, pattern: ReasoningPattern | str, label_set: LabelSet) -> ParsedResponse:
    """Match ``raw`` against the whole-string grammar of ``pattern``.

    Never raises on malformed text.  When the grammar fails, the last
    ``<answer>`` span anywhere in the text is still used to recover an answer
    (it can earn accuracy but not the format point).
    """
    pattern = ReasoningPattern.parse(pattern)
    raw = "" if raw is None else str(raw)
    m = _GRAMMARS[pattern].fullmatch(raw)
    if m is not None and not all(g.strip() for g in m.groups()):
        m = None
    if m is None:
        spans = _ANSWER_SCAN.findall(raw)
        answer = label_set.match(spans[-1]) if spans else None
        return ParsedResponse(raw, pattern, False, answer, {})

    groups = m.groups()
    if pattern is ReasoningPattern.IR:
        sections = {}
    elif pattern is ReasoningPattern.EUR:
        sections = {"think": groups[0]}
    else:
        sections = dict(zip(ESR_SECTIONS, groups[:-1]))
    return ParsedResponse(raw, pattern, True, label_set.match(groups[-1]), sections)


def format_reward(parsed: ParsedResponse) -> int:
    return 1 if parsed.format_valid else 0


@dataclass(frozen=True)
class AlphaSchedule:
    """Partial-credit coefficient over training.

    ``kind`` is ``"constant"`` (``value`` is the coefficient) or
    ``"linear_decay"`` (``value`` is the number of steps to go from 1 to 0;
    ``None`` means "the trainer's step count", filled in by the trainer).
    """

    kind: str = "linear_decay"
    value: float | None = None

    def __post_init__(self):
        if self.kind == "constant":
            if self.value is None or not (0.0 <= float(self.value) <= 1.0):
                raise ConfigError(f"constant alpha must lie in [0, 1], got {self.value}")
        elif self.kind == "linear_decay":
            if self.value is not None and (int(self.value) != self.value or self.value < 0):
                raise InvalidSchedule(f"linear_decay needs an integer step count, got {self.value}")
        else:
            raise ConfigError(f"unknown alpha schedule {self.kind!r}")

    @classmethod
    def constant(cls, c: float) -> "AlphaSchedule":
        return cls("constant", float(c))

    @classmethod
    def linear_decay(cls, total_steps: int | None = None) -> "AlphaSchedule":
        return cls("linear_decay", None if total_steps is None else int(total_steps))

    @classmethod
    def from_json(cls, doc) -> "AlphaSchedule":
        # accepts "linear_decay", {"constant": 0.5}, {"linear_decay": 300}
        # or {"kind": ..., "value": ...}
        if isinstance(doc, (int, float)) and not isinstance(doc, bool):
            return cls.constant(doc)
        if isinstance(doc, str):
            return cls(doc)
        if isinstance(doc, Mapping):
            if set(doc) <= {"kind", "value"} and "kind" in doc:
                return cls(doc["kind"], doc.get("value"))
            if len(doc) == 1:
                (kind, value), = doc.items()
                return cls(kind, value)
        raise ConfigError(f"cannot parse alpha schedule {doc!r}")

    def to_json(self):
        return {"kind": self.kind, "value": self.value}


@dataclass(frozen=True)
class RewardConfig:
    gamma: float = 0.7
    alpha_schedule: AlphaSchedule = field(default_factory=AlphaSchedule)
    accuracy_kind: str = "eswr"
    gate_accuracy_on_format: bool = False

    def __post_init__(self):
        if not (0.0 <= self.gamma < 1.0):
            raise ConfigError(f"gamma must lie in [0, 1), got {self.gamma}")
        kind = str(self.accuracy_kind).lower()
        if kind not in ("eswr", "bcr"):
            raise ConfigError(f"accuracy_kind must be 'eswr' or 'bcr', got {self.accuracy_kind!r}")
        object.__setattr__(self, "accuracy_kind", kind)

    @classmethod
    def from_json(cls, doc: Mapping) -> "RewardConfig":
        extra = set(doc) - {"gamma", "alpha_schedule", "accuracy_kind", "gate_accuracy_on_format"}
        if extra:
            raise ConfigError(f"unknown reward keys: {sorted(extra)}")
        kwargs = dict(doc)
        if "alpha_schedule" in kwargs:
            kwargs["alpha_schedule"] = AlphaSchedule.from_json(kwargs["alpha_schedule"])
        return cls(**kwargs)

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "alpha_schedule": self.alpha_schedule.to_json(),
            "accuracy_kind": self.accuracy_kind,
            "gate_accuracy_on_format": self.gate_accuracy_on_format,
        }


def alpha_at(config: RewardConfig | AlphaSchedule, step: int, total_steps: int | None = None) -> float:
    """Partial-credit coefficient at ``step``.

    ``total_steps`` is only consulted when a linear-decay schedule leaves its
    own horizon unset.
    """
    sched = config.alpha_schedule if isinstance(config, RewardConfig) else config
    if step < 0:
        raise ValueError("step must be non-negative")
    if sched.kind == "constant":
        return float(sched.value)
    horizon = sched.value if sched.value is not None else total_steps
    if not horizon:
        raise InvalidSchedule("linear_decay requires total_steps >= 1")
    return max(0.0, 1.0 - step / horizon)


def eswr_reward(pred: EmotionLabel | str | None, gold: EmotionLabel | str, S: TransitionMatrix,
                alpha: float, gamma: float = 0.7) -> float:
    if not (0.0 <= alpha <= 1.0):
        raise ConfigError(f"alpha must lie in [0, 1], got {alpha}")
    if not (0.0 <= gamma < 1.0):
        raise ConfigError(f"gamma must lie in [0, 1), got {gamma}")
    S.label_set.index(gold)
    if pred is None:
        return 0.0
    s = S(pred, gold)
    if s == 1.0:
        return 1.0
    if s > gamma:
        return alpha * s
    return 0.0


def bcr_reward(pred: EmotionLabel | str | None, gold: EmotionLabel | str) -> int:
    if pred is None:
        return 0
    name = lambda x: x.name if isinstance(x, EmotionLabel) else str(x)  # noqa: E731
    return int(name(pred) == name(gold))


@dataclass(frozen=True)
class RewardBreakdown:
    format: int
    accuracy: float
    total: float
    answer: EmotionLabel | None = None

    def to_json(self) -> dict:
        return {
            "format": self.format,
            "accuracy": self.accuracy,
            "total": self.total,
            "answer": None if self.answer is None else self.answer.name,
        }


def total_reward(raw: str, gold: EmotionLabel | str, pattern: ReasoningPattern | str, config: RewardConfig,
                 S: TransitionMatrix, step: int = 0, total_steps: int | None = None) -> RewardBreakdown:
    parsed = parse_response(raw, pattern, S.label_set)
    fmt = format_reward(parsed)
    if config.gate_accuracy_on_format and not fmt:
        acc = 0.0
    elif config.accuracy_kind == "bcr":
        acc = float(bcr_reward(parsed.answer, gold))
    else:
        acc = eswr_reward(parsed.answer, gold, S, alpha_at(config, step, total_steps), config.gamma)
    return RewardBreakdown(fmt, acc, fmt + acc, parsed.answer)


@dataclass(frozen=True)
class Scorer:
    """Bundles everything :func:`total_reward` needs except the response itself."""

    pattern: ReasoningPattern
    config: RewardConfig
    matrix: TransitionMatrix
    total_steps: int | None = None

    def __call__(self, raw: str, gold: EmotionLabel | str, step: int = 0) -> RewardBreakdown:
        return total_reward(raw, gold, self.pattern, self.config, self.matrix, step, self.total_steps)

    def alpha(self, step: int) -> float:
        return alpha_at(self.config, step, self.total_steps)

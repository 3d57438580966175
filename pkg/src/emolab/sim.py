"""Synthetic speech-emotion environment.

Each "utterance" is a feature vector: the prototype of its gold emotion plus
Gaussian noise.  With probability ``ambiguity_rate`` the utterance instead
sits halfway between the gold prototype and a wheel-adjacent emotion, which
makes the two indistinguishable from the features alone.

The policy acts by picking a response template: one of four format variants
(one valid, three broken in a specific way) crossed with an answer label.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .geometry import EmotionLabel, LabelSet, adjacent_labels, load_label_set
from .rewards import ESR_SECTIONS, ReasoningPattern

PROTOTYPE_STREAM = 2
EPISODE_STREAMS = {"train": 10, "eval": 11}


class FormatVariant(str, enum.Enum):
    VALID = "valid"
    MISSING_THINK = "missing_think"
    MISSING_ANSWER = "missing_answer"
    WRONG_ORDER = "wrong_order"


VARIANTS = tuple(FormatVariant)


@dataclass(frozen=True)
class EnvConfig:
    label_set: str | LabelSet = "meld7"
    feature_dim: int = 16
    noise_sigma: float = 0.2
    ambiguity_rate: float = 0.3
    seed: int = 0

    def __post_init__(self):
        ls = self.label_set if isinstance(self.label_set, LabelSet) else load_label_set(self.label_set)
        object.__setattr__(self, "_labels", ls)
        if not (0.0 <= self.ambiguity_rate <= 1.0):
            raise ConfigError("ambiguity_rate must lie in [0, 1]")
        if self.noise_sigma < 0:
            raise ConfigError("noise_sigma must be >= 0")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        if self.feature_dim < len(self.labels):
            raise ConfigError(f"feature_dim ({self.feature_dim}) must be >= number of labels ({len(self.labels)})")

    @property
    def labels(self) -> LabelSet:
        return self._labels

    @classmethod
    def from_json(cls, doc: Mapping, base_dir: Path | None = None) -> "EnvConfig":
        extra = set(doc) - {"label_set", "feature_dim", "noise_sigma", "ambiguity_rate", "seed"}
        if extra:
            raise ConfigError(f"unknown env keys: {sorted(extra)}")
        kwargs = dict(doc)
        ls = kwargs.get("label_set")
        if isinstance(ls, Mapping):
            kwargs["label_set"] = load_label_set(ls)
        elif isinstance(ls, str) and base_dir is not None and (base_dir / ls).is_file():
            kwargs["label_set"] = load_label_set(base_dir / ls)
        return cls(**kwargs)

    def to_json(self) -> dict:
        ls = self.label_set
        return {
            "label_set": ls.to_dict() if isinstance(ls, LabelSet) else ls,
            "feature_dim": self.feature_dim,
            "noise_sigma": self.noise_sigma,
            "ambiguity_rate": self.ambiguity_rate,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class SyntheticEpisode:
    features: np.ndarray
    gold: EmotionLabel
    ambiguous: bool = False
    neighbor: EmotionLabel | None = None
    index: int | None = None

    def to_json(self) -> dict:
        return {
            "i": self.index,
            "gold": self.gold.name,
            "ambiguous": self.ambiguous,
            "neighbor": None if self.neighbor is None else self.neighbor.name,
            "features": [float(x) for x in self.features],
        }


@dataclass(frozen=True)
class ActionTemplate:
    variant: FormatVariant
    answer: EmotionLabel

    def __str__(self):
        return f"{self.variant.value}:{self.answer.name}"


def make_prototypes(label_count: int, feature_dim: int, seed: int) -> np.ndarray:
    """One unit vector per label, mutually orthogonal, reproducible from ``seed``."""
    rng = np.random.default_rng(np.random.SeedSequence([int(seed), PROTOTYPE_STREAM]))
    q, r = np.linalg.qr(rng.standard_normal((feature_dim, label_count)))
    q = q * np.sign(np.diag(r))  # fix QR's sign ambiguity
    return np.ascontiguousarray(q.T)


def generate_episode(config: EnvConfig, rng: np.random.Generator,
                     prototypes: np.ndarray | None = None) -> SyntheticEpisode:
    labels = config.labels
    if prototypes is None:
        prototypes = make_prototypes(len(labels), config.feature_dim, config.seed)
    ambiguous = rng.random() < config.ambiguity_rate
    neighbor = None
    if ambiguous:
        candidates = [lab for lab in labels if adjacent_labels(lab, labels)]
        if not candidates:
            raise ConfigError(f"label set {labels.name!r} has no wheel-adjacent pairs; ambiguity_rate must be 0")
        gold = candidates[rng.integers(len(candidates))]
        nbrs = adjacent_labels(gold, labels)
        neighbor = nbrs[rng.integers(len(nbrs))]
        center = 0.5 * (prototypes[labels.index(gold)] + prototypes[labels.index(neighbor)])
    else:
        gold = labels.labels[rng.integers(len(labels))]
        center = prototypes[labels.index(gold)]
    noise = rng.standard_normal(config.feature_dim) * config.noise_sigma if config.noise_sigma else 0.0
    features = center + noise
    features.setflags(write=False)
    return SyntheticEpisode(features, gold, bool(ambiguous), neighbor)


def featurize(episode: SyntheticEpisode) -> np.ndarray:
    """Policy input: the episode features with a trailing constant 1 (bias)."""
    return np.append(episode.features, 1.0)


def render_template(pattern: ReasoningPattern | str, answer: str, sections: Mapping[str, str] | None = None,
                    think: str | None = None, variant: FormatVariant | str = FormatVariant.VALID) -> str:
    """Emit a response for ``pattern``.

    ``sections`` feeds the structured think block, ``think`` the free-text
    one.  Non-valid variants break the grammar in exactly their named way:
    the opening ``<think>`` is dropped, the ``<answer>`` tags are dropped, or
    the answer comes before the reasoning.
    """
    pattern = ReasoningPattern.parse(pattern)
    variant = FormatVariant(variant)
    if pattern is ReasoningPattern.ESR:
        sections = sections or {}
        body = "".join(f"<{tag}>{sections.get(tag, tag)}</{tag}>" for tag in ESR_SECTIONS)
    elif pattern is ReasoningPattern.EUR:
        body = think if think is not None else "reasoning"
    else:
        body = None if variant is FormatVariant.VALID else (think or "reasoning")

    if variant is FormatVariant.VALID:
        head = "" if body is None else f"<think>{body}</think>"
        return f"{head}<answer>{answer}</answer>"
    if variant is FormatVariant.MISSING_THINK:
        return f"{body}</think><answer>{answer}</answer>"
    if variant is FormatVariant.MISSING_ANSWER:
        return f"<think>{body}</think>{answer}" if pattern is not ReasoningPattern.IR else answer
    return f"<answer>{answer}</answer><think>{body}</think>"


def _episode_sections(episode: SyntheticEpisode, answer: str) -> dict[str, str]:
    f = episode.features
    top = np.argsort(-np.abs(f), kind="stable")[:3]
    return {
        "transcript": f"utterance with {len(f)} features, energy {float(np.linalg.norm(f)):.3f}",
        "keywords": "salient dims " + ", ".join(str(int(i)) for i in top),
        "acoustic": f"mean {float(f.mean()):.3f}, peak {float(f.max()):.3f}, spread {float(f.std()):.3f}",
        "integration": f"textual and acoustic cues together point to {answer}",
    }


class SpeechEmotionEnv:
    """Deterministic episode source plus the action-template table."""

    def __init__(self, config: EnvConfig):
        self.config = config
        self.label_set = config.labels
        self.prototypes = make_prototypes(len(self.label_set), config.feature_dim, config.seed)
        self.prototypes.setflags(write=False)
        if config.ambiguity_rate > 0 and not any(adjacent_labels(lab, self.label_set) for lab in self.label_set):
            raise ConfigError(f"label set {self.label_set.name!r} has no wheel-adjacent pairs; "
                              "ambiguity_rate must be 0")
        self.templates = tuple(ActionTemplate(v, lab) for v in VARIANTS for lab in self.label_set)

    @property
    def state_dim(self) -> int:
        return self.config.feature_dim + 1

    @property
    def action_count(self) -> int:
        return len(self.templates)

    def action_names(self) -> list[str]:
        return [str(t) for t in self.templates]

    def action(self, index: int) -> ActionTemplate:
        return self.templates[index]

    def action_index(self, template: ActionTemplate) -> int:
        return VARIANTS.index(template.variant) * len(self.label_set) + self.label_set.index(template.answer)

    def episode_rng(self, index: int, stream: str = "train") -> np.random.Generator:
        return np.random.default_rng(
            np.random.SeedSequence([int(self.config.seed), EPISODE_STREAMS[stream], int(index)]))

    def episode(self, index: int, stream: str = "train") -> SyntheticEpisode:
        ep = generate_episode(self.config, self.episode_rng(index, stream), self.prototypes)
        return SyntheticEpisode(ep.features, ep.gold, ep.ambiguous, ep.neighbor, index)

    def episodes(self, n: int, stream: str = "train", start: int = 0) -> list[SyntheticEpisode]:
        return [self.episode(i, stream) for i in range(start, start + n)]

    featurize = staticmethod(featurize)

    def render(self, action: int | ActionTemplate, pattern: ReasoningPattern | str,
               episode: SyntheticEpisode) -> str:
        return render_response(action if isinstance(action, ActionTemplate) else self.action(action),
                                pattern, episode)


def render_response(action: ActionTemplate, pattern: ReasoningPattern | str, episode: SyntheticEpisode) -> str:
    answer = action.answer.name
    f = episode.features
    think = (f"The strongest feature is dim {int(np.argmax(np.abs(f)))} "
             f"at energy {float(np.linalg.norm(f)):.3f}, which suggests {answer}.")
    return render_template(pattern, answer, _episode_sections(episode, answer), think, action.variant)

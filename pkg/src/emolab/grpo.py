"""Group-relative policy optimisation on a linear-softmax policy.

The policy maps a state vector to a categorical distribution over actions,
``softmax(state @ W / temperature)``.  Each training step samples a group of
actions for one state, turns the group's rewards into normalised advantages
and takes one plain gradient step on a clipped-ratio surrogate with a KL
penalty towards the frozen initial policy.  Log-probabilities are per
response (one categorical draw), so the gradient is exact and closed-form.
"""
from __future__ import annotations

import collections
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Mapping, Protocol, Sequence

import numpy as np
from scipy.special import log_softmax

from .errors import ConfigError, NonFiniteLoss
from .geometry import EmotionLabel, LabelSet
from .metrics import ConfusionMatrix, accumulate, report
from .rewards import ReasoningPattern, RewardBreakdown, RewardConfig

STD_EPS = 1e-12

# RNG stream ids under the master seed
SAMPLER_STREAM = 1


@dataclass(frozen=True)
class PolicyParams:
    weights: np.ndarray  # (state_dim, action_count)
    temperature: float = 1.0
    action_names: tuple[str, ...] | None = None

    def __post_init__(self):
        w = np.array(self.weights, dtype=np.float64)
        if w.ndim != 2:
            raise ValueError("weights must be a 2-d matrix")
        if not np.isfinite(w).all():
            raise NonFiniteLoss("policy weights must be finite")
        if self.temperature <= 0:
            raise ConfigError("temperature must be positive")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    @classmethod
    def zeros(cls, state_dim: int, action_count: int, temperature: float = 1.0,
              action_names: Sequence[str] | None = None) -> "PolicyParams":
        return cls(np.zeros((state_dim, action_count)), temperature,
                   None if action_names is None else tuple(action_names))

    @property
    def state_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def action_count(self) -> int:
        return self.weights.shape[1]

    def logits(self, state: np.ndarray) -> np.ndarray:
        return np.asarray(state, dtype=np.float64) @ self.weights / self.temperature

    def log_probs(self, state: np.ndarray) -> np.ndarray:
        return log_softmax(self.logits(state))

    def probs(self, state: np.ndarray) -> np.ndarray:
        return np.exp(self.log_probs(state))

    def with_weights(self, weights: np.ndarray) -> "PolicyParams":
        return replace(self, weights=weights)

    def to_json(self) -> dict:
        return {
            "temperature": self.temperature,
            "shape": list(self.weights.shape),
            "action_names": None if self.action_names is None else list(self.action_names),
            "weights": self.weights.tolist(),
        }

    @classmethod
    def from_json(cls, doc: Mapping) -> "PolicyParams":
        names = doc.get("action_names")
        return cls(np.array(doc["weights"], dtype=np.float64), float(doc.get("temperature", 1.0)),
                   None if names is None else tuple(names))


def sample_group(policy: PolicyParams, state: np.ndarray, G: int,
                 rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """Draw ``G`` i.i.d. actions; returns ``(actions, log_probs_of_those_actions)``."""
    if G < 2:
        raise ConfigError("group size must be at least 2")
    logp = policy.log_probs(state)
    cdf = np.cumsum(np.exp(logp))
    u = rng.random(G) * cdf[-1]
    # side="right" never selects a zero-probability action
    actions = np.minimum(np.searchsorted(cdf, u, side="right"), len(cdf) - 1)
    return actions, logp[actions]


def compute_advantages(rewards: Sequence[float]) -> np.ndarray:
    """Group-normalised advantages ``(r - mean) / std`` with population std.

    A group whose rewards are (numerically) all equal carries no preference
    signal and gets all-zero advantages.
    """
    r = np.asarray(rewards, dtype=np.float64)
    if r.size < 2:
        raise ConfigError("need at least two rewards per group")
    # anchoring on r[0] first makes a shift cancel bit-for-bit whenever r + shift is exact
    c = r - r[0]
    std = c.std()
    if std <= STD_EPS:
        return np.zeros_like(r)
    return (c - c.mean()) / std


def _kl_terms(logp_current, logp_ref, kl_clip: float | None):
    d = np.asarray(logp_ref, dtype=np.float64) - np.asarray(logp_current, dtype=np.float64)
    with np.errstate(over="ignore"):
        # expm1(d) - d is exact near 0 where exp(d) - 1 - d would cancel
        k = np.expm1(d) - d
        dk = -np.expm1(d)  # d k / d logp_current
    if kl_clip is not None:
        capped = k > kl_clip
        k = np.where(capped, kl_clip, k)
        dk = np.where(capped, 0.0, dk)
    return k, dk


def kl_penalty(logp_current: np.ndarray, logp_ref: np.ndarray, kl_clip: float | None = None) -> float:
    """Group mean of the non-negative estimator ``exp(d) - d - 1``, ``d = logp_ref - logp_current``.

    ``kl_clip`` caps each per-sample value.  The estimator's gradient grows
    like ``exp(d)``, so without a cap a single far-drifted sample can blow up
    a fixed-size gradient step.
    """
    k, _ = _kl_terms(logp_current, logp_ref, kl_clip)
    return float(np.mean(k))


@dataclass(frozen=True)
class SampledGroup:
    state: np.ndarray
    actions: np.ndarray
    logp_current: np.ndarray
    logp_old: np.ndarray
    logp_ref: np.ndarray
    rewards: np.ndarray
    advantages: np.ndarray
    rendered: tuple[str, ...] = ()

    def __post_init__(self):
        G = len(self.actions)
        if G < 2:
            raise ConfigError("a group needs at least two members")
        for name in ("logp_current", "logp_old", "logp_ref", "rewards", "advantages"):
            v = np.asarray(getattr(self, name), dtype=np.float64)
            if v.shape != (G,):
                raise ValueError(f"{name} has shape {v.shape}, expected ({G},)")
            object.__setattr__(self, name, v)
        if self.rendered and len(self.rendered) != G:
            raise ValueError("rendered must hold one response per action")
        object.__setattr__(self, "actions", np.asarray(self.actions, dtype=np.int64))
        object.__setattr__(self, "state", np.asarray(self.state, dtype=np.float64))
        object.__setattr__(self, "rendered", tuple(self.rendered))

    @property
    def size(self) -> int:
        return len(self.actions)

    @classmethod
    def build(cls, policy: PolicyParams, reference: PolicyParams, state: np.ndarray, actions: np.ndarray,
              logp_old: np.ndarray, rewards: Sequence[float], rendered: Sequence[str] = ()) -> "SampledGroup":
        actions = np.asarray(actions, dtype=np.int64)
        return cls(
            state=state,
            actions=actions,
            logp_current=policy.log_probs(state)[actions],
            logp_old=logp_old,
            logp_ref=reference.log_probs(state)[actions],
            rewards=np.asarray(rewards, dtype=np.float64),
            advantages=compute_advantages(rewards),
            rendered=tuple(rendered),
        )


def rescore(policy: PolicyParams, group: SampledGroup) -> SampledGroup:
    """Same group with ``logp_current`` re-evaluated under ``policy``."""
    return replace(group, logp_current=policy.log_probs(group.state)[group.actions])


def _clip_terms(group: SampledGroup, clip_epsilon: float):
    ratio = np.exp(group.logp_current - group.logp_old)
    unclipped = ratio * group.advantages
    clipped = np.clip(ratio, 1.0 - clip_epsilon, 1.0 + clip_epsilon) * group.advantages
    return ratio, unclipped, clipped


def surrogate_loss(group: SampledGroup, beta: float, clip_epsilon: float, kl_clip: float | None = None) -> float:
    """``-mean(min(ratio * A, clip(ratio) * A)) + beta * KL``."""
    ratio, unclipped, clipped = _clip_terms(group, clip_epsilon)
    objective = np.minimum(unclipped, clipped).mean()
    loss = -objective + beta * kl_penalty(group.logp_current, group.logp_ref, kl_clip)
    if not np.isfinite(loss) or not np.isfinite(ratio).all():
        raise NonFiniteLoss(f"surrogate loss is not finite ({loss})")
    return float(loss)


def policy_gradient(policy: PolicyParams, group: SampledGroup, beta: float, clip_epsilon: float,
                    kl_clip: float | None = None) -> np.ndarray:
    """Closed-form gradient of :func:`surrogate_loss` w.r.t. ``policy.weights``.

    ``group.logp_current`` must be the log-probabilities under ``policy``
    (see :func:`rescore`); ``logp_old`` and ``logp_ref`` are constants.
    """
    ratio, unclipped, clipped = _clip_terms(group, clip_epsilon)
    # d min(rA, clip(r)A) / d logp is rA where the unclipped branch is active, else 0
    d_obj = np.where(unclipped <= clipped, unclipped, 0.0)
    _, d_kl = _kl_terms(group.logp_current, group.logp_ref, kl_clip)
    dlogp = (-d_obj + beta * d_kl) / group.size
    if not np.isfinite(dlogp).all():
        raise NonFiniteLoss("non-finite gradient coefficients")

    # d logp(a) / d logits = onehot(a) - pi
    pi = policy.probs(group.state)
    d_logits = np.bincount(group.actions, weights=dlogp, minlength=policy.action_count) - dlogp.sum() * pi
    return np.outer(group.state, d_logits) / policy.temperature


@dataclass(frozen=True)
class TrainerConfig:
    group_size: int = 6
    steps: int = 300
    learning_rate: float = 1.0
    kl_coefficient: float = 0.2
    clip_epsilon: float = 0.2
    temperature: float = 1.0
    seed: int = 0
    inner_epochs: int = 4
    kl_clip: float | None = 10.0
    ua_window: int = 100
    reward: RewardConfig = field(default_factory=RewardConfig)
    pattern: ReasoningPattern = ReasoningPattern.ESR

    def __post_init__(self):
        if self.group_size < 2:
            raise ConfigError("group_size must be >= 2")
        if self.steps < 0:
            raise ConfigError("steps must be >= 0")
        if not self.learning_rate > 0:
            raise ConfigError("learning_rate must be > 0")
        if self.kl_coefficient < 0:
            raise ConfigError("kl_coefficient must be >= 0")
        if not (0 < self.clip_epsilon < 1):
            raise ConfigError("clip_epsilon must lie in (0, 1)")
        if not self.temperature > 0:
            raise ConfigError("temperature must be > 0")
        if self.kl_clip is not None and not self.kl_clip > 0:
            raise ConfigError("kl_clip must be positive or None")
        if self.inner_epochs < 1 or self.ua_window < 1:
            raise ConfigError("inner_epochs and ua_window must be >= 1")
        if not (0 <= int(self.seed) < 2**64):
            raise ConfigError("seed must be a 64-bit unsigned integer")
        object.__setattr__(self, "pattern", ReasoningPattern.parse(self.pattern))

    def sampler_rng(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([int(self.seed), SAMPLER_STREAM]))


def update_policy(policy: PolicyParams, group: SampledGroup, config: TrainerConfig) -> tuple[PolicyParams, float]:
    """Run ``inner_epochs`` gradient steps on one group; returns the new policy and the last loss."""
    loss = float("nan")
    for _ in range(config.inner_epochs):
        group = rescore(policy, group)
        loss = surrogate_loss(group, config.kl_coefficient, config.clip_epsilon, config.kl_clip)
        grad = policy_gradient(policy, group, config.kl_coefficient, config.clip_epsilon, config.kl_clip)
        new_w = policy.weights - config.learning_rate * grad
        if not np.isfinite(new_w).all():
            raise NonFiniteLoss("policy update produced non-finite weights")
        policy = policy.with_weights(new_w)
    return policy, loss


class Environment(Protocol):
    label_set: LabelSet

    @property
    def state_dim(self) -> int: ...

    @property
    def action_count(self) -> int: ...

    def action_names(self) -> list[str]: ...

    def episode(self, index: int, stream: str = "train"): ...

    def featurize(self, episode) -> np.ndarray: ...

    def render(self, action: int, pattern: ReasoningPattern, episode) -> str: ...


ScoreFn = Callable[[str, EmotionLabel, int], RewardBreakdown]

CURVE_COLUMNS = ("step", "mean_reward", "format_rate", "accuracy", "ua", "kl", "alpha")


@dataclass
class TrainingRun:
    config: TrainerConfig
    label_set: LabelSet
    policy: PolicyParams
    reference: PolicyParams
    curve: list[dict] = field(default_factory=list)
    predictions: list[list[tuple[str, str | None]]] = field(default_factory=list)
    wall_time: float = 0.0

    def window_matrix(self, window: int | None = None) -> ConfusionMatrix:
        window = window or self.config.ua_window
        recs = [r for step in self.predictions[-window:] for r in step]
        return accumulate(recs, self.label_set)

    def final_ua(self, window: int | None = None) -> float:
        return report(self.window_matrix(window)).ua


class _Window:
    """Trailing confusion counts over the last ``size`` steps."""

    def __init__(self, label_set: LabelSet, size: int):
        self.label_set = label_set
        c = len(label_set)
        self.counts = np.zeros((c, c + 1), dtype=np.int64)
        self.steps = collections.deque(maxlen=size)

    def push(self, gold: int, preds: list[int]):
        if len(self.steps) == self.steps.maxlen:
            g, old = self.steps[0]
            np.subtract.at(self.counts[g], old, 1)
        self.steps.append((gold, preds))
        np.add.at(self.counts[gold], preds, 1)

    def ua(self) -> float:
        return report(ConfusionMatrix(self.counts, self.label_set)).ua


def train(config: TrainerConfig, env: Environment, scorer: ScoreFn,
          on_step: Callable[[dict], None] | None = None) -> TrainingRun:
    """Train a zero-initialised policy on ``env`` for ``config.steps`` steps.

    Step ``t`` uses training episode ``t`` of the environment.  The reference
    policy is the initial one; the sampling ("old") policy is the policy at
    the start of each step.  On a non-finite loss the partial run is attached
    to the raised :class:`NonFiniteLoss` as ``exc.run``.
    """
    t0 = time.perf_counter()
    label_set = env.label_set
    policy = PolicyParams.zeros(env.state_dim, env.action_count, config.temperature, env.action_names())
    run = TrainingRun(config, label_set, policy, policy)
    rng = config.sampler_rng()
    window = _Window(label_set, config.ua_window)
    c = len(label_set)
    alpha_of = getattr(scorer, "alpha", None)

    for step in range(config.steps):
        ep = env.episode(step)
        state = env.featurize(ep)
        actions, logp_old = sample_group(policy, state, config.group_size, rng)
        rendered = [env.render(int(a), config.pattern, ep) for a in actions]
        scores = [scorer(text, ep.gold, step) for text in rendered]
        group = SampledGroup.build(policy, run.reference, state, actions, logp_old,
                                   [s.total for s in scores], rendered)
        kl = kl_penalty(group.logp_current, group.logp_ref, config.kl_clip)
        try:
            policy, _ = update_policy(policy, group, config)
        except NonFiniteLoss as exc:
            run.policy = policy
            run.wall_time = time.perf_counter() - t0
            exc.run = run
            raise

        preds = [s.answer.name if s.answer is not None else None for s in scores]
        run.predictions.append([(ep.gold.name, p) for p in preds])
        window.push(label_set.index(ep.gold), [label_set.index(p) if p is not None else c for p in preds])
        row = {
            "step": step,
            "mean_reward": float(np.mean([s.total for s in scores])),
            "format_rate": float(np.mean([s.format for s in scores])),
            "accuracy": float(np.mean([s.accuracy for s in scores])),
            "ua": window.ua(),
            "kl": kl,
            "alpha": float(alpha_of(step)) if alpha_of is not None else float("nan"),
        }
        run.curve.append(row)
        if on_step is not None:
            on_step(row)

    run.policy = policy
    run.wall_time = time.perf_counter() - t0
    return run


def greedy_actions(policy: PolicyParams, states: np.ndarray) -> np.ndarray:
    return np.argmax(np.atleast_2d(states) @ policy.weights, axis=1)

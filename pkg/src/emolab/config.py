"""Run configuration and small file helpers (atomic writes, JSONL)."""
from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Iterable, Iterator, Mapping

from .errors import ConfigError
from .grpo import TrainerConfig
from .rewards import AlphaSchedule, ReasoningPattern, RewardConfig
from .sim import EnvConfig

SEED_ENV_VAR = "EMO_RL_SEED"

_TRAINER_KEYS = {f.name for f in fields(TrainerConfig)} - {"reward", "pattern"}


@dataclass(frozen=True)
class RunConfig:
    trainer: TrainerConfig = field(default_factory=TrainerConfig)
    env: EnvConfig = field(default_factory=EnvConfig)
    out_dir: Path | None = None

    @property
    def reward(self) -> RewardConfig:
        return self.trainer.reward

    @property
    def pattern(self) -> ReasoningPattern:
        return self.trainer.pattern

    @classmethod
    def from_json(cls, doc: Mapping, base_dir: Path | None = None) -> "RunConfig":
        """Parse ``{"trainer": {...}, "env": {...}, "reward": {...}, "pattern": "esr"}``.

        Unknown keys anywhere are rejected.  ``env.seed`` defaults to the
        trainer seed.
        """
        extra = set(doc) - {"trainer", "env", "reward", "pattern", "out_dir"}
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        tdoc = dict(doc.get("trainer", {}))
        bad = set(tdoc) - _TRAINER_KEYS
        if bad:
            raise ConfigError(f"unknown trainer keys: {sorted(bad)}")
        reward = RewardConfig.from_json(doc.get("reward", {}))
        try:
            trainer = TrainerConfig(**tdoc, reward=reward, pattern=doc.get("pattern", ReasoningPattern.ESR))
        except TypeError as exc:
            raise ConfigError(str(exc)) from None
        edoc = dict(doc.get("env", {}))
        edoc.setdefault("seed", trainer.seed)
        env = EnvConfig.from_json(edoc, base_dir)
        out_dir = doc.get("out_dir")
        return cls(trainer, env, None if out_dir is None else Path(out_dir))

    @classmethod
    def load(cls, path: str | Path) -> "RunConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_json(doc, path.parent)

    def with_seed(self, seed: int) -> "RunConfig":
        return replace(self, trainer=replace(self.trainer, seed=seed), env=replace(self.env, seed=seed))

    def with_env_override(self, environ: Mapping[str, str] = os.environ) -> "RunConfig":
        raw = environ.get(SEED_ENV_VAR)
        if raw is None or raw == "":
            return self
        try:
            return self.with_seed(int(raw))
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {raw!r}") from None

    def resolved_reward(self) -> RewardConfig:
        """Reward config with an open-ended linear decay pinned to the trainer's step count."""
        sched = self.reward.alpha_schedule
        if sched.kind == "linear_decay" and sched.value is None:
            return replace(self.reward, alpha_schedule=AlphaSchedule.linear_decay(max(self.trainer.steps, 1)))
        return self.reward

    def to_json(self) -> dict:
        t = self.trainer
        return {
            "trainer": {k: getattr(t, k) for k in sorted(_TRAINER_KEYS)},
            "env": self.env.to_json(),
            "reward": self.resolved_reward().to_json(),
            "pattern": t.pattern.value,
        }


def atomic_write_text(path: str | Path, text: str) -> None:
    """Write via a temp file in the same directory, then rename over ``path``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def atomic_write_json(path: str | Path, doc) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2) + "\n")


def read_jsonl(path: str | Path) -> Iterator[dict]:
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise ConfigError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None


def dumps_jsonl(records: Iterable[Mapping]) -> str:
    return "".join(json.dumps(r) + "\n" for r in records)

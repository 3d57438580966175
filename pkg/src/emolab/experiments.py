"""End-to-end runs: train from a :class:`RunConfig`, write artifacts, evaluate, ablate.

The ablation trains every (accuracy reward, reasoning pattern) variant on a
shared set of seeds, scores each final policy greedily on held-out episodes
and ranks the variants by median UA.
"""
from __future__ import annotations

import csv
import io
import json
import statistics
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .config import RunConfig, atomic_write_json, atomic_write_text
from .errors import ConfigError
from .geometry import build_transition_matrix
from .grpo import CURVE_COLUMNS, PolicyParams, TrainingRun, greedy_actions, train
from .metrics import (ComparisonRow, ConfusionMatrix, MetricsReport, accumulate, compare_runs,
                      format_comparison, report)
from .rewards import ReasoningPattern, Scorer, parse_response
from .sim import SpeechEmotionEnv, featurize


def make_scorer(config: RunConfig, env: SpeechEmotionEnv) -> Scorer:
    return Scorer(config.pattern, config.resolved_reward(), build_transition_matrix(env.label_set),
                  max(config.trainer.steps, 1))


def run_training(config: RunConfig) -> tuple[TrainingRun, SpeechEmotionEnv]:
    env = SpeechEmotionEnv(config.env)
    return train(config.trainer, env, make_scorer(config, env)), env


def curve_csv(run: TrainingRun) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CURVE_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in run.curve:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    return buf.getvalue()


def write_run_artifacts(run: TrainingRun, config: RunConfig, out_dir: str | Path) -> None:
    """``curve.csv``, ``final_policy.json`` and ``run_meta.json``, each written atomically."""
    out = Path(out_dir)
    atomic_write_text(out / "curve.csv", curve_csv(run))
    policy_doc = {"label_set": list(run.label_set.names), **run.policy.to_json()}
    atomic_write_json(out / "final_policy.json", policy_doc)
    atomic_write_json(out / "run_meta.json", {
        "config": config.to_json(),
        "seed": config.trainer.seed,
        "env_seed": config.env.seed,
        "steps_completed": len(run.curve),
        "wall_time_s": run.wall_time,
    })


def predict(policy: PolicyParams, env: SpeechEmotionEnv, pattern: ReasoningPattern, episodes) -> list[tuple]:
    """Greedy ``(gold, predicted-or-None)`` pairs, with the answer read back from the rendered text."""
    X = np.array([featurize(ep) for ep in episodes])
    out = []
    for ep, a in zip(episodes, greedy_actions(policy, X)):
        parsed = parse_response(env.render(int(a), pattern, ep), pattern, env.label_set)
        out.append((ep.gold.name, None if parsed.answer is None else parsed.answer.name))
    return out


def evaluate_policy(policy: PolicyParams, env: SpeechEmotionEnv, pattern: ReasoningPattern,
                    n: int = 2000) -> ConfusionMatrix:
    return accumulate(predict(policy, env, pattern, env.episodes(n, "eval")), env.label_set)


@dataclass(frozen=True)
class Variant:
    name: str
    accuracy_kind: str
    pattern: ReasoningPattern

    def apply(self, base: RunConfig) -> RunConfig:
        reward = replace(base.reward, accuracy_kind=self.accuracy_kind)
        return replace(base, trainer=replace(base.trainer, reward=reward, pattern=self.pattern))


def default_variants() -> list[Variant]:
    return [Variant(f"{kind}_{p.value}", kind, p) for kind in ("bcr", "eswr") for p in ReasoningPattern]


@dataclass(frozen=True)
class AblationGrid:
    base: RunConfig = field(default_factory=RunConfig)
    variants: tuple[Variant, ...] = field(default_factory=lambda: tuple(default_variants()))
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    eval_episodes: int = 2000
    baseline: str = "bcr_ir"

    def __post_init__(self):
        if not self.variants:
            raise ConfigError("ablation grid has no variants")
        if not self.seeds:
            raise ConfigError("ablation grid has no seeds")
        names = [v.name for v in self.variants]
        if len(set(names)) != len(names):
            raise ConfigError(f"duplicate variant names: {names}")
        if self.baseline not in names:
            raise ConfigError(f"baseline {self.baseline!r} is not a variant ({names})")

    @classmethod
    def from_json(cls, doc: Mapping, base_dir: Path | None = None) -> "AblationGrid":
        extra = set(doc) - {"base", "variants", "seeds", "eval_episodes", "baseline"}
        if extra:
            raise ConfigError(f"unknown ablation keys: {sorted(extra)}")
        base = RunConfig.from_json(doc.get("base", {}), base_dir)
        kwargs = {"base": base}
        if "variants" in doc:
            variants = []
            for v in doc["variants"]:
                bad = set(v) - {"name", "accuracy_kind", "pattern"}
                if bad:
                    raise ConfigError(f"unknown variant keys: {sorted(bad)}")
                pattern = ReasoningPattern.parse(v["pattern"])
                kind = str(v["accuracy_kind"]).lower()
                variants.append(Variant(v.get("name", f"{kind}_{pattern.value}"), kind, pattern))
            kwargs["variants"] = tuple(variants)
        if "seeds" in doc:
            kwargs["seeds"] = tuple(int(s) for s in doc["seeds"])
        if "eval_episodes" in doc:
            kwargs["eval_episodes"] = int(doc["eval_episodes"])
        if "baseline" in doc:
            kwargs["baseline"] = doc["baseline"]
        elif "variants" in kwargs:
            kwargs["baseline"] = kwargs["variants"][0].name
        return cls(**kwargs)


@dataclass
class AblationResult:
    grid: AblationGrid
    reports: dict[str, dict[int, MetricsReport]]  # variant -> seed -> held-out report

    def ua(self, variant: str, seed: int) -> float:
        return self.reports[variant][seed].ua

    def median_report(self, variant: str) -> MetricsReport:
        rs = list(self.reports[variant].values())
        return MetricsReport(
            ua=statistics.median(r.ua for r in rs),
            wa=statistics.median(r.wa for r in rs),
            macro_f1=statistics.median(r.macro_f1 for r in rs),
            n=sum(r.n for r in rs),
            invalid=sum(r.invalid for r in rs),
        )

    def table(self) -> list[ComparisonRow]:
        return compare_runs({v.name: self.median_report(v.name) for v in self.grid.variants}, self.grid.baseline)

    def format_table(self) -> str:
        return format_comparison(self.table(), self.grid.baseline)

    def to_json(self) -> dict:
        return {
            "baseline": self.grid.baseline,
            "seeds": list(self.grid.seeds),
            "median": {v.name: self.median_report(v.name).to_json() for v in self.grid.variants},
            "per_seed": {name: {str(s): r.to_json() for s, r in per.items()} for name, per in self.reports.items()},
            "table": [vars(row) for row in self.table()],
        }


def _run_variant(grid: AblationGrid, variant: Variant, seed: int, out_dir: Path | None):
    config = variant.apply(grid.base).with_seed(seed)
    run, env = run_training(config)
    if out_dir is not None:
        write_run_artifacts(run, config, out_dir / variant.name / f"seed{seed}")
    return report(evaluate_policy(run.policy, env, config.pattern, grid.eval_episodes))


def run_ablation(grid: AblationGrid, out_dir: str | Path | None = None, workers: int = 1) -> AblationResult:
    out = None if out_dir is None else Path(out_dir)
    jobs = [(v, s) for v in grid.variants for s in grid.seeds]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            results = list(pool.map(lambda job: _run_variant(grid, *job, out), jobs))
    else:
        results = [_run_variant(grid, v, s, out) for v, s in jobs]
    reports: dict[str, dict[int, MetricsReport]] = {v.name: {} for v in grid.variants}
    for (v, s), rep in zip(jobs, results):
        reports[v.name][s] = rep
    result = AblationResult(grid, reports)
    if out is not None:
        atomic_write_json(out / "ablation.json", result.to_json())
        atomic_write_text(out / "table.txt", result.format_table() + "\n")
    return result


def ordering_summary(result: AblationResult, patterns: Sequence[ReasoningPattern] = tuple(ReasoningPattern)) -> dict:
    """Per-seed ordering checks between reward kinds and between reasoning patterns.

    ``eswr_ge_bcr_seeds`` counts seeds where ESWR's UA is at least BCR's for
    every pattern present in both; ``pattern_order_seeds`` counts seeds where
    ESR >= EUR >= IR (under ESWR), and ``pattern_order_strict_seeds`` those
    where the inequalities are strict.
    """
    by = {(v.accuracy_kind, v.pattern): v.name for v in result.grid.variants}
    seeds = result.grid.seeds
    shared = [p for p in patterns if ("eswr", p) in by and ("bcr", p) in by]
    eswr_ge = [s for s in seeds
               if shared and all(result.ua(by["eswr", p], s) >= result.ua(by["bcr", p], s) for p in shared)]
    order = [ReasoningPattern.ESR, ReasoningPattern.EUR, ReasoningPattern.IR]
    have_order = all(("eswr", p) in by for p in order)
    ge, strict = [], []
    if have_order:
        for s in seeds:
            u = [result.ua(by["eswr", p], s) for p in order]
            if u[0] >= u[1] >= u[2]:
                ge.append(s)
            if u[0] > u[1] > u[2]:
                strict.append(s)
    med = {name: result.median_report(name).ua for name in result.reports}
    return {
        "median_ua": med,
        "eswr_ge_bcr_seeds": eswr_ge,
        "pattern_order_seeds": ge,
        "pattern_order_strict_seeds": strict,
        "pattern_order_checked": have_order,
    }


def load_policy(path: str | Path) -> PolicyParams:
    return PolicyParams.from_json(json.loads(Path(path).read_text()))

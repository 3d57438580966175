import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import CORPUS
from emolab.errors import ConfigError, InvalidSchedule, LabelNotInSet
from emolab.geometry import build_transition_matrix, default_label_sets
from emolab.rewards import (AlphaSchedule, ReasoningPattern, RewardConfig, Scorer, alpha_at, bcr_reward,
                            eswr_reward, format_reward, parse_response, total_reward)

MELD = default_label_sets()["meld7"]
S = build_transition_matrix(MELD)
NAMES = list(MELD.names)
AD = (math.cos(math.pi / 4) + 1) / 2


def oracle_eswr(pred, gold, alpha, gamma):
    # written straight from the piecewise definition, with its own similarity
    wheel = {"joy": 0, "fear": 90, "surprise": 135, "sadness": 180, "disgust": 225, "anger": 270}
    if pred is None:
        return 0.0
    if pred == gold:
        s = 1.0
    elif "neutral" in (pred, gold):
        s = 0.5
    else:
        d = abs(wheel[pred] - wheel[gold]) % 360
        s = (math.cos(math.radians(min(d, 360 - d))) + 1) / 2
    if s == 1.0:
        return 1.0
    return alpha * s if s > gamma else 0.0


@pytest.mark.parametrize("pattern", ["ir", "eur", "esr"])
def test_corpus(pattern):
    for raw, fmt, answer in CORPUS[pattern]:
        parsed = parse_response(raw, pattern, MELD)
        assert format_reward(parsed) == fmt, raw
        assert (parsed.answer.name if parsed.answer else None) == answer, raw


def test_parse_examples():
    assert parse_response("<answer>anger</answer>", "ir", MELD).answer.name == "anger"
    assert not parse_response("<answer>anger</answer>", "eur", MELD).format_valid
    esr = ("<think><transcript>t</transcript><keywords>k</keywords><acoustic>a</acoustic>"
           "<integration>i</integration></think><answer>joy</answer>")
    p = parse_response(esr, ReasoningPattern.ESR, MELD)
    assert p.format_valid and p.answer.name == "joy"
    assert p.sections == {"transcript": "t", "keywords": "k", "acoustic": "a", "integration": "i"}
    assert parse_response("<answer>x</answer>", "ir", MELD).sections == {}
    assert parse_response(None, "ir", MELD).format_valid is False


def test_parse_is_linear_on_pathological_input():
    # long unterminated inputs must not trigger regex backtracking blowups
    import time
    raw = "<think>" + "<transcript>" * 2000 + "a " * 5000
    t0 = time.perf_counter()
    for p in ReasoningPattern:
        assert not parse_response(raw, p, MELD).format_valid
    assert time.perf_counter() - t0 < 0.5


def test_pattern_parse():
    assert ReasoningPattern.parse(" ESR ") is ReasoningPattern.ESR
    with pytest.raises(ConfigError):
        ReasoningPattern.parse("cot")


@pytest.mark.parametrize("sched, step, total, expected", [
    (AlphaSchedule.constant(0.5), 10, None, 0.5),
    (AlphaSchedule.linear_decay(), 0, 300, 1.0),
    (AlphaSchedule.linear_decay(), 150, 300, 0.5),
    (AlphaSchedule.linear_decay(), 300, 300, 0.0),
    (AlphaSchedule.linear_decay(), 450, 300, 0.0),
    (AlphaSchedule.linear_decay(100), 25, 300, 0.75),
])
def test_alpha_schedule(sched, step, total, expected):
    assert alpha_at(sched, step, total) == pytest.approx(expected)


def test_alpha_schedule_errors():
    with pytest.raises(InvalidSchedule):
        alpha_at(AlphaSchedule.linear_decay(), 3, 0)
    with pytest.raises(InvalidSchedule):
        alpha_at(AlphaSchedule.linear_decay(), 3)
    with pytest.raises(ConfigError):
        AlphaSchedule.constant(1.5)
    with pytest.raises(ConfigError):
        AlphaSchedule("cosine")


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 10_000), st.integers(1, 5_000))
def test_linear_decay_monotone_bounded(s1, s2, total):
    a1, a2 = (alpha_at(AlphaSchedule.linear_decay(), s, total) for s in (s1, s2))
    assert 0.0 <= a1 <= 1.0
    if s1 <= s2:
        assert a1 >= a2


@pytest.mark.parametrize("pred, gold, alpha, expected", [
    ("anger", "anger", 0.3, 1.0),
    ("disgust", "anger", 1.0, AD),
    ("disgust", "anger", 0.5, 0.5 * AD),
    ("sadness", "joy", 1.0, 0.0),
    ("neutral", "joy", 1.0, 0.0),       # 0.5 is below gamma
    ("neutral", "neutral", 0.0, 1.0),
    (None, "anger", 1.0, 0.0),
])
def test_eswr_examples(pred, gold, alpha, expected):
    assert eswr_reward(pred, gold, S, alpha) == pytest.approx(expected, abs=1e-12)


def test_eswr_grid_matches_oracle():
    for pred in NAMES + [None]:
        for gold in NAMES:
            for alpha in (0.0, 0.5, 1.0):
                for gamma in (0.5, 0.7, 0.9):
                    assert eswr_reward(pred, gold, S, alpha, gamma) == oracle_eswr(pred, gold, alpha, gamma)


def test_eswr_errors():
    with pytest.raises(LabelNotInSet):
        eswr_reward("anger", "trust", S, 1.0)
    with pytest.raises(ConfigError):
        eswr_reward("anger", "anger", S, 1.5)
    with pytest.raises(ConfigError):
        eswr_reward("anger", "anger", S, 0.5, gamma=1.0)


labels = st.sampled_from(NAMES)


@settings(max_examples=300, deadline=None)
@given(labels, labels, st.floats(0, 1), st.floats(0, 0.99))
def test_eswr_properties(pred, gold, alpha, gamma):
    r = eswr_reward(pred, gold, S, alpha, gamma)
    assert r == eswr_reward(gold, pred, S, alpha, gamma)
    assert 0.0 <= r <= 1.0
    assert eswr_reward(pred, gold, S, 0.0, gamma) == bcr_reward(pred, gold)
    assert r >= bcr_reward(pred, gold)
    # exactly one branch applies
    s = S(pred, gold)
    assert r in (1.0, 0.0) or (s > gamma and r == alpha * s)


@settings(max_examples=200, deadline=None)
@given(labels, labels, st.floats(0, 1), st.floats(0, 1))
def test_eswr_monotone_in_alpha(pred, gold, a1, a2):
    lo, hi = sorted((a1, a2))
    assert eswr_reward(pred, gold, S, lo) <= eswr_reward(pred, gold, S, hi)


def test_bcr():
    assert bcr_reward("anger", "anger") == 1
    assert bcr_reward("disgust", "anger") == 0
    assert bcr_reward(None, "anger") == 0
    assert bcr_reward(MELD.get("joy"), "joy") == 1


def test_total_reward_examples():
    const1 = RewardConfig(alpha_schedule=AlphaSchedule.constant(1.0))
    b = total_reward("<answer>anger</answer>", "anger", "ir", const1, S)
    assert (b.format, b.accuracy, b.total) == (1, 1.0, 2.0)
    b = total_reward("<think>harsh</think><answer>disgust</answer>", "anger", "eur", const1, S)
    assert b.format == 1
    assert b.accuracy == pytest.approx(0.853553, abs=1e-6)
    assert b.total == pytest.approx(1.853553, abs=1e-6)


def test_accuracy_survives_bad_format_unless_gated():
    raw = "<answer>anger</answer>"
    b = total_reward(raw, "anger", "eur", RewardConfig(accuracy_kind="bcr"), S)
    assert (b.format, b.accuracy, b.total) == (0, 1.0, 1.0)
    gated = RewardConfig(accuracy_kind="bcr", gate_accuracy_on_format=True)
    assert total_reward(raw, "anger", "eur", gated, S).total == 0.0
    # no extractable answer earns nothing
    assert total_reward("anger", "anger", "ir", RewardConfig(), S, 0, 10).total == 0.0


def test_total_reward_uses_schedule():
    cfg = RewardConfig(alpha_schedule=AlphaSchedule.linear_decay(100))
    raw = "<answer>disgust</answer>"
    assert total_reward(raw, "anger", "ir", cfg, S, step=0).accuracy == pytest.approx(AD)
    assert total_reward(raw, "anger", "ir", cfg, S, step=50).accuracy == pytest.approx(0.5 * AD)
    assert total_reward(raw, "anger", "ir", cfg, S, step=100).accuracy == 0.0
    scorer = Scorer(ReasoningPattern.IR, RewardConfig(), S, total_steps=200)
    assert scorer.alpha(100) == 0.5
    assert scorer(raw, "anger", 100).accuracy == pytest.approx(0.5 * AD)


def test_reward_config_json_round_trip():
    cfg = RewardConfig(gamma=0.6, alpha_schedule=AlphaSchedule.constant(0.25), accuracy_kind="BCR",
                       gate_accuracy_on_format=True)
    assert cfg.accuracy_kind == "bcr"
    assert RewardConfig.from_json(cfg.to_json()) == cfg
    assert RewardConfig.from_json({"alpha_schedule": {"constant": 0.5}}).alpha_schedule == AlphaSchedule.constant(0.5)
    assert RewardConfig.from_json({"alpha_schedule": "linear_decay"}).alpha_schedule == AlphaSchedule.linear_decay()
    assert AlphaSchedule.from_json(0.3) == AlphaSchedule.constant(0.3)
    with pytest.raises(ConfigError):
        RewardConfig.from_json({"beta": 1})
    with pytest.raises(ConfigError):
        RewardConfig(gamma=1.0)
    with pytest.raises(ConfigError):
        RewardConfig(accuracy_kind="f1")

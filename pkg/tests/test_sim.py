import json

import numpy as np
import pytest

from emolab.errors import ConfigError
from emolab.geometry import adjacent_labels, default_label_sets, plutchik_angle
from emolab.rewards import ReasoningPattern, parse_response
from emolab.sim import (VARIANTS, EnvConfig, FormatVariant, SpeechEmotionEnv, featurize, make_prototypes,
                        render_response, render_template)


def test_prototypes_orthonormal_and_seeded():
    P = make_prototypes(7, 16, seed=3)
    assert P.shape == (7, 16)
    np.testing.assert_allclose(P @ P.T, np.eye(7), atol=1e-12)
    np.testing.assert_array_equal(P, make_prototypes(7, 16, seed=3))
    assert not np.allclose(P, make_prototypes(7, 16, seed=4))


def test_noiseless_unambiguous_episode_is_prototype():
    env = SpeechEmotionEnv(EnvConfig(noise_sigma=0.0, ambiguity_rate=0.0, seed=1))
    for ep in env.episodes(50):
        np.testing.assert_array_equal(ep.features, env.prototypes[env.label_set.index(ep.gold)])
        assert not ep.ambiguous and ep.neighbor is None


def test_fully_ambiguous_episodes_sit_between_neighbours():
    env = SpeechEmotionEnv(EnvConfig(noise_sigma=0.0, ambiguity_rate=1.0, seed=2))
    ls = env.label_set
    for ep in env.episodes(200):
        assert ep.ambiguous
        assert plutchik_angle(ep.gold, ep.neighbor, ls) == 45
        mid = 0.5 * (env.prototypes[ls.index(ep.gold)] + env.prototypes[ls.index(ep.neighbor)])
        np.testing.assert_allclose(ep.features, mid, atol=1e-15)


def test_ambiguity_rate_frequency():
    env = SpeechEmotionEnv(EnvConfig(ambiguity_rate=0.3, seed=0))
    n = 10_000
    frac = np.mean([env.episode(i).ambiguous for i in range(n)])
    assert abs(frac - 0.3) < 0.015


def test_noise_scale():
    env = SpeechEmotionEnv(EnvConfig(noise_sigma=0.5, ambiguity_rate=0.0, seed=0))
    resid = np.array([ep.features - env.prototypes[env.label_set.index(ep.gold)] for ep in env.episodes(2000)])
    assert abs(resid.std() - 0.5) < 0.02


def test_gold_labels_cover_label_set():
    env = SpeechEmotionEnv(EnvConfig(ambiguity_rate=0.0))
    golds = {ep.gold.name for ep in env.episodes(500)}
    assert golds == set(env.label_set.names)


def test_featurize_appends_bias_without_label_leak():
    env = SpeechEmotionEnv(EnvConfig())
    ep = env.episode(0)
    x = featurize(ep)
    assert x.shape == (env.state_dim,)
    assert x[-1] == 1.0
    np.testing.assert_array_equal(x[:-1], ep.features)


def test_episodes_are_deterministic_and_streams_differ():
    a = SpeechEmotionEnv(EnvConfig(seed=9))
    b = SpeechEmotionEnv(EnvConfig(seed=9))
    for i in (0, 5, 123):
        np.testing.assert_array_equal(a.episode(i).features, b.episode(i).features)
    assert not np.array_equal(a.episode(0, "train").features, a.episode(0, "eval").features)
    # random access equals sequential generation
    np.testing.assert_array_equal(a.episodes(10, start=0)[7].features, a.episode(7).features)


def test_iemocap_ambiguity_rejected():
    with pytest.raises(ConfigError):
        SpeechEmotionEnv(EnvConfig(label_set="iemocap4", ambiguity_rate=0.3))
    env = SpeechEmotionEnv(EnvConfig(label_set="iemocap4", ambiguity_rate=0.0))
    assert env.action_count == 16
    assert not any(adjacent_labels(lab, env.label_set) for lab in env.label_set)


def test_env_config_validation_and_json(tmp_path):
    for bad in ({"feature_dim": 3}, {"noise_sigma": -1}, {"ambiguity_rate": 1.5}):
        with pytest.raises(ConfigError):
            EnvConfig(**bad)
    cfg = EnvConfig(feature_dim=12, noise_sigma=0.1, ambiguity_rate=0.2, seed=4)
    assert EnvConfig.from_json(json.loads(json.dumps(cfg.to_json()))) == cfg
    with pytest.raises(ConfigError):
        EnvConfig.from_json({"colour": 1})


@pytest.mark.parametrize("label_set", ["meld7", "iemocap4"])
@pytest.mark.parametrize("pattern", list(ReasoningPattern))
def test_render_parse_round_trip(label_set, pattern):
    env = SpeechEmotionEnv(EnvConfig(label_set=label_set, ambiguity_rate=0.0))
    assert env.action_count == 4 * len(env.label_set)
    ep = env.episode(0)
    for index in range(env.action_count):
        t = env.action(index)
        assert env.action_index(t) == index
        parsed = parse_response(env.render(index, pattern, ep), pattern, env.label_set)
        assert parsed.format_valid == (t.variant is FormatVariant.VALID)
        if t.variant is not FormatVariant.MISSING_ANSWER:
            assert parsed.answer == t.answer
        else:
            assert parsed.answer is None


def test_render_examples():
    assert render_template("ir", "anger") == "<answer>anger</answer>"
    ls = default_label_sets()["meld7"]
    bad = render_template("eur", "joy", variant=FormatVariant.MISSING_ANSWER)
    assert not parse_response(bad, "eur", ls).format_valid
    env = SpeechEmotionEnv(EnvConfig())
    joy = env.action_index(next(t for t in env.templates if t.variant is FormatVariant.VALID
                                and t.answer.name == "joy"))
    p = parse_response(env.render(joy, "esr", env.episode(3)), "esr", ls)
    assert p.format_valid and p.answer.name == "joy"
    assert set(p.sections) == {"transcript", "keywords", "acoustic", "integration"}


def test_each_variant_differs_in_text():
    env = SpeechEmotionEnv(EnvConfig())
    ep = env.episode(0)
    for pattern in ReasoningPattern:
        texts = {render_response(env.templates[i * len(env.label_set)], pattern, ep) for i in range(len(VARIANTS))}
        assert len(texts) == len(VARIANTS)


def test_episode_json():
    ep = SpeechEmotionEnv(EnvConfig(ambiguity_rate=1.0)).episode(4)
    doc = json.loads(json.dumps(ep.to_json()))
    assert doc["i"] == 4 and doc["ambiguous"] is True
    assert doc["gold"] == ep.gold.name and doc["neighbor"] == ep.neighbor.name
    assert len(doc["features"]) == 16

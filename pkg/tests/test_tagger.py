#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes
"""

__intname__ = "tests.csdetect.tagger"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__licence__ = "BSD 3 Clause"
__build__ = "2026101701"

import itertools
import math
import os

from hypothesis import given, settings
from hypothesis import strategies as st

from csdetect.corpus import Corpus, TimedWord, Utterance, read_ctm
from csdetect.lm import BOS, LanguageModel, train_kn
from csdetect.tagger import *

TAG_PAIR = ("fy", "nl")
FY_SENTENCES = [
    "ik wie hjir juster".split(),
    "ik bin hjir".split(),
    "it is moai waar".split(),
    "wy wiene dêr".split(),
]
NL_SENTENCES = [
    "ik was hier gisteren".split(),
    "ik ben hier".split(),
    "het is mooi weer".split(),
    "wij waren daar".split(),
]


class TableModel(LanguageModel):
    """
    History independent model given as a word -> probability table
    """

    def __init__(self, probs):
        self.support = sorted(probs)
        self.vocab = frozenset(self.support) | {BOS}
        self._probs = probs

    def prob(self, word, history=()):
        return self._probs.get(word, 0.0)


def make_utterance(utterance_id, surfaces, tags=None):
    tags = tags or ["fy"] * len(surfaces)
    return Utterance(
        utterance_id,
        tuple(TimedWord(surface, 300 * index, 250, tag) for index, (surface, tag) in enumerate(zip(surfaces, tags))),
    )


def make_tagger():
    return CodeSwitchTagger(train_kn(FY_SENTENCES, order=2), train_kn(NL_SENTENCES, order=2), TAG_PAIR)


def make_corpus():
    return Corpus(
        (
            make_utterance("u1", "ik wie hier gisteren".split(), ["fy", "fy", "nl", "nl"]),
            make_utterance("u2", "it is mooi weer".split(), ["fy", "fy", "nl", "nl"]),
            make_utterance("u3", "wij waren dêr".split(), ["nl", "nl", "fy"]),
        ),
        TAG_PAIR,
    )


def exhaustive_best_path(first_scores, second_scores, gamma):
    best = None
    for path in itertools.product((True, False), repeat=len(first_scores)):
        score = sum(first if flag else second for flag, first, second in zip(path, first_scores, second_scores))
        score -= gamma * sum(1 for previous, current in zip(path, path[1:]) if previous != current)
        if best is None or score > best[0]:
            best = (score, list(path))
    return best


def path_score(path, first_scores, second_scores, gamma):
    score = sum(first if flag else second for flag, first, second in zip(path, first_scores, second_scores))
    return score - gamma * sum(1 for previous, current in zip(path, path[1:]) if previous != current)


def test_lambda_grid():
    grid = lambda_grid()
    assert len(grid) == 51 and grid[0] == 0.0 and grid[-1] == 1.0
    assert grid[3] == 0.06, "grid values should be rounded"
    assert lambda_grid(0.25) == (0.0, 0.25, 0.5, 0.75, 1.0)
    for step in (0.0, 0.3, 1.5):
        try:
            lambda_grid(step)
        except ValueError:
            pass
        else:
            assert False, "step {} should raise ValueError".format(step)


def test_sweep_config_validation():
    assert SweepConfig().lambdas == lambda_grid()
    assert SweepConfig.from_step(0.5, gamma=0.3).lambdas == (0.0, 0.5, 1.0)
    for kwargs in (
        {"lambdas": (0.0,)},
        {"lambdas": (0.0, 0.5, 0.5, 1.0)},
        {"lambdas": (0.1, 1.0)},
        {"lambdas": (0.0, 0.9)},
        {"gamma": -0.1},
        {"workers": 0},
    ):
        try:
            SweepConfig(**kwargs)
        except ValueError:
            pass
        else:
            assert False, "SweepConfig({}) should raise ValueError".format(kwargs)


def test_posterior():
    first = TableModel({"w": 0.02})
    second = TableModel({"w": 0.01})
    assert abs(posterior("w", [BOS], first, second, 0.5) - 2.0 / 3.0) < 1e-12
    assert posterior("w", [BOS], first, second, 1.0) == 1.0
    assert posterior("w", [BOS], first, second, 0.0) == 0.0
    try:
        posterior("w", [BOS], first, second, -0.1)
    except ValueError:
        pass
    else:
        assert False, "lambda below 0 should raise ValueError"


def test_smoothing_small_example():
    posteriors = [0.9, 0.45, 0.9]
    first_scores = [math.log(value) for value in posteriors]
    second_scores = [math.log(1.0 - value) for value in posteriors]
    assert smooth_tags(first_scores, second_scores, 0.0) == [True, False, True]
    assert smooth_tags(first_scores, second_scores, 0.3) == [True, True, True]
    for gamma in (0.0, 0.3):
        _, best_path = exhaustive_best_path(first_scores, second_scores, gamma)
        assert smooth_tags(first_scores, second_scores, gamma) == best_path, "DP should match enumeration"
    assert smooth_tags([], [], 1.0) == []


@settings(max_examples=200, deadline=None)
@given(
    posteriors=st.lists(st.floats(min_value=0.01, max_value=0.99), min_size=1, max_size=7),
    gamma=st.floats(min_value=0.0, max_value=3.0),
)
def test_smoothing_is_optimal(posteriors, gamma):
    first_scores = [math.log(value) for value in posteriors]
    second_scores = [math.log(1.0 - value) for value in posteriors]
    path = smooth_tags(first_scores, second_scores, gamma)
    best_score, _ = exhaustive_best_path(first_scores, second_scores, gamma)
    assert abs(path_score(path, first_scores, second_scores, gamma) - best_score) < 1e-9, "DP path is not optimal"


def test_large_gamma_is_monolingual():
    posteriors = [0.9, 0.2, 0.3, 0.8, 0.7]
    first_scores = [math.log(value) for value in posteriors]
    second_scores = [math.log(1.0 - value) for value in posteriors]
    gamma = sum(abs(first - second) for first, second in zip(first_scores, second_scores))
    path = smooth_tags(first_scores, second_scores, gamma)
    expected = sum(first_scores) > sum(second_scores)
    assert path == [expected] * len(posteriors), "large gamma should give a monolingual tagging"


def test_tag_utterance_with_switch_penalty():
    tagger = CodeSwitchTagger(TableModel({"a": 0.9, "b": 0.45}), TableModel({"a": 0.1, "b": 0.55}), TAG_PAIR)
    utterance = make_utterance("u1", ["a", "b", "a"])
    hypothesis = tagger.tag_utterance(utterance, 0.5)
    assert hypothesis.tags == ("fy", "nl", "fy")
    assert hypothesis.switch_count == 2
    assert abs(hypothesis.posteriors[1] - 0.45) < 1e-12
    assert tagger.tag_utterance(utterance, 0.5, gamma=0.3).tags == ("fy", "fy", "fy")
    assert tag_utterance(utterance, (tagger.first_lm, tagger.second_lm), TAG_PAIR, 0.5, 0.3).switch_count == 0

    for bogus in ({"lam": 1.2}, {"lam": 0.5, "gamma": -1.0}):
        try:
            tagger.tag_utterance(utterance, **bogus)
        except ValueError:
            pass
        else:
            assert False, "{} should raise ValueError".format(bogus)
    try:
        tagger.tag_utterance(Utterance("empty", ()), 0.5)
    except ValueError:
        pass
    else:
        assert False, "Empty utterance should raise ValueError"


def test_tags_follow_word_posteriors():
    tagger = make_tagger()
    utterance = make_utterance("u1", "ik wie hier gisteren".split())
    for lam in (0.2, 0.5, 0.8):
        hypothesis = tagger.tag_utterance(utterance, lam)
        history = [BOS]
        for index, word in enumerate(utterance.surfaces):
            value = posterior(word, history, tagger.first_lm, tagger.second_lm, lam)
            assert abs(value - hypothesis.posteriors[index]) < 1e-12
            assert hypothesis.tags[index] == ("fy" if value > 0.5 else "nl")
            history.append(word)


def test_sweep_endpoints():
    corpus = make_corpus()
    points = sweep(corpus, (make_tagger().first_lm, make_tagger().second_lm), SweepConfig(lambdas=(0.0, 1.0)))
    assert [point.lam for point in points] == [0.0, 1.0]
    assert all(set(hypothesis.tags) == {"nl"} for hypothesis in points[0].hypotheses), "lambda 0 tags everything second"
    assert all(set(hypothesis.tags) == {"fy"} for hypothesis in points[1].hypotheses), "lambda 1 tags everything first"
    assert points[0].first_share("fy") == 0.0 and points[1].first_share("fy") == 1.0


def test_sweep_monotonicity_and_flips():
    tagger = make_tagger()
    corpus = make_corpus()
    config = SweepConfig.from_step(0.05)
    points = tagger.sweep(corpus, config)
    assert [point.lam for point in points] == list(config.lambdas)

    for utterance_index, utterance in enumerate(corpus):
        thresholds = tagger.flip_thresholds(utterance, config.lambdas)
        for word_index in range(len(utterance)):
            posteriors = [point.hypotheses[utterance_index].posteriors[word_index] for point in points]
            assert all(current > previous for previous, current in zip(posteriors, posteriors[1:])), (
                "posterior of word {} should strictly increase with lambda".format(utterance.surfaces[word_index])
            )
            tags = [point.hypotheses[utterance_index].tags[word_index] for point in points]
            flips = sum(1 for previous, current in zip(tags, tags[1:]) if previous != current)
            assert flips == 1, "each word should flip exactly once from second to first"
            assert thresholds[word_index] == config.lambdas[tags.index("fy")], "flip threshold should match the sweep"


def test_threaded_sweep_matches_single_worker():
    tagger = make_tagger()
    corpus = make_corpus()
    single = tagger.sweep(corpus, SweepConfig.from_step(0.1, gamma=0.5))
    threaded = tagger.sweep(corpus, SweepConfig.from_step(0.1, gamma=0.5, workers=4))
    assert single == threaded, "worker count should not change the sweep"


def test_gamma_reduces_switches():
    tagger = make_tagger()
    corpus = make_corpus()
    plain = tagger.sweep(corpus, SweepConfig.from_step(0.1))
    smoothed = tagger.sweep(corpus, SweepConfig.from_step(0.1, gamma=5.0))
    for plain_point, smoothed_point in zip(plain, smoothed):
        plain_switches = sum(hypothesis.switch_count for hypothesis in plain_point.hypotheses)
        smoothed_switches = sum(hypothesis.switch_count for hypothesis in smoothed_point.hypotheses)
        assert smoothed_switches <= plain_switches


def test_sweep_ctms(tmp_path):
    tagger = make_tagger()
    corpus = make_corpus()
    points = tagger.sweep(corpus, SweepConfig.from_step(0.5))
    hypothesis = hypothesis_corpus(corpus, points[1])
    assert [word.start_ms for word in hypothesis.get("u1").words] == [word.start_ms for word in corpus.get("u1").words]

    paths = write_sweep_ctms(corpus, points, str(tmp_path))
    assert [os.path.basename(path) for path in paths] == [
        "hyp_lambda_0.00.ctm",
        "hyp_lambda_0.50.ctm",
        "hyp_lambda_1.00.ctm",
    ]
    assert read_ctm(paths[1], TAG_PAIR) == hypothesis

    crowded = tagger.sweep(corpus, SweepConfig(lambdas=(0.0, 0.001, 1.0)))
    try:
        write_sweep_ctms(corpus, crowded, str(tmp_path))
    except ValueError:
        pass
    else:
        assert False, "Colliding file names should raise ValueError"

    try:
        hypothesis_corpus(corpus, SweepPoint(0.5, ()))
    except ValueError:
        pass
    else:
        assert False, "Missing hypotheses should raise ValueError"


if __name__ == "__main__":
    print("Example code for %s, %s" % (__intname__, __build__))
    import tempfile

    test_lambda_grid()
    test_sweep_config_validation()
    test_posterior()
    test_smoothing_small_example()
    test_smoothing_is_optimal()
    test_large_gamma_is_monolingual()
    test_tag_utterance_with_switch_penalty()
    test_tags_follow_word_posteriors()
    test_sweep_endpoints()
    test_sweep_monotonicity_and_flips()
    test_threaded_sweep_matches_single_worker()
    test_gamma_reduces_switches()
    test_sweep_ctms(tempfile.mkdtemp())

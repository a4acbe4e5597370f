#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Synthetic bilingual data for end to end checks of the detection pipeline

Each synthetic language is a sparse first order Markov chain over its own exclusive words plus a
vocabulary of shared words. shared_share is the probability that a transition slot points to a
shared word, so 0 gives two perfectly separable languages and larger values give more cross
language homographs.

All draws for a given seed are the same whatever shared_share is (only the choice between the
exclusive and the shared candidate of a slot changes), so settings can be compared one to one.

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.synthetic"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Synthetic code-switched corpora with known language tags"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from csdetect.analysis import DurationHistogram, duration_histogram, switch_stats
from csdetect.corpus import Corpus, TimedWord, Utterance, check_tag_pair
from csdetect.lm import BOS, train_kn
from csdetect.metrics import DEFAULT_FRAME_MS, POOLED, DetCurve, det_curves
from csdetect.tagger import CodeSwitchTagger, SweepConfig, hypothesis_corpus

logger = logging.getLogger(__intname__)

DEFAULT_TAG_PAIR = ("fy", "nl")
SHARED_PREFIX = "sh"
DEFAULT_SHARED_SHARES = (0.0, 0.2, 0.4, 0.6, 0.8)


@dataclass(frozen=True)
class SyntheticLanguage:
    tag: str
    # state -> (successor tokens, cumulative probabilities)
    successors: Dict[str, Tuple[Tuple[str, ...], np.ndarray]]
    end_prob: float

    @property
    def vocabulary(self) -> List[str]:
        words = set()
        for tokens, _ in self.successors.values():
            words.update(tokens)
        return sorted(words)

    def sentence(self, rng: np.random.Generator, max_len: int = 30) -> List[str]:
        """
        At least one word, then stop with probability end_prob before every further word
        Two uniform draws per position whatever the outcome
        """
        words = []  # type: List[str]
        state = BOS
        while len(words) < max_len:
            stop_draw, word_draw = rng.random(2)
            if words and stop_draw < self.end_prob:
                break
            tokens, cumulative = self.successors[state]
            index = min(int(np.searchsorted(cumulative, word_draw, side="right")), len(tokens) - 1)
            state = tokens[index]
            words.append(state)
        return words


def _exclusive_words(tag: str, size: int) -> List[str]:
    return ["{}{:03d}".format(tag, index) for index in range(size)]


def _shared_words(size: int) -> List[str]:
    return ["{}{:03d}".format(SHARED_PREFIX, index) for index in range(size)]


def make_languages(
    shared_share: float = 0.2,
    seed: int = 0,
    tag_pair: Sequence[str] = DEFAULT_TAG_PAIR,
    exclusive_size: int = 60,
    shared_size: int = 12,
    branching: int = 4,
    mean_length: float = 6.0,
) -> Tuple[SyntheticLanguage, SyntheticLanguage]:
    """
    Two synthetic languages sharing a vocabulary of shared_size words

    :param shared_share: probability for a transition slot to target a shared word
    :param branching: transition slots per state, each with a Dirichlet weight
    :param mean_length: mean sentence length in words
    """
    if not 0.0 <= shared_share <= 1.0:
        raise ValueError("Shared share must lie in [0, 1], got {}".format(shared_share))
    if mean_length < 1:
        raise ValueError("Mean sentence length must be at least 1, got {}".format(mean_length))
    tag_pair = check_tag_pair(tag_pair)
    rng = np.random.default_rng(seed)
    shared = _shared_words(shared_size)
    languages = []
    for tag in tag_pair:
        exclusive = _exclusive_words(tag, exclusive_size)
        successors = {}
        for state in [BOS] + exclusive + shared:
            use_shared = rng.random(branching) < shared_share
            exclusive_picks = rng.integers(exclusive_size, size=branching)
            shared_picks = rng.integers(shared_size, size=branching)
            weights = rng.dirichlet(np.ones(branching))
            merged = {}  # type: Dict[str, float]
            for slot in range(branching):
                token = shared[shared_picks[slot]] if use_shared[slot] else exclusive[exclusive_picks[slot]]
                merged[token] = merged.get(token, 0.0) + weights[slot]
            tokens = tuple(sorted(merged))
            cumulative = np.cumsum([merged[token] for token in tokens])
            successors[state] = (tokens, cumulative / cumulative[-1])
        languages.append(SyntheticLanguage(tag, successors, 1.0 / mean_length))
    return languages[0], languages[1]


@dataclass(frozen=True)
class SyntheticExperiment:
    shared_share: float
    languages: Tuple[SyntheticLanguage, SyntheticLanguage]
    train: Dict[str, List[List[str]]]
    reference: Corpus

    @property
    def tag_pair(self) -> Tuple[str, str]:
        return self.reference.tag_pair


def _timed_words(words: Sequence[Tuple[str, str]], rng: np.random.Generator) -> List[TimedWord]:
    timed = []
    clock = int(rng.integers(0, 300))
    for surface, tag in words:
        duration = int(rng.integers(150, 500))
        pause = int(rng.integers(50, 400)) if rng.random() < 0.2 else 0
        timed.append(TimedWord(surface, clock, duration, tag))
        clock += duration + pause
    return timed


def make_experiment(
    shared_share: float = 0.2,
    seed: int = 0,
    tag_pair: Sequence[str] = DEFAULT_TAG_PAIR,
    train_sentences: int = 2000,
    test_utterances: int = 200,
    max_segments: int = 3,
    **language_options
) -> SyntheticExperiment:
    """
    Monolingual training text for both languages plus a mixed reference corpus

    Reference utterances are 1 to max_segments monolingual sentences of alternating language,
    with word durations of 150-500 ms and occasional pauses.
    """
    languages = make_languages(shared_share, seed, tag_pair, **language_options)
    data_rng = np.random.default_rng([seed, 1])
    train = {language.tag: [language.sentence(data_rng) for _ in range(train_sentences)] for language in languages}

    utterances = []
    for index in range(test_utterances):
        language_index = int(data_rng.integers(2))
        segment_count = int(data_rng.integers(1, max_segments + 1))
        words = []  # type: List[Tuple[str, str]]
        for _ in range(segment_count):
            language = languages[language_index]
            words += [(word, language.tag) for word in language.sentence(data_rng)]
            language_index = 1 - language_index
        utterances.append(Utterance("utt{:04d}".format(index), tuple(_timed_words(words, data_rng))))
    reference = Corpus(tuple(utterances), tuple(tag_pair))
    logger.debug(
        "Synthetic experiment shared_share=%s: %s reference words in %s utterances",
        shared_share,
        reference.token_count,
        len(reference),
    )
    return SyntheticExperiment(shared_share, languages, train, reference)


@dataclass(frozen=True)
class ExperimentResult:
    shared_share: float
    curves: Dict[str, DetCurve]
    operating_lambda: float
    reference_switches: int
    hypothesis_switches: int
    reference_histogram: DurationHistogram
    hypothesis_histogram: DurationHistogram

    @property
    def operating_curve(self) -> DetCurve:
        """
        Pooled curve, or the first language curve when the lambda grid gave no pooled curve
        """
        if POOLED in self.curves:
            return self.curves[POOLED]
        return next(iter(self.curves.values()))

    @property
    def eer(self) -> float:
        return self.operating_curve.eer

    @property
    def switch_ratio(self) -> float:
        if not self.reference_switches:
            return float("inf") if self.hypothesis_switches else 1.0
        return self.hypothesis_switches / self.reference_switches


def run_experiment(
    experiment: SyntheticExperiment,
    order: int = 3,
    config: Optional[SweepConfig] = None,
    frame_ms: int = DEFAULT_FRAME_MS,
    histogram_edges: Optional[Sequence[float]] = None,
) -> ExperimentResult:
    """
    Trains one model per language, sweeps the prior and scores the reference
    Switches and durations are measured at the pooled curve operating point, the first language
    curve stands in when the lambda grid is not symmetric
    """
    first, second = experiment.tag_pair
    tagger = CodeSwitchTagger(
        train_kn(experiment.train[first], order), train_kn(experiment.train[second], order), experiment.tag_pair
    )
    points = tagger.sweep(experiment.reference, config or SweepConfig())
    hypotheses = [(point.lam, hypothesis_corpus(experiment.reference, point)) for point in points]
    curves = det_curves(hypotheses, experiment.reference, frame_ms)
    operating_lambda = curves.get(POOLED, curves[first]).operating_point.lam
    operating_hypothesis = dict(hypotheses)[operating_lambda]
    result = ExperimentResult(
        experiment.shared_share,
        curves,
        operating_lambda,
        switch_stats(experiment.reference).total,
        switch_stats(operating_hypothesis).total,
        duration_histogram(experiment.reference, histogram_edges),
        duration_histogram(operating_hypothesis, histogram_edges),
    )
    logger.info(
        "Shared share %.2f: EER %.2f%%, %s hypothesized switches for %s reference switches",
        experiment.shared_share,
        result.eer * 100,
        result.hypothesis_switches,
        result.reference_switches,
    )
    return result

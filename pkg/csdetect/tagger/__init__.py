#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Word level language tagging with two monolingual language models

For a prior weight lam on the first language, a word w with history h is tagged first when

    lam * P_first(w|h) / (lam * P_first(w|h) + (1 - lam) * P_second(w|h)) > 0.5

Sweeping lam from 0 to 1 moves every word from second to first exactly once, which yields the
detection error tradeoff of the tagger. An optional switch penalty gamma smooths tag sequences with
a two state Viterbi search.

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.tagger"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Language model prior sweep tagger"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
import os
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from csdetect.bisection import bisect
from csdetect.corpus import Corpus, Utterance, check_tag_pair, with_tags, write_ctm
from csdetect.lm import BOS, LanguageModel
from csdetect.threading import threaded, wait_for_threaded_result

logger = logging.getLogger(__intname__)

DEFAULT_LAMBDA_STEP = 0.02
# Grid values are rounded so 0.02 * 3 gives 0.06 and not 0.06000000000000001
GRID_DECIMALS = 10


def lambda_grid(step: float = DEFAULT_LAMBDA_STEP) -> Tuple[float, ...]:
    """
    Evenly spaced grid from 0 to 1 included, step must divide 1
    """
    if not 0 < step <= 1:
        raise ValueError("Lambda step must lie in (0, 1], got {}".format(step))
    intervals = int(round(1.0 / step))
    if abs(intervals * step - 1.0) > 1e-9:
        raise ValueError("Lambda step {} does not divide [0, 1] evenly".format(step))
    return tuple(round(index / intervals, GRID_DECIMALS) for index in range(intervals + 1))


@dataclass(frozen=True)
class SweepConfig:
    lambdas: Tuple[float, ...] = lambda_grid()
    gamma: float = 0.0
    workers: int = 1

    def __post_init__(self):
        lambdas = tuple(float(lam) for lam in self.lambdas)
        object.__setattr__(self, "lambdas", lambdas)
        if len(lambdas) < 2:
            raise ValueError("A lambda grid needs at least the two endpoints 0 and 1")
        for previous, current in zip(lambdas, lambdas[1:]):
            if current <= previous:
                raise ValueError("Lambda grid must be strictly increasing, got {} after {}".format(current, previous))
        if lambdas[0] != 0.0 or lambdas[-1] != 1.0:
            raise ValueError("Lambda grid must start at 0 and end at 1, got {} .. {}".format(lambdas[0], lambdas[-1]))
        if self.gamma < 0:
            raise ValueError("Switch penalty gamma must be non negative, got {}".format(self.gamma))
        if self.workers < 1:
            raise ValueError("Workers must be at least 1, got {}".format(self.workers))

    @classmethod
    def from_step(cls, step: float = DEFAULT_LAMBDA_STEP, gamma: float = 0.0, workers: int = 1) -> "SweepConfig":
        return cls(lambda_grid(step), gamma, workers)


@dataclass(frozen=True)
class TaggedHypothesis:
    utterance_id: str
    lam: float
    tags: Tuple[str, ...]
    posteriors: Tuple[float, ...]

    @property
    def switch_count(self) -> int:
        return sum(1 for previous, current in zip(self.tags, self.tags[1:]) if previous != current)


@dataclass(frozen=True)
class SweepPoint:
    lam: float
    hypotheses: Tuple[TaggedHypothesis, ...]

    def first_share(self, first_tag: str) -> float:
        """
        Fraction of words tagged with first_tag
        """
        total = sum(len(hypothesis.tags) for hypothesis in self.hypotheses)
        if not total:
            return 0.0
        tagged = sum(hypothesis.tags.count(first_tag) for hypothesis in self.hypotheses)
        return tagged / total


def _check_lambda(lam: float) -> float:
    if not 0.0 <= lam <= 1.0:
        raise ValueError("Prior weight lambda must lie in [0, 1], got {}".format(lam))
    return float(lam)


def _posteriors(first_probs: np.ndarray, second_probs: np.ndarray, lam: float) -> np.ndarray:
    if lam == 1.0:
        return np.ones(len(first_probs))
    if lam == 0.0:
        return np.zeros(len(first_probs))
    first_mass = lam * first_probs
    return first_mass / (first_mass + (1.0 - lam) * second_probs)


def posterior(
    word: str,
    history: Sequence[str],
    first_lm: LanguageModel,
    second_lm: LanguageModel,
    lam: float,
) -> float:
    """
    Posterior probability that word belongs to the first language
    Endpoints return exactly 1.0 (lam=1) and 0.0 (lam=0)
    """
    lam = _check_lambda(lam)
    first_prob = np.array([first_lm.prob(word, history)])
    second_prob = np.array([second_lm.prob(word, history)])
    return float(_posteriors(first_prob, second_prob, lam)[0])


def smooth_tags(first_scores: Sequence[float], second_scores: Sequence[float], gamma: float) -> List[bool]:
    """
    Exact maximizer of sum of per word scores minus gamma per tag change, True meaning first

    Ties prefer staying in the current state, the final state prefers second
    """
    if not len(first_scores):
        return []
    emissions = (second_scores, first_scores)
    scores = [second_scores[0], first_scores[0]]
    pointers = []  # type: List[Tuple[int, int]]
    for position in range(1, len(first_scores)):
        new_scores = [0.0, 0.0]
        step_pointers = [0, 0]
        for state in (0, 1):
            stay = scores[state]
            switch = scores[1 - state] - gamma
            if stay >= switch:
                new_scores[state], step_pointers[state] = stay, state
            else:
                new_scores[state], step_pointers[state] = switch, 1 - state
            new_scores[state] += emissions[state][position]
        pointers.append((step_pointers[0], step_pointers[1]))
        scores = new_scores

    state = 1 if scores[1] > scores[0] else 0
    path = [state]
    for step_pointers in reversed(pointers):
        state = step_pointers[state]
        path.append(state)
    path.reverse()
    return [state == 1 for state in path]


class CodeSwitchTagger:
    """
    Tags the words of an utterance with one of two languages, given one language model per language
    """

    def __init__(self, first_lm: LanguageModel, second_lm: LanguageModel, tag_pair: Sequence[str]):
        self.first_lm = first_lm
        self.second_lm = second_lm
        self.tag_pair = check_tag_pair(tag_pair)

    def component_probs(self, words: Sequence[str]) -> Tuple[np.ndarray, np.ndarray]:
        """
        P_first(w_i|h_i) and P_second(w_i|h_i), h_i being <s> and the preceding words
        """
        history = [BOS]
        first_probs = np.empty(len(words))
        second_probs = np.empty(len(words))
        for index, word in enumerate(words):
            first_probs[index] = self.first_lm.prob(word, history)
            second_probs[index] = self.second_lm.prob(word, history)
            history.append(word)
        return first_probs, second_probs

    def _tag_from_probs(
        self,
        utterance_id: str,
        first_probs: np.ndarray,
        second_probs: np.ndarray,
        lam: float,
        gamma: float,
    ) -> TaggedHypothesis:
        posteriors = _posteriors(first_probs, second_probs, lam)
        if gamma == 0.0 or lam in (0.0, 1.0):
            is_first = [value > 0.5 for value in posteriors]
        else:
            first_mass = lam * first_probs
            second_mass = (1.0 - lam) * second_probs
            with np.errstate(divide="ignore"):
                log_first = np.log(first_mass)
                log_second = np.log(second_mass)
            log_total = np.logaddexp(log_first, log_second)
            is_first = smooth_tags(list(log_first - log_total), list(log_second - log_total), gamma)
        first, second = self.tag_pair
        return TaggedHypothesis(
            utterance_id,
            lam,
            tuple(first if flag else second for flag in is_first),
            tuple(float(value) for value in posteriors),
        )

    def tag_utterance(self, utterance: Utterance, lam: float, gamma: float = 0.0) -> TaggedHypothesis:
        """
        :raises ValueError: empty utterance, lambda outside [0, 1], negative gamma
        """
        lam = _check_lambda(lam)
        if gamma < 0:
            raise ValueError("Switch penalty gamma must be non negative, got {}".format(gamma))
        if not len(utterance):
            raise ValueError('Cannot tag empty utterance "{}"'.format(utterance.id))
        first_probs, second_probs = self.component_probs(utterance.surfaces)
        return self._tag_from_probs(utterance.id, first_probs, second_probs, lam, gamma)

    def flip_thresholds(self, utterance: Utterance, lambdas: Sequence[float]) -> List[float]:
        """
        For each word, the smallest grid lambda at which it is tagged first (gamma = 0)
        lambdas must be increasing, start at 0 and end at 1
        """
        first_probs, second_probs = self.component_probs(utterance.surfaces)
        thresholds = []
        for index in range(len(utterance)):
            pair = (first_probs[index:index + 1], second_probs[index:index + 1])

            def _is_first(lam):
                return bool(_posteriors(pair[0], pair[1], lam)[0] > 0.5)

            thresholds.append(bisect(_is_first, list(lambdas), expected_result=True))
        return thresholds

    def sweep(self, corpus: Corpus, config: Optional[SweepConfig] = None) -> List[SweepPoint]:
        """
        One tagging of the whole corpus per grid lambda, in grid order
        Component probabilities are computed once per utterance
        """
        config = config or SweepConfig()
        for utterance in corpus:
            if not len(utterance):
                raise ValueError('Cannot tag empty utterance "{}"'.format(utterance.id))
        cached = [
            (utterance.id,) + self.component_probs(utterance.surfaces) for utterance in corpus
        ]
        workers = min(config.workers, len(config.lambdas))
        chunks = [config.lambdas[index::workers] for index in range(workers)]
        results = wait_for_threaded_result(
            [
                _sweep_chunk(self, cached, chunk, config.gamma, **{"__no_threads": workers <= 1})
                for chunk in chunks
            ]
        )
        points = {point.lam: point for chunk_points in results for point in chunk_points}
        logger.info(
            "Tagged %s utterances at %s lambda values (gamma=%s)", len(corpus), len(points), config.gamma
        )
        return [points[lam] for lam in config.lambdas]


@threaded
def _sweep_chunk(tagger: CodeSwitchTagger, cached, lambdas: Sequence[float], gamma: float) -> List[SweepPoint]:
    points = []
    for lam in lambdas:
        points.append(
            SweepPoint(
                lam,
                tuple(
                    tagger._tag_from_probs(utterance_id, first_probs, second_probs, lam, gamma)
                    for utterance_id, first_probs, second_probs in cached
                ),
            )
        )
        logger.debug("Tagged sweep point lambda=%.4f", lam)
    return points


def tag_utterance(
    utterance: Utterance,
    lms: Tuple[LanguageModel, LanguageModel],
    tag_pair: Sequence[str],
    lam: float,
    gamma: float = 0.0,
) -> TaggedHypothesis:
    return CodeSwitchTagger(lms[0], lms[1], tag_pair).tag_utterance(utterance, lam, gamma)


def sweep(
    corpus: Corpus,
    lms: Tuple[LanguageModel, LanguageModel],
    config: Optional[SweepConfig] = None,
) -> List[SweepPoint]:
    return CodeSwitchTagger(lms[0], lms[1], corpus.tag_pair).sweep(corpus, config)


def hypothesis_corpus(reference: Corpus, point: SweepPoint) -> Corpus:
    """
    Reference words and timings carrying the tags hypothesized at one sweep point
    """
    by_id = {hypothesis.utterance_id: hypothesis for hypothesis in point.hypotheses}
    utterances = []
    for utterance in reference:
        try:
            hypothesis = by_id[utterance.id]
        except KeyError:
            raise ValueError(
                'No hypothesis for utterance "{}" at lambda {}'.format(utterance.id, point.lam)
            )
        utterances.append(with_tags(utterance, hypothesis.tags))
    return Corpus(tuple(utterances), reference.tag_pair)


def sweep_ctm_name(lam: float) -> str:
    return "hyp_lambda_{:.2f}.ctm".format(lam)


def write_sweep_ctms(reference: Corpus, points: Sequence[SweepPoint], directory: str) -> List[str]:
    """
    One hypothesis CTM per sweep point
    :raises ValueError: two grid values sharing a 2 decimal file name
    """
    names = {}  # type: Dict[str, float]
    for point in points:
        name = sweep_ctm_name(point.lam)
        if name in names:
            raise ValueError(
                "Lambda values {} and {} both map to {}".format(names[name], point.lam, name)
            )
        names[name] = point.lam
    paths = []
    for point in points:
        path = os.path.join(directory, sweep_ctm_name(point.lam))
        write_ctm(path, hypothesis_corpus(reference, point))
        paths.append(path)
    logger.info("Wrote %s hypothesis CTM files to %s", len(paths), directory)
    return paths

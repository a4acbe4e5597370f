#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Interpolated Kneser-Ney n-gram language models

train_kn() builds an NGramModel: the highest order uses raw counts, lower orders use continuation
counts (number of distinct left contexts), except n-grams starting with <s> which keep raw counts
since nothing can precede a sentence start.

    P_k(w|h) = (max(a_k(hw) - D_k, 0) + D_k * N1+(h.) * P_k-1(w|h')) / sum_w a_k(hw)

with P_0 uniform over the vocabulary. Histories never seen at order k fall through to order k-1.

Every model (NGramModel, InterpolatedModel, UniformModel, csdetect.arpa.BackoffModel) answers
prob() / logprob() / distribution(), so perplexity(), sample() and the tagger accept any of them.

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.lm"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Interpolated Kneser-Ney language models, interpolation, perplexity and sampling"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__intname__)

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"
RESERVED_TOKENS = (BOS, EOS, UNK)

MAX_ORDER = 5
DEFAULT_DISCOUNT = 0.75
# Minimum unigram mass given to <unk>, so OOV test tokens keep a finite log probability
UNK_FLOOR = 1e-6

Discount = Optional[Union[float, Sequence[float]]]


def _safe_log(value: float) -> float:
    return math.log(value) if value > 0 else float("-inf")


class LanguageModel:
    """
    Query interface shared by every model

    support: tokens a distribution is defined over (vocabulary without <s>), sorted
    vocab: every known token, <s> included
    """

    order = 1
    support = []  # type: List[str]
    vocab = frozenset()  # type: FrozenSet[str]

    def map_token(self, token: str) -> str:
        return token if token in self.vocab else UNK

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        raise NotImplementedError

    def logprob(self, word: str, history: Sequence[str] = ()) -> float:
        """
        Natural log probability, -inf only for zero probability events
        """
        return _safe_log(self.prob(word, history))

    def distribution(self, history: Sequence[str] = ()) -> Tuple[List[str], np.ndarray]:
        """
        (support, probabilities) for the next token given history
        """
        return self.support, np.array([self.prob(word, history) for word in self.support])


class _HistoryStats:
    """
    Adjusted counts of the words following one history at one order
    """

    __slots__ = ("counts", "total", "n1plus", "indices", "values")

    def __init__(self, counts: Dict[str, int], index: Dict[str, int]):
        self.counts = counts
        self.total = float(sum(counts.values()))
        self.n1plus = len(counts)
        words = sorted(counts)
        self.indices = np.array([index[word] for word in words], dtype=np.int64)
        self.values = np.array([counts[word] for word in words], dtype=np.float64)


class NGramModel(LanguageModel):
    """
    Immutable interpolated Kneser-Ney model, build it with train_kn()
    """

    def __init__(
        self,
        order: int,
        discounts: Sequence[float],
        adjusted_counts: Sequence[Dict[Tuple[str, ...], int]],
    ):
        self.order = order
        self.discounts = tuple(float(discount) for discount in discounts)
        # adjusted_counts[k - 1] holds order k n-grams
        self.adjusted_counts = tuple(dict(counts) for counts in adjusted_counts)

        words = {gram[0] for gram in self.adjusted_counts[0]}
        words.update((EOS, UNK))
        self.support = sorted(words)
        self._index = {word: index for index, word in enumerate(self.support)}
        self.vocab = frozenset(self.support) | {BOS}

        self._unigram = self._build_unigram()
        self._tables = [dict()]  # type: List[Dict[Tuple[str, ...], _HistoryStats]]
        for order_index in range(1, self.order):
            grouped = {}  # type: Dict[Tuple[str, ...], Dict[str, int]]
            for gram, count in self.adjusted_counts[order_index].items():
                grouped.setdefault(gram[:-1], {})[gram[-1]] = count
            self._tables.append(
                {history: _HistoryStats(counts, self._index) for history, counts in grouped.items()}
            )

    def _build_unigram(self) -> np.ndarray:
        discount = self.discounts[0]
        counts = np.zeros(len(self.support))
        for (word,), count in self.adjusted_counts[0].items():
            counts[self._index[word]] = count
        total = counts.sum()
        n1plus = np.count_nonzero(counts)
        unigram = (np.maximum(counts - discount, 0.0) + discount * n1plus / len(self.support)) / total
        unk_index = self._index[UNK]
        if unigram[unk_index] < UNK_FLOOR:
            others = 1.0 - unigram[unk_index]
            unigram *= (1.0 - UNK_FLOOR) / others
            unigram[unk_index] = UNK_FLOOR
        return unigram

    def _history(self, history: Sequence[str]) -> Tuple[str, ...]:
        if self.order == 1:
            return ()
        return tuple(self.map_token(token) for token in history)[-(self.order - 1):]

    def _prob(self, word: str, history: Tuple[str, ...]) -> float:
        if word not in self._index:
            return 0.0
        prob = float(self._unigram[self._index[word]])
        for order_index in range(1, len(history) + 1):
            stats = self._tables[order_index].get(history[len(history) - order_index:])
            if stats is None:
                continue
            discount = self.discounts[order_index]
            count = stats.counts.get(word, 0)
            prob = (max(count - discount, 0.0) + discount * stats.n1plus * prob) / stats.total
        return prob

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        if word == BOS:
            return 0.0
        return self._prob(self.map_token(word), self._history(history))

    def distribution(self, history: Sequence[str] = ()) -> Tuple[List[str], np.ndarray]:
        history = self._history(history)
        probs = self._unigram.copy()
        for order_index in range(1, len(history) + 1):
            stats = self._tables[order_index].get(history[len(history) - order_index:])
            if stats is None:
                continue
            discount = self.discounts[order_index]
            probs *= discount * stats.n1plus / stats.total
            probs[stats.indices] += np.maximum(stats.values - discount, 0.0) / stats.total
        return self.support, probs

    def backoff_weight(self, history: Tuple[str, ...]) -> Optional[float]:
        """
        Mass given to the lower order for a seen history, None when the history was never seen
        This is exactly the back-off weight of the equivalent back-off model
        """
        if not history or len(history) >= self.order:
            return None
        stats = self._tables[len(history)].get(history)
        if stats is None:
            return None
        return self.discounts[len(history)] * stats.n1plus / stats.total

    def ngrams(self, order: int) -> List[Tuple[str, ...]]:
        """
        Explicit n-grams of given order, sorted
        """
        return sorted(self.adjusted_counts[order - 1])

    def conditional(self, gram: Tuple[str, ...]) -> float:
        """
        P(gram[-1] | gram[:-1]) without history truncation or token mapping
        """
        return self._prob(gram[-1], tuple(gram[:-1]))

    def __repr__(self) -> str:
        return "NGramModel(order={}, vocab={}, discounts={})".format(
            self.order, len(self.support), self.discounts
        )


def count_ngrams(sentences: Iterable[Sequence[str]], order: int) -> List[Counter]:
    """
    Raw counts of every n-gram of length 1..order in <s> w1 .. wm </s>
    n-grams never end with <s>
    """
    raw_counts = [Counter() for _ in range(order)]
    for sentence in sentences:
        for token in sentence:
            if token in (BOS, EOS):
                raise ValueError('Reserved token "{}" cannot appear inside a sentence'.format(token))
        tokens = [BOS] + list(sentence) + [EOS]
        for position in range(1, len(tokens)):
            for length in range(1, order + 1):
                begin = position - length + 1
                if begin < 0:
                    break
                raw_counts[length - 1][tuple(tokens[begin:position + 1])] += 1
    return raw_counts


def adjust_counts(raw_counts: Sequence[Counter]) -> List[Dict[Tuple[str, ...], int]]:
    """
    Highest order and <s>-initial n-grams keep raw counts, the others get continuation counts
    """
    order = len(raw_counts)
    adjusted = [None] * order  # type: List[Dict[Tuple[str, ...], int]]
    adjusted[order - 1] = dict(raw_counts[order - 1])
    for order_index in range(order - 2, -1, -1):
        left_extensions = Counter(gram[1:] for gram in raw_counts[order_index + 1])
        adjusted[order_index] = {
            gram: (count if gram[0] == BOS else left_extensions[gram])
            for gram, count in raw_counts[order_index].items()
        }
    return adjusted


def estimate_discount(counts: Iterable[int]) -> float:
    """
    D = n1 / (n1 + 2 * n2) from count of counts, 0.75 when n1 or n2 is zero
    """
    count_of_counts = Counter(counts)
    n1 = count_of_counts.get(1, 0)
    n2 = count_of_counts.get(2, 0)
    if n1 == 0 or n2 == 0:
        return DEFAULT_DISCOUNT
    return n1 / (n1 + 2.0 * n2)


def _resolve_discounts(discount: Discount, adjusted: Sequence[Dict], order: int) -> List[float]:
    if discount is None:
        discounts = [estimate_discount(counts.values()) for counts in adjusted]
    elif isinstance(discount, (int, float)):
        discounts = [float(discount)] * order
    else:
        discounts = [float(value) for value in discount]
        if len(discounts) != order:
            raise ValueError(
                "Got {} discounts for an order {} model".format(len(discounts), order)
            )
    for value in discounts:
        if not 0.0 <= value < 1.0:
            raise ValueError("Discounts must lie in [0, 1), got {}".format(value))
    return discounts


def train_kn(sentences: Sequence[Sequence[str]], order: int = 3, discount: Discount = None) -> NGramModel:
    """
    Trains an interpolated Kneser-Ney model

    :param sentences: token lists, <s> / </s> are added around each of them
    :param order: n-gram order, 1 to 5
    :param discount: None to estimate one discount per order from count of counts,
                     a float for every order, or one float per order (unigram first)
    """
    sentences = list(sentences)
    if not sentences:
        raise ValueError("Cannot train a language model on an empty corpus")
    if not isinstance(order, int) or order < 1:
        raise ValueError("Model order must be at least 1, got {}".format(order))
    if order > MAX_ORDER:
        raise ValueError("Model order must be at most {}, got {}".format(MAX_ORDER, order))

    adjusted = adjust_counts(count_ngrams(sentences, order))
    discounts = _resolve_discounts(discount, adjusted, order)
    model = NGramModel(order, discounts, adjusted)
    logger.debug(
        "Trained order %s KN model on %s sentences: %s tokens in vocabulary, discounts %s",
        order,
        len(sentences),
        len(model.support),
        ", ".join("%.4f" % value for value in discounts),
    )
    return model


class UniformModel(LanguageModel):
    """
    Closed vocabulary uniform model: every token of the support (</s> included) gets 1/|support|
    Out of vocabulary tokens get probability 0
    """

    def __init__(self, tokens: Iterable[str]):
        support = set(tokens) - {BOS}
        support.add(EOS)
        self.support = sorted(support)
        self.vocab = frozenset(self.support) | {BOS}
        self._prob_value = 1.0 / len(self.support)

    def map_token(self, token: str) -> str:
        return token

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        return self._prob_value if word in self.support else 0.0


class InterpolatedModel(LanguageModel):
    """
    P(w|h) = lam * P_first(w|h) + (1 - lam) * P_second(w|h) over the union vocabulary

    A component queried for a union token it does not know answers with its <unk> probability
    shared evenly among all such tokens plus the residual <unk>, so the mixture still sums to one.
    The endpoints therefore match the component only on the component's own vocabulary.
    """

    def __init__(self, first: LanguageModel, second: LanguageModel, lam: float):
        if not 0.0 <= lam <= 1.0:
            raise ValueError("Interpolation weight must lie in [0, 1], got {}".format(lam))
        self.first = first
        self.second = second
        self.lam = float(lam)
        self.order = max(first.order, second.order)
        support = set(first.support) | set(second.support)
        support.add(UNK)
        self.support = sorted(support)
        self.vocab = frozenset(self.support) | {BOS}
        self._unknown_shares = tuple(
            len(support - set(component.support) - {UNK}) + 1 for component in (first, second)
        )

    def _component_prob(self, component_index: int, word: str, history: Sequence[str]) -> float:
        component = (self.first, self.second)[component_index]
        if word in component.vocab and word != UNK:
            return component.prob(word, history)
        # Also at lam 1 or 0: a token unknown to the component gets P(<unk>|h) / k, not P(<unk>|h)
        return component.prob(UNK, history) / self._unknown_shares[component_index]

    def component_probs(self, word: str, history: Sequence[str] = ()) -> Tuple[float, float]:
        """
        Both component probabilities after vocabulary merging
        """
        if word == BOS:
            return 0.0, 0.0
        word = self.map_token(word)
        return self._component_prob(0, word, history), self._component_prob(1, word, history)

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        first_prob, second_prob = self.component_probs(word, history)
        if self.lam == 1.0:
            return first_prob
        if self.lam == 0.0:
            return second_prob
        return self.lam * first_prob + (1.0 - self.lam) * second_prob


def logprob(model: LanguageModel, word: str, history: Sequence[str] = ()) -> float:
    return model.logprob(word, history)


@dataclass(frozen=True)
class Perplexity:
    value: float
    token_count: int
    oov_count: int
    logprob_sum: float

    def __float__(self) -> float:
        return self.value


def _sentence_events(sentences: Iterable[Sequence[str]]):
    """
    Yields (word, history) for every predicted token, </s> included
    """
    for sentence in sentences:
        history = [BOS]
        for token in list(sentence) + [EOS]:
            yield token, tuple(history)
            history.append(token)


def perplexity(model: LanguageModel, sentences: Sequence[Sequence[str]]) -> Perplexity:
    """
    exp(-1/N sum ln P(w_i|h_i)), N counts </s> but not <s>
    """
    sentences = list(sentences)
    if not sentences:
        raise ValueError("Cannot compute perplexity on an empty corpus")
    total = 0.0
    token_count = 0
    oov_count = 0
    for word, history in _sentence_events(sentences):
        total += model.logprob(word, history)
        token_count += 1
        if word not in model.vocab:
            oov_count += 1
    value = math.exp(-total / token_count) if total > float("-inf") else float("inf")
    return Perplexity(value, token_count, oov_count, total)


def best_interpolation_weight(
    first: LanguageModel,
    second: LanguageModel,
    sentences: Sequence[Sequence[str]],
    grid: Optional[Sequence[float]] = None,
) -> Tuple[float, Perplexity]:
    """
    Interpolation weight with the lowest perplexity on development sentences, ties to smaller weight
    """
    sentences = list(sentences)
    if not sentences:
        raise ValueError("Cannot select an interpolation weight on an empty corpus")
    if grid is None:
        grid = [step / 10.0 for step in range(11)]
    merged = InterpolatedModel(first, second, 0.0)
    events = list(_sentence_events(sentences))
    pairs = np.array([merged.component_probs(word, history) for word, history in events])
    oov_count = sum(1 for word, _ in events if word not in merged.vocab)

    best = None  # type: Optional[Tuple[float, Perplexity]]
    for lam in sorted(grid):
        with np.errstate(divide="ignore"):
            if lam == 1.0:
                mixture = pairs[:, 0]
            elif lam == 0.0:
                mixture = pairs[:, 1]
            else:
                mixture = lam * pairs[:, 0] + (1.0 - lam) * pairs[:, 1]
            total = float(np.sum(np.log(mixture)))
        value = math.exp(-total / len(events)) if total > float("-inf") else float("inf")
        result = Perplexity(value, len(events), oov_count, total)
        logger.debug("Interpolation weight %.3f: perplexity %.4f", lam, value)
        if best is None or value < best[1].value:
            best = (lam, result)
    return best


def _get_rng(seed: Union[int, np.random.Generator, None]) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def sample(
    model: LanguageModel,
    max_len: int,
    seed: Union[int, np.random.Generator, None] = None,
) -> List[str]:
    """
    Ancestral sampling from <s> until </s> or max_len tokens
    <unk> and <s> are removed from the support and the rest renormalized
    """
    if max_len < 1:
        raise ValueError("max_len must be at least 1, got {}".format(max_len))
    rng = _get_rng(seed)
    history = [BOS]
    sentence = []  # type: List[str]
    support_mask = None
    while len(sentence) < max_len:
        support, probs = model.distribution(history)
        if support_mask is None:
            support_mask = np.array([token not in (BOS, UNK) for token in support])
        probs = np.where(support_mask, probs, 0.0)
        cumulative = np.cumsum(probs)
        if cumulative[-1] <= 0:
            break
        draw = rng.random() * cumulative[-1]
        index = min(int(np.searchsorted(cumulative, draw, side="right")), len(support) - 1)
        token = support[index]
        if token == EOS:
            break
        sentence.append(token)
        history.append(token)
    return sentence


def sample_corpus(
    model: LanguageModel,
    count: int,
    max_len: int,
    seed: Union[int, np.random.Generator, None] = None,
) -> List[List[str]]:
    """
    count sentences drawn with a single random stream, so a seed fixes the whole corpus
    Empty draws (immediate </s>) are kept as empty sentences
    """
    rng = _get_rng(seed)
    return [sample(model, max_len, rng) for _ in range(count)]

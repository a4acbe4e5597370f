#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Back-off language model exchange format (ARPA) reader and writer

    \\data\\
    ngram 1=5
    ngram 2=4

    \\1-grams:
    -0.6989700	</s>
    -99	<s>	-0.3010300
    ...

    \\end\\

Probabilities and back-off weights are log10. An interpolated Kneser-Ney model is written without loss:
listed n-grams carry their fully interpolated probability, histories carry D * N1+(h.) / c(h) as
back-off weight, so a back-off reader gives the very same conditional probabilities.

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.arpa"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "ARPA back-off language model files"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
import math
import re
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from csdetect.file_utils import read_lines, write_lines
from csdetect.lm import BOS, UNK, LanguageModel, NGramModel

logger = logging.getLogger(__intname__)

# log10 probability given to <s>, which is never predicted
BOS_LOG10_PROB = -99
NGRAM_COUNT_RE = re.compile(r"^ngram\s+(\d+)\s*=\s*(\d+)$")
SECTION_RE = re.compile(r"^\\(\d+)-grams:$")


class ArpaFormatError(ValueError):
    def __init__(self, message: str, source: str = "<stream>", line: int = 0):
        self.source = source
        self.line = line
        super().__init__("{}:{}: {}".format(source, line, message))


def _format_log10(value: float) -> str:
    return "{:.7f}".format(math.log10(value))


def arpa_lines(model: NGramModel) -> List[str]:
    """
    ARPA text of a Kneser-Ney model, n-grams sorted within each order
    """
    sections = []
    counts = []
    for order in range(1, model.order + 1):
        grams = model.ngrams(order)
        if order == 1:
            grams = sorted(set(grams) | {(word,) for word in model.support} | {(BOS,)})
        entries = []
        for gram in grams:
            if gram == (BOS,):
                log_prob = str(BOS_LOG10_PROB)
            else:
                log_prob = _format_log10(model.conditional(gram))
            fields = [log_prob, " ".join(gram)]
            backoff = model.backoff_weight(gram)
            if backoff is not None:
                fields.append(_format_log10(backoff) if backoff > 0 else str(BOS_LOG10_PROB))
            entries.append("\t".join(fields))
        counts.append(len(entries))
        sections.append(["\\{}-grams:".format(order)] + entries + [""])

    lines = ["\\data\\"]
    lines += ["ngram {}={}".format(order, count) for order, count in enumerate(counts, 1)]
    lines.append("")
    for section in sections:
        lines += section
    lines.append("\\end\\")
    return lines


def write_arpa(path: str, model: NGramModel) -> None:
    write_lines(path, arpa_lines(model))
    logger.debug("Wrote order %s model to %s", model.order, path)


class BackoffModel(LanguageModel):
    """
    Back-off model as read from an ARPA file

    P(w|h) = 10^logprob(h w) when h w is listed, else 10^backoff(h) * P(w|h')
    """

    def __init__(
        self,
        log_probs: Sequence[Dict[Tuple[str, ...], float]],
        log_backoffs: Dict[Tuple[str, ...], float],
    ):
        self.order = len(log_probs)
        self._log_probs = log_probs
        self._log_backoffs = log_backoffs
        self.vocab = frozenset(gram[0] for gram in log_probs[0])
        self.support = sorted(self.vocab - {BOS})

    def map_token(self, token: str) -> str:
        if token in self.vocab or UNK not in self.vocab:
            return token
        return UNK

    def _prob(self, word: str, history: Tuple[str, ...]) -> float:
        weight = 1.0
        while True:
            gram = history + (word,)
            log_prob = self._log_probs[len(gram) - 1].get(gram)
            if log_prob is not None:
                return weight * 10.0 ** log_prob
            if not history:
                return 0.0
            weight *= 10.0 ** self._log_backoffs.get(history, 0.0)
            history = history[1:]

    def prob(self, word: str, history: Sequence[str] = ()) -> float:
        word = self.map_token(word)
        if word == BOS:
            return 0.0
        if self.order == 1:
            history = ()
        else:
            history = tuple(self.map_token(token) for token in history)[-(self.order - 1):]
        return self._prob(word, history)


def parse_arpa(lines: Iterable[str], source: str = "<stream>") -> BackoffModel:
    """
    :raises ArpaFormatError: missing header, malformed entries, count mismatch
    """
    declared = {}  # type: Dict[int, int]
    log_probs = []  # type: List[Dict[Tuple[str, ...], float]]
    log_backoffs = {}  # type: Dict[Tuple[str, ...], float]
    state = "start"
    current_order = 0
    line_number = 0

    for line_number, raw_line in enumerate(lines, 1):
        line = raw_line.strip()
        if state == "start":
            if line == "\\data\\":
                state = "data"
            elif line:
                raise ArpaFormatError("expected \\data\\ header", source, line_number)
            continue
        if state == "end":
            if line:
                raise ArpaFormatError("content after \\end\\", source, line_number)
            continue
        if not line:
            continue
        if line == "\\end\\":
            state = "end"
            continue
        section = SECTION_RE.match(line)
        if section:
            current_order = int(section.group(1))
            if current_order != len(log_probs) + 1 or current_order not in declared:
                raise ArpaFormatError(
                    "unexpected section \\{}-grams:".format(current_order), source, line_number
                )
            log_probs.append({})
            state = "grams"
            continue
        if state == "data":
            match = NGRAM_COUNT_RE.match(line)
            if not match:
                raise ArpaFormatError('bad count line "{}"'.format(line), source, line_number)
            declared[int(match.group(1))] = int(match.group(2))
            continue

        fields = line.split()
        if len(fields) not in (current_order + 1, current_order + 2):
            raise ArpaFormatError(
                "expected {} or {} fields for a {}-gram, got {}".format(
                    current_order + 1, current_order + 2, current_order, len(fields)
                ),
                source,
                line_number,
            )
        gram = tuple(fields[1:current_order + 1])
        try:
            log_probs[-1][gram] = float(fields[0])
            if len(fields) == current_order + 2:
                log_backoffs[gram] = float(fields[-1])
        except ValueError:
            raise ArpaFormatError('non numeric value in "{}"'.format(line), source, line_number)

    if state != "end":
        raise ArpaFormatError("missing \\end\\ marker", source, line_number)
    if not log_probs or sorted(declared) != list(range(1, len(log_probs) + 1)):
        raise ArpaFormatError(
            "declared orders {} do not match sections".format(sorted(declared)), source, line_number
        )
    for order, entries in enumerate(log_probs, 1):
        if len(entries) != declared[order]:
            raise ArpaFormatError(
                "declared {} {}-grams, found {}".format(declared[order], order, len(entries)),
                source,
                line_number,
            )
    return BackoffModel(log_probs, log_backoffs)


def read_arpa(path: str) -> BackoffModel:
    model = parse_arpa(read_lines(path), source=path)
    logger.debug("Read order %s model with %s unigrams from %s", model.order, len(model.vocab), path)
    return model

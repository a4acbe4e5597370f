#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Diagnostics of a tagged hypothesis against its reference

- word error rate with and without language tags, per utterance class
- language switch counts
- monolingual segment duration histograms
- most frequent (word, tag) confusions

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.analysis"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "WER, switch counts, segment durations and confusions of tagged transcripts"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
import math
from bisect import bisect_right
from collections import Counter, OrderedDict
from dataclasses import dataclass
from enum import Enum
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

from csdetect.corpus import Corpus, UtteranceClass, classify_utterance
from csdetect.csv import csv_dict_writer

logger = logging.getLogger(__intname__)

WITH_TAGS = "tags"
WORDS_ONLY = "words"
MODES = (WITH_TAGS, WORDS_ONLY)
ALL_CLASSES = "all"
DEFAULT_HISTOGRAM_EDGES = (0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 15, 20, 30, math.inf)
CONFUSION_HEADER = "Ref. word | Hyp. word | Count"

Token = Tuple[str, str]


class OpKind(Enum):
    MATCH = "match"
    SUBSTITUTION = "substitution"
    DELETION = "deletion"
    INSERTION = "insertion"


@dataclass(frozen=True)
class AlignmentOp:
    kind: OpKind
    ref_token: Optional[Hashable] = None
    hyp_token: Optional[Hashable] = None

    def __post_init__(self):
        has_ref = self.ref_token is not None
        has_hyp = self.hyp_token is not None
        expected = {
            OpKind.MATCH: (True, True),
            OpKind.SUBSTITUTION: (True, True),
            OpKind.DELETION: (True, False),
            OpKind.INSERTION: (False, True),
        }[self.kind]
        if (has_ref, has_hyp) != expected:
            raise ValueError("{} operation cannot carry ref={} hyp={}".format(self.kind.value, self.ref_token, self.hyp_token))


def _check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError('Unknown alignment mode "{}", expected one of {}'.format(mode, MODES))
    return mode


def _word(token: Hashable) -> Hashable:
    return token[0] if isinstance(token, tuple) else token


def _equal(ref_token: Hashable, hyp_token: Hashable, mode: str) -> bool:
    if mode == WITH_TAGS:
        return ref_token == hyp_token
    return _word(ref_token) == _word(hyp_token)


def align(ref: Sequence[Hashable], hyp: Sequence[Hashable], mode: str = WITH_TAGS) -> List[AlignmentOp]:
    """
    Minimum edit distance alignment with unit costs

    Tokens are (word, tag) tuples, or plain words. In words mode only the word part is compared.
    Backtrace prefers match, then substitution, then deletion, then insertion.
    """
    _check_mode(mode)
    rows = len(ref) + 1
    columns = len(hyp) + 1
    distance = [[0] * columns for _ in range(rows)]
    for i in range(rows):
        distance[i][0] = i
    for j in range(columns):
        distance[0][j] = j
    for i in range(1, rows):
        for j in range(1, columns):
            diagonal = distance[i - 1][j - 1] + (0 if _equal(ref[i - 1], hyp[j - 1], mode) else 1)
            distance[i][j] = min(diagonal, distance[i - 1][j] + 1, distance[i][j - 1] + 1)

    operations = []
    i, j = len(ref), len(hyp)
    while i > 0 or j > 0:
        if i > 0 and j > 0:
            equal = _equal(ref[i - 1], hyp[j - 1], mode)
            if equal and distance[i][j] == distance[i - 1][j - 1]:
                operations.append(AlignmentOp(OpKind.MATCH, ref[i - 1], hyp[j - 1]))
                i, j = i - 1, j - 1
                continue
            if not equal and distance[i][j] == distance[i - 1][j - 1] + 1:
                operations.append(AlignmentOp(OpKind.SUBSTITUTION, ref[i - 1], hyp[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and distance[i][j] == distance[i - 1][j] + 1:
            operations.append(AlignmentOp(OpKind.DELETION, ref[i - 1], None))
            i -= 1
        else:
            operations.append(AlignmentOp(OpKind.INSERTION, None, hyp[j - 1]))
            j -= 1
    operations.reverse()
    return operations


def edit_distance(operations: Iterable[AlignmentOp]) -> int:
    return sum(1 for operation in operations if operation.kind != OpKind.MATCH)


@dataclass(frozen=True)
class ErrorCounts:
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    reference_count: int = 0

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    @property
    def wer(self) -> float:
        """
        (S + D + I) / N, 0 for an empty reference without insertions
        """
        if not self.reference_count:
            return math.inf if self.errors else 0.0
        return self.errors / self.reference_count

    def __add__(self, other: "ErrorCounts") -> "ErrorCounts":
        return ErrorCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.reference_count + other.reference_count,
        )

    @classmethod
    def from_alignment(cls, operations: Sequence[AlignmentOp]) -> "ErrorCounts":
        kinds = Counter(operation.kind for operation in operations)
        return cls(
            kinds[OpKind.SUBSTITUTION],
            kinds[OpKind.DELETION],
            kinds[OpKind.INSERTION],
            kinds[OpKind.MATCH] + kinds[OpKind.SUBSTITUTION] + kinds[OpKind.DELETION],
        )


@dataclass(frozen=True)
class WerReport:
    mode: str
    per_class: Dict[UtteranceClass, ErrorCounts]
    overall: ErrorCounts

    @property
    def wer(self) -> float:
        return self.overall.wer

    def rows(self) -> List[Tuple[str, ErrorCounts]]:
        return [(utterance_class.value, self.per_class[utterance_class]) for utterance_class in UtteranceClass] + [
            (ALL_CLASSES, self.overall)
        ]


@dataclass(frozen=True)
class CorpusScore:
    with_tags: WerReport
    words_only: WerReport
    alignments: Dict[str, List[AlignmentOp]]

    def report(self, mode: str) -> WerReport:
        return self.with_tags if _check_mode(mode) == WITH_TAGS else self.words_only


def _check_ids(reference: Corpus, hypothesis: Corpus) -> None:
    reference_ids = set(reference.ids)
    hypothesis_ids = set(hypothesis.ids)
    missing = [utterance_id for utterance_id in reference.ids if utterance_id not in hypothesis_ids]
    extra = [utterance_id for utterance_id in hypothesis.ids if utterance_id not in reference_ids]
    if missing or extra:
        raise ValueError(
            "Utterance ids do not match: {} missing from hypothesis, {} not in reference (eg {})".format(
                len(missing), len(extra), (missing + extra)[:3]
            )
        )


def _tokens(utterance) -> List[Token]:
    return [(word.surface, word.tag) for word in utterance.words]


def score_corpora(reference: Corpus, hypothesis: Corpus) -> CorpusScore:
    """
    Both WER modes in one pass, utterances classified on the reference
    Alignments kept are the with-tags ones, keyed by utterance id

    :raises ValueError: utterance ids do not match one to one
    """
    _check_ids(reference, hypothesis)
    totals = {mode: {utterance_class: ErrorCounts() for utterance_class in UtteranceClass} for mode in MODES}
    alignments = OrderedDict()  # type: Dict[str, List[AlignmentOp]]
    for utterance in reference:
        utterance_class = classify_utterance(utterance, reference.tag_pair)
        ref_tokens = _tokens(utterance)
        hyp_tokens = _tokens(hypothesis.get(utterance.id))
        for mode in MODES:
            operations = align(ref_tokens, hyp_tokens, mode)
            totals[mode][utterance_class] += ErrorCounts.from_alignment(operations)
            if mode == WITH_TAGS:
                alignments[utterance.id] = operations
    reports = {}
    for mode in MODES:
        overall = ErrorCounts()
        for counts in totals[mode].values():
            overall += counts
        reports[mode] = WerReport(mode, totals[mode], overall)
    logger.debug(
        "WER with tags %.2f%%, words only %.2f%%", reports[WITH_TAGS].wer * 100, reports[WORDS_ONLY].wer * 100
    )
    return CorpusScore(reports[WITH_TAGS], reports[WORDS_ONLY], alignments)


def wer(reference: Corpus, hypothesis: Corpus, mode: str = WITH_TAGS) -> WerReport:
    return score_corpora(reference, hypothesis).report(mode)


def tag_confusion_mass(score: CorpusScore) -> int:
    """
    Errors that only exist when tags are compared: with-tags errors minus words-only errors,
    so wer(with tags) - wer(words only) = mass / N

    The same word tag confusions of the with-tags alignments (confusions(..., tag_only=True))
    never exceed it. They fall short when a shifted alignment trades them for a deletion and an
    insertion, eg a|fy a|nl a|fy against a|nl a|fy a|nl has a mass of 2 and no such substitution.
    """
    return score.with_tags.overall.errors - score.words_only.overall.errors


@dataclass(frozen=True)
class SwitchStats:
    total: int
    per_utterance: Dict[str, int]

    @property
    def utterance_count(self) -> int:
        return len(self.per_utterance)


def count_switches(tags: Sequence[str]) -> int:
    return sum(1 for previous, current in zip(tags, tags[1:]) if previous != current)


def switch_stats(corpus: Corpus) -> SwitchStats:
    """
    Language switches between adjacent words, never across utterances
    """
    per_utterance = OrderedDict((utterance.id, count_switches(utterance.tags)) for utterance in corpus)
    return SwitchStats(sum(per_utterance.values()), per_utterance)


@dataclass(frozen=True)
class MonolingualSegment:
    utterance_id: str
    tag: str
    start_ms: int
    end_ms: int
    word_count: int

    @property
    def duration_ms(self) -> int:
        return self.end_ms - self.start_ms


def monolingual_segments(corpus: Corpus) -> List[MonolingualSegment]:
    """
    Maximal same tag word runs, silence between words of a run is part of its duration
    """
    segments = []
    for utterance in corpus:
        run = []
        for word in utterance.words:
            if run and word.tag != run[0].tag:
                segments.append(MonolingualSegment(utterance.id, run[0].tag, run[0].start_ms, run[-1].end_ms, len(run)))
                run = []
            run.append(word)
        if run:
            segments.append(MonolingualSegment(utterance.id, run[0].tag, run[0].start_ms, run[-1].end_ms, len(run)))
    return segments


def check_histogram_edges(edges: Sequence[float]) -> Tuple[float, ...]:
    """
    Edges in seconds, strictly increasing from 0, an infinite last edge is appended when missing
    """
    edges = tuple(float(edge) for edge in edges)
    if not edges:
        raise ValueError("Histogram needs at least one bin, got edges {}".format(edges))
    if edges[0] != 0:
        raise ValueError("Histogram edges must start at 0, got {}".format(edges[0]))
    for previous, current in zip(edges, edges[1:]):
        if current <= previous:
            raise ValueError("Histogram edges must be strictly increasing, got {} after {}".format(current, previous))
    if math.isfinite(edges[-1]):
        edges += (math.inf,)
    return edges


def _format_edge(edge: float) -> str:
    return "inf" if math.isinf(edge) else "{:g}".format(edge)


@dataclass(frozen=True)
class DurationHistogram:
    edges: Tuple[float, ...]
    counts: Tuple[int, ...]

    @property
    def total(self) -> int:
        return sum(self.counts)

    @property
    def bin_labels(self) -> List[str]:
        return ["[{},{})".format(_format_edge(low), _format_edge(high)) for low, high in zip(self.edges, self.edges[1:])]

    def count_below(self, seconds: float) -> int:
        """
        Segments in bins whose upper edge is at most seconds
        """
        return sum(count for high, count in zip(self.edges[1:], self.counts) if high <= seconds)


def duration_histogram(
    corpus: Corpus, edges: Optional[Sequence[float]] = None, tag: Optional[str] = None
) -> DurationHistogram:
    """
    Histogram of monolingual segment durations over half open [low, high) bins in seconds
    tag restricts the histogram to segments of one language
    """
    edges = check_histogram_edges(DEFAULT_HISTOGRAM_EDGES if edges is None else edges)
    edges_ms = [edge * 1000 for edge in edges]
    counts = [0] * (len(edges) - 1)
    for segment in monolingual_segments(corpus):
        if tag is not None and segment.tag != tag:
            continue
        counts[bisect_right(edges_ms, segment.duration_ms) - 1] += 1
    return DurationHistogram(edges, tuple(counts))


@dataclass(frozen=True)
class ConfusionEntry:
    ref_token: Token
    hyp_token: Token
    count: int


@dataclass(frozen=True)
class ConfusionTable:
    entries: Tuple[ConfusionEntry, ...]

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def total(self) -> int:
        return sum(entry.count for entry in self.entries)

    def render(self) -> str:
        return render_confusions(self)


def confusions(
    alignments: Iterable[Sequence[AlignmentOp]], top_k: Optional[int] = None, tag_only: bool = False
) -> ConfusionTable:
    """
    Substitution pairs of with-tags alignments, most frequent first
    Ties are sorted on (ref word, ref tag, hyp word, hyp tag)
    tag_only keeps confusions where only the language tag differs
    """
    if top_k is not None and top_k < 0:
        raise ValueError("top_k must be non negative, got {}".format(top_k))
    counter = Counter()
    for operations in alignments:
        for operation in operations:
            if operation.kind != OpKind.SUBSTITUTION or operation.ref_token == operation.hyp_token:
                continue
            if tag_only and _word(operation.ref_token) != _word(operation.hyp_token):
                continue
            counter[(operation.ref_token, operation.hyp_token)] += 1
    ranked = sorted(counter.items(), key=lambda item: (-item[1], tuple(item[0][0]) + tuple(item[0][1])))
    if top_k is not None:
        ranked = ranked[:top_k]
    return ConfusionTable(tuple(ConfusionEntry(ref, hyp, count) for (ref, hyp), count in ranked))


def render_confusions(table: ConfusionTable) -> str:
    """
    Ref. word | Hyp. word | Count
    en-nl  en-fy  26
    """
    lines = [CONFUSION_HEADER]
    for entry in table.entries:
        lines.append(
            "{}-{}  {}-{}  {}".format(entry.ref_token[0], entry.ref_token[1], entry.hyp_token[0], entry.hyp_token[1], entry.count)
        )
    return "\n".join(lines)


def write_wer_tsv(path: str, reports: Dict[str, Sequence[WerReport]]) -> None:
    """
    reports maps a system name to its WER reports (one per mode)
    """
    rows = []
    for system, system_reports in reports.items():
        for report in system_reports:
            for class_name, counts in report.rows():
                rows.append(
                    {
                        "system": system,
                        "class": class_name,
                        "mode": report.mode,
                        "substitutions": counts.substitutions,
                        "deletions": counts.deletions,
                        "insertions": counts.insertions,
                        "reference_words": counts.reference_count,
                        "wer": "{:.2f}".format(counts.wer * 100),
                    }
                )
    csv_dict_writer(
        path,
        rows,
        ["system", "class", "mode", "substitutions", "deletions", "insertions", "reference_words", "wer"],
        delimiter="\t",
    )


def write_switches_tsv(path: str, stats: Dict[str, SwitchStats]) -> None:
    rows = [
        {"system": system, "utterances": system_stats.utterance_count, "switches": system_stats.total}
        for system, system_stats in stats.items()
    ]
    csv_dict_writer(path, rows, ["system", "utterances", "switches"], delimiter="\t")


def write_durations_tsv(path: str, histograms: Dict[str, DurationHistogram]) -> None:
    rows = [
        {"system": system, "bin": label, "count": count}
        for system, histogram in histograms.items()
        for label, count in zip(histogram.bin_labels, histogram.counts)
    ]
    csv_dict_writer(path, rows, ["system", "bin", "count"], delimiter="\t")


def write_confusions_tsv(path: str, tables: Dict[str, ConfusionTable]) -> None:
    rows = [
        {
            "system": system,
            "ref_word": entry.ref_token[0],
            "ref_tag": entry.ref_token[1],
            "hyp_word": entry.hyp_token[0],
            "hyp_tag": entry.hyp_token[1],
            "count": entry.count,
        }
        for system, table in tables.items()
        for entry in table.entries
    ]
    csv_dict_writer(path, rows, ["system", "ref_word", "ref_tag", "hyp_word", "hyp_tag", "count"], delimiter="\t")


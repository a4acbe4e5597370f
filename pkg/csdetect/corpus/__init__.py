#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Data model for time aligned, language tagged transcripts

A CTM like file has one word per line:
    utterance_id channel start_seconds duration_seconds word tag
eg
    u1 1 0.00 0.50 oer fy

Non speech is never a token, it is the time gap between two words.
Times are stored as integer milliseconds (round half up) so a 10 ms frame grid divides them evenly.

Plain text corpora for LM training have one sentence per line, tokens optionally suffixed with |tag, eg wêze|fy

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.corpus"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Time aligned language tagged transcripts: parsing, validation, serialization"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
import re
from collections import OrderedDict
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, InvalidOperation
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from csdetect.file_utils import read_lines, write_lines

logger = logging.getLogger(__intname__)

TAG_RE = re.compile(r"^[a-z]{2,8}$")
TAG_SEPARATOR = "|"
CTM_COMMENT = ";;"
CTM_COLUMNS = 6
# ";; tag_pair fy nl" keeps the language pair of files holding a single language
TAG_PAIR_HEADER = "tag_pair"
DEFAULT_CHANNEL = "1"


class CorpusFormatError(ValueError):
    """
    Malformed record in a CTM or text corpus, with 1-based line and column (field index)
    """

    def __init__(self, message: str, source: str = "<stream>", line: int = 0, column: int = 0):
        self.message = message
        self.source = source
        self.line = line
        self.column = column
        super().__init__("{}:{}:{}: {}".format(source, line, column, message))


class CorpusValidationError(ValueError):
    """
    Invariant violation (overlapping words, unknown tag, duplicate utterance id...)
    """

    def __init__(self, message: str, utterance_id: Optional[str] = None, line: Optional[int] = None):
        self.utterance_id = utterance_id
        self.line = line
        prefix = ""
        if utterance_id is not None:
            prefix += 'utterance "{}": '.format(utterance_id)
        if line is not None:
            prefix += "line {}: ".format(line)
        super().__init__(prefix + message)


def check_language_tag(code: str) -> str:
    """
    A language tag is 2 to 8 ASCII lowercase letters, eg fy, nl
    """
    if not isinstance(code, str) or not TAG_RE.match(code):
        raise ValueError('Invalid language tag "{}"'.format(code))
    return code


def check_tag_pair(tag_pair: Sequence[str]) -> Tuple[str, str]:
    tag_pair = tuple(tag_pair)
    if len(tag_pair) != 2:
        raise ValueError("A tag pair needs exactly two language tags, got {}".format(tag_pair))
    for tag in tag_pair:
        check_language_tag(tag)
    if tag_pair[0] == tag_pair[1]:
        raise ValueError("Tag pair languages must differ, got {}".format(tag_pair))
    return tag_pair


def seconds_to_ms(value: str) -> int:
    """
    Decimal seconds string to integer milliseconds, round half up
    """
    try:
        seconds = Decimal(value)
    except InvalidOperation:
        raise ValueError('"{}" is not a decimal number'.format(value))
    if not seconds.is_finite():
        raise ValueError('"{}" is not a finite number'.format(value))
    return int((seconds * 1000).quantize(Decimal(1), rounding=ROUND_HALF_UP))


def ms_to_seconds_str(value_ms: int) -> str:
    """
    Canonical time format: 2 decimals, 3 when the value is not a whole centisecond
    """
    seconds, millis = divmod(value_ms, 1000)
    if millis % 10 == 0:
        return "{}.{:02d}".format(seconds, millis // 10)
    return "{}.{:03d}".format(seconds, millis)


@dataclass(frozen=True)
class TimedWord:
    surface: str
    start_ms: int
    duration_ms: int
    tag: str

    def __post_init__(self):
        if not self.surface or any(char.isspace() for char in self.surface):
            raise ValueError('Word surface "{}" must be non empty without whitespace'.format(self.surface))
        if self.start_ms < 0:
            raise ValueError("Word start must be non negative, got {} ms".format(self.start_ms))
        if self.duration_ms <= 0:
            raise ValueError("Word duration must be strictly positive, got {} ms".format(self.duration_ms))
        check_language_tag(self.tag)

    @property
    def end_ms(self) -> int:
        return self.start_ms + self.duration_ms

    @property
    def start(self) -> Decimal:
        return Decimal(self.start_ms) / 1000

    @property
    def duration(self) -> Decimal:
        return Decimal(self.duration_ms) / 1000

    def with_tag(self, tag: str) -> "TimedWord":
        return TimedWord(self.surface, self.start_ms, self.duration_ms, tag)


class UtteranceClass(Enum):
    MONO_FIRST = "mono-first"
    MONO_SECOND = "mono-second"
    MIXED = "mixed"


@dataclass(frozen=True)
class Utterance:
    id: str
    words: Tuple[TimedWord, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))
        if not self.id or any(char.isspace() for char in self.id):
            raise CorpusValidationError("utterance id must be non empty without whitespace", self.id)
        for previous, current in zip(self.words, self.words[1:]):
            if current.start_ms < previous.start_ms:
                raise CorpusValidationError(
                    'words are not sorted by start time ("{}" before "{}")'.format(
                        previous.surface, current.surface
                    ),
                    self.id,
                )
            if previous.end_ms > current.start_ms:
                raise CorpusValidationError(
                    'word "{}" [{}, {}) overlaps word "{}" [{}, {})'.format(
                        previous.surface,
                        ms_to_seconds_str(previous.start_ms),
                        ms_to_seconds_str(previous.end_ms),
                        current.surface,
                        ms_to_seconds_str(current.start_ms),
                        ms_to_seconds_str(current.end_ms),
                    ),
                    self.id,
                )

    def __len__(self) -> int:
        return len(self.words)

    @property
    def end_ms(self) -> int:
        return self.words[-1].end_ms if self.words else 0

    @property
    def surfaces(self) -> List[str]:
        return [word.surface for word in self.words]

    @property
    def tags(self) -> List[str]:
        return [word.tag for word in self.words]

    def tagged_tokens(self) -> List[str]:
        return [join_tagged_token(word.surface, word.tag) for word in self.words]


@dataclass(frozen=True)
class Corpus:
    utterances: Tuple[Utterance, ...]
    tag_pair: Tuple[str, str]

    def __post_init__(self):
        object.__setattr__(self, "utterances", tuple(self.utterances))
        try:
            object.__setattr__(self, "tag_pair", check_tag_pair(self.tag_pair))
        except ValueError as exc:
            raise CorpusValidationError(str(exc))
        seen = set()
        for utterance in self.utterances:
            if utterance.id in seen:
                raise CorpusValidationError("duplicate utterance id", utterance.id)
            seen.add(utterance.id)
            for word in utterance.words:
                if word.tag not in self.tag_pair:
                    raise CorpusValidationError(
                        'word "{}" has tag "{}" outside tag pair {}'.format(
                            word.surface, word.tag, self.tag_pair
                        ),
                        utterance.id,
                    )
        object.__setattr__(
            self, "_index", {utterance.id: utterance for utterance in self.utterances}
        )

    def __len__(self) -> int:
        return len(self.utterances)

    def __iter__(self):
        return iter(self.utterances)

    def get(self, utterance_id: str) -> Utterance:
        try:
            return self._index[utterance_id]
        except KeyError:
            raise KeyError('Unknown utterance id "{}"'.format(utterance_id))

    @property
    def ids(self) -> List[str]:
        return [utterance.id for utterance in self.utterances]

    @property
    def first(self) -> str:
        return self.tag_pair[0]

    @property
    def second(self) -> str:
        return self.tag_pair[1]

    @property
    def token_count(self) -> int:
        return sum(len(utterance) for utterance in self.utterances)


def with_tags(utterance: Utterance, tags: Sequence[str]) -> Utterance:
    """
    Same words and timings, new language tags
    """
    if len(tags) != len(utterance.words):
        raise ValueError(
            'Utterance "{}" has {} words but {} tags were given'.format(
                utterance.id, len(utterance.words), len(tags)
            )
        )
    return Utterance(utterance.id, tuple(word.with_tag(tag) for word, tag in zip(utterance.words, tags)))


def _tag_pair_header(line: str, source: str, line_number: int) -> Optional[Tuple[str, str]]:
    fields = line[len(CTM_COMMENT):].split()
    if not fields or fields[0] != TAG_PAIR_HEADER:
        return None
    try:
        return check_tag_pair(fields[1:])
    except ValueError as exc:
        raise CorpusFormatError("bad tag pair header: {}".format(exc), source, line_number, 1)


def parse_ctm(
    lines: Iterable[str],
    tag_pair: Optional[Sequence[str]] = None,
    source: str = "<stream>",
) -> Corpus:
    """
    Parses CTM lines into a validated Corpus

    Words are grouped by utterance id (first appearance order) and sorted by start time.
    When tag_pair is not given it comes from a ";; tag_pair <first> <second>" header line, else it is
    inferred from tag first appearance order, which needs both tags to be present.

    :raises CorpusFormatError: malformed line, unknown tag, duplicate (utterance, start, word) record
    :raises CorpusValidationError: overlapping words, tag pair cannot be inferred
    """
    if tag_pair is not None:
        try:
            tag_pair = check_tag_pair(tag_pair)
        except ValueError as exc:
            raise CorpusValidationError(str(exc))

    records = OrderedDict()  # type: Dict[str, List[Tuple[TimedWord, int]]]
    seen_records = {}
    seen_tags = []  # type: List[str]

    for line_number, raw_line in enumerate(lines, 1):
        line = raw_line.strip()
        if not line:
            continue
        if line.startswith(CTM_COMMENT):
            header_pair = _tag_pair_header(line, source, line_number)
            if header_pair is not None and tag_pair is None:
                for tag in seen_tags:
                    if tag not in header_pair:
                        raise CorpusFormatError(
                            'tag "{}" seen before is not part of header pair {}'.format(tag, header_pair),
                            source,
                            line_number,
                            1,
                        )
                tag_pair = header_pair
            continue
        fields = line.split()
        if len(fields) != CTM_COLUMNS:
            raise CorpusFormatError(
                "expected {} columns, got {}".format(CTM_COLUMNS, len(fields)),
                source,
                line_number,
                min(len(fields), CTM_COLUMNS) + 1,
            )
        utterance_id, _channel, start_text, duration_text, surface, tag = fields
        try:
            start_ms = seconds_to_ms(start_text)
        except ValueError as exc:
            raise CorpusFormatError("bad start time: {}".format(exc), source, line_number, 3)
        if start_ms < 0:
            raise CorpusFormatError("start time must be non negative", source, line_number, 3)
        try:
            duration_ms = seconds_to_ms(duration_text)
        except ValueError as exc:
            raise CorpusFormatError("bad duration: {}".format(exc), source, line_number, 4)
        if duration_ms <= 0:
            raise CorpusFormatError(
                "duration must be strictly positive at millisecond precision", source, line_number, 4
            )
        if not TAG_RE.match(tag):
            raise CorpusFormatError('invalid language tag "{}"'.format(tag), source, line_number, 6)
        if tag_pair is not None and tag not in tag_pair:
            raise CorpusFormatError(
                'unknown language tag "{}", expected one of {}'.format(tag, tag_pair),
                source,
                line_number,
                6,
            )
        if tag not in seen_tags:
            seen_tags.append(tag)
            if tag_pair is None and len(seen_tags) > 2:
                raise CorpusFormatError(
                    'third language tag "{}" found, a corpus holds exactly two'.format(tag),
                    source,
                    line_number,
                    6,
                )
        key = (utterance_id, start_ms, surface)
        if key in seen_records:
            raise CorpusFormatError(
                'duplicate record for word "{}" at {} in utterance "{}" (first seen line {})'.format(
                    surface, ms_to_seconds_str(start_ms), utterance_id, seen_records[key]
                ),
                source,
                line_number,
                1,
            )
        seen_records[key] = line_number
        records.setdefault(utterance_id, []).append(
            (TimedWord(surface, start_ms, duration_ms, tag), line_number)
        )

    if tag_pair is None:
        if len(seen_tags) != 2:
            raise CorpusValidationError(
                "cannot infer the language pair from {} tag(s) {}, pass tag_pair explicitly".format(
                    len(seen_tags), seen_tags
                )
            )
        tag_pair = tuple(seen_tags)

    utterances = []
    for utterance_id, words in records.items():
        words.sort(key=lambda item: item[0].start_ms)
        for (previous, _), (current, current_line) in zip(words, words[1:]):
            if previous.end_ms > current.start_ms:
                raise CorpusValidationError(
                    'word "{}" overlaps previous word "{}"'.format(current.surface, previous.surface),
                    utterance_id,
                    current_line,
                )
        utterances.append(Utterance(utterance_id, tuple(word for word, _ in words)))

    corpus = Corpus(tuple(utterances), tag_pair)
    logger.debug(
        "Parsed %s utterances, %s words from %s", len(corpus), corpus.token_count, source
    )
    return corpus


def serialize_ctm(corpus: Corpus) -> List[str]:
    """
    Canonical CTM lines, channel written as 1, after a tag pair header line
    """
    lines = ["{} {} {}".format(CTM_COMMENT, TAG_PAIR_HEADER, " ".join(corpus.tag_pair))]
    for utterance in corpus:
        for word in utterance.words:
            lines.append(
                " ".join(
                    (
                        utterance.id,
                        DEFAULT_CHANNEL,
                        ms_to_seconds_str(word.start_ms),
                        ms_to_seconds_str(word.duration_ms),
                        word.surface,
                        word.tag,
                    )
                )
            )
    return lines


def read_ctm(path: str, tag_pair: Optional[Sequence[str]] = None) -> Corpus:
    return parse_ctm(read_lines(path), tag_pair=tag_pair, source=path)


def write_ctm(path: str, corpus: Corpus) -> None:
    write_lines(path, serialize_ctm(corpus))


def classify_utterance(utterance: Utterance, tag_pair: Sequence[str]) -> UtteranceClass:
    """
    mono-first / mono-second when every word carries the same tag of the pair, mixed otherwise
    """
    if not utterance.words:
        raise ValueError('Cannot classify empty utterance "{}"'.format(utterance.id))
    tags = set(utterance.tags)
    if tags == {tag_pair[0]}:
        return UtteranceClass.MONO_FIRST
    if tags == {tag_pair[1]}:
        return UtteranceClass.MONO_SECOND
    return UtteranceClass.MIXED


class WordCounts:
    """
    Token counts partitioned by language tag and utterance class
    """

    def __init__(self, tag_pair: Sequence[str]):
        self.tag_pair = tuple(tag_pair)
        self.counts = {
            utterance_class: {tag: 0 for tag in self.tag_pair} for utterance_class in UtteranceClass
        }  # type: Dict[UtteranceClass, Dict[str, int]]
        self.utterances = {utterance_class: 0 for utterance_class in UtteranceClass}

    def get(self, tag: str, utterance_class: Optional[UtteranceClass] = None) -> int:
        if utterance_class is None:
            return self.totals()[tag]
        return self.counts[utterance_class][tag]

    def totals(self) -> Dict[str, int]:
        return {
            tag: sum(self.counts[utterance_class][tag] for utterance_class in UtteranceClass)
            for tag in self.tag_pair
        }

    @property
    def total(self) -> int:
        return sum(self.totals().values())

    def class_counts(self) -> Dict[str, int]:
        """
        Number of utterances per class, eg {"mixed": 1}, only non empty classes
        """
        return {
            utterance_class.value: count
            for utterance_class, count in self.utterances.items()
            if count
        }


def word_counts(corpus: Corpus) -> WordCounts:
    counts = WordCounts(corpus.tag_pair)
    for utterance in corpus:
        if not utterance.words:
            continue
        utterance_class = classify_utterance(utterance, corpus.tag_pair)
        counts.utterances[utterance_class] += 1
        for word in utterance.words:
            counts.counts[utterance_class][word.tag] += 1
    return counts


def render_word_counts(counts: WordCounts) -> str:
    """
    One row per language: words in mono-first, mono-second, mixed utterances and all
    """
    first, second = counts.tag_pair
    header = ["# of words", first, second, "{}-{}".format(first, second), "all"]
    rows = [header]
    totals = counts.totals()
    for tag in counts.tag_pair:
        rows.append(
            [
                tag,
                str(counts.get(tag, UtteranceClass.MONO_FIRST)),
                str(counts.get(tag, UtteranceClass.MONO_SECOND)),
                str(counts.get(tag, UtteranceClass.MIXED)),
                str(totals[tag]),
            ]
        )
    widths = [max(len(row[index]) for row in rows) for index in range(len(header))]
    return "\n".join(
        " | ".join(cell.rjust(width) for cell, width in zip(row, widths)) for row in rows
    ) + "\n"


def split_tagged_token(token: str) -> Tuple[str, Optional[str]]:
    """
    "wêze|fy" -> ("wêze", "fy"), "wêze" -> ("wêze", None)
    """
    word, separator, tag = token.rpartition(TAG_SEPARATOR)
    if separator and word and TAG_RE.match(tag):
        return word, tag
    return token, None


def join_tagged_token(word: str, tag: Optional[str]) -> str:
    if tag is None:
        return word
    return "{}{}{}".format(word, TAG_SEPARATOR, tag)


def read_text_corpus(
    lines: Iterable[str], mode: str = "untagged", source: str = "<stream>"
) -> List[List[str]]:
    """
    Reads one sentence per line, tokens separated by whitespace, blank lines skipped

    :param mode: "tagged": every token must carry |tag, tokens are kept as is
                 "untagged": tokens kept as is, tags optional
                 "strip": tags removed, plain words returned
    """
    if mode not in ("tagged", "untagged", "strip"):
        raise ValueError('Unknown text corpus mode "{}"'.format(mode))
    sentences = []
    for line_number, line in enumerate(lines, 1):
        tokens = line.split()
        if not tokens:
            continue
        if mode == "untagged":
            sentences.append(tokens)
            continue
        sentence = []
        for column, token in enumerate(tokens, 1):
            word, tag = split_tagged_token(token)
            if mode == "tagged" and tag is None:
                raise CorpusFormatError(
                    'token "{}" has no |tag suffix in tagged corpus mode'.format(token),
                    source,
                    line_number,
                    column,
                )
            sentence.append(token if mode == "tagged" else word)
        sentences.append(sentence)
    return sentences


def read_text_corpus_file(path: str, mode: str = "untagged") -> List[List[str]]:
    return read_text_corpus(read_lines(path), mode=mode, source=path)


def write_text_corpus(path: str, sentences: Iterable[Sequence[str]]) -> None:
    write_lines(path, [" ".join(sentence) for sentence in sentences])


def corpus_sentences(corpus: Corpus, tagged: bool = False) -> List[List[str]]:
    """
    Utterances as token lists, optionally word|tag tokens
    """
    if tagged:
        return [utterance.tagged_tokens() for utterance in corpus]
    return [utterance.surfaces for utterance in corpus]

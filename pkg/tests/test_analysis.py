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

__intname__ = "tests.csdetect.analysis"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__licence__ = "BSD 3 Clause"
__build__ = "2026101701"

import itertools
import math
import os
import random
from collections import Counter

from hypothesis import given, settings
from hypothesis import strategies as st

from csdetect.analysis import *
from csdetect.corpus import Corpus, TimedWord, Utterance, UtteranceClass, read_ctm
from csdetect.csv import csv_dict_reader

TAG_PAIR = ("fy", "nl")
FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


def fixture(name):
    return read_ctm(os.path.join(FIXTURES, name), TAG_PAIR)


def oracle_distance(ref, hyp):
    """
    Minimum over every alignment, enumerated without memoization
    """
    if not ref:
        return len(hyp)
    if not hyp:
        return len(ref)
    return min(
        oracle_distance(ref[1:], hyp[1:]) + (0 if ref[0] == hyp[0] else 1),
        oracle_distance(ref[1:], hyp) + 1,
        oracle_distance(ref, hyp[1:]) + 1,
    )


def check_alignment(ref, hyp, operations):
    assert [op.ref_token for op in operations if op.kind != OpKind.INSERTION] == list(ref), "alignment loses ref tokens"
    assert [op.hyp_token for op in operations if op.kind != OpKind.DELETION] == list(hyp), "alignment loses hyp tokens"
    for op in operations:
        if op.kind == OpKind.MATCH:
            assert op.ref_token == op.hyp_token
        if op.kind == OpKind.SUBSTITUTION:
            assert op.ref_token != op.hyp_token


def make_utterance(utterance_id, tokens, durations=None):
    words = []
    position = 0
    for index, (surface, tag) in enumerate(tokens):
        duration = durations[index] if durations else 300
        words.append(TimedWord(surface, position, duration, tag))
        position += duration
    return Utterance(utterance_id, tuple(words))


def random_tagged_corpus(rng, size=5):
    utterances = []
    for index in range(size):
        length = rng.randint(1, 8)
        tokens = [(rng.choice("abcd"), rng.choice(TAG_PAIR)) for _ in range(length)]
        utterances.append(make_utterance("u{}".format(index), tokens))
    return Corpus(tuple(utterances), TAG_PAIR)


def perturb(rng, corpus):
    utterances = []
    for utterance in corpus:
        tokens = []
        for word in utterance.words:
            roll = rng.random()
            if roll < 0.1:
                continue
            surface = rng.choice("abcd") if roll < 0.2 else word.surface
            tag = rng.choice(TAG_PAIR) if roll < 0.5 else word.tag
            tokens.append((surface, tag))
            if rng.random() < 0.05:
                tokens.append((rng.choice("abcd"), rng.choice(TAG_PAIR)))
        utterances.append(make_utterance(utterance.id, tokens))
    return Corpus(tuple(utterances), TAG_PAIR)


def test_align_examples():
    operations = align(list("abc"), list("abc"))
    assert all(op.kind == OpKind.MATCH for op in operations) and edit_distance(operations) == 0

    operations = align(["a", "b", "c"], ["a", "x", "c", "d"])
    kinds = Counter(op.kind for op in operations)
    assert kinds[OpKind.SUBSTITUTION] == 1 and kinds[OpKind.INSERTION] == 1
    assert edit_distance(operations) == 2

    assert align([("en", "nl")], [("en", "fy")], WITH_TAGS)[0].kind == OpKind.SUBSTITUTION
    assert align([("en", "nl")], [("en", "fy")], WORDS_ONLY)[0].kind == OpKind.MATCH

    assert align([], []) == []
    assert [op.kind for op in align(["a"], [])] == [OpKind.DELETION]

    try:
        align(["a"], ["a"], mode="lemmas")
    except ValueError:
        pass
    else:
        assert False, "Unknown mode should raise ValueError"
    try:
        AlignmentOp(OpKind.MATCH, "a")
    except ValueError:
        pass
    else:
        assert False, "A match needs both tokens"


def test_align_matches_exhaustive_search_on_short_strings():
    strings = [candidate for length in range(4) for candidate in itertools.product("abc", repeat=length)]
    for ref, hyp in itertools.product(strings, repeat=2):
        operations = align(ref, hyp)
        check_alignment(ref, hyp, operations)
        assert edit_distance(operations) == oracle_distance(ref, hyp), "{} vs {}".format(ref, hyp)


@settings(max_examples=300, deadline=None)
@given(
    ref=st.lists(st.sampled_from("abc"), max_size=6),
    hyp=st.lists(st.sampled_from("abc"), max_size=6),
)
def test_align_matches_exhaustive_search(ref, hyp):
    operations = align(ref, hyp)
    check_alignment(ref, hyp, operations)
    assert edit_distance(operations) == oracle_distance(tuple(ref), tuple(hyp))


def test_wer_fixture():
    reference = fixture("wer_fixture_ref.ctm")
    hypothesis = fixture("wer_fixture_hyp.ctm")
    assert reference.token_count == 20

    score = score_corpora(reference, hypothesis)
    assert score.words_only.wer == 0.0
    assert abs(score.with_tags.wer - 0.05) < 1e-12, "one tag confusion over 20 words expected"
    assert score.with_tags.per_class[UtteranceClass.MIXED] == ErrorCounts(1, 0, 0, 7)
    assert score.with_tags.per_class[UtteranceClass.MONO_FIRST] == ErrorCounts(0, 0, 0, 7)
    assert tag_confusion_mass(score) == 1
    assert confusions(score.alignments.values(), tag_only=True).total == 1
    assert wer(reference, hypothesis, WORDS_ONLY).wer == 0.0
    assert score.report(WITH_TAGS) is score.with_tags

    assert wer(reference, reference).wer == 0.0 and wer(reference, reference, WORDS_ONLY).wer == 0.0


def test_wer_mode_ordering_on_random_corpora():
    rng = random.Random(5)
    for _ in range(100):
        reference = random_tagged_corpus(rng)
        hypothesis = perturb(rng, reference)
        score = score_corpora(reference, hypothesis)
        assert score.with_tags.wer >= score.words_only.wer, "tags mode can only add errors"
        substitutions = sum(1 for ops in score.alignments.values() for op in ops if op.kind == OpKind.SUBSTITUTION)
        assert confusions(score.alignments.values()).total == substitutions


def test_wer_errors():
    reference = fixture("wer_fixture_ref.ctm")
    partial = Corpus(reference.utterances[:2], TAG_PAIR)
    try:
        score_corpora(reference, partial)
    except ValueError as exc:
        print(exc)
    else:
        assert False, "Mismatching utterance ids should raise ValueError"

    assert ErrorCounts().wer == 0.0
    assert ErrorCounts(insertions=2).wer == math.inf
    assert (ErrorCounts(1, 0, 0, 4) + ErrorCounts(0, 1, 1, 6)) == ErrorCounts(1, 1, 1, 10)


def test_switches():
    assert count_switches(["fy", "fy", "nl", "fy"]) == 2
    assert count_switches(["nl", "nl"]) == 0
    assert count_switches([]) == 0

    stats = switch_stats(fixture("wer_fixture_ref.ctm"))
    assert stats.per_utterance == {"u1": 0, "u2": 0, "u3": 3}
    assert stats.total == 3 and stats.utterance_count == 3


def test_segments_and_histogram():
    corpus = Corpus((make_utterance("u1", [("oer", "fy")], [500]),), TAG_PAIR)
    histogram = duration_histogram(corpus)
    assert histogram.counts[0] == 1 and histogram.total == 1
    assert histogram.bin_labels[0] == "[0,1)" and histogram.bin_labels[-1] == "[30,inf)"

    corpus = Corpus(
        (make_utterance("u1", [("a", "fy"), ("b", "fy"), ("c", "nl")], [1000, 1000, 2000]),), TAG_PAIR
    )
    segments = monolingual_segments(corpus)
    assert [(segment.tag, segment.duration_ms, segment.word_count) for segment in segments] == [("fy", 2000, 2), ("nl", 2000, 1)]
    histogram = duration_histogram(corpus)
    assert histogram.counts[2] == 2, "both 2 s segments belong to [2,3)"
    assert histogram.count_below(2) == 0
    assert duration_histogram(corpus, tag="nl").total == 1
    assert duration_histogram(corpus, edges=[0, 2.5]).counts == (2, 0)


def test_histogram_edges():
    assert check_histogram_edges([0, 1, 2]) == (0.0, 1.0, 2.0, math.inf)
    assert check_histogram_edges([0, math.inf]) == (0.0, math.inf)
    for edges in ([], [1, 2], [0, 2, 2], [0, 3, 1]):
        try:
            check_histogram_edges(edges)
        except ValueError:
            pass
        else:
            assert False, "edges {} should raise ValueError".format(edges)


def test_segment_identity_on_random_corpora():
    rng = random.Random(17)
    for _ in range(1000):
        corpus = random_tagged_corpus(rng, size=rng.randint(1, 4))
        segments = monolingual_segments(corpus)
        assert len(segments) == switch_stats(corpus).total + len(corpus), "segments = switches + utterances"
        assert sum(segment.word_count for segment in segments) == corpus.token_count


def test_confusions_fixture():
    score = score_corpora(fixture("confusions_ref.ctm"), fixture("confusions_hyp.ctm"))
    table = confusions(score.alignments.values())
    ranked = [(entry.ref_token, entry.hyp_token, entry.count) for entry in table.entries]
    assert ranked == [
        (("en", "nl"), ("en", "fy"), 3),
        (("de", "fy"), ("de", "nl"), 2),
        (("het", "nl"), ("it", "fy"), 1),
    ], "Bogus ranking {}".format(ranked)
    assert len(confusions(score.alignments.values(), tag_only=True)) == 2
    assert len(confusions(score.alignments.values(), top_k=1)) == 1
    print(table.render())
    assert table.render().splitlines()[1] == "en-nl  en-fy  3"

    identical = score_corpora(fixture("confusions_ref.ctm"), fixture("confusions_ref.ctm"))
    assert len(confusions(identical.alignments.values())) == 0

    try:
        confusions([], top_k=-1)
    except ValueError:
        pass
    else:
        assert False, "Negative top_k should raise ValueError"


def test_confusion_rendering():
    table = ConfusionTable((ConfusionEntry(("en", "nl"), ("en", "fy"), 26),))
    assert render_confusions(table) == "Ref. word | Hyp. word | Count\nen-nl  en-fy  26"


def test_tsv_writers(tmp_path):
    reference = fixture("confusions_ref.ctm")
    hypothesis = fixture("confusions_hyp.ctm")
    score = score_corpora(reference, hypothesis)
    directory = str(tmp_path)

    write_wer_tsv(os.path.join(directory, "wer.tsv"), {"asr": [score.with_tags, score.words_only]})
    rows = list(csv_dict_reader(os.path.join(directory, "wer.tsv"), delimiter="\t"))
    assert len(rows) == 2 * (len(UtteranceClass) + 1)
    overall = [row for row in rows if row["class"] == ALL_CLASSES and row["mode"] == WITH_TAGS][0]
    assert overall["reference_words"] == "11" and overall["substitutions"] == "6"

    write_switches_tsv(os.path.join(directory, "switches.tsv"), {"reference": switch_stats(reference), "asr": switch_stats(hypothesis)})
    rows = list(csv_dict_reader(os.path.join(directory, "switches.tsv"), delimiter="\t"))
    assert [row["system"] for row in rows] == ["reference", "asr"]

    write_durations_tsv(os.path.join(directory, "durations.tsv"), {"reference": duration_histogram(reference)})
    rows = list(csv_dict_reader(os.path.join(directory, "durations.tsv"), delimiter="\t"))
    assert sum(int(row["count"]) for row in rows) == len(monolingual_segments(reference))

    write_confusions_tsv(os.path.join(directory, "confusions.tsv"), {"asr": confusions(score.alignments.values())})
    rows = list(csv_dict_reader(os.path.join(directory, "confusions.tsv"), delimiter="\t"))
    assert rows[0] == {"system": "asr", "ref_word": "en", "ref_tag": "nl", "hyp_word": "en", "hyp_tag": "fy", "count": "3"}

TAGGED_TOKENS = st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from(TAG_PAIR)), max_size=6)


def exchanged(operations):
    """
    The same alignment read from the hypothesis side
    """
    kinds = {OpKind.DELETION: OpKind.INSERTION, OpKind.INSERTION: OpKind.DELETION}
    return [AlignmentOp(kinds.get(op.kind, op.kind), op.hyp_token, op.ref_token) for op in operations]


@settings(max_examples=300, deadline=None)
@given(ref=TAGGED_TOKENS, hyp=TAGGED_TOKENS)
def test_edit_distance_is_symmetric(ref, hyp):
    for mode in MODES:
        forward = align(ref, hyp, mode)
        backward = align(hyp, ref, mode)
        assert edit_distance(forward) == edit_distance(backward), "{} distance differs between directions".format(mode)
        swapped = exchanged(forward)
        counts = ErrorCounts.from_alignment(forward)
        swapped_counts = ErrorCounts.from_alignment(swapped)
        assert (swapped_counts.deletions, swapped_counts.insertions) == (counts.insertions, counts.deletions)
        assert edit_distance(swapped) == edit_distance(backward)
        if mode == WITH_TAGS:
            check_alignment(hyp, ref, swapped)


@settings(max_examples=200, deadline=None)
@given(
    references=st.lists(
        st.lists(st.tuples(st.sampled_from("ab"), st.sampled_from(TAG_PAIR)), min_size=1, max_size=6),
        min_size=1,
        max_size=4,
    ),
    data=st.data(),
)
def test_wer_gap_is_tag_confusion_mass(references, data):
    hypotheses = [data.draw(TAGGED_TOKENS) for _ in references]
    reference = Corpus(tuple(make_utterance("u{}".format(index), tokens) for index, tokens in enumerate(references)), TAG_PAIR)
    hypothesis = Corpus(tuple(make_utterance("u{}".format(index), tokens) for index, tokens in enumerate(hypotheses)), TAG_PAIR)
    score = score_corpora(reference, hypothesis)
    mass = tag_confusion_mass(score)
    reference_count = score.with_tags.overall.reference_count
    assert reference_count == reference.token_count
    assert mass >= 0
    assert abs((score.with_tags.wer - score.words_only.wer) - mass / reference_count) < 1e-12
    assert confusions(score.alignments.values(), tag_only=True).total <= mass


def test_shifted_alignment_beats_tag_substitutions():
    reference = Corpus((make_utterance("u1", [("a", "fy"), ("a", "nl"), ("a", "fy")]),), TAG_PAIR)
    hypothesis = Corpus((make_utterance("u1", [("a", "nl"), ("a", "fy"), ("a", "nl")]),), TAG_PAIR)
    score = score_corpora(reference, hypothesis)
    assert score.words_only.overall.errors == 0
    assert score.with_tags.overall == ErrorCounts(0, 1, 1, 3), "Bogus counts {}".format(score.with_tags.overall)
    assert tag_confusion_mass(score) == 2
    assert len(confusions(score.alignments.values(), tag_only=True)) == 0


if __name__ == "__main__":
    print("Example code for %s, %s" % (__intname__, __build__))
    import tempfile

    test_align_examples()
    test_align_matches_exhaustive_search_on_short_strings()
    test_align_matches_exhaustive_search()
    test_wer_fixture()
    test_wer_mode_ordering_on_random_corpora()
    test_wer_errors()
    test_switches()
    test_segments_and_histogram()
    test_histogram_edges()
    test_segment_identity_on_random_corpora()
    test_confusions_fixture()
    test_confusion_rendering()
    test_tsv_writers(tempfile.mkdtemp())
    test_edit_distance_is_symmetric()
    test_wer_gap_is_tag_confusion_mass()
    test_shifted_alignment_beats_tag_substitutions()

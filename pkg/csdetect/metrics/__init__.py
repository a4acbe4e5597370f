#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
Time based code-switching detection metric

Utterances are cut into frames (10 ms by default). A frame takes the tag of the word containing its
midpoint, or stays non speech. For a target language, a miss is a target speech frame not hypothesized
as target, a false alarm is an other-language speech frame hypothesized as target. Counts are pooled
over the corpus for every prior weight of a sweep, which gives a DET curve and its equal error rate.

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.metrics"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Frame based miss / false alarm rates, DET curves, EER and probit scaling"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from csdetect.corpus import Corpus, Utterance, check_tag_pair
from csdetect.csv import csv_dict_reader, csv_dict_writer
from csdetect.file_utils import atomic_write

logger = logging.getLogger(__intname__)

DEFAULT_FRAME_MS = 10
NON_SPEECH = 0
POOLED = "pooled"
PROBIT_CLAMP = 1e-6
DET_CSV_FIELDS = ["lambda", "fa", "miss", "fa_probit", "miss_probit"]
DET_TICKS = (0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.4)

# Rational approximation of the inverse normal CDF, refined by one Halley step
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425


def normal_cdf(value: float) -> float:
    return 0.5 * math.erfc(-value / math.sqrt(2.0))


def _probit_tail(p: float) -> float:
    q = math.sqrt(-2.0 * math.log(p))
    return (((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]) / (
        (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
    )


def probit(p: float) -> float:
    """
    Inverse standard normal CDF, p clamped to [1e-6, 1 - 1e-6]
    """
    p = min(max(float(p), PROBIT_CLAMP), 1.0 - PROBIT_CLAMP)
    if p < _P_LOW:
        value = _probit_tail(p)
    elif p <= 1.0 - _P_LOW:
        q = p - 0.5
        r = q * q
        value = (((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q / (
            ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        )
    else:
        value = -_probit_tail(1.0 - p)
    error = normal_cdf(value) - p
    step = error * math.sqrt(2.0 * math.pi) * math.exp(value * value / 2.0)
    return value - step / (1.0 + value * step / 2.0)


def _check_frame_ms(frame_ms: int) -> int:
    if isinstance(frame_ms, bool) or not isinstance(frame_ms, (int, np.integer)) or frame_ms <= 0:
        raise ValueError("Frame length must be a positive integer of milliseconds, got {}".format(frame_ms))
    return int(frame_ms)


def _ceil_div(numerator: int, denominator: int) -> int:
    return -((-numerator) // denominator)


@dataclass(frozen=True, eq=False)
class FrameLabelSequence:
    """
    labels holds 0 for non speech, 1 for the first tag, 2 for the second tag
    """

    frame_ms: int
    tag_pair: Tuple[str, str]
    labels: np.ndarray

    def __len__(self) -> int:
        return len(self.labels)

    def code(self, tag: Optional[str]) -> int:
        if tag is None:
            return NON_SPEECH
        try:
            return self.tag_pair.index(tag) + 1
        except ValueError:
            raise ValueError('Tag "{}" is not part of {}'.format(tag, self.tag_pair))

    def label(self, index: int) -> Optional[str]:
        code = int(self.labels[index])
        return self.tag_pair[code - 1] if code else None

    def frame_count(self, tag: Optional[str]) -> int:
        return int(np.count_nonzero(self.labels == self.code(tag)))

    def padded(self, length: int) -> np.ndarray:
        if length <= len(self.labels):
            return self.labels
        return np.concatenate([self.labels, np.zeros(length - len(self.labels), dtype=self.labels.dtype)])


def frame_labels(utterance: Utterance, tag_pair: Sequence[str], frame_ms: int = DEFAULT_FRAME_MS) -> FrameLabelSequence:
    """
    ceil(utterance end / frame_ms) frames, frame i tagged by the word whose [start, end) span holds
    the midpoint (i + 0.5) * frame_ms
    """
    frame_ms = _check_frame_ms(frame_ms)
    tag_pair = check_tag_pair(tag_pair)
    labels = np.zeros(_ceil_div(utterance.end_ms, frame_ms), dtype=np.int8)
    for word in utterance.words:
        # (i + 0.5) * f >= start  <=>  i >= (2 * start - f) / (2 * f)
        first_frame = max(_ceil_div(2 * word.start_ms - frame_ms, 2 * frame_ms), 0)
        end_frame = _ceil_div(2 * word.end_ms - frame_ms, 2 * frame_ms)
        if end_frame > first_frame:
            labels[first_frame:end_frame] = tag_pair.index(word.tag) + 1
    return FrameLabelSequence(frame_ms, tag_pair, labels)


@dataclass(frozen=True)
class DetectionCounts:
    target: str
    target_frames: int = 0
    misses: int = 0
    non_target_frames: int = 0
    false_alarms: int = 0

    @property
    def miss_rate(self) -> float:
        return self.misses / self.target_frames if self.target_frames else 0.0

    @property
    def fa_rate(self) -> float:
        return self.false_alarms / self.non_target_frames if self.non_target_frames else 0.0

    @property
    def degenerate(self) -> bool:
        """
        True when a rate was computed over zero frames
        """
        return not self.target_frames or not self.non_target_frames

    def merge(self, other: "DetectionCounts", target: Optional[str] = None) -> "DetectionCounts":
        return DetectionCounts(
            target or self.target,
            self.target_frames + other.target_frames,
            self.misses + other.misses,
            self.non_target_frames + other.non_target_frames,
            self.false_alarms + other.false_alarms,
        )

    def __add__(self, other: "DetectionCounts") -> "DetectionCounts":
        return self.merge(other, self.target if self.target == other.target else POOLED)


def _count(ref_labels: np.ndarray, hyp_labels: np.ndarray, target_code: int, target: str) -> DetectionCounts:
    other_code = 3 - target_code
    ref_target = ref_labels == target_code
    ref_other = ref_labels == other_code
    hyp_target = hyp_labels == target_code
    return DetectionCounts(
        target,
        int(np.count_nonzero(ref_target)),
        int(np.count_nonzero(ref_target & ~hyp_target)),
        int(np.count_nonzero(ref_other)),
        int(np.count_nonzero(ref_other & hyp_target)),
    )


def _checked_counts(ref: FrameLabelSequence, hyp: FrameLabelSequence, target: str) -> DetectionCounts:
    if ref.frame_ms != hyp.frame_ms:
        raise ValueError("Frame length mismatch: reference {} ms, hypothesis {} ms".format(ref.frame_ms, hyp.frame_ms))
    if ref.tag_pair != hyp.tag_pair:
        raise ValueError("Tag pair mismatch: reference {}, hypothesis {}".format(ref.tag_pair, hyp.tag_pair))
    length = max(len(ref), len(hyp))
    return _count(ref.padded(length), hyp.padded(length), ref.code(target), target)


def detection_rates(ref: FrameLabelSequence, hyp: FrameLabelSequence, target: str) -> DetectionCounts:
    """
    Miss and false alarm counts of hyp against ref for target, the shorter sequence is padded with non speech

    :raises ValueError: frame length or tag pair mismatch
    """
    counts = _checked_counts(ref, hyp, target)
    if counts.degenerate:
        logger.warning("Degenerate detection counts for %s, zero frame rate reported as 0: %s", target, counts)
    return counts


@dataclass(frozen=True)
class DetPoint:
    lam: float
    fa_rate: float
    miss_rate: float
    counts: Optional[DetectionCounts] = None

    @classmethod
    def from_counts(cls, lam: float, counts: DetectionCounts) -> "DetPoint":
        return cls(lam, counts.fa_rate, counts.miss_rate, counts)


@dataclass(frozen=True)
class DetCurve:
    target: str
    points: Tuple[DetPoint, ...]
    eer: float
    eer_is_exact: bool
    eer_lambda: Optional[float]
    operating_index: int

    @property
    def operating_point(self) -> DetPoint:
        """
        Grid point nearest to the equal error crossing
        """
        return self.points[self.operating_index]

    @property
    def lambdas(self) -> List[float]:
        return [point.lam for point in self.points]


def equal_error_rate(points: Sequence[DetPoint]) -> Tuple[float, bool, Optional[float], int]:
    """
    (eer, eer_is_exact, eer_lambda, operating_index) for points sorted by lambda

    First sign change of miss - fa scanning lambda ascending, linear interpolation between the two
    bracketing points. Without crossing, the point minimizing max(fa, miss) is used and flagged.
    """
    if not points:
        raise ValueError("Cannot compute an equal error rate without points")
    differences = [point.miss_rate - point.fa_rate for point in points]
    for index, difference in enumerate(differences):
        if difference == 0:
            return points[index].miss_rate, True, points[index].lam, index
        if index + 1 < len(points) and difference * differences[index + 1] < 0:
            following = differences[index + 1]
            ratio = difference / (difference - following)
            left, right = points[index], points[index + 1]
            eer = left.fa_rate + ratio * (right.fa_rate - left.fa_rate)
            eer_lambda = left.lam + ratio * (right.lam - left.lam)
            operating_index = index if abs(difference) <= abs(following) else index + 1
            return eer, True, eer_lambda, operating_index
    worst_rates = [max(point.fa_rate, point.miss_rate) for point in points]
    operating_index = int(np.argmin(worst_rates))
    logger.warning("No equal error crossing over %s points, using the min-max point", len(points))
    return worst_rates[operating_index], False, None, operating_index


def make_det_curve(target: str, points: Sequence[DetPoint]) -> DetCurve:
    points = tuple(sorted(points, key=lambda point: point.lam))
    eer, eer_is_exact, eer_lambda, operating_index = equal_error_rate(points)
    return DetCurve(target, points, eer, eer_is_exact, eer_lambda, operating_index)


def _utterance_counts(
    reference: Corpus,
    hypothesis: Corpus,
    frame_ms: int,
    reference_frames: Dict[str, FrameLabelSequence],
) -> Dict[str, DetectionCounts]:
    totals = {tag: DetectionCounts(tag) for tag in reference.tag_pair}
    for utterance in reference:
        try:
            hyp_utterance = hypothesis.get(utterance.id)
        except KeyError:
            raise ValueError('Hypothesis does not cover reference utterance "{}"'.format(utterance.id))
        ref_frames = reference_frames[utterance.id]
        hyp_frames = frame_labels(hyp_utterance, reference.tag_pair, frame_ms)
        for tag in reference.tag_pair:
            totals[tag] = totals[tag].merge(_checked_counts(ref_frames, hyp_frames, tag))
    return totals


def sweep_counts(
    hypotheses: Sequence[Tuple[float, Corpus]],
    reference: Corpus,
    frame_ms: int = DEFAULT_FRAME_MS,
) -> List[Tuple[float, Dict[str, DetectionCounts]]]:
    """
    Pooled counts for both targets at every lambda of a sweep, sorted by lambda

    :raises ValueError: a hypothesis corpus misses a reference utterance
    """
    frame_ms = _check_frame_ms(frame_ms)
    reference_frames = {
        utterance.id: frame_labels(utterance, reference.tag_pair, frame_ms) for utterance in reference
    }
    results = []
    for lam, hypothesis in sorted(hypotheses, key=lambda item: item[0]):
        results.append((lam, _utterance_counts(reference, hypothesis, frame_ms, reference_frames)))
    # Reference frame totals do not depend on lambda, one check covers the sweep
    if results:
        for counts in results[0][1].values():
            if counts.degenerate:
                logger.warning(
                    "Degenerate detection counts for %s over the whole reference, zero frame rate reported as 0: %s",
                    counts.target,
                    counts,
                )
    return results


def det_curve(
    hypotheses: Sequence[Tuple[float, Corpus]],
    reference: Corpus,
    target: str,
    frame_ms: int = DEFAULT_FRAME_MS,
) -> DetCurve:
    if target not in reference.tag_pair:
        raise ValueError('Target "{}" is not part of {}'.format(target, reference.tag_pair))
    counts = sweep_counts(hypotheses, reference, frame_ms)
    return make_det_curve(target, [DetPoint.from_counts(lam, by_tag[target]) for lam, by_tag in counts])


def pooled_curve(
    counts: Sequence[Tuple[float, Dict[str, DetectionCounts]]], tag_pair: Sequence[str]
) -> Optional[DetCurve]:
    """
    Counts for the first target at lambda plus counts for the second target at 1 - lambda
    Returns None when the grid is not symmetric around 0.5
    """
    first, second = tag_pair
    by_lambda = {round(lam, 9): by_tag for lam, by_tag in counts}
    points = []
    for lam, by_tag in counts:
        mirrored = by_lambda.get(round(1.0 - lam, 9))
        if mirrored is None:
            logger.warning("Lambda grid is not symmetric (no mirror for %s), skipping pooled curve", lam)
            return None
        points.append(DetPoint.from_counts(lam, by_tag[first].merge(mirrored[second], POOLED)))
    return make_det_curve(POOLED, points)


def det_curves(
    hypotheses: Sequence[Tuple[float, Corpus]],
    reference: Corpus,
    frame_ms: int = DEFAULT_FRAME_MS,
) -> Dict[str, DetCurve]:
    """
    Both per target curves plus the pooled curve when available, keyed by target tag and "pooled"
    """
    counts = sweep_counts(hypotheses, reference, frame_ms)
    curves = {
        tag: make_det_curve(tag, [DetPoint.from_counts(lam, by_tag[tag]) for lam, by_tag in counts])
        for tag in reference.tag_pair
    }
    pooled = pooled_curve(counts, reference.tag_pair)
    if pooled is not None:
        curves[POOLED] = pooled
    for name, curve in curves.items():
        logger.info(
            "DET %s: EER %.2f%%%s at lambda %.2f",
            name,
            curve.eer * 100,
            "" if curve.eer_is_exact else " (no crossing)",
            curve.operating_point.lam,
        )
    return curves


def write_det_csv(path: str, curve: DetCurve) -> None:
    rows = [
        {
            "lambda": "{:.6f}".format(point.lam),
            "fa": "{:.6f}".format(point.fa_rate),
            "miss": "{:.6f}".format(point.miss_rate),
            "fa_probit": "{:.6f}".format(probit(point.fa_rate)),
            "miss_probit": "{:.6f}".format(probit(point.miss_rate)),
        }
        for point in curve.points
    ]
    csv_dict_writer(path, rows, DET_CSV_FIELDS)


def read_det_csv(path: str, target: str = POOLED) -> DetCurve:
    """
    Rebuilds a curve (without counts) from a det csv file
    """
    points = []
    for row in csv_dict_reader(path):
        try:
            points.append(DetPoint(float(row["lambda"]), float(row["fa"]), float(row["miss"])))
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError("Malformed DET row {} in {}: {}".format(row, path, exc))
    return make_det_curve(target, points)


def plot_det(curves: Dict[str, DetCurve], path: str, title: Optional[str] = None) -> None:
    """
    SVG DET plot on probit axes with EER markers, without timestamp so output is reproducible
    """
    import matplotlib
    from matplotlib.backends.backend_svg import FigureCanvasSVG
    from matplotlib.figure import Figure

    figure = Figure(figsize=(6, 6))
    FigureCanvasSVG(figure)
    axes = figure.add_subplot(1, 1, 1)
    for name, curve in curves.items():
        axes.plot(
            [probit(point.fa_rate) for point in curve.points],
            [probit(point.miss_rate) for point in curve.points],
            label="{} (EER {:.1f}%)".format(name, curve.eer * 100),
        )
        axes.plot([probit(curve.eer)], [probit(curve.eer)], marker="o", color="black", markersize=4)
    ticks = [probit(tick) for tick in DET_TICKS]
    labels = ["{:g}".format(tick * 100) for tick in DET_TICKS]
    axes.set_xticks(ticks)
    axes.set_xticklabels(labels)
    axes.set_yticks(ticks)
    axes.set_yticklabels(labels)
    limits = (probit(0.0005), probit(0.6))
    axes.set_xlim(*limits)
    axes.set_ylim(*limits)
    axes.set_xlabel("False alarm rate (%)")
    axes.set_ylabel("Miss rate (%)")
    axes.plot(limits, limits, linestyle=":", color="grey", linewidth=0.8)
    axes.grid(True, linestyle=":", linewidth=0.5)
    if title:
        axes.set_title(title)
    axes.legend(loc="upper right")
    with matplotlib.rc_context({"svg.hashsalt": "csdetect", "svg.fonttype": "none"}):
        with atomic_write(path) as file_handle:
            figure.savefig(file_handle, format="svg", metadata={"Date": None})
    logger.debug("Wrote DET plot to %s", path)

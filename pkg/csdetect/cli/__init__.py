#! /usr/bin/env python
#  -*- coding: utf-8 -*-
#
# This file is part of csdetect package

"""
csdetect command line

    csdetect train --corpus-fy fy.txt --corpus-nl nl.txt --order 3 -o models/
    csdetect tag --config run.yaml --model-dir models/ -o hyps/
    csdetect evaluate --config run.yaml -o results/
    csdetect analyze --reference-ctm ref.ctm --hypothesis-ctm asr=asr.ctm -o results/
    csdetect generate --reference-ctm ref.ctm --n 1000 --seed 7 -o generated/

Settings come from a flat YAML file (--config) and are overridden by flags. Per language corpora are
given as --corpus-<tag> PATH (config keys corpus_<tag>), their order gives the language pair unless
tag_pair is set.

Exit codes: 0 success, 1 internal error (or an error was logged), 2 input or validation error

Versioning semantics:
    Major version: backward compatibility breaking changes
    Minor version: New functionality
    Patch version: Backwards compatible bug fixes

"""

__intname__ = "csdetect.cli"
__author__ = "csdetect developers"
__copyright__ = "Copyright (C) 2024-2026 csdetect developers"
__description__ = "Command line interface for the csdetect pipeline"
__licence__ = "BSD 3 Clause"
__version__ = "1.0.0"
__build__ = "2026101701"
__compat__ = "python3.7+"


import argparse
import logging
import os
import sys
from collections import OrderedDict
from dataclasses import dataclass, field, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import yaml

from csdetect import __version__ as csdetect_version
from csdetect.analysis import (
    confusions,
    duration_histogram,
    score_corpora,
    switch_stats,
    write_confusions_tsv,
    write_durations_tsv,
    write_switches_tsv,
    write_wer_tsv,
)
from csdetect.arpa import read_arpa, write_arpa
from csdetect.checksums import digest_files, sha256sum_data
from csdetect.corpus import (
    Corpus,
    check_language_tag,
    check_tag_pair,
    corpus_sentences,
    join_tagged_token,
    read_ctm,
    read_text_corpus_file,
    split_tagged_token,
    write_text_corpus,
)
from csdetect.file_utils import check_input_file, check_output_dir, write_json_to_file
from csdetect.lm import LanguageModel, perplexity, sample_corpus, train_kn
from csdetect.logger_utils import logger_get_logger
from csdetect.metrics import POOLED, det_curves, plot_det, write_det_csv
from csdetect.tagger import CodeSwitchTagger, SweepConfig, hypothesis_corpus, write_sweep_ctms

logger = logging.getLogger(__intname__)

EXIT_OK = 0
EXIT_INTERNAL_ERROR = 1
EXIT_INPUT_ERROR = 2

CORPUS_KEY_PREFIX = "corpus_"
CORPUS_FLAG_PREFIX = "--corpus-"
MANIFEST_FILE = "manifest.json"
# Settings that never change output content, left out of manifests and config hashes
RUNTIME_KEYS = ("output_dir", "log_file", "debug", "workers")
SHORT_SEGMENT_SECONDS = 2


class ConfigError(ValueError):
    pass


def _as_int(key: str, value: Any) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError('Config key "{}" must be an integer, got {!r}'.format(key, value))
    return value


def _as_float(key: str, value: Any) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError('Config key "{}" must be a number, got {!r}'.format(key, value))
    return float(value)


def _as_bool(key: str, value: Any) -> bool:
    if not isinstance(value, bool):
        raise ConfigError('Config key "{}" must be true or false, got {!r}'.format(key, value))
    return value


def _as_path(key: str, value: Any) -> Optional[str]:
    if value is None:
        return None
    if not isinstance(value, str) or not value:
        raise ConfigError('Config key "{}" must be a path, got {!r}'.format(key, value))
    return value


def _as_list(key: str, value: Any) -> list:
    if isinstance(value, str):
        return [item.strip() for item in value.split(",") if item.strip()]
    if not isinstance(value, list):
        raise ConfigError('Config key "{}" must be a list, got {!r}'.format(key, value))
    return value


def _as_float_list(key: str, value: Any) -> Optional[List[float]]:
    if value is None:
        return None
    items = _as_list(key, value)
    try:
        return [float(item) for item in items]
    except (TypeError, ValueError):
        raise ConfigError('Config key "{}" must be a list of numbers, got {!r}'.format(key, value))


def _as_discount(key: str, value: Any) -> Optional[Union[float, List[float]]]:
    if value is None:
        return None
    if isinstance(value, (list, str)):
        return _as_float_list(key, value)
    return _as_float(key, value)


def _as_tag_pair(key: str, value: Any) -> Optional[List[str]]:
    if value is None:
        return None
    try:
        return list(check_tag_pair([str(item) for item in _as_list(key, value)]))
    except ValueError as exc:
        raise ConfigError('Config key "{}": {}'.format(key, exc))


def _as_path_list(key: str, value: Any) -> List[str]:
    if value is None:
        return []
    return [_as_path(key, item) for item in _as_list(key, value)]


@dataclass
class RunConfig:
    reference_ctm: Optional[str] = None
    hypothesis_ctm: List[str] = field(default_factory=list)
    corpora: Dict[str, str] = field(default_factory=OrderedDict)
    bilingual: bool = False
    model_dir: Optional[str] = None
    output_dir: str = "."
    tag_pair: Optional[List[str]] = None
    order: int = 3
    discount: Optional[Union[float, List[float]]] = None
    lambda_step: float = 0.02
    lambdas: Optional[List[float]] = None
    gamma: float = 0.0
    frame_ms: int = 10
    histogram_edges: Optional[List[float]] = None
    top_k: int = 20
    seed: int = 0
    n_sentences: int = 1000
    max_len: int = 30
    generator_model: Optional[str] = None
    heldout_corpus: Optional[str] = None
    workers: int = 1
    log_file: Optional[str] = None
    debug: bool = False

    _COERCE = {
        "reference_ctm": _as_path,
        "hypothesis_ctm": _as_path_list,
        "bilingual": _as_bool,
        "model_dir": _as_path,
        "output_dir": _as_path,
        "tag_pair": _as_tag_pair,
        "order": _as_int,
        "discount": _as_discount,
        "lambda_step": _as_float,
        "lambdas": _as_float_list,
        "gamma": _as_float,
        "frame_ms": _as_int,
        "histogram_edges": _as_float_list,
        "top_k": _as_int,
        "seed": _as_int,
        "n_sentences": _as_int,
        "max_len": _as_int,
        "generator_model": _as_path,
        "heldout_corpus": _as_path,
        "workers": _as_int,
        "log_file": _as_path,
        "debug": _as_bool,
    }

    def __post_init__(self):
        if not 1 <= self.order <= 5:
            raise ConfigError("order must lie in [1, 5], got {}".format(self.order))
        for key in ("frame_ms", "n_sentences", "max_len", "workers"):
            if getattr(self, key) < 1:
                raise ConfigError("{} must be at least 1, got {}".format(key, getattr(self, key)))
        if self.top_k < 0:
            raise ConfigError("top_k must be non negative, got {}".format(self.top_k))
        if self.output_dir is None:
            raise ConfigError("output_dir cannot be null")
        try:
            self.sweep_config()
        except ValueError as exc:
            raise ConfigError(str(exc))

    @classmethod
    def from_mapping(cls, mapping: Dict[str, Any]) -> "RunConfig":
        """
        Builds a config from flat key / value pairs, corpus_<tag> keys feeding corpora
        """
        kwargs = {}  # type: Dict[str, Any]
        corpora = OrderedDict()  # type: Dict[str, str]
        for key, value in mapping.items():
            if isinstance(value, dict):
                raise ConfigError('Config key "{}" holds a nested mapping, only flat keys are allowed'.format(key))
            if key.startswith(CORPUS_KEY_PREFIX):
                tag = key[len(CORPUS_KEY_PREFIX):]
                try:
                    check_language_tag(tag)
                except ValueError as exc:
                    raise ConfigError('Config key "{}": {}'.format(key, exc))
                corpora[tag] = _as_path(key, value)
            elif key in cls._COERCE:
                kwargs[key] = cls._COERCE[key](key, value)
            else:
                raise ConfigError('Unknown config key "{}"'.format(key))
        return cls(corpora=corpora, **kwargs)

    @classmethod
    def load(cls, path: str) -> "RunConfig":
        return cls.from_mapping(load_config_mapping(path))

    def to_dict(self, runtime: bool = True) -> Dict[str, Any]:
        data = {}
        for config_field in fields(self):
            if config_field.name == "corpora" or config_field.name.startswith("_"):
                continue
            if not runtime and config_field.name in RUNTIME_KEYS:
                continue
            value = getattr(self, config_field.name)
            data[config_field.name] = list(value) if isinstance(value, (list, tuple)) else value
        for tag, path in self.corpora.items():
            data[CORPUS_KEY_PREFIX + tag] = path
        if data["tag_pair"] is None and len(self.corpora) == 2:
            data["tag_pair"] = list(self.corpora)
        return data

    def dump(self, runtime: bool = True) -> str:
        return yaml.safe_dump(self.to_dict(runtime), sort_keys=True, default_flow_style=False, allow_unicode=True)

    def config_hash(self) -> str:
        return sha256sum_data(self.dump(runtime=False).encode("utf-8"))

    def sweep_config(self) -> SweepConfig:
        if self.lambdas is not None:
            return SweepConfig(tuple(self.lambdas), self.gamma, self.workers)
        return SweepConfig.from_step(self.lambda_step, self.gamma, self.workers)

    def resolved_tag_pair(self, reference: Optional[Corpus] = None) -> Tuple[str, str]:
        if self.tag_pair is not None:
            return check_tag_pair(self.tag_pair)
        if reference is not None:
            return reference.tag_pair
        if len(self.corpora) == 2:
            return check_tag_pair(list(self.corpora))
        raise ConfigError(
            "Cannot tell the language pair: set tag_pair or give exactly two --corpus-<tag> corpora, got {}".format(
                list(self.corpora) or "none"
            )
        )


def load_config_mapping(path: str) -> Dict[str, Any]:
    check_input_file(path)
    with open(path, "r", encoding="utf-8") as file_handle:
        data = yaml.safe_load(file_handle)
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError('Config file "{}" must hold key: value pairs'.format(path))
    return data


def _float_list_arg(value: str) -> List[float]:
    try:
        return [float(item) for item in value.split(",") if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma separated numbers, got {}".format(value))


def _discount_arg(value: str) -> Union[float, List[float]]:
    values = _float_list_arg(value)
    return values[0] if len(values) == 1 else values


def _tag_pair_arg(value: str) -> List[str]:
    return [item.strip() for item in value.split(",")]


def _add_lm_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--order", type=int, help="n-gram order, 1 to 5 (default 3)")
    parser.add_argument("--discount", type=_discount_arg, help="KN discount, one value or one per order (comma separated)")


def _add_model_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--reference-ctm", dest="reference_ctm", help="reference CTM with language tags")
    parser.add_argument("--model-dir", dest="model_dir", help="directory holding lm_<tag>.arpa (else trained from corpora)")
    _add_lm_arguments(parser)
    parser.add_argument("--lambda-step", dest="lambda_step", type=float, help="prior grid step (default 0.02)")
    parser.add_argument("--lambdas", type=_float_list_arg, help="explicit comma separated prior grid, with 0 and 1")
    parser.add_argument("--gamma", type=float, help="switch penalty, 0 disables smoothing (default)")


def _add_analysis_arguments(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--histogram-edges", dest="histogram_edges", type=_float_list_arg, help="duration bin edges in seconds")
    parser.add_argument("--top-k", dest="top_k", type=int, help="confusion table size (default 20)")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat YAML run configuration")
    common.add_argument("-o", "--output-dir", dest="output_dir", help="output directory (default current)")
    common.add_argument("--tag-pair", dest="tag_pair", type=_tag_pair_arg, help="language pair, eg fy,nl (first is the prior's language)")
    common.add_argument("--log-file", dest="log_file", help="also log to this file")
    common.add_argument("--debug", action="store_const", const=True, help="debug logging")
    common.add_argument("--workers", type=int, help="threads used by prior sweeps (default 1)")

    parser = argparse.ArgumentParser(
        prog="csdetect",
        description="Code-switching detection evaluation toolkit",
        epilog="Per language corpora are given as --corpus-<tag> PATH, eg --corpus-fy fy.txt",
    )
    parser.add_argument("--version", action="version", version="csdetect {}".format(csdetect_version))
    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.required = True

    train = subparsers.add_parser("train", parents=[common], help="train one KN model per language")
    _add_lm_arguments(train)
    train.add_argument("--bilingual", action="store_const", const=True, help="also train a pooled word|tag model")

    tag = subparsers.add_parser("tag", parents=[common], help="write one hypothesis CTM per prior weight")
    _add_model_arguments(tag)

    evaluate = subparsers.add_parser("evaluate", parents=[common], help="DET curves, EER and analyses")
    _add_model_arguments(evaluate)
    evaluate.add_argument("--frame-ms", dest="frame_ms", type=int, help="frame length in ms (default 10)")
    _add_analysis_arguments(evaluate)

    analyze = subparsers.add_parser("analyze", parents=[common], help="score hypothesis CTMs against the reference")
    analyze.add_argument("--reference-ctm", dest="reference_ctm", help="reference CTM with language tags")
    analyze.add_argument(
        "--hypothesis-ctm", dest="hypothesis_ctm", action="append", help="NAME=PATH hypothesis CTM, repeatable"
    )
    _add_analysis_arguments(analyze)

    generate = subparsers.add_parser("generate", parents=[common], help="sample code-switched text")
    generate.add_argument("--generator-model", dest="generator_model", help="ARPA model over word|tag tokens")
    generate.add_argument("--reference-ctm", dest="reference_ctm", help="train the generator on these transcripts")
    _add_lm_arguments(generate)
    generate.add_argument("--n", "--n-sentences", dest="n_sentences", type=int, help="sentences to draw (default 1000)")
    generate.add_argument("--max-len", dest="max_len", type=int, help="max tokens per sentence (default 30)")
    generate.add_argument("--seed", type=int, help="random seed (default 0)")
    generate.add_argument("--heldout-corpus", dest="heldout_corpus", help="held out text for the augmentation check")
    return parser


def _parse_corpus_flags(extra: Sequence[str], parser: argparse.ArgumentParser) -> Dict[str, str]:
    corpora = OrderedDict()  # type: Dict[str, str]
    index = 0
    while index < len(extra):
        argument = extra[index]
        if not argument.startswith(CORPUS_FLAG_PREFIX):
            parser.error("unrecognized arguments: {}".format(" ".join(extra[index:])))
        flag, separator, value = argument.partition("=")
        if not separator:
            if index + 1 >= len(extra):
                parser.error("{} expects a path".format(flag))
            value = extra[index + 1]
            index += 1
        corpora[flag[len(CORPUS_FLAG_PREFIX):]] = value
        index += 1
    return corpora


def parse_command_line(argv: Optional[Sequence[str]] = None) -> Tuple[str, RunConfig]:
    """
    Returns (command, config), config file values overridden by flags
    """
    parser = build_parser()
    args, extra = parser.parse_known_args(argv)
    corpora = _parse_corpus_flags(extra, parser)
    mapping = load_config_mapping(args.config) if args.config else {}
    for key, value in vars(args).items():
        if key in ("command", "config") or value is None:
            continue
        mapping[key] = value
    for tag, path in corpora.items():
        mapping[CORPUS_KEY_PREFIX + tag] = path
    return args.command, RunConfig.from_mapping(mapping)


def write_manifest(
    config: RunConfig,
    command: str,
    inputs: Sequence[str],
    outputs: Sequence[str],
    details: Optional[Dict[str, Any]] = None,
) -> str:
    """
    Run manifest without timestamps: same manifest means same inputs, settings and outputs
    """
    manifest = {
        "tool": "csdetect",
        "version": csdetect_version,
        "command": command,
        "config": config.to_dict(runtime=False),
        "config_sha256": config.config_hash(),
        "inputs": digest_files(sorted(set(inputs))),
        "outputs": digest_files(outputs, root=config.output_dir),
    }
    if details:
        manifest["details"] = details
    path = os.path.join(config.output_dir, MANIFEST_FILE)
    write_json_to_file(path, manifest)
    return path


def _output_path(config: RunConfig, name: str) -> str:
    return os.path.join(config.output_dir, name)


def _read_reference(config: RunConfig) -> Tuple[Corpus, str]:
    if not config.reference_ctm:
        raise ConfigError("reference_ctm is required (--reference-ctm)")
    tag_pair = check_tag_pair(config.tag_pair) if config.tag_pair else None
    if tag_pair is None and len(config.corpora) == 2:
        tag_pair = check_tag_pair(list(config.corpora))
    return read_ctm(config.reference_ctm, tag_pair=tag_pair), config.reference_ctm


def _corpus_path(config: RunConfig, tag: str) -> str:
    try:
        return config.corpora[tag]
    except KeyError:
        raise ConfigError('No training corpus for "{}" (--corpus-{} PATH)'.format(tag, tag))


def _train_component(config: RunConfig, tag: str) -> Tuple[LanguageModel, List[List[str]]]:
    sentences = read_text_corpus_file(_corpus_path(config, tag), mode="strip")
    if not sentences:
        raise ValueError('Training corpus "{}" is empty'.format(config.corpora[tag]))
    return train_kn(sentences, config.order, config.discount), sentences


def _load_models(config: RunConfig, tag_pair: Sequence[str]) -> Tuple[List[LanguageModel], List[str]]:
    """
    Component models from model_dir when set, else trained from the per language corpora
    """
    models = []
    inputs = []
    for tag in tag_pair:
        if config.model_dir:
            path = os.path.join(config.model_dir, "lm_{}.arpa".format(tag))
            models.append(read_arpa(check_input_file(path)))
        else:
            path = _corpus_path(config, tag)
            models.append(_train_component(config, tag)[0])
        inputs.append(path)
    logger.info("Language models ready for %s", ", ".join(tag_pair))
    return models, inputs


def _tagged_training_sentences(config: RunConfig, tag_pair: Sequence[str]) -> List[List[str]]:
    """
    Per language corpora as word|tag tokens, tokens without tag get their corpus language
    """
    sentences = []
    for tag in tag_pair:
        for sentence in read_text_corpus_file(_corpus_path(config, tag), mode="untagged"):
            tokens = []
            for token in sentence:
                word, token_tag = split_tagged_token(token)
                tokens.append(join_tagged_token(word, token_tag or tag))
            sentences.append(tokens)
    return sentences


def cmd_train(config: RunConfig) -> Dict[str, Any]:
    tag_pair = config.resolved_tag_pair()
    check_output_dir(config.output_dir)
    outputs = []
    inputs = []
    details = OrderedDict()  # type: Dict[str, Any]
    for tag in tag_pair:
        model, sentences = _train_component(config, tag)
        path = _output_path(config, "lm_{}.arpa".format(tag))
        write_arpa(path, model)
        outputs.append(path)
        inputs.append(config.corpora[tag])
        details[tag] = {
            "sentences": len(sentences),
            "tokens": sum(len(sentence) for sentence in sentences),
            "vocabulary": len(model.support),
            "discounts": [round(value, 6) for value in model.discounts],
        }
        logger.info("Trained %s model: %s tokens, %s vocabulary entries", tag, details[tag]["tokens"], details[tag]["vocabulary"])
    if config.bilingual:
        sentences = _tagged_training_sentences(config, tag_pair)
        model = train_kn(sentences, config.order, config.discount)
        path = _output_path(config, "lm_bilingual.arpa")
        write_arpa(path, model)
        outputs.append(path)
        details["bilingual"] = {
            "sentences": len(sentences),
            "tokens": sum(len(sentence) for sentence in sentences),
            "vocabulary": len(model.support),
            "discounts": [round(value, 6) for value in model.discounts],
        }
    outputs.append(write_manifest(config, "train", inputs, outputs, details))
    return details


def _sweep(config: RunConfig) -> Tuple[Corpus, list, List[str]]:
    reference, reference_path = _read_reference(config)
    models, model_inputs = _load_models(config, reference.tag_pair)
    tagger = CodeSwitchTagger(models[0], models[1], reference.tag_pair)
    points = tagger.sweep(reference, config.sweep_config())
    return reference, points, [reference_path] + model_inputs


def cmd_tag(config: RunConfig) -> List[str]:
    check_output_dir(config.output_dir)
    reference, points, inputs = _sweep(config)
    outputs = write_sweep_ctms(reference, points, config.output_dir)
    write_manifest(config, "tag", inputs, outputs)
    return outputs


def _analyze_systems(config: RunConfig, reference: Corpus, systems: Dict[str, Corpus]) -> Tuple[Dict[str, Any], List[str]]:
    """
    WER, switches, durations and confusions for every hypothesis system, written as TSV files
    """
    wer_reports = OrderedDict()
    switch_tables = OrderedDict([("reference", switch_stats(reference))])
    histograms = OrderedDict([("reference", duration_histogram(reference, config.histogram_edges))])
    confusion_tables = OrderedDict()
    summary = OrderedDict()
    for name, hypothesis in systems.items():
        score = score_corpora(reference, hypothesis)
        wer_reports[name] = [score.with_tags, score.words_only]
        switch_tables[name] = switch_stats(hypothesis)
        histograms[name] = duration_histogram(hypothesis, config.histogram_edges)
        confusion_tables[name] = confusions(score.alignments.values(), config.top_k)
        reference_switches = switch_tables["reference"].total
        summary[name] = OrderedDict(
            [
                ("wer_with_tags", round(score.with_tags.wer * 100, 4)),
                ("wer_words_only", round(score.words_only.wer * 100, 4)),
                ("switches", switch_tables[name].total),
                ("reference_switches", reference_switches),
                ("switch_ratio", round(switch_tables[name].total / reference_switches, 4) if reference_switches else None),
                ("short_segments", histograms[name].count_below(SHORT_SEGMENT_SECONDS)),
                ("reference_short_segments", histograms["reference"].count_below(SHORT_SEGMENT_SECONDS)),
            ]
        )
    outputs = [_output_path(config, name) for name in ("wer.tsv", "switches.tsv", "durations.tsv", "confusions.tsv")]
    write_wer_tsv(outputs[0], wer_reports)
    write_switches_tsv(outputs[1], switch_tables)
    write_durations_tsv(outputs[2], histograms)
    write_confusions_tsv(outputs[3], confusion_tables)
    return summary, outputs


def _format_switch_ratio(values: Dict[str, Any]) -> str:
    if values["switch_ratio"] is None:
        return "n/a (no reference switch)"
    return "{:.2f}".format(values["switch_ratio"])


def _print_summary(lines: Sequence[str]) -> None:

    for line in lines:
        print(line)


def cmd_evaluate(config: RunConfig) -> Dict[str, Any]:
    check_output_dir(config.output_dir)
    reference, points, inputs = _sweep(config)
    first = reference.first
    hypotheses = [(point.lam, hypothesis_corpus(reference, point)) for point in points]
    curves = det_curves(hypotheses, reference, config.frame_ms)
    main_curve = curves.get(POOLED, curves[first])

    outputs = [_output_path(config, "det.csv")]
    write_det_csv(outputs[0], main_curve)
    for tag in reference.tag_pair:
        outputs.append(_output_path(config, "det_{}.csv".format(tag)))
        write_det_csv(outputs[-1], curves[tag])
    outputs.append(_output_path(config, "det.svg"))
    plot_det(curves, outputs[-1])

    operating_lambda = main_curve.operating_point.lam
    system = "lambda_{:.2f}".format(operating_lambda)
    analyses, analysis_outputs = _analyze_systems(config, reference, {system: dict(hypotheses)[operating_lambda]})
    outputs += analysis_outputs

    summary = OrderedDict(
        [
            ("det_curve", main_curve.target),
            ("eer", OrderedDict((name, round(curve.eer * 100, 4)) for name, curve in curves.items())),
            ("eer_is_exact", OrderedDict((name, curve.eer_is_exact) for name, curve in curves.items())),
            ("operating_lambda", operating_lambda),
            ("analysis", analyses[system]),
        ]
    )
    outputs.append(_output_path(config, "summary.json"))
    write_json_to_file(outputs[-1], summary)
    write_manifest(config, "evaluate", inputs, outputs)

    lines = ["EER {}: {:.2f}%{}".format(name, curve.eer * 100, "" if curve.eer_is_exact else " (no crossing)") for name, curve in curves.items()]
    lines.append("Operating point: lambda {:.2f}".format(operating_lambda))
    lines.append(
        "WER with tags {:.2f}%, words only {:.2f}%".format(analyses[system]["wer_with_tags"], analyses[system]["wer_words_only"])
    )
    lines.append(
        "Switches: {} hypothesized / {} reference".format(analyses[system]["switches"], analyses[system]["reference_switches"])
    )
    lines.append("Switch ratio: {}".format(_format_switch_ratio(analyses[system])))
    _print_summary(lines)
    return summary


def _parse_system(argument: str, index: int) -> Tuple[str, str]:
    name, separator, path = argument.partition("=")
    if not separator:
        return "system{}".format(index), argument
    if not name or not path:
        raise ConfigError('Hypothesis must be given as NAME=PATH, got "{}"'.format(argument))
    return name, path


def cmd_analyze(config: RunConfig) -> Dict[str, Any]:
    check_output_dir(config.output_dir)
    reference, reference_path = _read_reference(config)
    if not config.hypothesis_ctm:
        raise ConfigError("at least one hypothesis_ctm is required (--hypothesis-ctm NAME=PATH)")
    systems = OrderedDict()
    inputs = [reference_path]
    for index, argument in enumerate(config.hypothesis_ctm, 1):
        name, path = _parse_system(argument, index)
        if name in systems or name == "reference":
            raise ConfigError('Duplicate system name "{}"'.format(name))
        systems[name] = read_ctm(path, tag_pair=reference.tag_pair)
        inputs.append(path)
    summary, outputs = _analyze_systems(config, reference, systems)
    outputs.append(_output_path(config, "summary.json"))
    write_json_to_file(outputs[-1], summary)
    write_manifest(config, "analyze", inputs, outputs)
    _print_summary(
        [
            "{}: WER with tags {:.2f}%, words only {:.2f}%, {} switches ({} in reference), switch ratio {}".format(
                name,
                values["wer_with_tags"],
                values["wer_words_only"],
                values["switches"],
                values["reference_switches"],
                _format_switch_ratio(values),
            )
            for name, values in summary.items()
        ]
    )
    return summary


def _generator(config: RunConfig) -> Tuple[LanguageModel, Optional[List[List[str]]], List[str]]:
    """
    (model, tagged training sentences or None, inputs)
    """
    inputs = []
    sentences = None
    if config.reference_ctm:
        reference, reference_path = _read_reference(config)
        sentences = corpus_sentences(reference, tagged=True)
        inputs.append(reference_path)
    elif len(config.corpora) == 2:
        tag_pair = config.resolved_tag_pair()
        sentences = _tagged_training_sentences(config, tag_pair)
        inputs += [config.corpora[tag] for tag in tag_pair]
    if config.generator_model:
        inputs.append(config.generator_model)
        return read_arpa(check_input_file(config.generator_model)), sentences, inputs
    if sentences is None:
        raise ConfigError("generate needs generator_model, reference_ctm or two corpus_<tag> corpora")
    return train_kn(sentences, config.order, config.discount), sentences, inputs


def _strip_tags(sentences: Sequence[Sequence[str]]) -> List[List[str]]:
    return [[split_tagged_token(token)[0] for token in sentence] for sentence in sentences]


def cmd_generate(config: RunConfig) -> Dict[str, Any]:
    check_output_dir(config.output_dir)
    model, training_sentences, inputs = _generator(config)
    drawn = sample_corpus(model, config.n_sentences, config.max_len, config.seed)
    generated = [sentence for sentence in drawn if sentence]
    if len(generated) < len(drawn):
        logger.debug("Dropped %s empty draws", len(drawn) - len(generated))

    tag_counts = OrderedDict()  # type: Dict[str, int]
    switches = 0
    transitions = 0
    for sentence in generated:
        tags = []
        for token in sentence:
            tag = split_tagged_token(token)[1]
            if tag is None:
                raise ValueError('Generator produced untagged token "{}", its vocabulary must use word|tag tokens'.format(token))
            tags.append(tag)
            tag_counts[tag] = tag_counts.get(tag, 0) + 1
        switches += sum(1 for previous, current in zip(tags, tags[1:]) if previous != current)
        transitions += len(tags) - 1
    token_count = sum(tag_counts.values())

    outputs = [_output_path(config, "generated.txt")]
    write_text_corpus(outputs[0], generated)
    summary = OrderedDict(
        [
            ("sentences", len(generated)),
            ("tokens", token_count),
            ("switch_rate", round(switches / transitions, 6) if transitions else 0.0),
            ("tag_shares", OrderedDict((tag, round(count / token_count, 6)) for tag, count in sorted(tag_counts.items()))),
        ]
    )

    if config.heldout_corpus:
        if training_sentences is None:
            raise ConfigError("heldout_corpus needs the generator training text (reference_ctm or corpora)")
        heldout = read_text_corpus_file(config.heldout_corpus, mode="strip")
        inputs.append(config.heldout_corpus)
        base_text = _strip_tags(training_sentences)
        base = perplexity(train_kn(base_text, config.order, config.discount), heldout)
        augmented = perplexity(train_kn(base_text + _strip_tags(generated), config.order, config.discount), heldout)
        summary["heldout_perplexity"] = OrderedDict(
            [("train", round(base.value, 6)), ("train_and_generated", round(augmented.value, 6))]
        )
        logger.info("Held out perplexity %.3f without, %.3f with generated text", base.value, augmented.value)

    outputs.append(_output_path(config, "generate.json"))
    write_json_to_file(outputs[-1], summary)
    write_manifest(config, "generate", inputs, outputs)
    _print_summary(
        [
            "Generated {} sentences, {} tokens, switch rate {:.4f}".format(len(generated), token_count, summary["switch_rate"]),
            "Tag shares: {}".format(", ".join("{} {:.1%}".format(tag, share) for tag, share in summary["tag_shares"].items())),
        ]
    )
    return summary


COMMANDS = OrderedDict(
    [
        ("train", cmd_train),
        ("tag", cmd_tag),
        ("evaluate", cmd_evaluate),
        ("analyze", cmd_analyze),
        ("generate", cmd_generate),
    ]
)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        command, config = parse_command_line(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT_ERROR
    except (ValueError, OSError, yaml.YAMLError) as exc:
        print("csdetect: error: {}".format(exc), file=sys.stderr)
        return EXIT_INPUT_ERROR

    root_logger = logger_get_logger(config.log_file, debug=config.debug)
    logger.debug("Running %s with config:\n%s", command, config.dump())
    try:
        COMMANDS[command](config)
    except (ValueError, OSError, yaml.YAMLError) as exc:
        print("csdetect: error: {}".format(exc), file=sys.stderr)
        logger.error("%s failed: %s", command, exc)
        logger.debug("Trace:", exc_info=True)
        return EXIT_INPUT_ERROR
    except Exception as exc:  # pylint: disable=W0703 (broad-except)
        logger.exception("Internal error while running %s: %s", command, exc)
        return EXIT_INTERNAL_ERROR
    if root_logger.get_worst_logger_level() >= logging.ERROR:
        return EXIT_INTERNAL_ERROR
    return EXIT_OK

"""``voxaffect`` command-line entry point.

Exit codes: 0 success, 1 usage or spec error, 2 unusable input content.
Documents go to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import fields

from . import __version__
from .audio_io import read_wav, write_wav
from .documents import ReportDocument, csv_row, dumps, round_sig
from .emotion import (
    BaselineProfile,
    NormalBand,
    ThresholdConfig,
    calibrate,
    classify,
    compute_deviation,
)
from .errors import (
    AudioInputError,
    AudioOutputError,
    DegenerateBaselineError,
    NoSpeechError,
    SpecificationError,
)
from .features import AnalysisConfig, FeatureVector, extract_features
from .synth import UtteranceSpec, expected_features, synth_utterance

EXIT_OK, EXIT_USAGE, EXIT_INPUT = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _flag(name):
    return "--" + name.replace("_", "-")


def _add_analysis_flags(p):
    g = p.add_argument_group("analysis")
    for f in fields(AnalysisConfig):
        g.add_argument(_flag(f.name), dest=f"a_{f.name}", type=float, default=None,
                       metavar="X", help=f"default {f.default}")


def _add_threshold_flags(p):
    g = p.add_argument_group("thresholds")
    g.add_argument("--thresholds", metavar="JSON", help="threshold file")
    for f in fields(ThresholdConfig):
        if f.name == "normal_band":
            continue
        g.add_argument(_flag(f.name), dest=f"t_{f.name}", type=float, default=None,
                       metavar="X", help=f"default {f.default}")
    for f in fields(NormalBand):
        g.add_argument(_flag("normal_" + f.name), dest=f"n_{f.name}", type=float,
                       default=None, metavar="X", help=f"default {f.default}")


def _analysis_config(args) -> AnalysisConfig:
    overrides = {f.name: getattr(args, f"a_{f.name}") for f in fields(AnalysisConfig)
                 if getattr(args, f"a_{f.name}") is not None}
    return AnalysisConfig(**overrides)


def _load_json(path, what):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {what} {path}: {exc.strerror or exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"{what} {path} is not valid JSON: {exc}") from exc


def _threshold_config(args) -> ThresholdConfig:
    data = _load_json(args.thresholds, "thresholds") if args.thresholds else {}
    if not isinstance(data, dict):
        raise UsageError("thresholds file must hold a JSON object")
    for f in fields(ThresholdConfig):
        value = getattr(args, f"t_{f.name}", None)
        if value is not None:
            data[f.name] = value
    band = dict(data.get("normal_band", {}))
    for f in fields(NormalBand):
        value = getattr(args, f"n_{f.name}")
        if value is not None:
            band[f.name] = value
    if band:
        data["normal_band"] = band
    return ThresholdConfig.from_dict(data)


def _features_of(path, config):
    return extract_features(read_wav(path), config)


def cmd_calibrate(args) -> int:
    config = _analysis_config(args)
    with ThreadPoolExecutor() as pool:
        results = list(pool.map(lambda p: _safe_features(p, config), args.inputs))
    vectors = []
    for path, (fv, err) in zip(args.inputs, results):
        if err is not None:
            raise err
        vectors.append(fv)
    profile = calibrate(vectors)
    try:
        with open(args.out, "w") as fh:
            fh.write(dumps(profile.to_dict()))
    except OSError as exc:
        raise AudioOutputError(f"cannot write {args.out}: {exc.strerror or exc}") from exc
    sys.stdout.write(dumps(profile.to_dict()))
    return EXIT_OK


def _safe_features(path, config):
    try:
        return _features_of(path, config), None
    except NoSpeechError as exc:
        return None, NoSpeechError(f"{path}: {exc}", exc.frame_stats)
    except Exception as exc:  # re-raised in input order by the caller
        return None, exc


def cmd_analyze(args) -> int:
    config = _analysis_config(args)
    thresholds = _threshold_config(args)
    try:
        baseline = BaselineProfile.from_dict(_load_json(args.baseline, "baseline profile"))
    except SpecificationError as exc:
        raise UsageError(str(exc)) from exc
    # compare at the precision profiles are stored with
    features = FeatureVector.from_dict(round_sig(_features_of(args.input, config).to_dict()))
    try:
        deviation = compute_deviation(features, baseline)
    except DegenerateBaselineError as exc:
        raise UsageError(str(exc)) from exc
    report = classify(deviation, thresholds)
    if args.format == "csv":
        sys.stdout.write(csv_row(features, report.label.value, report.confidence))
    else:
        doc = ReportDocument.from_report(__version__, args.input, features, baseline,
                                         report, config)
        sys.stdout.write(dumps(doc.to_dict()))
    return EXIT_OK


def cmd_features(args) -> int:
    features = _features_of(args.input, _analysis_config(args))
    if args.format == "csv":
        sys.stdout.write(csv_row(features))
    else:
        sys.stdout.write(dumps(features.to_dict()))
    return EXIT_OK


def cmd_synth(args) -> int:
    config = _analysis_config(args)
    data = _load_json(args.spec, "synth spec")
    if not isinstance(data, dict):
        raise UsageError("synth spec must hold a JSON object")
    spec = UtteranceSpec.from_dict(data)
    write_wav(synth_utterance(spec), args.out)
    sys.stdout.write(dumps(expected_features(spec, config).to_dict()))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="voxaffect", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"voxaffect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("calibrate", help="build a normal-state baseline profile")
    p.add_argument("inputs", nargs="+", metavar="WAV")
    p.add_argument("-o", "--out", required=True, metavar="PROFILE")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("analyze", help="classify a recording against a baseline")
    p.add_argument("input", metavar="WAV")
    p.add_argument("-b", "--baseline", required=True, metavar="PROFILE")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_analysis_flags(p)
    _add_threshold_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("features", help="print the feature vector of a recording")
    p.add_argument("input", metavar="WAV")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("synth", help="render a synthetic utterance")
    p.add_argument("spec", metavar="SPEC_JSON")
    p.add_argument("out", metavar="WAV")
    _add_analysis_flags(p)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, SpecificationError) as exc:
        print(f"voxaffect: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSpeechError as exc:
        print(f"voxaffect: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (AudioInputError, AudioOutputError) as exc:
        print(f"voxaffect: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())

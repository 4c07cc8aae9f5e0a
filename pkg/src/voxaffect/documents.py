"""JSON and CSV documents written by the command-line tool.

Numbers are rounded to 6 significant digits and keys keep a fixed order, so
repeated runs print byte-identical output.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass

from .emotion import BaselineProfile, DeviationVector, EmotionReport, ThresholdConfig
from .errors import SpecificationError
from .features import FEATURE_NAMES, AnalysisConfig, FeatureVector

CSV_HEADER = FEATURE_NAMES + ("label", "confidence")
SIGNIFICANT_DIGITS = 6


def round_sig(value):
    """Recursively round floats to 6 significant digits."""
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return float(f"{value:.{SIGNIFICANT_DIGITS}g}")
    if isinstance(value, dict):
        return {k: round_sig(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [round_sig(v) for v in value]
    return value


def dumps(obj) -> str:
    return json.dumps(round_sig(obj), indent=2) + "\n"


@dataclass(frozen=True)
class ReportDocument:
    tool_version: str
    input_path: str
    features: FeatureVector
    baseline: BaselineProfile
    deviations: DeviationVector
    label: str
    confidence: float
    fired_rules: tuple
    analysis: AnalysisConfig
    thresholds: ThresholdConfig

    @classmethod
    def from_report(cls, version, input_path, features, baseline, report: EmotionReport,
                    analysis) -> "ReportDocument":
        return cls(
            tool_version=version,
            input_path=str(input_path),
            features=features,
            baseline=baseline,
            deviations=report.deviations,
            label=report.label.value,
            confidence=report.confidence,
            fired_rules=tuple(c.to_dict() for c in report.fired_rules),
            analysis=analysis,
            thresholds=report.thresholds_used,
        )

    def to_dict(self) -> dict:
        return {
            "tool_version": self.tool_version,
            "input_path": self.input_path,
            "features": self.features.to_dict(),
            "baseline": self.baseline.to_dict(),
            "deviations": self.deviations.to_dict(),
            "label": self.label,
            "confidence": self.confidence,
            "fired_rules": [dict(r) for r in self.fired_rules],
            "config": {
                "analysis": self.analysis.to_dict(),
                "thresholds": self.thresholds.to_dict(),
            },
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ReportDocument":
        try:
            return cls(
                tool_version=str(data["tool_version"]),
                input_path=str(data["input_path"]),
                features=FeatureVector.from_dict(data["features"]),
                baseline=BaselineProfile.from_dict(data["baseline"]),
                deviations=DeviationVector.from_dict(data["deviations"]),
                label=str(data["label"]),
                confidence=float(data["confidence"]),
                fired_rules=tuple(dict(r) for r in data["fired_rules"]),
                analysis=AnalysisConfig.from_dict(data["config"]["analysis"]),
                thresholds=ThresholdConfig.from_dict(data["config"]["thresholds"]),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecificationError(f"malformed report document: {exc}") from exc


def csv_row(features: FeatureVector, label=None, confidence=None) -> str:
    """Header plus one data row, columns in table order."""
    values = list(features.as_tuple()) + [confidence]
    cells = ["" if v is None else repr(round_sig(float(v))) for v in values]
    cells.insert(len(FEATURE_NAMES), label or "")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    writer.writerow(cells)
    return buf.getvalue()

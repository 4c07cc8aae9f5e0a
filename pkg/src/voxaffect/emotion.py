"""Baseline calibration and deviation-based emotion classification.

A speaker's normal-state recordings are averaged into a
:class:`BaselineProfile`. A new utterance is compared against it attribute by
attribute, and three rule sets decide the label:

* Normal   - every deviation inside the normal band
* Angry    - higher pitch, much louder, shorter gaps between words
* Panicked - higher pitch, longer gaps, slower attack, not much louder

Descend time is reported but drives no rule.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np

from .errors import CalibrationError, DegenerateBaselineError, SpecificationError
from .features import FEATURE_NAMES, FeatureVector

DEVIATION_NAMES = ("pitch_pct", "spl_db", "ascend_pct", "descend_pct", "gap_pct")


class Label(str, Enum):
    NORMAL = "normal"
    ANGRY = "angry"
    PANICKED = "panicked"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class BaselineProfile:
    mean: FeatureVector
    std: FeatureVector
    n_samples: int

    def to_dict(self) -> dict:
        return {"mean": self.mean.to_dict(), "std": self.std.to_dict(),
                "n_samples": self.n_samples}

    @classmethod
    def from_dict(cls, data: dict) -> "BaselineProfile":
        try:
            profile = cls(FeatureVector.from_dict(data["mean"]),
                          FeatureVector.from_dict(data["std"]),
                          int(data["n_samples"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecificationError(f"malformed baseline profile: {exc}") from exc
        if profile.n_samples < 1:
            raise SpecificationError("baseline profile needs n_samples >= 1")
        return profile


@dataclass(frozen=True)
class DeviationVector:
    """Relative change in percent, except ``spl_db`` which is a dB difference."""

    pitch_pct: Optional[float]
    spl_db: Optional[float]
    ascend_pct: Optional[float]
    descend_pct: Optional[float]
    gap_pct: Optional[float]

    def as_tuple(self):
        return tuple(getattr(self, n) for n in DEVIATION_NAMES)

    def to_dict(self) -> dict:
        return {n: getattr(self, n) for n in DEVIATION_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "DeviationVector":
        return cls(**{n: None if data.get(n) is None else float(data[n])
                      for n in DEVIATION_NAMES})


@dataclass(frozen=True)
class NormalBand:
    pitch_pct: float = 5.0
    spl_db: float = 3.0
    ascend_pct: float = 5.0
    descend_pct: float = 5.0
    gap_pct: float = 5.0


@dataclass(frozen=True)
class ThresholdConfig:
    """Rule thresholds. The defaults sit between the deltas that separate the
    reference angry and panicked recordings from their normal counterparts,
    so all of them classify with margin."""

    pitch_up_pct: float = 10.0
    spl_up_db: float = 8.0
    gap_down_pct: float = -10.0
    gap_up_pct: float = 5.0
    ascend_up_pct: float = 5.0
    normal_band: NormalBand = field(default_factory=NormalBand)

    def __post_init__(self):
        band = self.normal_band
        if isinstance(band, dict):
            band = NormalBand(**{k: float(v) for k, v in band.items()})
            object.__setattr__(self, "normal_band", band)
        if min(asdict(band).values()) <= 0:
            raise SpecificationError("normal band half-widths must be positive")
        if self.pitch_up_pct <= band.pitch_pct:
            raise SpecificationError("pitch_up_pct must exceed the normal pitch band")
        if self.spl_up_db <= band.spl_db:
            raise SpecificationError("spl_up_db must exceed the normal SPL band")
        if not self.gap_down_pct < 0 < self.gap_up_pct:
            raise SpecificationError("need gap_down_pct < 0 < gap_up_pct")
        if self.ascend_up_pct <= 0:
            raise SpecificationError("ascend_up_pct must be positive")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ThresholdConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SpecificationError(f"unknown threshold fields: {sorted(unknown)}")
        kwargs = {k: float(v) for k, v in data.items() if k != "normal_band"}
        if "normal_band" in data:
            try:
                kwargs["normal_band"] = NormalBand(
                    **{k: float(v) for k, v in data["normal_band"].items()})
            except TypeError as exc:
                raise SpecificationError(f"malformed normal_band: {exc}") from exc
        return cls(**kwargs)


class Condition(NamedTuple):
    rule: str
    condition: str
    value: Optional[float]
    threshold: float
    satisfied: bool
    margin: Optional[float]

    def to_dict(self) -> dict:
        return self._asdict()


@dataclass(frozen=True)
class EmotionReport:
    label: Label
    deviations: DeviationVector
    confidence: float
    fired_rules: tuple
    thresholds_used: ThresholdConfig


def calibrate(vectors) -> BaselineProfile:
    """Mean and population standard deviation of normal-state vectors.

    An attribute absent from any input is absent from the profile.
    """
    vectors = list(vectors)
    if not vectors:
        raise CalibrationError("calibration needs at least one feature vector")
    means, stds = {}, {}
    for name in FEATURE_NAMES:
        column = [getattr(v, name) for v in vectors]
        if any(c is None for c in column):
            means[name] = stds[name] = None
            continue
        arr = np.asarray(column, dtype=np.float64)
        means[name] = float(arr.mean())
        stds[name] = float(arr.std()) if len(arr) > 1 else 0.0
    return BaselineProfile(FeatureVector(**means), FeatureVector(**stds), len(vectors))


def _pct(value, ref, name):
    if value is None or ref is None:
        return None
    if ref == 0:
        raise DegenerateBaselineError(f"baseline {name} is zero")
    return (value - ref) / ref * 100.0


def compute_deviation(features: FeatureVector, baseline: BaselineProfile) -> DeviationVector:
    b = baseline.mean
    spl = None if features.spl_db is None or b.spl_db is None else features.spl_db - b.spl_db
    return DeviationVector(
        pitch_pct=_pct(features.pitch_hz, b.pitch_hz, "pitch_hz"),
        spl_db=spl,
        ascend_pct=_pct(features.ascend_s, b.ascend_s, "ascend_s"),
        descend_pct=_pct(features.descend_s, b.descend_s, "descend_s"),
        gap_pct=_pct(features.gap_s, b.gap_s, "gap_s"),
    )


def _at_least(rule, name, value, threshold):
    if value is None:
        return Condition(rule, f"{name} >= {threshold:g}", None, threshold, False, None)
    return Condition(rule, f"{name} >= {threshold:g}", value, threshold,
                     value >= threshold, (value - threshold) / abs(threshold))


def _at_most(rule, name, value, threshold, strict=False):
    op = "<" if strict else "<="
    if value is None:
        return Condition(rule, f"{name} {op} {threshold:g}", None, threshold, False, None)
    ok = value < threshold if strict else value <= threshold
    return Condition(rule, f"{name} {op} {threshold:g}", value, threshold, ok,
                     (threshold - value) / abs(threshold))


def rule_trace(deviation: DeviationVector, thresholds: ThresholdConfig) -> list[Condition]:
    """Every condition of every rule, evaluated, in rule order."""
    t = thresholds
    d = deviation
    band = t.normal_band
    trace = []
    for name in DEVIATION_NAMES:
        value = getattr(d, name)
        width = getattr(band, name)
        cond = f"|{name}| <= {width:g}"
        if value is None:
            # an absent attribute carries no evidence of deviation
            trace.append(Condition("normal", cond, None, width, True, None))
        else:
            trace.append(Condition("normal", cond, value, width, abs(value) <= width,
                                   1.0 - abs(value) / width))
    trace += [
        _at_least("angry", "pitch_pct", d.pitch_pct, t.pitch_up_pct),
        _at_least("angry", "spl_db", d.spl_db, t.spl_up_db),
        _at_most("angry", "gap_pct", d.gap_pct, t.gap_down_pct),
        _at_least("panicked", "pitch_pct", d.pitch_pct, t.pitch_up_pct),
        _at_least("panicked", "gap_pct", d.gap_pct, t.gap_up_pct),
        _at_least("panicked", "ascend_pct", d.ascend_pct, t.ascend_up_pct),
        _at_most("panicked", "spl_db", d.spl_db, t.spl_up_db, strict=True),
    ]
    return trace


def classify(deviation: DeviationVector, thresholds: Optional[ThresholdConfig] = None) -> EmotionReport:
    """Label a deviation vector; rules are tried Normal, Angry, Panicked.

    Confidence is the smallest relative margin among the winning rule's
    conditions, clamped to [0, 1]. Indeterminate has confidence 0.
    """
    thresholds = thresholds or ThresholdConfig()
    trace = rule_trace(deviation, thresholds)
    for label in (Label.NORMAL, Label.ANGRY, Label.PANICKED):
        conds = [c for c in trace if c.rule == label.value]
        if all(c.satisfied for c in conds):
            margins = [c.margin for c in conds if c.margin is not None]
            conf = min(margins) if margins else 1.0
            conf = 0.0 if math.isnan(conf) else min(max(conf, 0.0), 1.0)
            return EmotionReport(label, deviation, conf, tuple(conds), thresholds)
    return EmotionReport(Label.INDETERMINATE, deviation, 0.0, (), thresholds)

"""Synthetic utterances with analytically known features.

A word is a cosine at ``f0_hz`` under a trapezoid: linear rise over
``attack_s``, flat ``sustain_s``, linear fall over ``decay_s``. Words are
separated by ``gap_after_s`` of exact digital silence, so every quantity the
extractor measures has a closed-form expected value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .audio_io import MIN_SAMPLE_RATE, AudioBuffer
from .errors import SpecificationError
from .features import AnalysisConfig, FeatureVector

MIN_WORD_S = 0.05
TIME_TOLERANCE_S = 0.015
PITCH_TOLERANCE_REL = 0.01
SPL_TOLERANCE_DB = 0.5


@dataclass(frozen=True)
class WordSpec:
    f0_hz: float
    amplitude: float
    attack_s: float = 0.0
    sustain_s: float = 0.3
    decay_s: float = 0.0
    gap_after_s: float = 0.12

    @property
    def duration_s(self) -> float:
        return self.attack_s + self.sustain_s + self.decay_s

    def validate(self, sample_rate: int) -> None:
        if not 0 < self.f0_hz < sample_rate / 2:
            raise SpecificationError(f"f0_hz={self.f0_hz} outside (0, {sample_rate / 2})")
        if not 0 < self.amplitude <= 1:
            raise SpecificationError(f"amplitude={self.amplitude} outside (0, 1]")
        if min(self.attack_s, self.sustain_s, self.decay_s, self.gap_after_s) < 0:
            raise SpecificationError("word timings must be non-negative")
        if self.duration_s < MIN_WORD_S - 1e-12:
            raise SpecificationError(
                f"word lasts {self.duration_s:.3f} s, shorter than {MIN_WORD_S} s")


@dataclass(frozen=True)
class UtteranceSpec:
    words: tuple = field(default_factory=tuple)
    sample_rate: int = 16000
    lead_silence_s: float = 0.2
    trail_silence_s: float = 0.2

    def __post_init__(self):
        object.__setattr__(self, "words", tuple(self.words))

    def validate(self) -> None:
        if not self.words:
            raise SpecificationError("utterance has no words")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate < MIN_SAMPLE_RATE:
            raise SpecificationError(f"sample_rate must be an integer >= {MIN_SAMPLE_RATE}")
        if self.lead_silence_s < 0 or self.trail_silence_s < 0:
            raise SpecificationError("silence padding must be non-negative")
        for w in self.words:
            w.validate(self.sample_rate)

    def to_dict(self) -> dict:
        return {
            "sample_rate": self.sample_rate,
            "lead_silence_s": self.lead_silence_s,
            "trail_silence_s": self.trail_silence_s,
            "words": [
                {"f0_hz": w.f0_hz, "amplitude": w.amplitude, "attack_s": w.attack_s,
                 "sustain_s": w.sustain_s, "decay_s": w.decay_s,
                 "gap_after_s": w.gap_after_s}
                for w in self.words
            ],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "UtteranceSpec":
        try:
            words = tuple(
                WordSpec(**{k: float(v) for k, v in w.items()}) for w in data["words"])
            spec = cls(
                words=words,
                sample_rate=int(data.get("sample_rate", 16000)),
                lead_silence_s=float(data.get("lead_silence_s", 0.2)),
                trail_silence_s=float(data.get("trail_silence_s", 0.2)),
            )
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise SpecificationError(f"malformed utterance spec: {exc}") from exc
        spec.validate()
        return spec

    def transposed(self, pitch=1.0, amplitude=1.0, gap=1.0, attack=1.0, decay=1.0) -> "UtteranceSpec":
        """Copy with every word's parameters multiplied by the given ratios."""
        words = tuple(
            replace(w, f0_hz=w.f0_hz * pitch, amplitude=min(1.0, w.amplitude * amplitude),
                    gap_after_s=w.gap_after_s * gap, attack_s=w.attack_s * attack,
                    decay_s=w.decay_s * decay)
            for w in self.words)
        return replace(self, words=words)


def _n(seconds, fs):
    return int(round(seconds * fs))


def word_schedule(spec: UtteranceSpec) -> list[tuple[int, int]]:
    """``(start, stop)`` sample ranges of each word in the synthesized buffer."""
    fs = spec.sample_rate
    pos = _n(spec.lead_silence_s, fs)
    out = []
    for i, w in enumerate(spec.words):
        length = _n(w.attack_s, fs) + _n(w.sustain_s, fs) + _n(w.decay_s, fs)
        out.append((pos, pos + length))
        pos += length
        if i < len(spec.words) - 1:
            pos += _n(w.gap_after_s, fs)
    return out


def synth_utterance(spec: UtteranceSpec) -> AudioBuffer:
    """Render ``spec``; deterministic, bit-identical for equal specs."""
    spec.validate()
    fs = spec.sample_rate
    schedule = word_schedule(spec)
    total = schedule[-1][1] + _n(spec.trail_silence_s, fs)
    out = np.zeros(total)
    for w, (start, stop) in zip(spec.words, schedule):
        na, ns, nd = _n(w.attack_s, fs), _n(w.sustain_s, fs), _n(w.decay_s, fs)
        shape = np.concatenate((
            np.arange(1, na + 1) / max(na, 1),
            np.ones(ns),
            np.arange(nd, 0, -1) / max(nd, 1),
        ))
        carrier = np.cos(2.0 * np.pi * w.f0_hz * np.arange(stop - start) / fs)
        out[start:stop] = w.amplitude * (shape * carrier)
    return AudioBuffer(out, fs)


@dataclass(frozen=True)
class ExpectedFeatures:
    """Oracle values with absolute per-component tolerances."""

    features: FeatureVector
    tolerance: FeatureVector
    word_count: int

    def check(self, measured: FeatureVector) -> dict:
        """Per-component ``True`` when ``measured`` is within tolerance."""
        out = {}
        for name, want, tol in zip(("pitch_hz", "spl_db", "ascend_s", "descend_s", "gap_s"),
                                   self.features.as_tuple(), self.tolerance.as_tuple()):
            got = getattr(measured, name)
            if want is None or got is None:
                out[name] = want is None and got is None
            else:
                out[name] = abs(got - want) <= tol
        return out

    def to_dict(self) -> dict:
        return {
            "features": self.features.to_dict(),
            "tolerance": self.tolerance.to_dict(),
            "word_count": self.word_count,
        }


def expected_features(spec: UtteranceSpec, config: Optional[AnalysisConfig] = None) -> ExpectedFeatures:
    """Closed-form features of ``synth_utterance(spec)``.

    A linear ramp crosses 10% and 90% of its height 0.8 of its length apart;
    ramps shorter than the envelope window are smeared to about one window.
    The level is that of the constructed waveform over the word regions: a
    ramp of length T carries the energy of T/3 seconds of sustain, and a
    cosine of amplitude A has mean square A**2 / 2.
    """
    config = config or AnalysisConfig()
    spec.validate()
    words = spec.words
    window = config.envelope_window_s

    amp_total = sum(w.amplitude for w in words)
    pitch = sum(w.amplitude * w.f0_hz for w in words) / amp_total

    energy = sum(0.5 * w.amplitude ** 2 * (w.attack_s / 3 + w.sustain_s + w.decay_s / 3)
                 for w in words)
    duration = sum(w.duration_s for w in words)
    spl = 10.0 * math.log10(energy / duration) + config.spl_offset_db

    ascend = float(np.mean([max(0.8 * w.attack_s, window) for w in words]))
    descend = float(np.mean([max(0.8 * w.decay_s, window) for w in words]))
    gap = float(np.mean([w.gap_after_s for w in words[:-1]])) if len(words) > 1 else None

    t_tol = max(TIME_TOLERANCE_S, window)
    return ExpectedFeatures(
        features=FeatureVector(pitch, spl, ascend, descend, gap),
        tolerance=FeatureVector(PITCH_TOLERANCE_REL * pitch, SPL_TOLERANCE_DB,
                                t_tol, t_tol, TIME_TOLERANCE_S if gap is not None else None),
        word_count=len(words),
    )

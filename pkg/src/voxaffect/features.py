"""Vocal parameter extraction: pitch, level, envelope timing and word gaps.

The pipeline runs at a fixed statistic rate (100 ms frames by default):

    frames -> per-frame pitch / level
    RMS envelope -> word segments -> per-word attack/decay times
    means over the in-word material -> FeatureVector
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields
from typing import NamedTuple, Optional

import numpy as np

from . import _kernels
from .audio_io import AudioBuffer
from .errors import NoSpeechError, SpecificationError

SILENCE_GATE_RMS = 10 ** (-60 / 20)
SPL_FLOOR_DB = -120.0

# The period is taken from the first correlation peak reaching this fraction
# of the strongest one, so multiples of the period are not picked.
OCTAVE_RATIO = 0.9
# Word boundaries are extended outward from the detection threshold down to
# this fraction of the global envelope peak (or the noise floor, if higher).
BOUNDARY_FLOOR_REL = 1e-3


@dataclass(frozen=True)
class AnalysisConfig:
    frame_len_s: float = 0.100
    hop_s: float = 0.100
    pitch_min_hz: float = 50.0
    pitch_max_hz: float = 2000.0
    voicing_threshold: float = 0.30
    envelope_window_s: float = 0.010
    segment_rel_threshold: float = 0.10
    min_word_s: float = 0.050
    min_gap_s: float = 0.030
    spl_offset_db: float = 0.0

    def __post_init__(self):
        if not 0 < self.hop_s <= self.frame_len_s:
            raise SpecificationError("need 0 < hop_s <= frame_len_s")
        if not 0 < self.pitch_min_hz < self.pitch_max_hz:
            raise SpecificationError("need 0 < pitch_min_hz < pitch_max_hz")
        if not 0.0 <= self.voicing_threshold <= 1.0:
            raise SpecificationError("voicing_threshold must lie in [0, 1]")
        if not 0 < self.segment_rel_threshold < 1:
            raise SpecificationError("segment_rel_threshold must lie in (0, 1)")
        if self.envelope_window_s <= 0 or self.min_word_s <= 0 or self.min_gap_s <= 0:
            raise SpecificationError(
                "envelope_window_s, min_word_s and min_gap_s must be positive")

    def check_rate(self, sample_rate: int) -> None:
        if self.pitch_max_hz >= sample_rate / 2:
            raise SpecificationError(
                f"pitch_max_hz={self.pitch_max_hz} must be below Nyquist "
                f"({sample_rate / 2} Hz)")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise SpecificationError(f"unknown analysis fields: {sorted(unknown)}")
        return cls(**{k: float(v) for k, v in data.items()})


@dataclass(frozen=True)
class WordSegment:
    start_s: float
    end_s: float
    peak_env: float
    ascend_s: float
    descend_s: float

    @property
    def duration_s(self) -> float:
        return self.end_s - self.start_s


FEATURE_NAMES = ("pitch_hz", "spl_db", "ascend_s", "descend_s", "gap_s")


@dataclass(frozen=True)
class FeatureVector:
    """Mean vocal statistics of one recording. ``None`` marks an absent value
    (no voiced frame, or fewer than two words for the gap)."""

    pitch_hz: Optional[float]
    spl_db: Optional[float]
    ascend_s: Optional[float]
    descend_s: Optional[float]
    gap_s: Optional[float]

    def as_tuple(self):
        return tuple(getattr(self, name) for name in FEATURE_NAMES)

    def to_dict(self) -> dict:
        return {name: getattr(self, name) for name in FEATURE_NAMES}

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureVector":
        missing = [n for n in FEATURE_NAMES if n not in data]
        if missing:
            raise SpecificationError(f"feature vector lacks {missing}")
        return cls(**{n: None if data[n] is None else float(data[n]) for n in FEATURE_NAMES})


class Frame(NamedTuple):
    start_s: float
    samples: np.ndarray


def frame_signal(buffer: AudioBuffer, config: AnalysisConfig) -> list[Frame]:
    """Cut ``buffer`` into fixed frames; a trailing partial frame is dropped."""
    fs = buffer.sample_rate
    size = int(round(config.frame_len_s * fs))
    hop = int(round(config.hop_s * fs))
    x = buffer.samples
    if size <= 0 or x.size < size:
        return []
    count = 1 + (x.size - size) // hop
    return [Frame(i * hop / fs, x[i * hop:i * hop + size]) for i in range(count)]


def _parabolic(r, k):
    """Vertex offset and height of the parabola through r[k-1..k+1]."""
    y0, y1, y2 = r[k - 1], r[k], r[k + 1]
    den = y0 - 2.0 * y1 + y2
    if den >= 0.0:
        return 0.0, float(y1)
    delta = float(np.clip(0.5 * (y0 - y2) / den, -0.5, 0.5))
    return delta, float(y1 - 0.25 * (y0 - y2) * delta)


def estimate_pitch_frame(frame, sample_rate: int, config: AnalysisConfig) -> Optional[float]:
    """Fundamental frequency of one frame, or ``None`` when unvoiced.

    Uses the normalized autocorrelation over the lag range implied by
    ``pitch_min_hz``/``pitch_max_hz``. The first peak within
    ``OCTAVE_RATIO`` of the strongest one gives the period; the estimate is
    then tightened by re-locating the peaks at 2, 4, 8... periods and
    dividing, which shrinks the parabolic-interpolation error for short
    periods.
    """
    x = np.ascontiguousarray(getattr(frame, "samples", frame), dtype=np.float64)
    n = x.size
    if n < 4 or math.sqrt(float(np.dot(x, x)) / n) <= SILENCE_GATE_RMS:
        return None

    lag_lo = max(2, int(math.floor(sample_rate / config.pitch_max_hz)))
    lag_hi = min(int(math.ceil(sample_rate / config.pitch_min_hz)), n - 2)
    if lag_hi <= lag_lo:
        return None

    # r[k] holds the lag lag_lo - 1 + k so every candidate has both neighbours
    base = lag_lo - 1
    r = _kernels.nccf(x, base, lag_hi + 1)
    inner = np.arange(1, r.size - 1)
    is_peak = (r[inner] > r[inner - 1]) & (r[inner] >= r[inner + 1])
    peaks = inner[is_peak]
    if peaks.size == 0:
        return None
    # short periods fall between lag samples; compare interpolated heights
    heights = np.array([_parabolic(r, k)[1] for k in peaks])
    best = float(heights.max())
    if best < config.voicing_threshold:
        return None

    first = int(np.argmax(heights >= OCTAVE_RATIO * best))
    k0 = int(peaks[first])
    delta, height0 = _parabolic(r, k0)
    period = base + k0 + delta

    mult = 2
    while True:
        lo = int(math.ceil(mult * period - period / 4)) - base
        hi = int(math.floor(mult * period + period / 4)) - base
        if lo < 1 or hi > r.size - 2 or hi < lo:
            break
        k = lo + int(np.argmax(r[lo:hi + 1]))
        if not (r[k] > r[k - 1] and r[k] >= r[k + 1]):
            break
        delta, height = _parabolic(r, k)
        if height < OCTAVE_RATIO * height0:
            break
        period = (base + k + delta) / mult
        mult *= 2

    f0 = sample_rate / period
    if not config.pitch_min_hz <= f0 <= config.pitch_max_hz:
        return None
    return f0


def _rms_db(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    ms = float(np.dot(x, x)) / x.size if x.size else 0.0
    if ms <= 0.0:
        return SPL_FLOOR_DB
    return max(10.0 * math.log10(ms), SPL_FLOOR_DB)


def compute_frame_spl(frame, config: AnalysisConfig) -> float:
    """``20 log10(rms) + spl_offset_db``. The dBFS part floors at -120 dB."""
    return _rms_db(getattr(frame, "samples", frame)) + config.spl_offset_db


def envelope_width(sample_rate: int, config: AnalysisConfig,
                   pitch_hz: Optional[float] = None) -> int:
    """Envelope window in samples.

    With a pitch hint the window is stretched to the next whole number of
    half periods, which cancels the ripple that ``x**2`` has at twice the
    fundamental.
    """
    width = config.envelope_window_s * sample_rate
    if pitch_hz:
        half = sample_rate / (2.0 * pitch_hz)
        width = math.ceil(width / half - 1e-9) * half
    return max(1, int(round(width)))


def extract_envelope(buffer: AudioBuffer, config: AnalysisConfig,
                     pitch_hz: Optional[float] = None) -> np.ndarray:
    """Centered moving RMS of the signal, same length as the input.

    Edges are padded by reflection so material starting at sample 0 keeps a
    sensible envelope.
    """
    x = buffer.samples
    if x.size == 0:
        return np.zeros(0)
    width = envelope_width(buffer.sample_rate, config, pitch_hz)
    left = width // 2
    right = width - 1 - left
    mode = "reflect" if x.size > 1 else "edge"
    padded = np.pad(x, (left, right), mode=mode)
    return np.asarray(_kernels.moving_rms(np.ascontiguousarray(padded), width))


def _crossing(seg, i, level):
    """Fractional index where ``seg`` passes ``level`` between i and i+1."""
    a, b = seg[i], seg[i + 1]
    if b == a:
        return float(i)
    return i + float(np.clip((level - a) / (b - a), 0.0, 1.0))


def measure_attack_decay(envelope, bounds, sample_rate: int) -> tuple[float, float]:
    """10%-90% rise and 90%-10% fall times of the envelope inside ``bounds``.

    ``bounds`` is a ``(start, stop)`` sample range. The rise runs from the
    last upward crossing of 10% of the local peak before the peak to the
    next 90% crossing; the fall runs from the last sample at or above 90% to
    the next drop below 10%. Crossing points are linearly interpolated.
    """
    start, stop = int(bounds[0]), int(bounds[1])
    seg = np.asarray(envelope[start:stop], dtype=np.float64)
    if seg.size < 2:
        return 0.0, 0.0
    p = int(np.argmax(seg))
    peak = float(seg[p])
    if peak <= 0.0:
        return 0.0, 0.0
    lo, hi = 0.1 * peak, 0.9 * peak

    below = np.flatnonzero(seg[:p + 1] < lo)
    if below.size:
        i = int(below[-1])
        t_lo = _crossing(seg, i, lo)
        first = i + 1
    else:
        t_lo = first = 0
    j = first + int(np.argmax(seg[first:p + 1] >= hi))
    t_hi = _crossing(seg, j - 1, hi) if j > first else float(j)
    ascend = max(0.0, t_hi - t_lo)

    k = int(np.flatnonzero(seg >= hi)[-1])
    after = np.flatnonzero(seg[k:] < lo)
    if after.size:
        m = k + int(after[0])
        t_end = _crossing(seg, m - 1, lo)
    else:
        t_end = float(seg.size - 1)
    descend = max(0.0, t_end - k)

    limit = seg.size
    return min(ascend, limit) / sample_rate, min(descend, limit) / sample_rate


def _runs(mask):
    edges = np.diff(np.concatenate(([0], mask.astype(np.int8), [0])))
    return np.flatnonzero(edges == 1), np.flatnonzero(edges == -1)


def segment_words(envelope, sample_rate: int, config: AnalysisConfig,
                  window: Optional[int] = None) -> list[WordSegment]:
    """Split an envelope into word segments.

    Words are detected where the envelope exceeds ``segment_rel_threshold``
    times its global peak. Each detection is widened down to the boundary
    floor to find the true onset and release, then pulled in by half the
    envelope window (``window`` samples, default from the config) to undo
    the smoothing spread. Segments closer than ``min_gap_s`` are merged and
    those shorter than ``min_word_s`` dropped.
    """
    env = np.asarray(envelope, dtype=np.float64)
    n = env.size
    if n == 0:
        return []
    peak = float(env.max())
    if peak <= 0.0:
        return []
    if window is None:
        window = envelope_width(sample_rate, config)
    half = window // 2

    thr = config.segment_rel_threshold * peak
    starts, stops = _runs(env > thr)
    floor = min(thr, max(BOUNDARY_FLOOR_REL * peak, 2.0 * float(np.percentile(env, 10))))
    quiet = np.flatnonzero(env <= floor)

    spans = []
    for s, e in zip(starts, stops):
        i = np.searchsorted(quiet, s) - 1
        ext_s = int(quiet[i]) + 1 if i >= 0 else 0
        i = np.searchsorted(quiet, e)
        ext_e = int(quiet[i]) if i < quiet.size else n
        if spans and ext_s <= spans[-1][3]:
            prev = spans[-1]
            spans[-1] = [prev[0], e, prev[2], ext_e]
            continue
        spans.append([s, e, ext_s, ext_e])

    # each word: [start, stop, extended start, extended stop] in samples
    words = []
    for s, e, ext_s, ext_e in spans:
        cs = ext_s + half if ext_s > 0 else 0
        ce = ext_e - half if ext_e < n else n
        if ce <= cs:
            cs, ce = s, e
        words.append([cs, ce, ext_s, ext_e])

    min_gap = config.min_gap_s * sample_rate
    merged = []
    for w in words:
        if merged and w[0] - merged[-1][1] < min_gap:
            merged[-1][1] = w[1]
            merged[-1][3] = w[3]
        else:
            merged.append(w)

    min_len = config.min_word_s * sample_rate
    segments = []
    for cs, ce, ext_s, ext_e in merged:
        if ce - cs < min_len:
            continue
        ascend, descend = measure_attack_decay(env, (ext_s, ext_e), sample_rate)
        dur = (ce - cs) / sample_rate
        segments.append(WordSegment(
            start_s=cs / sample_rate,
            end_s=ce / sample_rate,
            peak_env=float(env[cs:ce].max()),
            ascend_s=min(ascend, dur),
            descend_s=min(descend, dur),
        ))
    return segments


def mean_word_gap(segments) -> Optional[float]:
    """Mean silence between consecutive segments; ``None`` below two words."""
    if len(segments) < 2:
        return None
    gaps = [b.start_s - a.end_s for a, b in zip(segments, segments[1:])]
    return float(np.mean(gaps))


def _mean_or_none(values):
    return float(np.mean(values)) if len(values) else None


class UtteranceAnalysis(NamedTuple):
    features: FeatureVector
    segments: list
    frame_stats: list


def extract_features(buffer: AudioBuffer, config: Optional[AnalysisConfig] = None) -> FeatureVector:
    """Full pipeline from a buffer to its :class:`FeatureVector`.

    Pitch is the mean over voiced frames centred inside a word. Level is the
    energy average over the in-word samples plus ``spl_offset_db``, so a
    constant-level word reads the same whatever its alignment to the frame
    grid. Raises :class:`NoSpeechError` when no word is found.
    """
    return analyze_utterance(buffer, config).features


def analyze_utterance(buffer: AudioBuffer, config: Optional[AnalysisConfig] = None) -> UtteranceAnalysis:
    """Like :func:`extract_features` but also returns the word segments and
    the per-frame ``(start_s, pitch_hz, spl_db)`` statistics."""
    config = config or AnalysisConfig()
    fs = buffer.sample_rate
    config.check_rate(fs)
    x = buffer.samples

    frames = frame_signal(buffer, config)
    pitches = [estimate_pitch_frame(f.samples, fs, config) for f in frames]
    stats = [(f.start_s, p, compute_frame_spl(f.samples, config))
             for f, p in zip(frames, pitches)]
    if x.size == 0:
        raise NoSpeechError(frame_stats=stats)

    voiced = [p for p in pitches if p is not None]
    hint = float(np.median(voiced)) if voiced else None
    width = envelope_width(fs, config, hint)
    env = extract_envelope(buffer, config, pitch_hz=hint)
    segments = segment_words(env, fs, config, window=width)
    if not segments:
        raise NoSpeechError(frame_stats=stats)

    mask = np.zeros(x.size, dtype=bool)
    for seg in segments:
        mask[int(round(seg.start_s * fs)):int(round(seg.end_s * fs))] = True

    frame_len = int(round(config.frame_len_s * fs))
    in_word = []
    for f, p in zip(frames, pitches):
        centre = int(round(f.start_s * fs)) + frame_len // 2
        if p is not None and centre < x.size and mask[centre]:
            in_word.append(p)

    spl = _rms_db(x[mask]) + config.spl_offset_db
    features = FeatureVector(
        pitch_hz=_mean_or_none(in_word),
        spl_db=spl,
        ascend_s=_mean_or_none([s.ascend_s for s in segments]),
        descend_s=_mean_or_none([s.descend_s for s in segments]),
        gap_s=mean_word_gap(segments),
    )
    return UtteranceAnalysis(features, segments, stats)

"""RIFF/WAVE reading and writing.

Everything is normalized to a mono float64 buffer in [-1, 1]. Integer PCM is
scaled by the largest positive code of its width, so +full-scale maps to
exactly 1.0 and the extra negative code of two's complement is clamped.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    AudioInputError,
    AudioOutputError,
    CorruptFileError,
    UnsupportedFormatError,
)

WAVE_FORMAT_PCM = 0x0001
WAVE_FORMAT_IEEE_FLOAT = 0x0003
WAVE_FORMAT_EXTENSIBLE = 0xFFFE

MIN_SAMPLE_RATE = 8000


@dataclass(frozen=True)
class AudioBuffer:
    """Mono signal with full scale at +/-1.0."""

    samples: np.ndarray = field(repr=False)
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise ValueError("AudioBuffer samples must be one-dimensional")
        if samples.size and (not np.all(np.isfinite(samples))
                             or np.max(np.abs(samples)) > 1.0):
            raise ValueError("AudioBuffer samples must lie in [-1, 1]")
        if int(self.sample_rate) != self.sample_rate or self.sample_rate < MIN_SAMPLE_RATE:
            raise ValueError(f"sample_rate must be an integer >= {MIN_SAMPLE_RATE}")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self):
        return self.samples.size

    @property
    def duration_s(self) -> float:
        return self.samples.size / self.sample_rate

    def scaled(self, k: float) -> "AudioBuffer":
        return AudioBuffer(self.samples * k, self.sample_rate)


def _iter_chunks(data: bytes):
    pos = 12
    while pos + 8 <= len(data):
        cid, size = struct.unpack_from("<4sI", data, pos)
        body_start = pos + 8
        yield cid, body_start, size
        pos = body_start + size + (size & 1)


def _decode_pcm(raw: bytes, width: int, channels: int) -> np.ndarray:
    if width == 1:
        ints = np.frombuffer(raw, dtype=np.uint8).astype(np.float64) - 128.0
        full = 127.0
    elif width == 2:
        ints = np.frombuffer(raw, dtype="<i2").astype(np.float64)
        full = 32767.0
    elif width == 3:
        b = np.frombuffer(raw, dtype=np.uint8).reshape(-1, 3).astype(np.int32)
        v = b[:, 0] | (b[:, 1] << 8) | (b[:, 2] << 16)
        v = np.where(v & 0x800000, v - 0x1000000, v)
        ints = v.astype(np.float64)
        full = 8388607.0
    elif width == 4:
        ints = np.frombuffer(raw, dtype="<i4").astype(np.float64)
        full = 2147483647.0
    else:
        raise UnsupportedFormatError(f"unsupported PCM sample width: {8 * width} bits")
    return (ints / full).reshape(-1, channels)


def read_wav(path) -> AudioBuffer:
    """Read a RIFF/WAVE file into a mono :class:`AudioBuffer`.

    Accepts integer PCM (8/16/24/32-bit) and 32-bit IEEE float, with any
    number of channels; channels are averaged per frame.
    """
    path = Path(path)
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise AudioInputError(f"cannot read {path}: {exc.strerror or exc}") from exc

    if len(data) < 12 or data[:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise UnsupportedFormatError(f"{path} is not a RIFF/WAVE file")

    fmt = None
    payload = None
    for cid, start, size in _iter_chunks(data):
        if cid == b"fmt ":
            if size < 16 or start + size > len(data):
                raise CorruptFileError(f"{path}: malformed fmt chunk")
            fmt = data[start:start + size]
        elif cid == b"data":
            if fmt is None:
                raise CorruptFileError(f"{path}: data chunk precedes fmt chunk")
            if start + size > len(data):
                raise CorruptFileError(
                    f"{path}: data chunk truncated ({len(data) - start} of {size} bytes)")
            payload = data[start:start + size]
            break
    if fmt is None:
        raise CorruptFileError(f"{path}: missing fmt chunk")
    if payload is None:
        raise CorruptFileError(f"{path}: missing data chunk")

    tag, channels, rate, _, block_align, bits = struct.unpack_from("<HHIIHH", fmt)
    if tag == WAVE_FORMAT_EXTENSIBLE:
        if len(fmt) < 40:
            raise CorruptFileError(f"{path}: short WAVE_FORMAT_EXTENSIBLE header")
        tag = struct.unpack_from("<H", fmt, 24)[0]
    if tag not in (WAVE_FORMAT_PCM, WAVE_FORMAT_IEEE_FLOAT):
        raise UnsupportedFormatError(f"{path}: unsupported codec 0x{tag:04x}")
    if channels < 1:
        raise CorruptFileError(f"{path}: zero channels")
    width = (bits + 7) // 8
    if block_align != width * channels:
        raise CorruptFileError(f"{path}: inconsistent block alignment")
    if len(payload) % block_align:
        raise CorruptFileError(f"{path}: data chunk ends mid-frame")

    if tag == WAVE_FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedFormatError(f"{path}: only 32-bit float is supported")
        frames = np.frombuffer(payload, dtype="<f4").astype(np.float64).reshape(-1, channels)
    else:
        frames = _decode_pcm(payload, width, channels)

    mono = frames[:, 0]
    if channels > 1:
        # frames whose channels agree keep that value exactly
        same = np.all(frames == frames[:, :1], axis=1)
        mono = np.where(same, mono, frames.mean(axis=1))
    mono = np.clip(np.nan_to_num(mono), -1.0, 1.0)
    try:
        return AudioBuffer(mono, rate)
    except ValueError as exc:
        raise UnsupportedFormatError(f"{path}: {exc}") from exc


def write_wav(buffer: AudioBuffer, path) -> None:
    """Write ``buffer`` as 16-bit mono PCM, clamping then rounding to the
    nearest code (full scale is +/-32767)."""
    codes = np.rint(np.clip(buffer.samples, -1.0, 1.0) * 32767.0).astype("<i2")
    raw = codes.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF", 36 + len(raw), b"WAVE",
        b"fmt ", 16, WAVE_FORMAT_PCM, 1, buffer.sample_rate,
        buffer.sample_rate * 2, 2, 16,
        b"data", len(raw),
    )
    try:
        with open(path, "wb") as fh:
            fh.write(header)
            fh.write(raw)
    except OSError as exc:
        raise AudioOutputError(f"cannot write {path}: {exc.strerror or exc}") from exc

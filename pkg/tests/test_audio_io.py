import struct

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from voxaffect.audio_io import AudioBuffer, read_wav, write_wav
from voxaffect.errors import (
    AudioInputError,
    AudioOutputError,
    CorruptFileError,
    UnsupportedFormatError,
)
from voxaffect.synth import UtteranceSpec, WordSpec, synth_utterance


def riff(fmt_tag, channels, rate, bits, payload, extra_chunks=b"", cb_size=None):
    block = channels * ((bits + 7) // 8)
    fmt = struct.pack("<HHIIHH", fmt_tag, channels, rate, rate * block, block, bits)
    if cb_size is not None:
        fmt += cb_size
    body = (b"WAVE" + extra_chunks + b"fmt " + struct.pack("<I", len(fmt)) + fmt
            + b"data" + struct.pack("<I", len(payload)) + payload)
    return b"RIFF" + struct.pack("<I", len(body)) + body


def test_zero_mono_16bit(tmp_path):
    path = tmp_path / "z.wav"
    path.write_bytes(riff(1, 1, 44100, 16, np.zeros(44100, "<i2").tobytes()))
    buf = read_wav(path)
    assert buf.sample_rate == 44100
    assert len(buf) == 44100
    assert not buf.samples.any()


def test_stereo_opposite_channels_cancel(tmp_path):
    half = int(round(0.5 * 32767))
    frames = np.tile(np.array([half, -half], "<i2"), 1000)
    path = tmp_path / "s.wav"
    path.write_bytes(riff(1, 2, 16000, 16, frames.tobytes()))
    assert not read_wav(path).samples.any()


@pytest.mark.parametrize("channels", [2, 3, 6])
def test_identical_channels_downmix_exactly(tmp_path, channels, rng):
    mono = rng.integers(-32767, 32768, 500).astype("<i2")
    path = tmp_path / "m.wav"
    path.write_bytes(riff(1, channels, 16000, 16, np.repeat(mono, channels).tobytes()))
    np.testing.assert_array_equal(read_wav(path).samples, mono / 32767.0)


@pytest.mark.parametrize("bits,codes,expected", [
    (8, np.array([128, 255, 1, 0], np.uint8), [0.0, 1.0, -1.0, -1.0]),
    (16, np.array([0, 32767, -32767, -32768], "<i2"), [0.0, 1.0, -1.0, -1.0]),
    (32, np.array([0, 2**31 - 1, -(2**31 - 1), -(2**31)], "<i4"), [0.0, 1.0, -1.0, -1.0]),
])
def test_integer_scaling(tmp_path, bits, codes, expected):
    path = tmp_path / "i.wav"
    path.write_bytes(riff(1, 1, 8000, bits, codes.tobytes()))
    np.testing.assert_allclose(read_wav(path).samples, expected)


def test_24bit(tmp_path):
    vals = [0, 8388607, -8388607, 4194304]
    raw = b"".join(v.to_bytes(3, "little", signed=True) for v in vals)
    path = tmp_path / "p.wav"
    path.write_bytes(riff(1, 1, 8000, 24, raw))
    np.testing.assert_allclose(read_wav(path).samples, [0, 1, -1, 4194304 / 8388607])


def test_float32_clipped(tmp_path):
    path = tmp_path / "f.wav"
    path.write_bytes(riff(3, 1, 8000, 32, np.array([0.25, -2.0, 1.5], "<f4").tobytes(),
                          cb_size=struct.pack("<H", 0)))
    np.testing.assert_allclose(read_wav(path).samples, [0.25, -1.0, 1.0])


def test_extensible_pcm(tmp_path):
    pcm_guid = struct.pack("<H", 1) + bytes.fromhex("000000001000800000aa00389b71")
    ext = struct.pack("<HHI", 22, 16, 0x4) + pcm_guid
    path = tmp_path / "e.wav"
    path.write_bytes(riff(0xFFFE, 1, 8000, 16, np.array([16384], "<i2").tobytes(),
                          cb_size=ext))
    np.testing.assert_allclose(read_wav(path).samples, [16384 / 32767])


def test_list_chunk_ignored(tmp_path):
    info = b"LIST" + struct.pack("<I", 9) + b"INFOabcde" + b"\x00"
    path = tmp_path / "l.wav"
    path.write_bytes(riff(1, 1, 8000, 16, np.array([100], "<i2").tobytes(), extra_chunks=info))
    np.testing.assert_allclose(read_wav(path).samples, [100 / 32767])


def test_missing_file(tmp_path):
    with pytest.raises(AudioInputError):
        read_wav(tmp_path / "nope.wav")


def test_compressed_codec_rejected(tmp_path):
    path = tmp_path / "a.wav"
    path.write_bytes(riff(0x55, 1, 8000, 16, b"\x00" * 8))
    with pytest.raises(UnsupportedFormatError):
        read_wav(path)


def test_not_riff(tmp_path):
    path = tmp_path / "x.wav"
    path.write_bytes(b"ID3\x03" + b"\x00" * 100)
    with pytest.raises(UnsupportedFormatError):
        read_wav(path)


def test_truncated_data(tmp_path):
    path = tmp_path / "t.wav"
    path.write_bytes(riff(1, 1, 8000, 16, np.zeros(100, "<i2").tobytes())[:-50])
    with pytest.raises(CorruptFileError):
        read_wav(path)


def test_write_empty(tmp_path):
    path = tmp_path / "e.wav"
    write_wav(AudioBuffer(np.zeros(0), 8000), path)
    data = path.read_bytes()
    assert len(data) == 44
    assert data[36:40] == b"data" and struct.unpack_from("<I", data, 40)[0] == 0
    assert len(read_wav(path)) == 0


def test_write_full_scale_symmetric(tmp_path):
    path = tmp_path / "f.wav"
    write_wav(AudioBuffer(np.array([1.0, -1.0]), 8000), path)
    data = path.read_bytes()
    assert struct.unpack_from("<HHIIHH", data, 20) == (1, 1, 8000, 16000, 2, 16)
    assert struct.unpack_from("<hh", data, 44) == (32767, -32767)


def test_write_unwritable(tmp_path):
    with pytest.raises(AudioOutputError):
        write_wav(AudioBuffer(np.zeros(4), 8000), tmp_path / "missing" / "x.wav")


def test_synth_utterance_round_trip(tmp_path):
    spec = UtteranceSpec([WordSpec(440.0, 0.5)] * 3, sample_rate=16000)
    buf = synth_utterance(spec)
    path = tmp_path / "u.wav"
    write_wav(buf, path)
    back = read_wav(path)
    assert back.sample_rate == 16000
    assert np.max(np.abs(back.samples - buf.samples)) <= 2.0 ** -15


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.integers(0, 300), elements=st.floats(-1.0, 1.0)))
def test_round_trip_property(tmp_path_factory, samples):
    path = tmp_path_factory.mktemp("rt") / "p.wav"
    write_wav(AudioBuffer(samples, 8000), path)
    back = read_wav(path).samples
    assert back.size == samples.size
    assert np.all(np.abs(back) <= 1.0)
    if samples.size:
        assert np.max(np.abs(back - samples)) <= 2.0 ** -15


def test_buffer_invariants():
    with pytest.raises(ValueError):
        AudioBuffer(np.array([1.5]), 8000)
    with pytest.raises(ValueError):
        AudioBuffer(np.zeros(3), 4000)
    assert AudioBuffer(np.zeros(8000), 8000).duration_s == 1.0

"""Numpy implementations of the hot kernels.

Used when the compiled extension is unavailable or disabled through
``VOXAFFECT_PURE_PYTHON=1``.
"""

import numpy as np


def nccf(frame, lag_lo, lag_hi):
    """Normalized cross-correlation of ``frame`` with itself for lags
    ``lag_lo..lag_hi`` inclusive.

    For lag ``t`` the value is ``sum(x[n] x[n+t]) / sqrt(E0 * E1)`` where the
    energies cover the two overlapping stretches, so a periodic signal scores
    close to 1 at every multiple of its period regardless of lag.
    """
    x = np.ascontiguousarray(frame, dtype=np.float64)
    n = x.size
    lags = np.arange(lag_lo, lag_hi + 1)
    out = np.zeros(lags.size)
    if n == 0 or lags.size == 0:
        return out

    nfft = 1 << int(2 * n - 1).bit_length()
    spec = np.fft.rfft(x, nfft)
    acf = np.fft.irfft(spec * np.conj(spec), nfft)[:n]

    prefix = np.concatenate(([0.0], np.cumsum(x * x)))
    valid = lags < n
    lv = lags[valid]
    e0 = prefix[n - lv]
    e1 = prefix[n] - prefix[lv]
    den = e0 * e1
    num = acf[lv]
    res = np.zeros(lv.size)
    ok = den > 0.0
    res[ok] = num[ok] / np.sqrt(den[ok])
    out[valid] = res
    return out


def moving_rms(padded, width):
    """Boxcar RMS: ``out[j] = sqrt(mean(padded[j:j+width]**2))``."""
    x = np.asarray(padded, dtype=np.float64)
    n = x.size - width + 1
    if n <= 0:
        return np.zeros(0)
    prefix = np.concatenate(([0.0], np.cumsum(x * x)))
    ms = (prefix[width:] - prefix[:-width]) / width
    return np.sqrt(np.clip(ms, 0.0, None))

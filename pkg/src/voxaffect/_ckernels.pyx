# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for the feature extractors.

Same contracts as :mod:`voxaffect._kernels_py`; results agree to rounding.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()

# Running sums are re-anchored this often to bound floating-point drift.
cdef Py_ssize_t RESYNC = 4096
# Above this many multiply-adds the FFT autocorrelation is cheaper.
cdef Py_ssize_t DIRECT_MAX_WORK = 1 << 18


def nccf(const double[::1] frame, Py_ssize_t lag_lo, Py_ssize_t lag_hi):
    """Normalized cross-correlation of ``frame`` with itself for lags
    ``lag_lo..lag_hi`` inclusive."""
    cdef Py_ssize_t n = frame.shape[0]
    cdef Py_ssize_t nlags = lag_hi - lag_lo + 1
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(nlags, dtype=np.float64)
    cdef double[::1] prefix = np.empty(n + 1, dtype=np.float64)
    cdef Py_ssize_t i, k, lag, m
    cdef double acc, a1, a2, a3, e0, e1, den
    cdef double[::1] acf
    cdef bint direct = nlags * n <= DIRECT_MAX_WORK

    prefix[0] = 0.0
    for i in range(n):
        prefix[i + 1] = prefix[i] + frame[i] * frame[i]
    if not direct:
        spec = np.fft.rfft(np.asarray(frame), 1 << int(2 * n - 1).bit_length())
        acf = np.fft.irfft(spec * np.conj(spec))[:n].copy()

    for k in range(nlags):
        lag = lag_lo + k
        m = n - lag
        if m <= 0:
            continue
        e0 = prefix[m]
        e1 = prefix[n] - prefix[lag]
        den = e0 * e1
        if den <= 0.0:
            continue
        if not direct:
            out[k] = acf[lag] / sqrt(den)
            continue
        # four independent partial sums keep the FPU pipeline full
        acc = a1 = a2 = a3 = 0.0
        i = 0
        while i + 4 <= m:
            acc += frame[i] * frame[i + lag]
            a1 += frame[i + 1] * frame[i + 1 + lag]
            a2 += frame[i + 2] * frame[i + 2 + lag]
            a3 += frame[i + 3] * frame[i + 3 + lag]
            i += 4
        while i < m:
            acc += frame[i] * frame[i + lag]
            i += 1
        acc += a1 + a2 + a3
        out[k] = acc / sqrt(den)
    return out


def moving_rms(const double[::1] padded, Py_ssize_t width):
    """Boxcar RMS: ``out[j] = sqrt(mean(padded[j:j+width]**2))``."""
    cdef Py_ssize_t n = padded.shape[0] - width + 1
    if n <= 0:
        return np.zeros(0, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(n, dtype=np.float64)
    cdef Py_ssize_t j, i
    cdef double acc = 0.0
    cdef double ms

    for i in range(width):
        acc += padded[i] * padded[i]
    for j in range(n):
        if j > 0:
            if j % RESYNC == 0:
                acc = 0.0
                for i in range(j, j + width):
                    acc += padded[i] * padded[i]
            else:
                acc += padded[j + width - 1] * padded[j + width - 1]
                acc -= padded[j - 1] * padded[j - 1]
        ms = acc / width
        out[j] = sqrt(ms) if ms > 0.0 else 0.0
    return out

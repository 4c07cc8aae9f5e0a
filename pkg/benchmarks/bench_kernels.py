"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import importlib
import timeit

import numpy as np

from voxaffect import _kernels, _kernels_py
from voxaffect.features import AnalysisConfig, extract_features
from voxaffect.synth import UtteranceSpec, WordSpec, synth_utterance


def backends():
    out = {"python": _kernels_py}
    try:
        out["cython"] = importlib.import_module("voxaffect._ckernels")
    except ImportError:
        print("compiled extension not built; timing the fallback only")
    return out


def best(fn, repeat):
    number = 1
    while timeit.timeit(fn, number=number) < 0.05:
        number *= 2
    return min(timeit.repeat(fn, number=number, repeat=repeat)) / number


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    rng = np.random.default_rng(0)
    cfg = AnalysisConfig()
    rates = (8000, 16000, 44100)
    frames = {fs: np.ascontiguousarray(rng.standard_normal(int(cfg.frame_len_s * fs)))
              for fs in rates}
    lags = {fs: (int(fs / cfg.pitch_max_hz) - 1, int(np.ceil(fs / cfg.pitch_min_hz)) + 1)
            for fs in rates}
    signal = np.ascontiguousarray(rng.uniform(-1, 1, 441000 + 440))
    spec = UtteranceSpec([WordSpec(220.0, 0.5, 0.1, 0.3, 0.1, 0.15)] * 5, sample_rate=44100)
    buffer = synth_utterance(spec)

    impls = backends()
    rows = []
    for name, mod in impls.items():
        t_nccf = [best(lambda: mod.nccf(frames[fs], *lags[fs]), args.repeat) for fs in rates]
        t_rms = best(lambda: mod.moving_rms(signal, 441), args.repeat)
        _kernels.nccf, _kernels.moving_rms = mod.nccf, mod.moving_rms
        t_full = best(lambda: extract_features(buffer, cfg), args.repeat)
        rows.append((name, *t_nccf, t_rms, t_full))

    heads = [f"nccf {fs // 1000}k" for fs in rates] + ["rms 10s", "extract 3.5s"]
    print(f"{'backend':8s} " + " ".join(f"{h:>12s}" for h in heads))
    for name, *times in rows:
        print(f"{name:8s} " + " ".join(f"{1e3 * t:10.3f}ms" for t in times))
    if len(rows) == 2:
        speed = [p / c for p, c in zip(rows[0][1:], rows[1][1:])]
        print(f"{'speedup':8s} " + " ".join(f"{s:11.2f}x" for s in speed))


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python channel kernels.

Run from the repo root after an editable install::

    python benchmarks/bench_kernels.py [--samples N] [--repeat K]
"""

import argparse
import time

import numpy as np

from ecz import _pykernels, kernels
from ecz.ingest import synth_ecg


def best_time(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--samples", type=int, default=200_000)
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--resync-interval", type=int, default=2048)
    args = parser.parse_args(argv)

    x = synth_ecg(args.samples, fs=512, seed=1)
    backends = [("python", _pykernels)]
    if kernels.compiled_available():
        from ecz import _kernels

        backends.append(("cython", _kernels))
    else:
        print("compiled extension not built; timing the fallback only")

    rates = {}
    for name, mod in backends:
        words, _ = mod.encode_channel(x, 12, args.resync_interval)
        enc = best_time(lambda: mod.encode_channel(x, 12, args.resync_interval), args.repeat)
        dec = best_time(lambda: mod.decode_channel(words, 12), args.repeat)
        assert np.array_equal(mod.decode_channel(words, 12), x)
        rates[name] = (len(x) / enc, len(x) / dec)
        print(f"{name:>7}: encode {rates[name][0] / 1e6:8.2f} M samples/s   decode {rates[name][1] / 1e6:8.2f} M samples/s")
    if len(rates) == 2:
        print(f"speedup: encode x{rates['cython'][0] / rates['python'][0]:.0f}, "
              f"decode x{rates['cython'][1] / rates['python'][1]:.0f}")


if __name__ == "__main__":
    main()

"""Compare the compiled and pure-Python reduction kernels on SN searches.

    python3 benchmarks/bench_kernel.py [--repeat N]
"""

import argparse
import statistics
import time

from applied_lambda import _pykernel, kernel
from applied_lambda.library import add_term, bundle, mbr_demo
from applied_lambda.syntax import canonical

CASES = {
    "mbr-demo": lambda: (bundle("MBR").system, mbr_demo()[0]),
    "add 4 4": lambda: (bundle("REC").system, add_term(4, 4)),
    "bbc-demo": lambda: (bundle("BBC").system, bundle("BBC").demo_term),
}


def timed(impl, system, term, repeat):
    root = canonical(term)
    out, times = None, []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = impl.explore(root, system.lookup, 100_000)
        times.append(time.perf_counter() - t0)
    return out, statistics.median(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not kernel.compiled_available():
        print("compiled kernel not built; only the Python backend is available")
    from applied_lambda import _ckernel  # noqa: F401  (fails loudly if missing)

    print(f"{'case':<10} {'states':>7} {'python s':>9} {'cython s':>9} {'speedup':>8}")
    for name, make in CASES.items():
        system, term = make()
        rp, tp = timed(_pykernel, system, term, args.repeat)
        rc, tc = timed(_ckernel, system, term, args.repeat)
        assert rp[0] == rc[0] and rp[1] == rc[1] and rp[3] == rc[3], "backends disagree"
        print(f"{name:<10} {rp[1]:>7} {tp:>9.3f} {tc:>9.3f} {tp / tc:>7.2f}x")


if __name__ == "__main__":
    main()

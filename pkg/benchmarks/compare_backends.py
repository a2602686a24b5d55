#!/usr/bin/env python3
"""Compare the compiled and pure-Python scan kernels on this machine.

Runs the classic and the shared-expansion loop over the same synthetic
colliding set on every available backend and prints hashes/second plus
the speedup of the compiled core.  The pure-Python backend exists for
auditability and as an import-time fallback; this script shows what that
fallback costs.

Usage:
    python3 benchmarks/compare_backends.py [--set-size 4] [--seed 0]
        [--python-nonces 2048] [--compiled-nonces 131072] [--reps 3]
"""

import argparse
import time

from asicboost.backend import available_backends
from asicboost.gain import synthetic_set
from asicboost.header import decode_compact
from asicboost.loops import NonceRange, asicboost_scan, classic_scan


def time_scan(scan, cset, nonces, backend, reps):
    rng = NonceRange(0, nonces)
    target = decode_compact(0x1D00FFFF)
    scan(cset, rng, target, backend=backend)  # warm-up
    best = min(
        _timed(scan, cset, rng, target, backend) for _ in range(reps)
    )
    return cset.n * nonces / best


def _timed(scan, cset, rng, target, backend):
    t0 = time.perf_counter()
    scan(cset, rng, target, backend=backend)
    return time.perf_counter() - t0


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--set-size", type=int, default=4)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--python-nonces", type=int, default=2048)
    parser.add_argument("--compiled-nonces", type=int, default=1 << 17)
    parser.add_argument("--reps", type=int, default=3)
    args = parser.parse_args()

    cset = synthetic_set(args.set_size, args.seed)
    backends = available_backends()
    print(f"backends: {', '.join(backends)}")
    print(f"colliding set: n={cset.n}, seed={args.seed}\n")

    rates = {}
    header = f"{'backend':>10} {'loop':>10} {'nonces':>9} {'hashes/s':>12}"
    print(header)
    print("-" * len(header))
    for backend in backends:
        nonces = args.compiled_nonces if backend == "compiled" else args.python_nonces
        for label, scan in (("classic", classic_scan), ("asicboost", asicboost_scan)):
            rate = time_scan(scan, cset, nonces, backend, args.reps)
            rates[backend, label] = rate
            print(f"{backend:>10} {label:>10} {nonces:>9} {rate:>12.0f}")

    print()
    if "compiled" in backends and "python" in backends:
        for label in ("classic", "asicboost"):
            speedup = rates["compiled", label] / rates["python", label]
            print(f"compiled speedup over python ({label}): {speedup:.0f}x")
    for backend in backends:
        boost = rates[backend, "asicboost"] / rates[backend, "classic"]
        print(f"{backend}: shared-expansion loop throughput ratio {boost:.3f}")


if __name__ == "__main__":
    main()

"""Analytical gain model and its two measurement counterparts.

If Expander 1 carries a fraction x of the per-hash stage work and a
colliding set lets n work items share each expansion, the saved fraction
is x(n-1)/n: the expander still runs once per nonce, but its cost spreads
over n items.  With the conventional weighting x = 1/4 (four stages, one
quarter each) the gain runs 0, 12.5, 18.75, 20, 21.875, 23.4375 percent
for n = 1, 2, 4, 5, 8, 16 and approaches x from below as n grows.

Three views of the same quantity live here:

* predicted_gain: the closed-form fraction, exact rational arithmetic.
* counter_gain: the same fraction recomputed from instrumented stage
  counters of an actual classic vs swapped-loop run pair; equality with
  the prediction is exact when the scans honor their contracts.
* bench_wallclock: a throughput ratio on this machine.  Software stage
  costs are not silicon gate counts, so this is reported as a sanity
  signal, never asserted against the table above.
"""

from __future__ import annotations

import platform
import statistics
import struct
import time
from dataclasses import dataclass
from fractions import Fraction

from . import backend as backend_mod
from .header import decode_compact
from .loops import NonceRange, OpCounters, asicboost_scan, classic_scan
from .workbuilder import CollidingSet, make_work_item

DEFAULT_X = Fraction(1, 4)


class MismatchedWorkload(ValueError):
    """Counter sets come from runs over different (item, nonce) work."""


class InsufficientSamples(ValueError):
    """Too few benchmark repetitions for a stable median."""


@dataclass(frozen=True)
class GainParams:
    """Set size n and Expander-1 share x of the per-hash stage work."""

    n: int
    x: Fraction = DEFAULT_X

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("set size n must be >= 1")
        x = Fraction(self.x)
        if not 0 <= x <= 1:
            raise ValueError("expander share x must lie in [0, 1]")
        object.__setattr__(self, "x", x)


def predicted_gain(params: GainParams) -> Fraction:
    """Closed-form saved fraction x(n-1)/n, exact."""
    return params.x * (params.n - 1) / params.n


def counter_gain(classic: OpCounters, boosted: OpCounters, x=DEFAULT_X) -> Fraction:
    """Weighted stage-work saving measured from two instrumented runs.

    Stages weigh x, (1-x)/3, (1-x)/3, (1-x)/3; the result is
    (classic work - boosted work) / classic work as an exact rational.
    """
    if classic.compressor2 != boosted.compressor2:
        raise MismatchedWorkload(
            f"compressor2 counts differ ({classic.compressor2} vs {boosted.compressor2}); "
            "runs did not cover the same items and nonces"
        )
    x = Fraction(x)
    rest = (1 - x) / 3

    def work(c: OpCounters) -> Fraction:
        return x * c.expander1 + rest * (c.compressor1 + c.expander2 + c.compressor2)

    base = work(classic)
    if base == 0:
        return Fraction(0)
    return (base - work(boosted)) / base


@dataclass(frozen=True)
class GainReport:
    """Prediction next to its counter-based and wall-clock measurements."""

    params: GainParams
    predicted: Fraction
    measured_counter: Fraction
    wallclock_speedup: float | None = None

    def to_dict(self) -> dict:
        return {
            "n": self.params.n,
            "x": str(self.params.x),
            "predicted_percent": float(self.predicted * 100),
            "measured_counter_percent": float(self.measured_counter * 100),
            "wallclock_ratio": self.wallclock_speedup,
            "machine_info": machine_info(),
        }


def machine_info() -> str:
    return f"{platform.platform()} / CPython {platform.python_version()}"


def synthetic_set(n: int, seed: int = 0) -> CollidingSet:
    """Deterministic colliding set for benchmarks and demos: n headers
    sharing their last 12 bytes but differing in chunk 1."""
    if n < 1:
        raise ValueError("set size must be >= 1")
    import random

    from .header import BlockHeader

    rng = random.Random(seed)
    tail = rng.randbytes(4)
    timestamp = struct.pack("<I", 0x5F000000 | rng.getrandbits(24))
    bits = bytes.fromhex("ffff001d")
    items = []
    for _ in range(n):
        head = BlockHeader(
            version=struct.pack("<I", 0x20000000),
            prev_hash=rng.randbytes(32),
            merkle_root=rng.randbytes(28) + tail,
            timestamp=timestamp,
            bits=bits,
            nonce=b"\x00" * 4,
        )
        items.append(make_work_item(head))
    cset = CollidingSet(message=items[0].message, items=tuple(items), mode="synthetic", tail_bits=32)
    cset.validate()
    return cset


@dataclass(frozen=True)
class BenchSetup:
    """Workload description for the wall-clock comparison."""

    set_size: int = 4
    nonce_count: int = 1 << 16
    seed: int = 0
    backend: str | None = None
    target_compact: int = 0x1D00FFFF


@dataclass(frozen=True)
class WallclockResult:
    ratios: tuple[float, ...]
    median_ratio: float
    min_ratio: float
    max_ratio: float
    classic_seconds: tuple[float, ...]
    boosted_seconds: tuple[float, ...]
    backend: str


def bench_wallclock(setup: BenchSetup, repetitions: int = 5) -> WallclockResult:
    """Median boosted/classic throughput ratio over serial repetitions.

    Both loops scan the same set and range per repetition; a warm-up pair
    runs first and is discarded.  No co-scheduling: timing alternates
    classic then boosted so neither steals cache or cores from the other.
    """
    if repetitions < 5:
        raise InsufficientSamples(f"need at least 5 repetitions, got {repetitions}")
    kern = backend_mod.get_backend(setup.backend)
    cset = synthetic_set(setup.set_size, setup.seed)
    rng = NonceRange(0, setup.nonce_count)
    target = decode_compact(setup.target_compact)

    def run_classic() -> float:
        t0 = time.perf_counter()
        classic_scan(cset, rng, target, backend=kern.NAME)
        return time.perf_counter() - t0

    def run_boosted() -> float:
        t0 = time.perf_counter()
        asicboost_scan(cset, rng, target, backend=kern.NAME)
        return time.perf_counter() - t0

    run_classic()
    run_boosted()
    classic_times = []
    boosted_times = []
    for _ in range(repetitions):
        classic_times.append(run_classic())
        boosted_times.append(run_boosted())
    ratios = tuple(c / b for c, b in zip(classic_times, boosted_times))
    return WallclockResult(
        ratios=ratios,
        median_ratio=statistics.median(ratios),
        min_ratio=min(ratios),
        max_ratio=max(ratios),
        classic_seconds=tuple(classic_times),
        boosted_seconds=tuple(boosted_times),
        backend=kern.NAME,
    )


def measure_gain(
    n: int,
    nonce_count: int = 4096,
    x=DEFAULT_X,
    seed: int = 0,
    backend: str | None = None,
) -> GainReport:
    """Run both loop organizations over one synthetic set and fold the
    prediction and the counter measurement into a report."""
    params = GainParams(n, Fraction(x))
    cset = synthetic_set(n, seed)
    rng = NonceRange(0, nonce_count)
    target = decode_compact(0x1D00FFFF)
    classic_counters = OpCounters()
    boosted_counters = OpCounters()
    classic_scan(cset, rng, target, classic_counters, backend=backend)
    asicboost_scan(cset, rng, target, boosted_counters, backend=backend)
    return GainReport(
        params=params,
        predicted=predicted_gain(params),
        measured_counter=counter_gain(classic_counters, boosted_counters, params.x),
    )

"""The two mining-loop organizations, instrumented with stage counters.

The classic loop keeps the nonce innermost: every (work item, nonce) pair
pays for all four stages: Expander 1, Compressor 1, Expander 2,
Compressor 2.  The swapped loop exploits a colliding set's shared Message
by hoisting Expander 1: the nonce moves to the outer loop, the inner loop
walks the midstates, and one chunk-2 expansion per nonce feeds every item.
Both return the same solutions over the same work; the counters record
what each organization paid.

Two hardware-flavored variants of the swapped loop are modeled as software
schedules: a multi-core schedule shares one expansion among a group of
``cores_per_expander`` lanes (so groups-per-nonce expansions are paid),
and a low-toggle schedule additionally counts how often the expander's
input lines switch: once per nonce update plus once for the Message load,
independent of the set size.

Nonce convention, pinned for determinism: the nonce field holds the
big-endian encoding of the scanned integer, which is also chunk-2 word 3;
iteration walks that integer upward through a half-open range.  Scans can
be partitioned across worker threads; each worker owns private counters
and solutions, merged additively / in partition order at join.  A
low-toggle partition models one core per worker, so each contributes its
own Message-load toggle.
"""

from __future__ import annotations

from array import array
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from . import backend as backend_mod
from .header import Target, double_sha
from .workbuilder import CollidingSet, WorkItem

NONCE_SPACE = 1 << 32


class MessageMismatch(ValueError):
    """Items handed to a shared-message scan do not all share the Message."""


class IndivisibleGrouping(ValueError):
    """cores_per_expander does not divide the colliding-set size."""


class SolutionMismatch(ValueError):
    """A solution failed its defensive recheck against the full pipeline."""


@dataclass(frozen=True)
class NonceRange:
    """Half-open range of 32-bit nonce values."""

    start: int
    end: int

    def __post_init__(self):
        if not 0 <= self.start <= self.end <= NONCE_SPACE:
            raise ValueError(f"invalid nonce range [{self.start}, {self.end})")

    def __len__(self) -> int:
        return self.end - self.start


@dataclass(frozen=True)
class Solution:
    """A nonce whose double SHA met the target for one work item."""

    item_index: int
    nonce: int
    digest: bytes

    def to_dict(self) -> dict:
        return {"item_index": self.item_index, "nonce": self.nonce, "digest_hex": self.digest.hex()}

    @classmethod
    def from_dict(cls, data: dict) -> "Solution":
        return cls(int(data["item_index"]), int(data["nonce"]), bytes.fromhex(data["digest_hex"]))


@dataclass
class OpCounters:
    """Invocation counts per stage, plus the low-toggle expander count."""

    expander1: int = 0
    compressor1: int = 0
    expander2: int = 0
    compressor2: int = 0
    expander1_toggles: int = 0

    def apply_delta(self, delta) -> None:
        e1, c1, e2, c2, tog = delta
        self.expander1 += e1
        self.compressor1 += c1
        self.expander2 += e2
        self.compressor2 += c2
        self.expander1_toggles += tog

    def merge(self, other: "OpCounters") -> None:
        self.apply_delta(
            (other.expander1, other.compressor1, other.expander2,
             other.compressor2, other.expander1_toggles)
        )

    def as_dict(self) -> dict:
        return {
            "expander1": self.expander1,
            "compressor1": self.compressor1,
            "expander2": self.expander2,
            "compressor2": self.compressor2,
            "expander1_toggles": self.expander1_toggles,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "OpCounters":
        return cls(**{k: int(data.get(k, 0)) for k in (
            "expander1", "compressor1", "expander2", "compressor2", "expander1_toggles")})


def _as_items(set_or_items) -> list[WorkItem]:
    if isinstance(set_or_items, CollidingSet):
        return list(set_or_items.items)
    return list(set_or_items)


def _flat_midstates(items: list[WorkItem]) -> array:
    flat = array("I")
    for item in items:
        flat.extend(item.midstate.h)
    return flat


def _target_words(target: Target) -> tuple[int, ...]:
    raw = target.value.to_bytes(32, "big")
    return tuple(int.from_bytes(raw[4 * i : 4 * i + 4], "big") for i in range(8))


def _partition(rng: NonceRange, workers: int) -> list[tuple[int, int]]:
    count = len(rng)
    workers = max(1, min(workers, count)) if count else 1
    if workers == 1:
        return [(rng.start, rng.end)]
    step, extra = divmod(count, workers)
    parts = []
    cursor = rng.start
    for w in range(workers):
        size = step + (1 if w < extra else 0)
        parts.append((cursor, cursor + size))
        cursor += size
    return parts


def _merge_runs(runs, counters: OpCounters | None) -> list[Solution]:
    solutions = []
    total = (0, 0, 0, 0, 0)
    for sols, deltas in runs:
        solutions.extend(Solution(i, v, d) for i, v, d in sols)
        total = tuple(a + b for a, b in zip(total, deltas))
    if counters is not None:
        counters.apply_delta(total)
    return solutions


def _require_shared_message(items: list[WorkItem]) -> bytes:
    if not items:
        raise ValueError("scan needs at least one work item")
    message = items[0].message
    for i, item in enumerate(items):
        if item.message != message:
            raise MessageMismatch(f"item {i} does not share the set's Message")
    return message


def classic_scan(
    items,
    nonce_range: NonceRange,
    target: Target,
    counters: OpCounters | None = None,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> list[Solution]:
    """Nonce-innermost loop: all four stages run per (item, nonce) pair."""
    items = _as_items(items)
    if not items:
        return []
    kern = backend_mod.get_backend(backend)
    mids = _flat_midstates(items)
    messages = b"".join(item.message for item in items)
    tw = _target_words(target)
    runs = []
    parts = _partition(nonce_range, workers)
    if len(parts) == 1:
        start, end = parts[0]
        runs.append(kern.scan_classic(mids, len(items), messages, start, end, tw))
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            futures = [
                pool.submit(kern.scan_classic, mids, len(items), messages, s, e, tw)
                for s, e in parts
            ]
            runs = [f.result() for f in futures]
    return _merge_runs(runs, counters)


def _shared_scan(
    cset,
    nonce_range: NonceRange,
    target: Target,
    counters: OpCounters | None,
    cores_per_expander: int | None,
    count_toggles: bool,
    workers: int,
    backend: str | None,
) -> list[Solution]:
    items = _as_items(cset)
    message = _require_shared_message(items)
    n = len(items)
    cpe = n if cores_per_expander is None else cores_per_expander
    if cpe < 1 or n % cpe:
        raise IndivisibleGrouping(f"{cpe} cores per expander cannot tile {n} items")
    kern = backend_mod.get_backend(backend)
    mids = _flat_midstates(items)
    tw = _target_words(target)
    parts = _partition(nonce_range, workers)
    if len(parts) == 1:
        start, end = parts[0]
        runs = [kern.scan_shared(mids, n, message, start, end, tw, cpe, count_toggles)]
    else:
        with ThreadPoolExecutor(max_workers=len(parts)) as pool:
            futures = [
                pool.submit(kern.scan_shared, mids, n, message, s, e, tw, cpe, count_toggles)
                for s, e in parts
            ]
            runs = [f.result() for f in futures]
    return _merge_runs(runs, counters)


def asicboost_scan(
    cset,
    nonce_range: NonceRange,
    target: Target,
    counters: OpCounters | None = None,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> list[Solution]:
    """Swapped loop: one Expander 1 run per nonce feeds every midstate."""
    return _shared_scan(cset, nonce_range, target, counters, None, False, workers, backend)


def multicore_schedule(
    cset,
    nonce_range: NonceRange,
    target: Target,
    cores_per_expander: int,
    counters: OpCounters | None = None,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> list[Solution]:
    """Swapped loop with one expansion shared per group of cores; at
    cores_per_expander == n it degenerates to asicboost_scan."""
    return _shared_scan(
        cset, nonce_range, target, counters, cores_per_expander, False, workers, backend
    )


def lowtoggle_schedule(
    cset,
    nonce_range: NonceRange,
    target: Target,
    counters: OpCounters | None = None,
    *,
    workers: int = 1,
    backend: str | None = None,
) -> list[Solution]:
    """Swapped loop with per-core expander toggle accounting: the expander
    input switches once per nonce update plus once for the Message load."""
    return _shared_scan(cset, nonce_range, target, counters, None, True, workers, backend)


def reconstruct_header(set_or_items, solution: Solution):
    """Rebuild the broadcastable header for a solution and recheck it
    against the full double-SHA pipeline."""
    items = _as_items(set_or_items)
    if not 0 <= solution.item_index < len(items):
        raise IndexError(f"solution item_index {solution.item_index} out of range")
    header = items[solution.item_index].header_with_nonce(solution.nonce)
    if double_sha(header) != solution.digest:
        raise SolutionMismatch(
            f"reconstructed header digest does not match solution for nonce {solution.nonce}"
        )
    return header

"""Loop-organization equivalence, counter contracts, solution handling."""

import hashlib
import struct

import pytest

from asicboost.backend import available_backends
from asicboost.gain import synthetic_set
from asicboost.header import BlockHeader, Target, decode_compact, double_sha, meets_target
from asicboost.loops import (
    IndivisibleGrouping,
    MessageMismatch,
    NonceRange,
    OpCounters,
    Solution,
    SolutionMismatch,
    asicboost_scan,
    classic_scan,
    lowtoggle_schedule,
    multicore_schedule,
    reconstruct_header,
)
from asicboost.workbuilder import CollidingSet, make_work_item

EASY = Target(value=(1 << 246) - 1, compact=0)  # ~1 hit per 2^10 hashes
BACKENDS = available_backends()


def brute_force(items, start, end, target):
    """Per-nonce hashlib sweep, the independent ground truth for scans."""
    hits = []
    for index, item in enumerate(items):
        base = item.header_with_nonce(0).serialize()[:76]
        for nonce in range(start, end):
            raw = base + struct.pack(">I", nonce)
            digest = hashlib.sha256(hashlib.sha256(raw).digest()).digest()
            if meets_target(digest, target):
                hits.append(Solution(index, nonce, digest))
    return hits


class TestNonceRange:
    def test_len(self):
        assert len(NonceRange(10, 42)) == 32
        assert len(NonceRange(0, 0)) == 0

    @pytest.mark.parametrize("start, end", [(-1, 10), (10, 5), (0, (1 << 32) + 1)])
    def test_rejects_bad_bounds(self, start, end):
        with pytest.raises(ValueError):
            NonceRange(start, end)


@pytest.mark.parametrize("backend", BACKENDS)
class TestEquivalence:
    def test_all_organizations_agree_with_brute_force(self, backend):
        cset = synthetic_set(4, seed=11)
        rng = NonceRange(0, 2048)
        expected = set(brute_force(cset.items, rng.start, rng.end, EASY))
        assert expected, "test range must contain at least one solution"
        classic = classic_scan(cset, rng, EASY, backend=backend)
        boosted = asicboost_scan(cset, rng, EASY, backend=backend)
        multi = multicore_schedule(cset, rng, EASY, 2, backend=backend)
        lowtog = lowtoggle_schedule(cset, rng, EASY, backend=backend)
        assert set(classic) == expected
        assert set(boosted) == expected
        assert set(multi) == expected
        assert set(lowtog) == expected

    def test_nonzero_range_offsets(self, backend):
        cset = synthetic_set(2, seed=12)
        rng = NonceRange(0xFFFF0000, 0xFFFF0000 + 1024)
        expected = set(brute_force(cset.items, rng.start, rng.end, EASY))
        assert set(classic_scan(cset, rng, EASY, backend=backend)) == expected
        assert set(asicboost_scan(cset, rng, EASY, backend=backend)) == expected

    def test_empty_range_yields_nothing(self, backend):
        cset = synthetic_set(2, seed=13)
        counters = OpCounters()
        rng = NonceRange(500, 500)
        assert classic_scan(cset, rng, EASY, counters, backend=backend) == []
        assert asicboost_scan(cset, rng, EASY, counters, backend=backend) == []
        assert lowtoggle_schedule(cset, rng, EASY, counters, backend=backend) == []
        assert counters.as_dict() == OpCounters().as_dict()

    def test_determinism_including_order(self, backend):
        cset = synthetic_set(3, seed=14)
        rng = NonceRange(0, 1024)
        for scan in (classic_scan, asicboost_scan):
            first = scan(cset, rng, EASY, backend=backend)
            second = scan(cset, rng, EASY, backend=backend)
            assert first == second  # list equality: same order


class TestCounterContracts:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_exact_counts(self, backend):
        n, big_n = 4, 512
        cset = synthetic_set(n, seed=15)
        rng = NonceRange(0, big_n)
        classic = OpCounters()
        boosted = OpCounters()
        classic_scan(cset, rng, EASY, classic, backend=backend)
        asicboost_scan(cset, rng, EASY, boosted, backend=backend)
        assert classic.as_dict() == {
            "expander1": n * big_n, "compressor1": n * big_n,
            "expander2": n * big_n, "compressor2": n * big_n,
            "expander1_toggles": 0,
        }
        assert boosted.as_dict() == {
            "expander1": big_n, "compressor1": n * big_n,
            "expander2": n * big_n, "compressor2": n * big_n,
            "expander1_toggles": 0,
        }

    @pytest.mark.parametrize("cores_per_expander, expected_groups", [(1, 6), (2, 3), (3, 2), (6, 1)])
    def test_multicore_expansions_scale_with_groups(self, cores_per_expander, expected_groups):
        cset = synthetic_set(6, seed=16)
        counters = OpCounters()
        multicore_schedule(cset, NonceRange(0, 128), EASY, cores_per_expander, counters)
        assert counters.expander1 == 128 * expected_groups
        assert counters.compressor1 == 128 * 6

    def test_multicore_rejects_indivisible_grouping(self):
        cset = synthetic_set(4, seed=17)
        with pytest.raises(IndivisibleGrouping):
            multicore_schedule(cset, NonceRange(0, 16), EASY, 3)

    @pytest.mark.parametrize("n", [1, 2, 5])
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_lowtoggle_counts_message_load_plus_nonce_updates(self, n, backend):
        cset = synthetic_set(n, seed=18)
        counters = OpCounters()
        lowtoggle_schedule(cset, NonceRange(0, 200), EASY, counters, backend=backend)
        assert counters.expander1_toggles == 201
        assert counters.expander1 == 200

    def test_counters_accumulate_across_scans(self):
        cset = synthetic_set(2, seed=19)
        counters = OpCounters()
        classic_scan(cset, NonceRange(0, 64), EASY, counters)
        classic_scan(cset, NonceRange(64, 128), EASY, counters)
        assert counters.compressor2 == 2 * 128

    def test_merge_and_dict_round_trip(self):
        a = OpCounters(1, 2, 3, 4, 5)
        b = OpCounters.from_dict(a.as_dict())
        assert b == a
        a.merge(b)
        assert a == OpCounters(2, 4, 6, 8, 10)


class TestWorkers:
    @pytest.mark.parametrize("backend", BACKENDS)
    def test_partitioned_scan_matches_serial(self, backend):
        cset = synthetic_set(3, seed=20)
        rng = NonceRange(0, 3000)
        serial = OpCounters()
        parallel = OpCounters()
        expected = classic_scan(cset, rng, EASY, serial, backend=backend)
        got = classic_scan(cset, rng, EASY, parallel, workers=4, backend=backend)
        assert set(got) == set(expected)
        assert parallel.as_dict() == serial.as_dict()

    def test_boosted_partitions_split_expansions(self):
        cset = synthetic_set(4, seed=21)
        counters = OpCounters()
        asicboost_scan(cset, NonceRange(0, 1000), EASY, counters, workers=3)
        assert counters.expander1 == 1000
        assert counters.compressor1 == 4000

    def test_lowtoggle_workers_each_load_the_message(self):
        # each partition models its own core, so each pays one load toggle
        cset = synthetic_set(2, seed=22)
        counters = OpCounters()
        lowtoggle_schedule(cset, NonceRange(0, 900), EASY, counters, workers=3)
        assert counters.expander1_toggles == 900 + 3

    def test_more_workers_than_nonces(self):
        cset = synthetic_set(1, seed=23)
        sols = classic_scan(cset, NonceRange(0, 2), EASY, workers=64)
        assert sols == classic_scan(cset, NonceRange(0, 2), EASY)


class TestSharedMessageGuard:
    def test_mixed_messages_rejected(self):
        a = synthetic_set(2, seed=24)
        b = synthetic_set(2, seed=25)
        mixed = CollidingSet(
            message=a.message, items=[a.items[0], b.items[0]], mode="extranonce", tail_bits=32
        )
        with pytest.raises(MessageMismatch):
            asicboost_scan(mixed, NonceRange(0, 4), EASY)
        # the classic loop has no shared-message precondition
        assert classic_scan(mixed, NonceRange(0, 4), EASY) is not None

    def test_empty_item_list_rejected(self):
        with pytest.raises(ValueError):
            asicboost_scan([], NonceRange(0, 4), EASY)

    def test_classic_accepts_plain_item_lists(self):
        cset = synthetic_set(2, seed=26)
        rng = NonceRange(0, 512)
        assert classic_scan(list(cset.items), rng, EASY) == classic_scan(cset, rng, EASY)


class TestSolutions:
    def _one_solution(self):
        cset = synthetic_set(4, seed=11)
        sols = asicboost_scan(cset, NonceRange(0, 2048), EASY)
        assert sols
        return cset, sols[0]

    def test_reconstruct_header_verifies(self):
        cset, sol = self._one_solution()
        header = reconstruct_header(cset, sol)
        assert double_sha(header) == sol.digest
        assert meets_target(sol.digest, EASY)
        assert header.nonce == sol.nonce.to_bytes(4, "big")
        origin = cset.items[sol.item_index].origin
        assert header.merkle_root == origin.merkle_root

    def test_reconstruct_rejects_corrupt_digest(self):
        cset, sol = self._one_solution()
        bad = Solution(sol.item_index, sol.nonce, bytes(32))
        with pytest.raises(SolutionMismatch):
            reconstruct_header(cset, bad)

    def test_reconstruct_rejects_bad_index(self):
        cset, sol = self._one_solution()
        with pytest.raises(IndexError):
            reconstruct_header(cset, Solution(99, sol.nonce, sol.digest))

    def test_boundary_target_is_inclusive(self):
        cset = synthetic_set(1, seed=27)
        window = brute_force(cset.items, 0, 600, Target(value=(1 << 256) - 1, compact=0))
        best = min(window, key=lambda s: int.from_bytes(s.digest, "little"))
        exact = Target(value=int.from_bytes(best.digest, "little"), compact=0)
        sols = classic_scan(cset, NonceRange(0, 600), exact)
        assert sols == [best]

    def test_solution_dict_round_trip(self):
        sol = Solution(3, 0xDEADBEEF, bytes(range(32)))
        assert Solution.from_dict(sol.to_dict()) == sol

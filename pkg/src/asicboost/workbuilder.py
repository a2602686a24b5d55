"""Build work items and colliding sets of work items.

A work item is the (midstate, Message) pair handed to the inner mining
loop: the midstate is the hash state after chunk 1, the Message is the 12
chunk-2 bytes that exclude nonce and padding.  Work items *collide* when
they share the Message, i.e. their headers differ only in chunk 1.

Colliding sets are built two ways:

* merkle-tail collisions: generate many candidate merkle roots (rolling a
  coinbase extranonce, or permuting the non-coinbase leaves), bucket them
  by the last ``tail_bits`` bits of the root, and take a bucket once it
  holds ``set_size`` members;
* free header bits: enumerate values of designated leading prev-hash bits
  with one fixed merkle root.  No protocol today defines such bits, so
  sets built this way are flagged ``simulation_only``.

``tail_bits`` is a scale knob: 32 matches the real 4-byte tail and makes
every header carry its true merkle root, while smaller widths keep test
searches fast.  Below 32 the unshared high tail bits are taken from the
bucket's first member and written into every member's header, so a set's
Messages are byte-identical at any width; each item's witness still
regenerates its true candidate root for verification.

Transactions are opaque here: a txid is any 32 bytes, and the coinbase is
an opaque byte template whose txid is the double SHA of its bytes.
"""

from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass

from .header import BlockHeader, MESSAGE_LEN
from .sha_stages import HashState, INITIAL_STATE, digest_one_chunk
from . import header as header_mod

MODES = ("extranonce", "permutation", "free_bits")

# Cap on streams materialized as a full shuffled index list; larger
# permutation spaces fall back to seeded draws.
_SHUFFLE_LIMIT = 1 << 20


class EmptyLeafSet(ValueError):
    """Merkle root of zero leaves requested."""


class TemplateBitsNotZero(ValueError):
    """Free-bit positions in the template prev_hash are not zero."""


class BudgetExhausted(RuntimeError):
    """Collision search ran out of candidates before filling a bucket."""

    def __init__(self, tried: int, best_bucket: int, needed: int):
        self.tried = tried
        self.best_bucket = best_bucket
        self.needed = needed
        super().__init__(
            f"no bucket reached {needed} after {tried} candidates "
            f"(best bucket: {best_bucket})"
        )


def _dbl_sha(data: bytes) -> bytes:
    return hashlib.sha256(hashlib.sha256(data).digest()).digest()


def merkle_root(leafs) -> bytes:
    """Merkle root of opaque 32-byte leaf ids: pairwise double SHA,
    duplicating the last node of any odd level."""
    level = [bytes(x) for x in leafs]
    if not level:
        raise EmptyLeafSet("merkle root needs at least one leaf")
    for leaf in level:
        if len(leaf) != 32:
            raise ValueError(f"leaf ids must be 32 bytes, got {len(leaf)}")
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [_dbl_sha(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


@dataclass(frozen=True)
class HeaderOrigin:
    """Chunk-1 identity of a work item, kept for header reconstruction."""

    version: bytes
    prev_hash: bytes
    merkle_root: bytes


@dataclass(frozen=True)
class WorkItem:
    """Midstate + Message, plus the origin fields and search witness."""

    midstate: HashState
    message: bytes
    origin: HeaderOrigin
    witness: int | None = None

    def __post_init__(self):
        if len(self.message) != MESSAGE_LEN:
            raise ValueError(f"message must be {MESSAGE_LEN} bytes, got {len(self.message)}")

    def header_with_nonce(self, nonce: int) -> BlockHeader:
        return BlockHeader(
            version=self.origin.version,
            prev_hash=self.origin.prev_hash,
            merkle_root=self.origin.merkle_root,
            timestamp=self.message[4:8],
            bits=self.message[8:12],
            nonce=(nonce & 0xFFFFFFFF).to_bytes(4, "big"),
        )


def make_work_item(head: BlockHeader, witness: int | None = None) -> WorkItem:
    """Derive a work item from a header candidate: run chunk 1 through the
    first expander/compressor stage and keep the Message bytes."""
    chunk1, _ = header_mod.split_chunks(head)
    return WorkItem(
        midstate=digest_one_chunk(INITIAL_STATE, chunk1),
        message=head.message,
        origin=HeaderOrigin(head.version, head.prev_hash, head.merkle_root),
        witness=witness,
    )


@dataclass
class CollidingSet:
    """Work items sharing one Message."""

    message: bytes
    items: list[WorkItem]
    mode: str
    tail_bits: int
    simulation_only: bool = False

    @property
    def n(self) -> int:
        return len(self.items)

    def validate(self):
        if self.n < 1:
            raise ValueError("colliding set needs at least one item")
        chunk1s = set()
        for item in self.items:
            if item.message != self.message:
                raise ValueError("item message differs from set message")
            chunk1s.add(item.origin.version + item.origin.prev_hash + item.origin.merkle_root[:28])
        if len(chunk1s) != self.n:
            raise ValueError("colliding set contains duplicate chunk-1 blocks")
        return self


@dataclass(frozen=True)
class MerkleLeafSet:
    """Coinbase template with a marked extranonce slot plus opaque txids."""

    coinbase_template: bytes
    extranonce_offset: int
    extranonce_width: int
    txids: tuple[bytes, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "txids", tuple(bytes(t) for t in self.txids))
        if self.extranonce_width < 1:
            raise ValueError("extranonce slot must be at least 1 byte wide")
        if not (
            0 <= self.extranonce_offset
            and self.extranonce_offset + self.extranonce_width <= len(self.coinbase_template)
        ):
            raise ValueError("extranonce slot must lie inside the coinbase bytes")
        for t in self.txids:
            if len(t) != 32:
                raise ValueError("txids must be 32 bytes")

    def coinbase_with_extranonce(self, value: int) -> bytes:
        width = self.extranonce_width
        if not 0 <= value < 1 << (8 * width):
            raise ValueError(f"extranonce {value} does not fit in {width} bytes")
        t = self.coinbase_template
        off = self.extranonce_offset
        return t[:off] + value.to_bytes(width, "big") + t[off + width :]


@dataclass(frozen=True)
class CollisionConfig:
    """Knobs for the collision search."""

    tail_bits: int = 32
    set_size: int = 1
    max_candidates: int = 1_000_000
    mode: str = "extranonce"
    free_bits_count: int = 0

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not 1 <= self.tail_bits <= 32:
            raise ValueError("tail_bits must be in 1..32")
        if self.set_size < 1:
            raise ValueError("set_size must be at least 1")
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be at least 1")
        if self.mode == "free_bits":
            if not 1 <= self.free_bits_count <= 32:
                raise ValueError("free_bits_count must be in 1..32")
        elif self.free_bits_count:
            raise ValueError("free_bits_count only applies to free_bits mode")


@dataclass(frozen=True)
class FixedHeaderFields:
    """Header fields held constant across a collision search."""

    version: bytes
    prev_hash: bytes
    timestamp: bytes
    bits: bytes

    def __post_init__(self):
        for name, size in (("version", 4), ("prev_hash", 32), ("timestamp", 4), ("bits", 4)):
            if len(getattr(self, name)) != size:
                raise ValueError(f"{name} must be {size} bytes")

    def header_for_root(self, root: bytes, nonce: int = 0) -> BlockHeader:
        return BlockHeader(
            version=self.version,
            prev_hash=self.prev_hash,
            merkle_root=root,
            timestamp=self.timestamp,
            bits=self.bits,
            nonce=(nonce & 0xFFFFFFFF).to_bytes(4, "big"),
        )


def _nth_permutation(items: tuple, index: int) -> list:
    """Unrank a lexicographic permutation via the factorial number system."""
    pool = list(items)
    out = []
    for pos in range(len(pool), 0, -1):
        f = math.factorial(pos - 1)
        out.append(pool.pop(index // f))
        index %= f
    return out


def _leaves_for_witness(source: MerkleLeafSet, mode: str, witness: int) -> list[bytes]:
    if mode == "extranonce":
        coinbase_txid = _dbl_sha(source.coinbase_with_extranonce(witness))
        return [coinbase_txid] + list(source.txids)
    if mode == "permutation":
        count = math.factorial(len(source.txids))
        if not 0 <= witness < count:
            raise ValueError(f"permutation index {witness} out of range for {len(source.txids)} txids")
        coinbase_txid = _dbl_sha(source.coinbase_template)
        return [coinbase_txid] + _nth_permutation(source.txids, witness)
    raise ValueError(f"no root stream for mode {mode!r}")


def regenerate_root(source: MerkleLeafSet, mode: str, witness: int) -> bytes:
    """Recompute the candidate merkle root a witness stands for."""
    return merkle_root(_leaves_for_witness(source, mode, witness))


def _witness_sequence(space: int, seed: int):
    """Deterministic seeded enumeration of [0, space) without repeats.

    Power-of-two spaces get an affine bijection; small spaces a shuffled
    list; anything else falls back to seeded draws (repeats possible, so
    callers rely on the budget to terminate).
    """
    rng = random.Random(seed)
    if space & (space - 1) == 0:
        a = rng.randrange(1, space, 2) if space > 1 else 1
        b = rng.randrange(space)
        return ((a * i + b) % space for i in range(space))
    if space <= _SHUFFLE_LIMIT:
        order = list(range(space))
        rng.shuffle(order)
        return iter(order)
    return (rng.randrange(space) for _ in range(space))


def candidate_root_stream(source: MerkleLeafSet, mode: str, seed: int = 0):
    """Yield (root, witness) pairs in a seeded deterministic order.

    Extranonce mode walks distinct extranonce values, at most one per slot
    value; permutation mode walks orderings of the non-coinbase leaves, at
    most ``t!`` of them.
    """
    if mode == "extranonce":
        space = 1 << (8 * source.extranonce_width)
    elif mode == "permutation":
        space = math.factorial(len(source.txids))
    else:
        raise ValueError(f"no root stream for mode {mode!r}")
    for witness in _witness_sequence(space, seed):
        yield regenerate_root(source, mode, witness), witness


def tail_key(root: bytes, tail_bits: int) -> int:
    """Low ``tail_bits`` bits of the root's last 4 bytes."""
    tail = int.from_bytes(root[28:32], "big")
    return tail & ((1 << tail_bits) - 1) if tail_bits < 32 else tail


def find_colliding_set(
    source: MerkleLeafSet,
    fixed: FixedHeaderFields,
    cfg: CollisionConfig,
    seed: int = 0,
    stats: dict | None = None,
) -> CollidingSet:
    """Search candidate roots until ``set_size`` of them agree in their
    last ``tail_bits`` bits, and return the bucket as a colliding set.

    Raises BudgetExhausted after ``max_candidates`` roots; the exception
    carries the best bucket occupancy reached.  ``stats``, if given, is
    filled with tried/bucket counts even on failure.
    """
    if cfg.mode not in ("extranonce", "permutation"):
        raise ValueError(f"find_colliding_set handles extranonce/permutation, not {cfg.mode!r}")
    buckets: dict[int, list[tuple[bytes, int]]] = {}
    tried = 0
    winner = None
    for root, witness in candidate_root_stream(source, cfg.mode, seed):
        tried += 1
        bucket = buckets.setdefault(tail_key(root, cfg.tail_bits), [])
        if not any(r == root for r, _ in bucket):  # seeded-draw fallback may repeat
            bucket.append((root, witness))
            if len(bucket) >= cfg.set_size:
                winner = bucket
                break
        if tried >= cfg.max_candidates:
            break
    best = max((len(b) for b in buckets.values()), default=0)
    if stats is not None:
        stats.update(candidates_tried=tried, buckets=len(buckets), best_bucket=best)
    if winner is None:
        raise BudgetExhausted(tried, best, cfg.set_size)

    # Share the full tail of the first member so Messages are byte-identical
    # even at reduced collision width; a no-op at tail_bits=32.
    shared_tail = winner[0][0][28:32]
    items = []
    for root, witness in winner:
        head_root = root[:28] + shared_tail
        items.append(make_work_item(fixed.header_for_root(head_root), witness=witness))
    return CollidingSet(
        message=items[0].message,
        items=items,
        mode=cfg.mode,
        tail_bits=cfg.tail_bits,
    ).validate()


def free_bits_set(header_template: BlockHeader, cfg: CollisionConfig) -> CollidingSet:
    """Enumerate values of the leading prev-hash bits of a fixed template.

    The designated bits are the first ``free_bits_count`` bits of the
    prev_hash field in wire order, most significant bit of each byte
    first.  They must be zero in the template.  The result is flagged
    simulation-only: no deployed protocol frees these bits.
    """
    if cfg.mode != "free_bits":
        raise ValueError(f"free_bits_set requires free_bits mode, got {cfg.mode!r}")
    count = cfg.free_bits_count
    n_items = min(1 << count, cfg.set_size)

    prev = header_template.prev_hash
    prefix_len = (count + 7) // 8
    prefix = int.from_bytes(prev[:prefix_len], "big")
    shift = 8 * prefix_len - count
    if prefix >> shift != 0:
        raise TemplateBitsNotZero(
            f"first {count} prev_hash bits must be zero in the template"
        )

    items = []
    for value in range(n_items):
        patched = (prefix | (value << shift)).to_bytes(prefix_len, "big") + prev[prefix_len:]
        head = BlockHeader(
            version=header_template.version,
            prev_hash=patched,
            merkle_root=header_template.merkle_root,
            timestamp=header_template.timestamp,
            bits=header_template.bits,
            nonce=header_template.nonce,
        )
        items.append(make_work_item(head, witness=value))
    return CollidingSet(
        message=items[0].message,
        items=items,
        mode="free_bits",
        tail_bits=cfg.tail_bits,
        simulation_only=True,
    ).validate()


# ---------------------------------------------------------------------------
# Work-set file format

def work_set_to_dict(cset: CollidingSet) -> dict:
    return {
        "message_hex": cset.message.hex(),
        "items": [
            {
                "midstate_words": [f"{w:08x}" for w in item.midstate.h],
                "version_hex": item.origin.version.hex(),
                "prev_hash_hex": item.origin.prev_hash.hex(),
                "merkle_root_hex": item.origin.merkle_root.hex(),
                "witness": item.witness,
            }
            for item in cset.items
        ],
        "mode": cset.mode,
        "tail_bits": cset.tail_bits,
    }


def work_set_from_dict(data: dict) -> CollidingSet:
    message = bytes.fromhex(data["message_hex"])
    items = []
    for entry in data["items"]:
        origin = HeaderOrigin(
            version=bytes.fromhex(entry["version_hex"]),
            prev_hash=bytes.fromhex(entry["prev_hash_hex"]),
            merkle_root=bytes.fromhex(entry["merkle_root_hex"]),
        )
        item = WorkItem(
            midstate=HashState(tuple(int(w, 16) for w in entry["midstate_words"])),
            message=message,
            origin=origin,
            witness=entry.get("witness"),
        )
        # stored midstate must match the origin header (defensive re-derivation)
        rebuilt = make_work_item(item.header_with_nonce(0))
        if rebuilt.midstate != item.midstate or rebuilt.message != message:
            raise ValueError("work-set item midstate does not match its origin header")
        items.append(item)
    mode = data["mode"]
    return CollidingSet(
        message=message,
        items=items,
        mode=mode,
        tail_bits=int(data["tail_bits"]),
        simulation_only=(mode == "free_bits"),
    ).validate()


def save_work_set(cset: CollidingSet, path) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        json.dump(work_set_to_dict(cset), fp, indent=2, sort_keys=True)
        fp.write("\n")


def load_work_set(path) -> CollidingSet:
    with open(path, encoding="utf-8") as fp:
        return work_set_from_dict(json.load(fp))

"""Bitcoin block-header layout, chunk split, target handling, double SHA.

An 80-byte header spans two SHA-256 chunks.  Chunk 1 holds version,
previous hash, and the first 28 bytes of the merkle root ("head"); chunk 2
holds the last 4 root bytes ("tail"), timestamp, bits, nonce, plus the
constant padding for an 80-byte message.  The first 12 bytes of chunk 2
(tail + timestamp + bits, everything except nonce and padding) are the
Message shared by colliding work items.

All header fields are stored and serialized in wire byte order; the 80
bytes are hashed as-is.  Byte-reversed "display" hex only ever appears in
CLI output and is labeled as such.
"""

from __future__ import annotations

from dataclasses import dataclass

from .sha_stages import Chunk, HashState, INITIAL_STATE, digest_one_chunk

HEADER_LEN = 80
MESSAGE_LEN = 12

# SHA padding constants, fixed by the message lengths involved:
# chunk 2 of an 80-byte header (words 4..15) and the single chunk of a
# 32-byte digest (words 8..15).
CHUNK2_PAD_WORDS = (0x80000000,) + (0,) * 10 + (0x00000280,)
SECOND_SHA_PAD_WORDS = (0x80000000,) + (0,) * 6 + (0x00000100,)

MAX_TARGET = (1 << 256) - 1


class BadHex(ValueError):
    """Header hex contains non-hex characters."""


class BadLength(ValueError):
    """Header hex is not exactly 160 characters / 80 bytes."""


class UnsupportedEncoding(ValueError):
    """Compact target encoding the artifact refuses to interpret."""


def _field(name: str, value: bytes, size: int) -> bytes:
    value = bytes(value)
    if len(value) != size:
        raise ValueError(f"{name} must be {size} bytes, got {len(value)}")
    return value


@dataclass(frozen=True)
class BlockHeader:
    """An 80-byte block header candidate, fields in wire byte order."""

    version: bytes
    prev_hash: bytes
    merkle_root: bytes
    timestamp: bytes
    bits: bytes
    nonce: bytes

    def __post_init__(self):
        object.__setattr__(self, "version", _field("version", self.version, 4))
        object.__setattr__(self, "prev_hash", _field("prev_hash", self.prev_hash, 32))
        object.__setattr__(self, "merkle_root", _field("merkle_root", self.merkle_root, 32))
        object.__setattr__(self, "timestamp", _field("timestamp", self.timestamp, 4))
        object.__setattr__(self, "bits", _field("bits", self.bits, 4))
        object.__setattr__(self, "nonce", _field("nonce", self.nonce, 4))

    def serialize(self) -> bytes:
        return (
            self.version
            + self.prev_hash
            + self.merkle_root
            + self.timestamp
            + self.bits
            + self.nonce
        )

    @classmethod
    def parse(cls, data: bytes) -> "BlockHeader":
        if len(data) != HEADER_LEN:
            raise BadLength(f"header must be {HEADER_LEN} bytes, got {len(data)}")
        return cls(
            version=data[0:4],
            prev_hash=data[4:36],
            merkle_root=data[36:68],
            timestamp=data[68:72],
            bits=data[72:76],
            nonce=data[76:80],
        )

    @property
    def message(self) -> bytes:
        """Merkle tail + timestamp + bits: the 12 Message bytes of chunk 2."""
        return self.merkle_root[28:32] + self.timestamp + self.bits

    def with_nonce(self, nonce: int) -> "BlockHeader":
        """Replace the nonce field with the big-endian encoding of ``nonce``."""
        return BlockHeader(
            self.version,
            self.prev_hash,
            self.merkle_root,
            self.timestamp,
            self.bits,
            (nonce & 0xFFFFFFFF).to_bytes(4, "big"),
        )


def parse_header_hex(text: str) -> BlockHeader:
    """Parse the on-disk header format: 160 lowercase hex chars, wire order."""
    text = text.strip()
    if len(text) != 2 * HEADER_LEN:
        raise BadLength(f"expected {2 * HEADER_LEN} hex chars, got {len(text)}")
    try:
        raw = bytes.fromhex(text)
    except ValueError as exc:
        raise BadHex(str(exc)) from None
    return BlockHeader.parse(raw)


def split_chunks(header: BlockHeader) -> tuple[Chunk, Chunk]:
    """Split a header into its two SHA chunks, chunk 2 carrying the fixed
    padding for an 80-byte message."""
    raw = header.serialize()
    chunk1 = Chunk.from_bytes(raw[:64])
    tail = raw[64:80]
    words2 = tuple(int.from_bytes(tail[4 * i : 4 * i + 4], "big") for i in range(4))
    return chunk1, Chunk(words2 + CHUNK2_PAD_WORDS)


def second_sha_chunk(digest: HashState) -> Chunk:
    """Package a first-SHA digest as the padded single chunk of the second SHA."""
    return Chunk(digest.h + SECOND_SHA_PAD_WORDS)


def double_sha(header: BlockHeader) -> bytes:
    """Double SHA-256 of the 80 header bytes via the staged pipeline."""
    chunk1, chunk2 = split_chunks(header)
    mid = digest_one_chunk(INITIAL_STATE, chunk1)
    first = digest_one_chunk(mid, chunk2)
    second = digest_one_chunk(INITIAL_STATE, second_sha_chunk(first))
    return second.to_bytes()


@dataclass(frozen=True)
class Target:
    """Difficulty target: full 256-bit value plus its compact encoding."""

    value: int
    compact: int

    def __post_init__(self):
        if not 0 <= self.value <= MAX_TARGET:
            raise OverflowError(f"target value out of 256-bit range: {self.value:#x}")

    @classmethod
    def from_compact(cls, compact) -> "Target":
        return decode_compact(compact)

    def bits_field(self) -> bytes:
        """The 4 wire-order bytes of a header's bits field."""
        return self.compact.to_bytes(4, "little")


def decode_compact(compact) -> Target:
    """Decode Bitcoin's compact 4-byte target encoding.

    Accepts the conventional integer form (e.g. ``0x1D00FFFF``) or the 4
    wire-order bytes of a header's bits field.  Encodings with exponent
    below 3 or the mantissa sign bit set are rejected rather than emulated.
    """
    if isinstance(compact, (bytes, bytearray)):
        if len(compact) != 4:
            raise UnsupportedEncoding(f"compact bits field must be 4 bytes, got {len(compact)}")
        compact = int.from_bytes(compact, "little")
    if not 0 <= compact <= 0xFFFFFFFF:
        raise UnsupportedEncoding(f"compact encoding out of 32-bit range: {compact:#x}")
    exponent = compact >> 24
    mantissa = compact & 0x00FFFFFF
    if mantissa & 0x00800000:
        raise UnsupportedEncoding(f"mantissa sign bit set in {compact:#010x}")
    if exponent < 3 and mantissa != 0:
        raise UnsupportedEncoding(f"exponent below 3 in {compact:#010x}")
    value = mantissa * 256 ** (exponent - 3) if mantissa else 0
    if value > MAX_TARGET:
        raise OverflowError(f"decoded target exceeds 256 bits: {compact:#010x}")
    return Target(value=value, compact=compact)


def encode_compact(value: int) -> int:
    """Encode a target value into normalized compact form."""
    if not 0 <= value <= MAX_TARGET:
        raise OverflowError(f"target value out of 256-bit range: {value:#x}")
    if value == 0:
        return 0x00000000
    # exponents below 3 are rejected on decode, so never emit them
    size = max((value.bit_length() + 7) // 8, 3)
    if size <= 3:
        mantissa = value << (8 * (3 - size))
    else:
        mantissa = value >> (8 * (size - 3))
    # keep the sign bit clear
    if mantissa & 0x00800000:
        mantissa >>= 8
        size += 1
    if size > 0xFF:
        raise OverflowError(f"target value not compact-encodable: {value:#x}")
    return (size << 24) | mantissa


def meets_target(digest: bytes, target: Target) -> bool:
    """True iff the digest, byte-reversed and read as a 256-bit integer,
    is at most the target value (the standard share check)."""
    if len(digest) != 32:
        raise ValueError(f"digest must be 32 bytes, got {len(digest)}")
    return int.from_bytes(digest, "little") <= target.value


def display_hex(digest: bytes) -> str:
    """Byte-reversed hex as block explorers print hashes."""
    return digest[::-1].hex()

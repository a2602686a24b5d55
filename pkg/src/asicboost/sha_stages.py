"""SHA-256 split into independently callable stages.

The pieces of per-chunk processing (message expansion, the 64-round
compression, and the Davies-Meyer feed-forward) are exposed as separate
functions so the mining loops can schedule (and count) each stage on its
own.  ``compress`` deliberately returns the raw 64-round output *without*
the feed-forward addition; ``feed_forward`` adds the pre-compression state
back in.  ``digest_one_chunk`` composes the three.

Everything works on 32-bit words.  Byte strings are packed big-endian into
words at the ``Chunk`` boundary and nowhere else.  There is no streaming
API: mining only ever needs the fixed 1- and 2-chunk paths, and
``pad_message`` exists for test vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

MASK32 = 0xFFFFFFFF

# fmt: off
IV: tuple[int, ...] = (
    0x6A09E667, 0xBB67AE85, 0x3C6EF372, 0xA54FF53A,
    0x510E527F, 0x9B05688C, 0x1F83D9AB, 0x5BE0CD19,
)

K: tuple[int, ...] = (
    0x428A2F98, 0x71374491, 0xB5C0FBCF, 0xE9B5DBA5, 0x3956C25B, 0x59F111F1, 0x923F82A4, 0xAB1C5ED5,
    0xD807AA98, 0x12835B01, 0x243185BE, 0x550C7DC3, 0x72BE5D74, 0x80DEB1FE, 0x9BDC06A7, 0xC19BF174,
    0xE49B69C1, 0xEFBE4786, 0x0FC19DC6, 0x240CA1CC, 0x2DE92C6F, 0x4A7484AA, 0x5CB0A9DC, 0x76F988DA,
    0x983E5152, 0xA831C66D, 0xB00327C8, 0xBF597FC7, 0xC6E00BF3, 0xD5A79147, 0x06CA6351, 0x14292967,
    0x27B70A85, 0x2E1B2138, 0x4D2C6DFC, 0x53380D13, 0x650A7354, 0x766A0ABB, 0x81C2C92E, 0x92722C85,
    0xA2BFE8A1, 0xA81A664B, 0xC24B8B70, 0xC76C51A3, 0xD192E819, 0xD6990624, 0xF40E3585, 0x106AA070,
    0x19A4C116, 0x1E376C08, 0x2748774C, 0x34B0BCB5, 0x391C0CB3, 0x4ED8AA4A, 0x5B9CCA4F, 0x682E6FF3,
    0x748F82EE, 0x78A5636F, 0x84C87814, 0x8CC70208, 0x90BEFFFA, 0xA4506CEB, 0xBEF9A3F7, 0xC67178F2,
)
# fmt: on


def _check_words(words, count: int, what: str) -> tuple[int, ...]:
    words = tuple(words)
    if len(words) != count:
        raise ValueError(f"{what} needs exactly {count} words, got {len(words)}")
    for w in words:
        if not 0 <= w <= MASK32:
            raise ValueError(f"{what} word out of 32-bit range: {w:#x}")
    return words


@dataclass(frozen=True)
class Chunk:
    """One 64-byte SHA-256 input block as 16 big-endian words."""

    words: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "words", _check_words(self.words, 16, "Chunk"))

    @classmethod
    def from_bytes(cls, data: bytes) -> "Chunk":
        if len(data) != 64:
            raise ValueError(f"chunk must be 64 bytes, got {len(data)}")
        return cls(tuple(int.from_bytes(data[4 * i : 4 * i + 4], "big") for i in range(16)))

    def to_bytes(self) -> bytes:
        return b"".join(w.to_bytes(4, "big") for w in self.words)


@dataclass(frozen=True)
class ScheduleWords:
    """The 64-word message schedule expanded from one chunk."""

    w: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "w", _check_words(self.w, 64, "ScheduleWords"))


@dataclass(frozen=True)
class HashState:
    """Eight 32-bit state words.  Any value is legal mid-stream."""

    h: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "h", _check_words(self.h, 8, "HashState"))

    @classmethod
    def from_bytes(cls, data: bytes) -> "HashState":
        if len(data) != 32:
            raise ValueError(f"hash state must be 32 bytes, got {len(data)}")
        return cls(tuple(int.from_bytes(data[4 * i : 4 * i + 4], "big") for i in range(8)))

    def to_bytes(self) -> bytes:
        return b"".join(w.to_bytes(4, "big") for w in self.h)


INITIAL_STATE = HashState(IV)


def _rotr(x: int, n: int) -> int:
    return ((x >> n) | (x << (32 - n))) & MASK32


def expand_words(words):
    """Word-level message expansion: 16 input words -> 64 schedule words."""
    w = list(words)
    for t in range(16, 64):
        w15 = w[t - 15]
        w2 = w[t - 2]
        s0 = ((w15 >> 7 | w15 << 25) ^ (w15 >> 18 | w15 << 14) ^ (w15 >> 3)) & MASK32
        s1 = ((w2 >> 17 | w2 << 15) ^ (w2 >> 19 | w2 << 13) ^ (w2 >> 10)) & MASK32
        w.append((w[t - 16] + s0 + w[t - 7] + s1) & MASK32)
    return w


def compress_words(state, w):
    """Word-level 64-round compression, no feed-forward."""
    a, b, c, d, e, f, g, h = state
    for t in range(64):
        s1 = _rotr(e, 6) ^ _rotr(e, 11) ^ _rotr(e, 25)
        ch = (e & f) ^ (~e & g)
        t1 = (h + s1 + ch + K[t] + w[t]) & MASK32
        s0 = _rotr(a, 2) ^ _rotr(a, 13) ^ _rotr(a, 22)
        maj = (a & b) ^ (a & c) ^ (b & c)
        t2 = (s0 + maj) & MASK32
        a, b, c, d, e, f, g, h = (t1 + t2) & MASK32, a, b, c, (d + t1) & MASK32, e, f, g
    return (a, b, c, d, e, f, g, h)


def expand(chunk: Chunk) -> ScheduleWords:
    """Run the message expander over one chunk."""
    return ScheduleWords(tuple(expand_words(chunk.words)))


def compress(state: HashState, schedule: ScheduleWords) -> HashState:
    """Run the 64-round compressor.  Returns the raw round output; the
    caller adds the feed-forward separately."""
    return HashState(compress_words(state.h, schedule.w))


def feed_forward(pre: HashState, post: HashState) -> HashState:
    """Per-word modular addition of the pre-compression state."""
    return HashState(tuple((p + q) & MASK32 for p, q in zip(pre.h, post.h)))


def digest_one_chunk(state: HashState, chunk: Chunk) -> HashState:
    """expand -> compress -> feed-forward for a single chunk."""
    return feed_forward(state, compress(state, expand(chunk)))


def pad_message(message: bytes) -> list[Chunk]:
    """Standard SHA-256 padding of an arbitrary message into whole chunks.

    Only used to drive test vectors; the mining paths use the two fixed
    layouts from the header model instead.
    """
    length = len(message)
    padded = message + b"\x80" + b"\x00" * ((55 - length) % 64) + (8 * length).to_bytes(8, "big")
    return [Chunk.from_bytes(padded[i : i + 64]) for i in range(0, len(padded), 64)]


def digest_message(message: bytes) -> bytes:
    """SHA-256 of an arbitrary message via the staged pipeline (test helper)."""
    state = INITIAL_STATE
    for chunk in pad_message(message):
        state = digest_one_chunk(state, chunk)
    return state.to_bytes()

"""Pure-Python scan kernels.

Fallback backend used when the compiled extension is unavailable (or
forced via ASICBOOST_BACKEND=python).  Implements the same kernel API as
``_speedups`` on top of the word-level stage functions, so results and
counter deltas are identical; only the speed differs.

Kernel API (shared by both backends):

    scan_classic(mids, n, messages, start, end, target_words)
    scan_shared(mids, n, message, start, end, target_words,
                cores_per_expander, count_toggles)

``mids`` is a flat buffer of 8*n midstate words; ``messages`` holds one
12-byte Message per item for the classic loop and a single shared Message
for the swapped loop; ``target_words`` is the 256-bit target value as 8
big-endian words.  Both return ``(solutions, deltas)`` where solutions are
``(item_index, nonce, digest_bytes)`` triples in loop order and deltas is
``(expander1, compressor1, expander2, compressor2, expander1_toggles)``.
"""

from __future__ import annotations

import struct

from .sha_stages import IV, MASK32, compress_words, expand_words

NAME = "python"

_CHUNK2_TAIL = (0x80000000,) + (0,) * 10 + (0x00000280,)
_DIGEST_PAD = (0x80000000,) + (0,) * 6 + (0x00000100,)


def _target_value(target_words) -> int:
    value = 0
    for w in target_words:
        value = (value << 32) | w
    return value


def _reversed_value(digest) -> int:
    """The digest read in Bitcoin's comparison order: bytes reversed, then
    interpreted as a big-endian integer."""
    value = 0
    for w in digest[::-1]:
        value = (value << 32) | (
            ((w & 0xFF) << 24) | ((w & 0xFF00) << 8) | ((w >> 8) & 0xFF00) | (w >> 24)
        )
    return value


def _second_sha(first) -> tuple:
    """Expander 2 + Compressor 2 + feed-forward over a first-SHA digest."""
    w2 = expand_words(list(first) + list(_DIGEST_PAD))
    out = compress_words(IV, w2)
    return tuple((x + y) & MASK32 for x, y in zip(IV, out))


def scan_classic(mids, n, messages, start, end, target_words):
    if n == 0 or end <= start:
        return [], (0, 0, 0, 0, 0)
    target = _target_value(target_words)
    mids_list = [tuple(mids[8 * i : 8 * i + 8]) for i in range(n)]
    msg_words = [struct.unpack(">3I", messages[12 * i : 12 * i + 12]) for i in range(n)]
    e1 = c1 = e2 = c2 = 0
    sols = []
    for idx in range(n):
        mid = mids_list[idx]
        m0, m1, m2 = msg_words[idx]
        for nonce in range(start, end):
            w1 = expand_words((m0, m1, m2, nonce) + _CHUNK2_TAIL)
            e1 += 1
            out = compress_words(mid, w1)
            c1 += 1
            first = tuple((x + y) & MASK32 for x, y in zip(mid, out))
            digest = _second_sha(first)
            e2 += 1
            c2 += 1
            if _reversed_value(digest) <= target:
                sols.append((idx, nonce, struct.pack(">8I", *digest)))
    return sols, (e1, c1, e2, c2, 0)


def scan_shared(mids, n, message, start, end, target_words, cores_per_expander, count_toggles):
    if n == 0 or end <= start:
        return [], (0, 0, 0, 0, 0)
    if n % cores_per_expander:
        raise ValueError("cores_per_expander must divide the item count")
    groups = n // cores_per_expander
    target = _target_value(target_words)
    mids_list = [tuple(mids[8 * i : 8 * i + 8]) for i in range(n)]
    m0, m1, m2 = struct.unpack(">3I", message)
    e1 = c1 = e2 = c2 = 0
    toggles = 1 if count_toggles else 0  # Message load
    sols = []
    for nonce in range(start, end):
        if count_toggles:
            toggles += 1
        chunk2 = (m0, m1, m2, nonce) + _CHUNK2_TAIL
        for g in range(groups):
            # each group of cores re-runs the expander on the same chunk
            w1 = expand_words(chunk2)
            e1 += 1
            for lane in range(cores_per_expander):
                idx = g * cores_per_expander + lane
                mid = mids_list[idx]
                out = compress_words(mid, w1)
                c1 += 1
                first = tuple((x + y) & MASK32 for x, y in zip(mid, out))
                digest = _second_sha(first)
                e2 += 1
                c2 += 1
                if _reversed_value(digest) <= target:
                    sols.append((idx, nonce, struct.pack(">8I", *digest)))
    return sols, (e1, c1, e2, c2, toggles)

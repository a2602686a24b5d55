# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scan kernels.

C implementations of the hot mining loops, sharing the kernel API of
``_kernel_py`` (see there for the contract).  Stage counters are
incremented inside the loops themselves, and a multi-core group really
re-runs the expander per group so the counters describe work the kernel
performed.  Loops run with the GIL released, so nonce-range partitions
can scan on real threads.
"""

import struct

from libc.stdint cimport uint32_t, uint64_t
from libc.stdlib cimport free, realloc

from .sha_stages import IV as _PY_IV, K as _PY_K

NAME = "compiled"

cdef uint32_t K_TAB[64]
cdef uint32_t IV_TAB[8]
cdef int _i
for _i in range(64):
    K_TAB[_i] = _PY_K[_i]
for _i in range(8):
    IV_TAB[_i] = _PY_IV[_i]


cdef inline uint32_t rotr(uint32_t x, int n) nogil:
    return (x >> n) | (x << (32 - n))


cdef inline uint32_t bswap32(uint32_t x) nogil:
    return ((x & 0xFFu) << 24) | ((x & 0xFF00u) << 8) | ((x >> 8) & 0xFF00u) | (x >> 24)


cdef inline uint32_t be32(const unsigned char* p) nogil:
    return ((<uint32_t>p[0]) << 24) | ((<uint32_t>p[1]) << 16) | ((<uint32_t>p[2]) << 8) | (<uint32_t>p[3])


cdef void c_expand(const uint32_t* chunk, uint32_t* w) nogil:
    cdef int t
    cdef uint32_t a, b
    for t in range(16):
        w[t] = chunk[t]
    for t in range(16, 64):
        a = w[t - 15]
        b = w[t - 2]
        w[t] = (w[t - 16]
                + (rotr(a, 7) ^ rotr(a, 18) ^ (a >> 3))
                + w[t - 7]
                + (rotr(b, 17) ^ rotr(b, 19) ^ (b >> 10)))


cdef void c_compress(const uint32_t* state, const uint32_t* w, uint32_t* out) nogil:
    cdef uint32_t a = state[0], b = state[1], c = state[2], d = state[3]
    cdef uint32_t e = state[4], f = state[5], g = state[6], h = state[7]
    cdef uint32_t s0, s1, ch, maj, t1, t2
    cdef int t
    for t in range(64):
        s1 = rotr(e, 6) ^ rotr(e, 11) ^ rotr(e, 25)
        ch = (e & f) ^ ((~e) & g)
        t1 = h + s1 + ch + K_TAB[t] + w[t]
        s0 = rotr(a, 2) ^ rotr(a, 13) ^ rotr(a, 22)
        maj = (a & b) ^ (a & c) ^ (b & c)
        t2 = s0 + maj
        h = g
        g = f
        f = e
        e = d + t1
        d = c
        c = b
        b = a
        a = t1 + t2
    out[0] = a
    out[1] = b
    out[2] = c
    out[3] = d
    out[4] = e
    out[5] = f
    out[6] = g
    out[7] = h


cdef void c_second_sha(const uint32_t* first, uint32_t* w2buf, uint32_t* digest) nogil:
    cdef uint32_t chunk3[16]
    cdef uint32_t out[8]
    cdef int i
    for i in range(8):
        chunk3[i] = first[i]
    chunk3[8] = 0x80000000u
    for i in range(9, 15):
        chunk3[i] = 0
    chunk3[15] = 0x00000100u
    c_expand(chunk3, w2buf)
    c_compress(IV_TAB, w2buf, out)
    for i in range(8):
        digest[i] = IV_TAB[i] + out[i]


cdef inline int c_meets(const uint32_t* d, const uint32_t* t) nogil:
    # digest bytes reversed, read big-endian, compared <= target
    cdef int k
    cdef uint32_t w, tw
    for k in range(8):
        w = bswap32(d[7 - k])
        tw = t[k]
        if w < tw:
            return 1
        if w > tw:
            return 0
    return 1


cdef struct SolBuf:
    uint32_t* data   # records of 10 words: item, nonce, digest[8]
    size_t count
    size_t cap


cdef int sol_push(SolBuf* sb, uint32_t idx, uint32_t nonce, const uint32_t* digest) nogil:
    cdef uint32_t* p
    cdef size_t newcap
    cdef int i
    if sb.count == sb.cap:
        newcap = sb.cap * 2 if sb.cap else 256
        p = <uint32_t*>realloc(sb.data, newcap * 10 * sizeof(uint32_t))
        if p == NULL:
            return 0
        sb.data = p
        sb.cap = newcap
    p = sb.data + sb.count * 10
    p[0] = idx
    p[1] = nonce
    for i in range(8):
        p[2 + i] = digest[i]
    sb.count += 1
    return 1


cdef list sol_to_list(SolBuf* sb):
    cdef list out = []
    cdef size_t r
    cdef uint32_t* p
    for r in range(sb.count):
        p = sb.data + r * 10
        out.append((<int>p[0], <unsigned long>p[1],
                    struct.pack(">8I", p[2], p[3], p[4], p[5], p[6], p[7], p[8], p[9])))
    return out


def scan_classic(mids, int n, messages, unsigned long long start,
                 unsigned long long end, target_words):
    if n == 0 or end <= start:
        return [], (0, 0, 0, 0, 0)
    cdef const uint32_t[::1] mids_mv = mids
    cdef const unsigned char[::1] msg_mv = messages
    if mids_mv.shape[0] != 8 * n:
        raise ValueError("midstate buffer must hold 8 words per item")
    if msg_mv.shape[0] != 12 * n:
        raise ValueError("message buffer must hold 12 bytes per item")
    cdef uint32_t tgt[8]
    cdef int i
    for i in range(8):
        tgt[i] = target_words[i]

    cdef const uint32_t* mids_p = &mids_mv[0]
    cdef const unsigned char* msg_p = &msg_mv[0]
    cdef const uint32_t* mid
    cdef const unsigned char* m
    cdef uint32_t chunk2[16]
    cdef uint32_t w1[64]
    cdef uint32_t w2[64]
    cdef uint32_t comp[8]
    cdef uint32_t first[8]
    cdef uint32_t digest[8]
    cdef uint64_t e1 = 0, c1 = 0, e2 = 0, c2 = 0
    cdef uint64_t v
    cdef int idx, oom = 0
    cdef SolBuf sb
    sb.data = NULL
    sb.count = 0
    sb.cap = 0

    with nogil:
        chunk2[4] = 0x80000000u
        for i in range(5, 15):
            chunk2[i] = 0
        chunk2[15] = 0x00000280u
        for idx in range(n):
            m = msg_p + 12 * idx
            chunk2[0] = be32(m)
            chunk2[1] = be32(m + 4)
            chunk2[2] = be32(m + 8)
            mid = mids_p + 8 * idx
            for v in range(start, end):
                chunk2[3] = <uint32_t>v
                c_expand(chunk2, w1)
                e1 += 1
                c_compress(mid, w1, comp)
                c1 += 1
                for i in range(8):
                    first[i] = mid[i] + comp[i]
                c_second_sha(first, w2, digest)
                e2 += 1
                c2 += 1
                if c_meets(digest, tgt):
                    if not sol_push(&sb, <uint32_t>idx, <uint32_t>v, digest):
                        oom = 1
                        break
            if oom:
                break

    if oom:
        free(sb.data)
        raise MemoryError("solution buffer allocation failed")
    result = sol_to_list(&sb)
    free(sb.data)
    return result, (e1, c1, e2, c2, 0)


def scan_shared(mids, int n, message, unsigned long long start,
                unsigned long long end, target_words, int cores_per_expander,
                bint count_toggles):
    if n == 0 or end <= start:
        return [], (0, 0, 0, 0, 0)
    if cores_per_expander < 1 or n % cores_per_expander:
        raise ValueError("cores_per_expander must divide the item count")
    cdef const uint32_t[::1] mids_mv = mids
    cdef const unsigned char[::1] msg_mv = message
    if mids_mv.shape[0] != 8 * n:
        raise ValueError("midstate buffer must hold 8 words per item")
    if msg_mv.shape[0] != 12:
        raise ValueError("shared message must be 12 bytes")
    cdef uint32_t tgt[8]
    cdef int i
    for i in range(8):
        tgt[i] = target_words[i]

    cdef int groups = n // cores_per_expander
    cdef const uint32_t* mids_p = &mids_mv[0]
    cdef const unsigned char* msg_p = &msg_mv[0]
    cdef const uint32_t* mid
    cdef uint32_t chunk2[16]
    cdef uint32_t w1[64]
    cdef uint32_t w2[64]
    cdef uint32_t comp[8]
    cdef uint32_t first[8]
    cdef uint32_t digest[8]
    cdef uint64_t e1 = 0, c1 = 0, e2 = 0, c2 = 0, toggles = 0
    cdef uint64_t v
    cdef int g, lane, idx, oom = 0
    cdef SolBuf sb
    sb.data = NULL
    sb.count = 0
    sb.cap = 0

    with nogil:
        chunk2[0] = be32(msg_p)
        chunk2[1] = be32(msg_p + 4)
        chunk2[2] = be32(msg_p + 8)
        chunk2[4] = 0x80000000u
        for i in range(5, 15):
            chunk2[i] = 0
        chunk2[15] = 0x00000280u
        if count_toggles:
            toggles += 1  # Message load
        for v in range(start, end):
            if count_toggles:
                toggles += 1  # nonce update
            chunk2[3] = <uint32_t>v
            for g in range(groups):
                # one expansion feeds the whole group of cores
                c_expand(chunk2, w1)
                e1 += 1
                for lane in range(cores_per_expander):
                    idx = g * cores_per_expander + lane
                    mid = mids_p + 8 * idx
                    c_compress(mid, w1, comp)
                    c1 += 1
                    for i in range(8):
                        first[i] = mid[i] + comp[i]
                    c_second_sha(first, w2, digest)
                    e2 += 1
                    c2 += 1
                    if c_meets(digest, tgt):
                        if not sol_push(&sb, <uint32_t>idx, <uint32_t>v, digest):
                            oom = 1
                            break
                if oom:
                    break
            if oom:
                break

    if oom:
        free(sb.data)
        raise MemoryError("solution buffer allocation failed")
    result = sol_to_list(&sb)
    free(sb.data)
    return result, (e1, c1, e2, c2, toggles)

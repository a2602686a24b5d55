"""Staged SHA-256 against the independent reference and FIPS vectors."""

import hashlib
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracle
from asicboost.sha_stages import (
    INITIAL_STATE,
    IV,
    K,
    Chunk,
    HashState,
    ScheduleWords,
    compress,
    digest_message,
    digest_one_chunk,
    expand,
    feed_forward,
    pad_message,
)

TWO_BLOCK = b"abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq"

words8 = st.tuples(*[st.integers(0, 0xFFFFFFFF)] * 8)
words16 = st.tuples(*[st.integers(0, 0xFFFFFFFF)] * 16)


class TestOracleItself:
    """The reference must stand on published vectors before it judges
    anything else."""

    @pytest.mark.parametrize(
        "message, digest_hex",
        [
            (b"abc", "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"),
            (b"", "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855"),
            (TWO_BLOCK, "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1"),
        ],
    )
    def test_fips_vectors(self, message, digest_hex):
        assert oracle.sha256(message).hex() == digest_hex

    def test_derived_constants_match_package(self):
        assert tuple(oracle.K) == K
        assert tuple(oracle.H0) == IV


class TestExpand:
    def test_first_sixteen_copy_the_chunk(self):
        chunk = Chunk(tuple(range(16)))
        sched = expand(chunk)
        assert sched.w[:16] == chunk.words

    def test_zero_chunk_stays_zero_early(self):
        sched = expand(Chunk((0,) * 16))
        assert sched.w[:16] == (0,) * 16
        assert sched.w[16] == 0
        assert sched.w[17] == 0

    def test_abc_schedule_feeds_correct_digest(self):
        (chunk,) = pad_message(b"abc")
        state = feed_forward(INITIAL_STATE, compress(INITIAL_STATE, expand(chunk)))
        assert state.to_bytes() == oracle.sha256(b"abc")

    @given(words16)
    def test_prefix_property(self, words):
        assert expand(Chunk(words)).w[:16] == words


class TestCompressAndFeedForward:
    def test_deterministic(self):
        sched = expand(Chunk(tuple(range(16))))
        once = compress(INITIAL_STATE, sched)
        again = compress(INITIAL_STATE, sched)
        assert once == again

    @given(words8)
    def test_feed_forward_identity(self, words):
        state = HashState(words)
        assert feed_forward(HashState((0,) * 8), state) == state

    def test_feed_forward_wraps_mod_2_32(self):
        s = HashState((0x80000000,) * 8)
        assert feed_forward(s, s) == HashState((0,) * 8)

    @given(words8, words8)
    def test_feed_forward_is_wordwise_addition(self, a, b):
        out = feed_forward(HashState(a), HashState(b))
        assert out.h == tuple((x + y) & 0xFFFFFFFF for x, y in zip(a, b))

    def test_compress_excludes_feed_forward(self):
        # digest = compress + feed-forward; compress alone must differ
        (chunk,) = pad_message(b"abc")
        raw = compress(INITIAL_STATE, expand(chunk))
        assert raw.to_bytes() != oracle.sha256(b"abc")
        assert feed_forward(INITIAL_STATE, raw).to_bytes() == oracle.sha256(b"abc")

    def test_header_chunk1_state_matches_oracle_internals(self):
        rng = random.Random(7)
        for _ in range(20):
            header = rng.randbytes(80)
            chunk1 = Chunk.from_bytes(header[:64])
            mid = digest_one_chunk(INITIAL_STATE, chunk1)
            assert list(mid.h) == oracle.state_after_chunk1(header)


class TestPadding:
    @given(st.binary(max_size=200))
    def test_padding_shape(self, message):
        padded = b"".join(chunk.to_bytes() for chunk in pad_message(message))
        assert len(padded) % 64 == 0
        assert padded.startswith(message)
        assert padded[len(message)] == 0x80
        assert padded[-8:] == (8 * len(message)).to_bytes(8, "big")
        assert set(padded[len(message) + 1 : -8]) <= {0}

    def test_matches_oracle_padding(self):
        for size in (0, 1, 55, 56, 63, 64, 80, 119, 120):
            message = b"\xab" * size
            padded = b"".join(chunk.to_bytes() for chunk in pad_message(message))
            assert padded == oracle.pad(message)


class TestFullDigests:
    @given(st.binary(max_size=55))
    def test_single_chunk_messages(self, message):
        assert digest_message(message) == hashlib.sha256(message).digest()

    @given(st.binary(min_size=56, max_size=150))
    def test_multi_chunk_messages(self, message):
        assert digest_message(message) == oracle.sha256(message)

    def test_randomized_sweep_against_oracle(self):
        rng = random.Random(2024)
        for _ in range(300):
            message = rng.randbytes(rng.randrange(0, 56))
            assert digest_message(message) == oracle.sha256(message)


class TestTypeInvariants:
    def test_chunk_needs_sixteen_words(self):
        with pytest.raises(ValueError):
            Chunk((0,) * 15)

    def test_chunk_word_packing_is_big_endian(self):
        chunk = Chunk.from_bytes(bytes([1, 2, 3, 4]) + bytes(60))
        assert chunk.words[0] == 0x01020304
        assert chunk.to_bytes()[:4] == bytes([1, 2, 3, 4])

    @given(st.binary(min_size=64, max_size=64))
    def test_chunk_round_trip(self, raw):
        assert Chunk.from_bytes(raw).to_bytes() == raw

    def test_state_needs_eight_words(self):
        with pytest.raises(ValueError):
            HashState((0,) * 7)

    def test_schedule_needs_sixty_four_words(self):
        with pytest.raises(ValueError):
            ScheduleWords((0,) * 63)

    def test_words_must_fit_32_bits(self):
        with pytest.raises(ValueError):
            Chunk((1 << 32,) + (0,) * 15)

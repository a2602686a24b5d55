"""Compiled and pure-Python kernels must be indistinguishable."""

import random
from array import array

import pytest

from asicboost import backend
from asicboost.gain import synthetic_set
from asicboost.loops import NonceRange, OpCounters, asicboost_scan, classic_scan


def test_python_kernels_always_available():
    assert "python" in backend.available_backends()


def test_compiled_kernels_present_in_this_build():
    # the package ships a compiled core; its absence means a broken build
    assert "compiled" in backend.available_backends()


def test_default_prefers_compiled(monkeypatch):
    monkeypatch.delenv("ASICBOOST_BACKEND", raising=False)
    assert backend.default_backend_name() == "compiled"


def test_env_override(monkeypatch):
    monkeypatch.setenv("ASICBOOST_BACKEND", "python")
    assert backend.default_backend_name() == "python"
    assert backend.get_backend().NAME == "python"
    monkeypatch.setenv("ASICBOOST_BACKEND", "auto")
    assert backend.default_backend_name() == "compiled"


def test_env_override_unknown_name_fails(monkeypatch):
    monkeypatch.setenv("ASICBOOST_BACKEND", "fpga")
    with pytest.raises(RuntimeError):
        backend.default_backend_name()


def test_get_backend_rejects_unknown_name():
    with pytest.raises(ValueError):
        backend.get_backend("gpu")


def _random_inputs(rng, n):
    mids = array("I", [rng.getrandbits(32) for _ in range(8 * n)])
    messages = rng.randbytes(12 * n)
    target = tuple(rng.getrandbits(32) for _ in range(8))
    return mids, messages, target


class TestKernelEquivalence:
    """Drive the raw kernel entry points with identical random inputs."""

    def test_classic_kernel(self):
        rng = random.Random(31)
        py = backend.get_backend("python")
        cc = backend.get_backend("compiled")
        for _ in range(8):
            n = rng.randrange(1, 5)
            mids, messages, target = _random_inputs(rng, n)
            start = rng.randrange(0, 2**32 - 512)
            end = start + rng.randrange(0, 512)
            # generous target so solutions paths get exercised
            target = (0x7FFFFFFF,) + target[1:]
            a = py.scan_classic(mids, n, messages, start, end, target)
            b = cc.scan_classic(mids, n, messages, start, end, target)
            assert a == b

    def test_shared_kernel(self):
        rng = random.Random(32)
        py = backend.get_backend("python")
        cc = backend.get_backend("compiled")
        for _ in range(8):
            n = rng.choice([1, 2, 3, 4, 6])
            mids, _, target = _random_inputs(rng, n)
            message = rng.randbytes(12)
            start = rng.randrange(0, 2**32 - 512)
            end = start + rng.randrange(0, 512)
            target = (0x7FFFFFFF,) + target[1:]
            cpe = rng.choice([d for d in (1, 2, 3, 6) if n % d == 0])
            toggles = rng.random() < 0.5
            a = py.scan_shared(mids, n, message, start, end, target, cpe, toggles)
            b = cc.scan_shared(mids, n, message, start, end, target, cpe, toggles)
            assert a == b

    def test_nonce_space_edges(self):
        rng = random.Random(33)
        py = backend.get_backend("python")
        cc = backend.get_backend("compiled")
        mids, messages, _ = _random_inputs(rng, 2)
        target = (0xFFFFFFFF,) * 8  # everything qualifies
        start, end = 2**32 - 3, 2**32
        a = py.scan_classic(mids, 2, messages, start, end, target)
        b = cc.scan_classic(mids, 2, messages, start, end, target)
        assert a == b
        assert len(a[0]) == 6  # 2 items x 3 nonces, all passing
        assert {nonce for _, nonce, _ in a[0]} == {2**32 - 3, 2**32 - 2, 2**32 - 1}


class TestScanLevelEquivalence:
    def test_solutions_and_counters_identical(self):
        cset = synthetic_set(4, seed=40)
        rng = NonceRange(0, 2048)
        from asicboost.header import Target

        easy = Target(value=(1 << 247) - 1, compact=0)
        results = {}
        for name in ("python", "compiled"):
            counters = OpCounters()
            sols = classic_scan(cset, rng, easy, counters, backend=name)
            boosted = asicboost_scan(cset, rng, easy, OpCounters(), backend=name)
            results[name] = (sols, boosted, counters.as_dict())
        assert results["python"] == results["compiled"]
        assert results["python"][0], "expected at least one solution in range"

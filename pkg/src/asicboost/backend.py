"""Scan-kernel backend selection.

The compiled extension is preferred when it imported cleanly; otherwise
the pure-Python kernels take over.  ``ASICBOOST_BACKEND`` (``auto``,
``compiled`` or ``python``) overrides the default, and every scan entry
point also accepts an explicit ``backend=`` argument.
"""

from __future__ import annotations

import os

from . import _kernel_py

try:
    from . import _speedups
except ImportError:  # no compiled kernels in this install
    _speedups = None

_BACKENDS = {"python": _kernel_py}
if _speedups is not None:
    _BACKENDS["compiled"] = _speedups


def available_backends() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def default_backend_name() -> str:
    choice = os.environ.get("ASICBOOST_BACKEND", "auto").lower()
    if choice in ("auto", ""):
        return "compiled" if _speedups is not None else "python"
    if choice not in _BACKENDS:
        raise RuntimeError(
            f"ASICBOOST_BACKEND={choice!r} is not available; "
            f"choose from {available_backends()} or 'auto'"
        )
    return choice


def get_backend(name: str | None = None):
    """Resolve a backend module by name (None or 'auto' = default)."""
    if name is None or name == "auto":
        name = default_backend_name()
    try:
        return _BACKENDS[name]
    except KeyError:
        raise ValueError(
            f"unknown backend {name!r}; available: {available_backends()}"
        ) from None

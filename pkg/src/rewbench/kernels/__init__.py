"""Kernel backend selection.

The compiled extension is preferred when importable, with a numpy fallback
otherwise.  Set REWBENCH_BACKEND to "python" or "compiled" to force one; the
CLI exposes the same choice via --backend.
"""

from __future__ import annotations

import os

from . import reference

try:
    from . import _compiled
except ImportError:
    _compiled = None

_BACKENDS = {"python": reference}
if _compiled is not None:
    _BACKENDS["compiled"] = _compiled


def available() -> tuple[str, ...]:
    return tuple(sorted(_BACKENDS))


def resolve_name(name: str | None = None) -> str:
    if name in (None, "", "auto"):
        name = os.environ.get("REWBENCH_BACKEND", "auto") or "auto"
    if name == "auto":
        return "compiled" if "compiled" in _BACKENDS else "python"
    if name not in _BACKENDS:
        raise ValueError(
            f"unknown kernel backend {name!r}; available: {', '.join(available())}"
        )
    return name


def load(name: str | None = None):
    """The backend module for `name` (None/"auto" picks the default)."""
    return _BACKENDS[resolve_name(name)]

"""Kernel backend selection: compiled extension when built, pure Python otherwise.

``ALLOCDSS_KERNEL=python`` forces the fallback even when the extension is
available; ``ALLOCDSS_KERNEL=compiled`` raises at import if it is not.
"""

from __future__ import annotations

import os

from . import pure

_FORCED = os.environ.get("ALLOCDSS_KERNEL", "").strip().lower()

try:
    from . import _cumulative  # type: ignore[attr-defined]

    HAVE_COMPILED = True
except ImportError:
    _cumulative = None  # type: ignore[assignment]
    HAVE_COMPILED = False

if _FORCED == "compiled" and not HAVE_COMPILED:
    raise ImportError(
        "ALLOCDSS_KERNEL=compiled but the allocdss._kernels._cumulative "
        "extension is not built; reinstall with Cython available"
    )

if _FORCED == "python" or not HAVE_COMPILED:
    DEFAULT_BACKEND = "python"
else:
    DEFAULT_BACKEND = "compiled"


def available_backends() -> list[str]:
    backends = ["python"]
    if HAVE_COMPILED:
        backends.append("compiled")
    return backends


def get_kernel(backend: str | None = None):
    """Return the cumulative_pass callable for a backend name (None = default)."""
    name = backend or DEFAULT_BACKEND
    if name in ("auto", "default"):
        name = DEFAULT_BACKEND
    if name == "python":
        return pure.cumulative_pass
    if name == "compiled":
        if not HAVE_COMPILED:
            raise ValueError("compiled kernel requested but the extension is not built")
        return _cumulative.cumulative_pass
    raise ValueError(f"unknown kernel backend {name!r}")

"""Batch assurance kernel with compiled/pure-Python backends.

The full-graph recompute is the one hot loop in the system; it is
implemented twice with identical float semantics: a Cython extension
(built at install time) and a Python fallback. Selection happens at
import: the compiled kernel when available, unless ``FPF_PURE_PYTHON=1``
forces the fallback. Both are exposed for the comparison benchmark.
"""

from __future__ import annotations

import os

from . import _reff_py

_COMPILED = None
if not os.environ.get("FPF_PURE_PYTHON"):
    try:
        from . import _reff_cy as _COMPILED  # type: ignore[no-redef]
    except ImportError:
        _COMPILED = None

_ACTIVE = _COMPILED if _COMPILED is not None else _reff_py


def backend_name() -> str:
    return "compiled" if _ACTIVE is _COMPILED and _COMPILED is not None else "python"


def available_backends() -> list[str]:
    names = ["python"]
    if _COMPILED is not None:
        names.insert(0, "compiled")
    return names


def get_backend(name: str | None = None):
    """Resolve a backend module by name; None means the active default."""
    if name is None:
        return _ACTIVE
    if name == "python":
        return _reff_py
    if name == "compiled":
        if _COMPILED is None:
            raise RuntimeError("compiled kernel is not available")
        return _COMPILED
    raise ValueError(f"unknown kernel backend {name!r}")

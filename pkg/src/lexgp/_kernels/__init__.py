"""Kernel backend selection.

The compiled extension is used when importable; otherwise the numpy
fallback.  LEXGP_BACKEND=python or =c forces the choice (forcing c
raises if the extension was never built).
"""

from __future__ import annotations

import os

from . import _pykernels

_choice = os.environ.get("LEXGP_BACKEND", "auto").strip().lower()
if _choice not in {"auto", "c", "python"}:
    raise ImportError(
        f"LEXGP_BACKEND must be 'auto', 'c' or 'python', got {_choice!r}")

_impl = None
if _choice in {"auto", "c"}:
    try:
        from . import _ckernels as _impl
    except ImportError:
        if _choice == "c":
            raise ImportError(
                "LEXGP_BACKEND=c but the compiled kernels are not installed")
if _impl is None:
    _impl = _pykernels

BACKEND = _impl.BACKEND_NAME
posy_eval_log = _impl.posy_eval_log
dual_objective = _impl.dual_objective
dual_gradient = _impl.dual_gradient
oracle_stage = _impl.oracle_stage


def available_backends():
    """Names of the kernel backends importable right now."""
    names = ["python"]
    try:
        from . import _ckernels  # noqa: F401
        names.insert(0, "c")
    except ImportError:
        pass
    return names

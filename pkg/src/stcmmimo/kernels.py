"""Kernel backend selection: compiled extension if built, numpy otherwise.

Set STCM_KERNEL=python or STCM_KERNEL=cython to force a backend (the latter
raises if the extension is missing).
"""

import os

_forced = os.environ.get("STCM_KERNEL", "").strip().lower()

if _forced == "python":
    from . import _ber_core_py as _impl

    BACKEND = "python"
elif _forced == "cython":
    from . import _ber_core as _impl  # type: ignore[attr-defined]

    BACKEND = "cython"
else:
    try:
        from . import _ber_core as _impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        from . import _ber_core_py as _impl

        BACKEND = "python"

count_bit_errors = _impl.count_bit_errors

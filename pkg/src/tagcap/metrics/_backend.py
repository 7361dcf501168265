"""Kernel backend selection.

The compiled Cython extension is preferred; the pure-Python kernel is used
when the extension was not built or when TAGCAP_PURE=1 is set.
"""

import os

import numpy as np

if os.environ.get("TAGCAP_PURE"):
    from . import _kernels_py as _impl

    COMPILED = False
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]

        COMPILED = True
    except ImportError:
        from . import _kernels_py as _impl

        COMPILED = False

BACKEND_NAME = "cython" if COMPILED else "python"


def lcs_length(a: list[str], b: list[str]) -> int:
    """LCS length of two token sequences."""
    if not a or not b:
        return 0
    ids: dict[str, int] = {}
    xa = np.fromiter((ids.setdefault(t, len(ids)) for t in a), dtype=np.int32, count=len(a))
    xb = np.fromiter((ids.setdefault(t, len(ids)) for t in b), dtype=np.int32, count=len(b))
    if COMPILED:
        return _impl.lcs_length_ids(xa, xb)
    return _impl.lcs_length_ids(xa.tolist(), xb.tolist())

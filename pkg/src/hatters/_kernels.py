"""Kernel dispatch: the compiled extension when importable, else pure Python.

Set ``HATTERS_PURE=1`` to force the pure-Python fallback.
"""

from __future__ import annotations

import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels

if os.environ.get("HATTERS_PURE", "") not in ("1", "true", "yes"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]

        BACKEND = "cython"
    except ImportError:
        pass

first_demonic_range = _impl.first_demonic_range
first_demonic_list = _impl.first_demonic_list
solve_search = _impl.solve_search
tree_demon = getattr(_impl, "tree_demon", None)

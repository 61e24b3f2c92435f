"""Select the walk kernel: compiled if importable, else pure Python.

Set ``CIUGRAPH_PURE_PYTHON=1`` to force the fallback.
"""

import os

from . import _walk_py

BACKEND = "python"
walk_stats = _walk_py.walk_stats

if not os.environ.get("CIUGRAPH_PURE_PYTHON"):
    try:
        from . import _walk
    except ImportError:
        _walk = None
    else:
        BACKEND = "cython"
        walk_stats = _walk.walk_stats

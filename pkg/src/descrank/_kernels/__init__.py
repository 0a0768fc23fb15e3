"""Hot-loop kernels with a compiled core and a pure-Python fallback.

The compiled extension is preferred when importable; set
DESCRANK_PURE_PYTHON=1 to force the fallback. `BACKEND` names the one in
use ("c" or "python").
"""

import os

if os.environ.get("DESCRANK_PURE_PYTHON"):
    from ._pykernels import BACKEND, clipped_ngram_overlap, lcs_length
else:
    try:
        from ._speedups import BACKEND, clipped_ngram_overlap, lcs_length
    except ImportError:
        from ._pykernels import BACKEND, clipped_ngram_overlap, lcs_length

__all__ = ["BACKEND", "clipped_ngram_overlap", "lcs_length"]

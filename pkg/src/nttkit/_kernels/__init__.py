"""Hot kernels with a compiled backend and a NumPy fallback.

The two entry points (`tt_entries`, `sparse_gradient_cores`) sit in the inner
loop of sampled-entry workloads: both are O(m * d * r^2) chains over a batch of
multi-indices. A Cython implementation is used when the compiled module built;
otherwise the vectorized NumPy one. Set NTTKIT_KERNELS=py or NTTKIT_KERNELS=ct
to force a backend (ct raises if the extension is missing).
"""

import os

from . import _pyops

_forced = os.environ.get("NTTKIT_KERNELS", "").strip().lower()

_ct = None
if _forced != "py":
    try:
        from . import _ctops as _ct
    except ImportError:
        _ct = None
        if _forced == "ct":
            raise ImportError(
                "NTTKIT_KERNELS=ct but the compiled kernels are not built")

if _ct is not None:
    BACKEND = "cython"
    tt_entries = _ct.tt_entries
    sparse_gradient_cores = _ct.sparse_gradient_cores
else:
    BACKEND = "numpy"
    tt_entries = _pyops.tt_entries
    sparse_gradient_cores = _pyops.sparse_gradient_cores

__all__ = ["BACKEND", "tt_entries", "sparse_gradient_cores", "_pyops"]

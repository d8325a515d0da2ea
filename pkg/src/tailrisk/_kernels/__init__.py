"""Fitting kernels with a compiled fast path and a NumPy fallback.

``_core`` is a Cython extension built at install time; ``_fallback`` has
identical semantics in NumPy. The compiled module wins when present.
Set ``TAILRISK_KERNELS=numpy`` to force the fallback (benchmarking and
debugging); results are identical either way, only speed differs.
"""

import os

from . import _fallback

if os.environ.get("TAILRISK_KERNELS", "").strip().lower() == "numpy":
    _impl = _fallback
else:
    try:
        from . import _core as _impl  # built by setup.py; may be absent
    except ImportError:
        _impl = _fallback

BACKEND = _impl.BACKEND
B_ZERO_TOL = _impl.B_ZERO_TOL
K_ZERO_TOL = _impl.K_ZERO_TOL

k_of_b = _impl.k_of_b
profile_score = _impl.profile_score
profile_loglik = _impl.profile_loglik
zhang_g = _impl.zhang_g
gpd_loglik = _impl.gpd_loglik


def available_backends():
    """Importable kernel modules keyed by name ('numpy' always present)."""
    out = {"numpy": _fallback}
    try:
        from . import _core
    except ImportError:
        pass
    else:
        out["cython"] = _core
    return out

"""Kernel backend selection.

The hot quadrature loops exist twice: a Cython extension (``_core``) and a
numpy fallback (``_py``). The backend is chosen once at import time:

* ``VOROCOVER_BACKEND=python`` forces the numpy fallback,
* ``VOROCOVER_BACKEND=c`` requires the extension (ImportError if missing),
* unset: the extension if built, else the fallback.

Whichever backend is active, results are deterministic call to call.
"""

import os

_requested = os.environ.get("VOROCOVER_BACKEND", "").strip().lower()

if _requested == "python":
    from . import _py as _impl
    BACKEND = "python"
elif _requested == "c":
    from . import _core as _impl  # type: ignore[no-redef]
    BACKEND = "c"
elif _requested == "":
    try:
        from . import _core as _impl  # type: ignore[no-redef]
        BACKEND = "c"
    except ImportError:
        from . import _py as _impl  # type: ignore[no-redef]
        BACKEND = "python"
else:
    raise ImportError(f"unknown VOROCOVER_BACKEND value: {_requested!r}")

ownership = _impl.ownership
gaussian_mixture = _impl.gaussian_mixture
owned_moments = _impl.owned_moments

__all__ = ["BACKEND", "ownership", "gaussian_mixture", "owned_moments"]

"""Backend dispatch for the per-replication hot kernels.

The compiled Cython core (``sphericity._ckernels``) is preferred when it
built successfully; otherwise the NumPy fallback is used.  The choice can
be forced through the ``SPHERICITY_BACKEND`` environment variable
(``auto``, ``c``, or ``python``).  Both backends implement the same
algorithms; results may differ in the last floating-point digits because
summation order differs.
"""

import os

from . import _pykernels

_CHOICE = os.environ.get("SPHERICITY_BACKEND", "auto").lower()
if _CHOICE not in ("auto", "c", "python"):
    raise RuntimeError(
        f"SPHERICITY_BACKEND={_CHOICE!r} not understood; use auto, c, or python"
    )

_impl = _pykernels
if _CHOICE in ("auto", "c"):
    try:
        from . import _ckernels as _impl  # type: ignore[no-redef]
    except ImportError:
        if _CHOICE == "c":
            raise RuntimeError(
                "SPHERICITY_BACKEND=c but the compiled kernels are not "
                "available; reinstall with a C compiler or use python"
            ) from None

weiszfeld = _impl.weiszfeld
fourth_moments = _impl.fourth_moments
signs_and_inverse_norms = _impl.signs_and_inverse_norms
max_cov_terms = _impl.max_cov_terms
max_sign_terms = _impl.max_sign_terms


def backend_name() -> str:
    """Name of the kernel backend in use ('c' or 'python')."""
    return _impl.BACKEND

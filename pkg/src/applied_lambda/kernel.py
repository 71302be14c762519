"""Backend selection for the reduction kernel.

The Cython extension is used when it has been built; setting
``APPLIED_LAMBDA_PURE=1`` forces the pure-Python implementation.
"""

import os

from . import _pykernel as py

if os.environ.get("APPLIED_LAMBDA_PURE") == "1":
    impl = py
    BACKEND = "python"
else:
    try:
        from . import _ckernel as impl  # type: ignore[attr-defined]

        BACKEND = "cython"
    except ImportError:
        impl = py
        BACKEND = "python"


def compiled_available() -> bool:
    try:
        from . import _ckernel  # noqa: F401
    except ImportError:
        return False
    return True

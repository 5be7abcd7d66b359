"""Bulk encode/decode kernels, compiled when available.

The Cython extension is used unless it failed to build or the environment
variable ``ECZ_PURE_PYTHON`` is set to a non-empty value other than ``0``.
"""

import os

from . import _pykernels

BACKEND = "python"
encode_channel = _pykernels.encode_channel
decode_channel = _pykernels.decode_channel

if os.environ.get("ECZ_PURE_PYTHON", "0") in ("", "0"):
    try:
        from . import _kernels
    except ImportError:
        _kernels = None
    else:
        BACKEND = "cython"
        encode_channel = _kernels.encode_channel
        decode_channel = _kernels.decode_channel


def compiled_available() -> bool:
    try:
        from . import _kernels  # noqa: F401
    except ImportError:
        return False
    return True

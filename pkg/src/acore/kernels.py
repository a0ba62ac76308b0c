"""Kernel backend selection.

The compiled extension is used when it imported cleanly; otherwise the
pure-Python module takes over. ``ACORE_PURE_PYTHON=1`` forces the fallback,
which the kernel benchmark uses to compare the two.
"""

from __future__ import annotations

import os

if os.environ.get("ACORE_PURE_PYTHON"):
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[no-redef]
    except ImportError:
        from . import _kernels_py as _impl  # type: ignore[no-redef]

BACKEND: str = _impl.BACKEND

sha256 = _impl.sha256
hash_n = _impl.hash_n
xor_bytes = _impl.xor_bytes
puf_response = _impl.puf_response
merkle_leaf_hash = _impl.merkle_leaf_hash
merkle_node_hash = _impl.merkle_node_hash
merkle_root = _impl.merkle_root
hamming_distance = _impl.hamming_distance


def zeros(n_bytes: int) -> bytes:
    return b"\x00" * n_bytes

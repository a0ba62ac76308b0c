"""Pure-Python byte-level kernels.

:mod:`acore.kernels` prefers the compiled extension and falls back to this
module. Both backends expose the same functions and must agree bit for bit;
``tests/test_kernels.py`` enforces the equivalence.
"""

from __future__ import annotations

import hashlib
from typing import Sequence

BACKEND = "python"


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def hash_n(n_bits: int, *parts: bytes) -> bytes:
    """SHA-256 over the concatenated parts, truncated or expanded to n_bits.

    Widths of 256 bits or less take a digest prefix; wider outputs append a
    4-byte big-endian block counter to the input and concatenate digests.
    """
    data = b"".join(parts)
    n_bytes = n_bits // 8
    if n_bytes <= 32:
        return hashlib.sha256(data).digest()[:n_bytes]
    out = bytearray()
    counter = 0
    while len(out) < n_bytes:
        out += hashlib.sha256(data + counter.to_bytes(4, "big")).digest()
        counter += 1
    return bytes(out[:n_bytes])


def xor_bytes(a: bytes, b: bytes) -> bytes:
    if len(a) != len(b):
        raise ValueError("xor operands differ in length")
    n = len(a)
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).to_bytes(n, "big")


def puf_response(seed: bytes, challenge: bytes, n_bits: int) -> bytes:
    return hash_n(n_bits, seed, challenge)


def merkle_leaf_hash(leaf: bytes) -> bytes:
    return hashlib.sha256(b"\x00" + leaf).digest()


def merkle_node_hash(left: bytes, right: bytes) -> bytes:
    return hashlib.sha256(b"\x01" + left + right).digest()


def merkle_root(leaf_hashes: Sequence[bytes]) -> bytes:
    """Root over already-hashed leaves, splitting at the largest power of two."""
    n = len(leaf_hashes)
    if n == 0:
        return hashlib.sha256(b"").digest()
    if n == 1:
        return leaf_hashes[0]
    k = 1 << ((n - 1).bit_length() - 1)
    return merkle_node_hash(merkle_root(leaf_hashes[:k]), merkle_root(leaf_hashes[k:]))


def hamming_distance(a: bytes, b: bytes) -> int:
    if len(a) != len(b):
        raise ValueError("hamming operands differ in length")
    return (int.from_bytes(a, "big") ^ int.from_bytes(b, "big")).bit_count()

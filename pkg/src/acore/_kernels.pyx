# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled byte-level kernels backed by OpenSSL's one-shot digest.

Must stay bit-compatible with acore._kernels_py.
"""

from cpython.bytes cimport PyBytes_AS_STRING, PyBytes_FromStringAndSize
from libc.stdlib cimport free, malloc
from libc.string cimport memcpy

cdef extern from "openssl/evp.h":
    ctypedef struct EVP_MD:
        pass
    const EVP_MD *EVP_sha256()
    int EVP_Digest(const void *data, size_t count, unsigned char *md,
                   unsigned int *size, const EVP_MD *type, void *impl)

BACKEND = "cython"

DEF DIGEST_LEN = 32

cdef const unsigned char[256] POPCOUNT = [
    0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
    1, 2, 2, 3, 2, 3, 3, 4, 2, 3, 3, 4, 3, 4, 4, 5,
    1, 2, 2, 3, 2, 3, 3, 4, 2, 3, 3, 4, 3, 4, 4, 5,
    2, 3, 3, 4, 3, 4, 4, 5, 3, 4, 4, 5, 4, 5, 5, 6,
    1, 2, 2, 3, 2, 3, 3, 4, 2, 3, 3, 4, 3, 4, 4, 5,
    2, 3, 3, 4, 3, 4, 4, 5, 3, 4, 4, 5, 4, 5, 5, 6,
    2, 3, 3, 4, 3, 4, 4, 5, 3, 4, 4, 5, 4, 5, 5, 6,
    3, 4, 4, 5, 4, 5, 5, 6, 4, 5, 5, 6, 5, 6, 6, 7,
    1, 2, 2, 3, 2, 3, 3, 4, 2, 3, 3, 4, 3, 4, 4, 5,
    2, 3, 3, 4, 3, 4, 4, 5, 3, 4, 4, 5, 4, 5, 5, 6,
    2, 3, 3, 4, 3, 4, 4, 5, 3, 4, 4, 5, 4, 5, 5, 6,
    3, 4, 4, 5, 4, 5, 5, 6, 4, 5, 5, 6, 5, 6, 6, 7,
    2, 3, 3, 4, 3, 4, 4, 5, 3, 4, 4, 5, 4, 5, 5, 6,
    3, 4, 4, 5, 4, 5, 5, 6, 4, 5, 5, 6, 5, 6, 6, 7,
    3, 4, 4, 5, 4, 5, 5, 6, 4, 5, 5, 6, 5, 6, 6, 7,
    4, 5, 5, 6, 5, 6, 6, 7, 5, 6, 6, 7, 6, 7, 7, 8,
]


cdef int _digest(const unsigned char *data, size_t length, unsigned char *out) except -1:
    cdef unsigned int written = 0
    if EVP_Digest(<const void *>data, length, out, &written, EVP_sha256(), NULL) != 1:
        raise RuntimeError("EVP_Digest failed")
    return 0


def sha256(bytes data):
    cdef unsigned char out[DIGEST_LEN]
    _digest(<const unsigned char *>PyBytes_AS_STRING(data), len(data), out)
    return PyBytes_FromStringAndSize(<char *>out, DIGEST_LEN)


def hash_n(int n_bits, *parts):
    """SHA-256 over the concatenated parts, truncated or expanded to n_bits."""
    cdef int n_bytes = n_bits // 8
    cdef size_t total = 0
    cdef bytes part
    for part in parts:
        total += len(part)
    # Four spare bytes hold the big-endian block counter used for expansion.
    cdef unsigned char *buf = <unsigned char *>malloc(total + 4)
    if buf == NULL:
        raise MemoryError()
    cdef size_t offset = 0
    cdef unsigned char digest[DIGEST_LEN]
    cdef unsigned char *wide
    cdef size_t produced
    cdef unsigned int counter
    try:
        for part in parts:
            memcpy(buf + offset, PyBytes_AS_STRING(part), len(part))
            offset += len(part)
        if n_bytes <= DIGEST_LEN:
            _digest(buf, total, digest)
            return PyBytes_FromStringAndSize(<char *>digest, n_bytes)
        wide = <unsigned char *>malloc(((n_bytes + DIGEST_LEN - 1) // DIGEST_LEN) * DIGEST_LEN)
        if wide == NULL:
            raise MemoryError()
        try:
            produced = 0
            counter = 0
            while produced < <size_t>n_bytes:
                buf[total] = (counter >> 24) & 0xFF
                buf[total + 1] = (counter >> 16) & 0xFF
                buf[total + 2] = (counter >> 8) & 0xFF
                buf[total + 3] = counter & 0xFF
                _digest(buf, total + 4, wide + produced)
                produced += DIGEST_LEN
                counter += 1
            return PyBytes_FromStringAndSize(<char *>wide, n_bytes)
        finally:
            free(wide)
    finally:
        free(buf)


def xor_bytes(bytes a, bytes b):
    cdef Py_ssize_t n = len(a)
    if n != len(b):
        raise ValueError("xor operands differ in length")
    cdef bytes out = PyBytes_FromStringAndSize(NULL, n)
    cdef unsigned char *dst = <unsigned char *>PyBytes_AS_STRING(out)
    cdef const unsigned char *pa = <const unsigned char *>PyBytes_AS_STRING(a)
    cdef const unsigned char *pb = <const unsigned char *>PyBytes_AS_STRING(b)
    cdef Py_ssize_t i
    for i in range(n):
        dst[i] = pa[i] ^ pb[i]
    return out


def puf_response(bytes seed, bytes challenge, int n_bits):
    return hash_n(n_bits, seed, challenge)


def merkle_leaf_hash(bytes leaf):
    return hash_n(256, b"\x00", leaf)


def merkle_node_hash(bytes left, bytes right):
    return hash_n(256, b"\x01", left, right)


cdef void _mth(const unsigned char *leaves, Py_ssize_t lo, Py_ssize_t hi,
               unsigned char *out) except *:
    cdef Py_ssize_t count = hi - lo
    cdef Py_ssize_t k
    cdef unsigned char buf[1 + 2 * DIGEST_LEN]
    if count == 1:
        memcpy(out, leaves + lo * DIGEST_LEN, DIGEST_LEN)
        return
    k = 1
    while k * 2 < count:
        k *= 2
    buf[0] = 0x01
    _mth(leaves, lo, lo + k, buf + 1)
    _mth(leaves, lo + k, hi, buf + 1 + DIGEST_LEN)
    _digest(buf, 1 + 2 * DIGEST_LEN, out)


def merkle_root(leaf_hashes):
    """Root over already-hashed leaves, splitting at the largest power of two."""
    cdef Py_ssize_t n = len(leaf_hashes)
    cdef unsigned char out[DIGEST_LEN]
    if n == 0:
        _digest(NULL, 0, out)
        return PyBytes_FromStringAndSize(<char *>out, DIGEST_LEN)
    cdef unsigned char *flat = <unsigned char *>malloc(n * DIGEST_LEN)
    if flat == NULL:
        raise MemoryError()
    cdef Py_ssize_t i
    cdef bytes leaf
    try:
        for i in range(n):
            leaf = leaf_hashes[i]
            if len(leaf) != DIGEST_LEN:
                raise ValueError("leaf hash must be 32 bytes")
            memcpy(flat + i * DIGEST_LEN, PyBytes_AS_STRING(leaf), DIGEST_LEN)
        _mth(flat, 0, n, out)
        return PyBytes_FromStringAndSize(<char *>out, DIGEST_LEN)
    finally:
        free(flat)


def hamming_distance(bytes a, bytes b):
    cdef Py_ssize_t n = len(a)
    if n != len(b):
        raise ValueError("hamming operands differ in length")
    cdef const unsigned char *pa = <const unsigned char *>PyBytes_AS_STRING(a)
    cdef const unsigned char *pb = <const unsigned char *>PyBytes_AS_STRING(b)
    cdef Py_ssize_t i
    cdef long total = 0
    for i in range(n):
        total += POPCOUNT[pa[i] ^ pb[i]]
    return total

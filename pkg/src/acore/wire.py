"""Canonical TLV serialization primitives.

Every hash in the package is computed over bytes produced here, so the
encoding must be strictly canonical: a fixed one-byte tag per field, a
4-byte big-endian length, values concatenated in ascending tag order with
no padding. Decoding is the mirror image and rejects anything ``encode``
could not have produced: unknown tags, duplicate tags, out-of-order tags,
truncated or overlong lengths.

Container-specific codecs live next to their dataclasses (certmodel,
pivlog, workflow); this module owns the grammar, the tag table, the list
encoding, text armor, and the magic-header file helpers.
"""

from __future__ import annotations

import base64
import os
import re
from typing import Iterator, Sequence

from .errors import EncodingLimitError, MalformedError

# Tag table. One tag per field; canonical order is ascending tag within a
# container. 0x30-0x3F is reserved for log and proof records, 0x40+ for
# containers and file records.
TAG_SUBJECT = 0x01
TAG_ISSUER = 0x02
TAG_SERIAL = 0x03
TAG_NOT_BEFORE = 0x04
TAG_NOT_AFTER = 0x05
TAG_SUBJECT_PK = 0x06
TAG_FLAGS = 0x07
TAG_SIG = 0x10
TAG_EXT_RP = 0x11
TAG_STYLE = 0x12
TAG_Z_CA_NAME = 0x20
TAG_Z_MANUFACTURER = 0x21
TAG_Z_TS = 0x22
TAG_Z_RP_COMPLEMENT = 0x23
TAG_PIV_TAG = 0x24
TAG_PROOF_KIND = 0x30
TAG_PROOF_TREE = 0x31
TAG_PROOF_LEAF_INDEX = 0x32
TAG_PROOF_OLD_SIZE = 0x33
TAG_PROOF_NEW_SIZE = 0x34
TAG_PROOF_PATH = 0x35
TAG_PROOF_HEAD = 0x36
TAG_HEAD_LOG_NAME = 0x38
TAG_HEAD_TREE_SIZE = 0x39
TAG_HEAD_CERT_ROOT = 0x3A
TAG_HEAD_PIV_ROOT = 0x3B
TAG_HEAD_TIMESTAMP = 0x3C
TAG_HEAD_TAG = 0x3D
TAG_BUNDLE = 0x40
TAG_BUNDLE_CERTS = 0x41
TAG_BUNDLE_PIVS = 0x42
TAG_BUNDLE_CERT_PROOFS = 0x43
TAG_BUNDLE_PIV_PROOFS = 0x44
TAG_BUNDLE_HEAD = 0x45
TAG_STORE_PINNED = 0x48
TAG_STORE_LOG_KEYS = 0x49
TAG_STORE_HEADS = 0x4A
TAG_GROUP_CA_NAME = 0x50
TAG_GROUP_CHALLENGE = 0x51
TAG_GROUP_N_BITS = 0x52
TAG_GROUP_ROTATION_SEED = 0x53
TAG_GROUP_NOISE_MILLI = 0x54
TAG_GROUP_PROOF = 0x55
TAG_GROUP_INSTANCES = 0x56
TAG_GROUP_LATENCY_US = 0x57
TAG_CA_NAME = 0x58
TAG_CA_PARENT = 0x59
TAG_CA_CERT = 0x5A
TAG_CA_PIV = 0x5B
TAG_CA_RESPONSE = 0x5C
TAG_CA_H = 0x5D
TAG_CA_SERIALS = 0x5E
TAG_CA_ISSUED = 0x5F
TAG_REQ_OP = 0x60
TAG_REQ_BODY = 0x61
TAG_RESP_STATUS = 0x62
TAG_RESP_BODY = 0x63
TAG_LOG_NAME = 0x70
TAG_LOG_SECRET = 0x71
TAG_LOG_SUBMITTERS = 0x72
TAG_LOG_RECORDS = 0x73
TAG_LOG_LAST_HEAD = 0x74
TAG_CRL_SERIALS = 0x7C
TAG_CRL_INSTANCES = 0x7D

MAX_NAME_LEN = 0xFFFF
MAX_VALUE_LEN = 0xFFFFFFFF

CERT_ARMOR_LABEL = "ACORE CERTIFICATE"


def encode_u64(value: int) -> bytes:
    if value < 0 or value > 0xFFFFFFFFFFFFFFFF:
        raise EncodingLimitError(f"u64 out of range: {value}")
    return value.to_bytes(8, "big")


def decode_u64(data: bytes) -> int:
    if len(data) != 8:
        raise MalformedError("u64 field must be 8 bytes")
    return int.from_bytes(data, "big")


def encode_name(name: str) -> bytes:
    """Length-prefixed UTF-8 used inside hash inputs (2-byte big-endian length)."""
    raw = name.encode("utf-8")
    if len(raw) > MAX_NAME_LEN:
        raise EncodingLimitError("name exceeds 65535 bytes")
    return len(raw).to_bytes(2, "big") + raw


def name_value(name: str) -> bytes:
    raw = name.encode("utf-8")
    if len(raw) > MAX_NAME_LEN:
        raise EncodingLimitError("name exceeds 65535 bytes")
    return raw


def decode_name_value(data: bytes) -> str:
    try:
        return data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedError("name is not valid UTF-8") from exc


def record(tag: int, value: bytes) -> bytes:
    if len(value) > MAX_VALUE_LEN:
        raise EncodingLimitError("record value exceeds 4-byte length")
    return bytes([tag]) + len(value).to_bytes(4, "big") + value


def iter_records(data: bytes) -> Iterator[tuple[int, bytes]]:
    """Yield (tag, value) pairs, enforcing framing only."""
    pos = 0
    total = len(data)
    while pos < total:
        if total - pos < 5:
            raise MalformedError("truncated record header")
        tag = data[pos]
        length = int.from_bytes(data[pos + 1 : pos + 5], "big")
        pos += 5
        if total - pos < length:
            raise MalformedError("record value extends past the buffer")
        yield tag, data[pos : pos + length]
        pos += length


def parse_container(data: bytes, known_tags: Sequence[int]) -> dict[int, bytes]:
    """Strict parse: known tags only, ascending order, no duplicates."""
    known = set(known_tags)
    fields: dict[int, bytes] = {}
    last_tag = -1
    for tag, value in iter_records(data):
        if tag not in known:
            raise MalformedError(f"unknown tag 0x{tag:02x}")
        if tag in fields:
            raise MalformedError(f"duplicate tag 0x{tag:02x}")
        if tag <= last_tag:
            raise MalformedError(f"tag 0x{tag:02x} out of canonical order")
        fields[tag] = value
        last_tag = tag
    return fields


def require(fields: dict[int, bytes], tag: int) -> bytes:
    if tag not in fields:
        raise MalformedError(f"missing required tag 0x{tag:02x}")
    return fields[tag]


def encode_list(items: Sequence[bytes]) -> bytes:
    """Count-prefixed list of length-prefixed byte strings."""
    if len(items) > MAX_VALUE_LEN:
        raise EncodingLimitError("list too long")
    out = bytearray(len(items).to_bytes(4, "big"))
    for item in items:
        if len(item) > MAX_VALUE_LEN:
            raise EncodingLimitError("list item too long")
        out += len(item).to_bytes(4, "big")
        out += item
    return bytes(out)


def decode_list(data: bytes) -> list[bytes]:
    if len(data) < 4:
        raise MalformedError("truncated list header")
    count = int.from_bytes(data[:4], "big")
    pos = 4
    items: list[bytes] = []
    for _ in range(count):
        if len(data) - pos < 4:
            raise MalformedError("truncated list item header")
        length = int.from_bytes(data[pos : pos + 4], "big")
        pos += 4
        if len(data) - pos < length:
            raise MalformedError("list item extends past the buffer")
        items.append(data[pos : pos + length])
        pos += length
    if pos != len(data):
        raise MalformedError("trailing bytes after list")
    return items


# ---------------------------------------------------------------------------
# Text armor
# ---------------------------------------------------------------------------

_ARMOR_RE = re.compile(
    r"-----BEGIN (?P<label>[A-Z ]+)-----\n(?P<body>[A-Za-z0-9+/=\n]*)-----END (?P=label)-----\n?",
)


def armor(label: str, data: bytes) -> str:
    body = base64.b64encode(data).decode("ascii")
    lines = [body[i : i + 64] for i in range(0, len(body), 64)]
    return f"-----BEGIN {label}-----\n" + "\n".join(lines) + f"\n-----END {label}-----\n"


def dearmor(text: str, label: str) -> bytes:
    match = _ARMOR_RE.search(text)
    if match is None or match.group("label") != label:
        raise MalformedError(f"no {label} armor found")
    try:
        return base64.b64decode(match.group("body").replace("\n", ""), validate=True)
    except Exception as exc:
        raise MalformedError("invalid base64 body") from exc


# ---------------------------------------------------------------------------
# Files with a 4-byte magic and a version byte
# ---------------------------------------------------------------------------

FORMAT_VERSION = 1


def write_file(path: str, magic: bytes, body: bytes, secret: bool = False) -> None:
    if len(magic) != 4:
        raise ValueError("magic must be 4 bytes")
    payload = magic + bytes([FORMAT_VERSION]) + body
    if secret:
        fd = os.open(path, os.O_WRONLY | os.O_CREAT | os.O_TRUNC, 0o600)
        try:
            os.write(fd, payload)
        finally:
            os.close(fd)
    else:
        with open(path, "wb") as fh:
            fh.write(payload)


def read_file(path: str, magic: bytes) -> bytes:
    with open(path, "rb") as fh:
        payload = fh.read()
    if len(payload) < 5 or payload[:4] != magic:
        raise MalformedError(f"file {path} lacks magic {magic!r}")
    if payload[4] != FORMAT_VERSION:
        raise MalformedError(f"unsupported format version {payload[4]}")
    return payload[5:]


def encode(obj) -> bytes:
    """Encode any public artifact by dispatching on its type."""
    from . import certmodel, pivlog

    if isinstance(obj, certmodel.PufCertificate):
        return certmodel.encode_certificate(obj)
    if isinstance(obj, certmodel.CertEntries):
        return certmodel.canonical_encode_entries(obj)
    if isinstance(obj, pivlog.Piv):
        return pivlog.encode_piv(obj)
    if isinstance(obj, pivlog.LogProof):
        return pivlog.encode_proof(obj)
    if isinstance(obj, pivlog.SignedHead):
        return pivlog.encode_head(obj)
    if isinstance(obj, pivlog.StapledBundle):
        return pivlog.encode_bundle(obj)
    raise TypeError(f"no wire encoding for {type(obj).__name__}")


def decode(data: bytes):
    """Decode a top-level container, dispatching on the leading tag."""
    from . import certmodel, pivlog

    for tag, _ in iter_records(data):
        first = tag
        break
    else:
        raise MalformedError("empty container")
    if first == TAG_BUNDLE:
        return pivlog.decode_bundle(data)
    if first == TAG_SUBJECT:
        return certmodel.decode_certificate(data)
    if first == TAG_Z_CA_NAME:
        return pivlog.decode_piv(data)
    if first == TAG_PROOF_KIND:
        return pivlog.decode_proof(data)
    if first == TAG_HEAD_LOG_NAME:
        return pivlog.decode_head(data)
    raise MalformedError(f"unrecognized container starting with tag 0x{first:02x}")

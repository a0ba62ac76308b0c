"""Certificate data model and the chained keyless signature construction.

A certificate modifies three fields of the conventional layout: the
signature becomes R xor H(R_up || hc || h_up) where R is a PUF response to
the challenge hc = H(entries || ts || issuer_name), the public-key field of
a CA certificate carries the group proof, and an extension carries the
identity response of the instance that produced the signature. The root
self-signs with h = H(R || hc). Timestamps live in the invocation vectors,
not in the certificate, so hc is recomputable by the verifier from the
logged record.
"""

from __future__ import annotations

import random
import secrets
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, Optional, Sequence

from . import kernels, wire
from .errors import MalformedError, ParameterError

FLAG_IS_CA = 0x01
FLAG_ROOT = 0x02

DEFAULT_CA_VALIDITY_MS = 10 * 365 * 24 * 3600 * 1000
DEFAULT_DOMAIN_VALIDITY_MS = 90 * 24 * 3600 * 1000


class CertStyle(Enum):
    PUF_SIGNED = 0
    CLASSIC_SIGNED = 1


@dataclass(frozen=True)
class CertEntries:
    """To-be-signed entries."""

    subject: str
    issuer: str
    serial: bytes
    not_before: int
    not_after: int
    subject_pk: bytes
    is_ca: bool = False
    root_flag: bool = False

    def validate(self) -> None:
        if len(self.serial) != 8:
            raise ParameterError("serial must be 8 bytes")
        if not self.not_before < self.not_after:
            raise ParameterError("not_before must precede not_after")
        if self.root_flag and not self.is_ca:
            raise ParameterError("root certificates are CA certificates")


@dataclass(frozen=True)
class PufCertificate:
    entries: CertEntries
    sig: bytes
    ext_rp: Optional[bytes] = None
    style: CertStyle = CertStyle.PUF_SIGNED

    @property
    def n_bits(self) -> int:
        return len(self.sig) * 8

    def cert_hash(self) -> bytes:
        return kernels.sha256(encode_certificate(self))


@dataclass(frozen=True)
class CertChain:
    """Ordered root-first chain; the last element is usually the domain."""

    certs: tuple[PufCertificate, ...]

    def __len__(self) -> int:
        return len(self.certs)

    def validate_shape(self) -> None:
        if not self.certs:
            raise MalformedError("empty chain")
        if not self.certs[0].entries.root_flag:
            raise MalformedError("chain must start at a root certificate")
        n = self.certs[0].n_bits
        for level, cert in enumerate(self.certs):
            if cert.style is not CertStyle.PUF_SIGNED:
                raise MalformedError(f"level {level}: mixed classic/keyless chains are unsupported")
            if level == 0:
                if cert.ext_rp is not None:
                    raise MalformedError("root certificate must not carry an identity response")
                continue
            if cert.entries.root_flag:
                raise MalformedError(f"level {level}: unexpected root flag")
            if cert.ext_rp is None:
                raise MalformedError(f"level {level}: missing identity response extension")
            if cert.entries.issuer != self.certs[level - 1].entries.subject:
                raise MalformedError(f"level {level}: issuer does not match the level above")
            if cert.n_bits != n or len(cert.ext_rp) * 8 != n:
                raise MalformedError(f"level {level}: response width differs from the chain")


# ---------------------------------------------------------------------------
# Encoding
# ---------------------------------------------------------------------------

_ENTRY_TAGS = (
    wire.TAG_SUBJECT,
    wire.TAG_ISSUER,
    wire.TAG_SERIAL,
    wire.TAG_NOT_BEFORE,
    wire.TAG_NOT_AFTER,
    wire.TAG_SUBJECT_PK,
    wire.TAG_FLAGS,
)

_CERT_TAGS = _ENTRY_TAGS + (wire.TAG_SIG, wire.TAG_EXT_RP, wire.TAG_STYLE)


def canonical_encode_entries(entries: CertEntries) -> bytes:
    entries.validate()
    flags = (FLAG_IS_CA if entries.is_ca else 0) | (FLAG_ROOT if entries.root_flag else 0)
    return (
        wire.record(wire.TAG_SUBJECT, wire.name_value(entries.subject))
        + wire.record(wire.TAG_ISSUER, wire.name_value(entries.issuer))
        + wire.record(wire.TAG_SERIAL, entries.serial)
        + wire.record(wire.TAG_NOT_BEFORE, wire.encode_u64(entries.not_before))
        + wire.record(wire.TAG_NOT_AFTER, wire.encode_u64(entries.not_after))
        + wire.record(wire.TAG_SUBJECT_PK, entries.subject_pk)
        + wire.record(wire.TAG_FLAGS, bytes([flags]))
    )


def _entries_from_fields(fields: dict[int, bytes]) -> CertEntries:
    serial = wire.require(fields, wire.TAG_SERIAL)
    if len(serial) != 8:
        raise MalformedError("serial must be 8 bytes")
    flags_raw = wire.require(fields, wire.TAG_FLAGS)
    if len(flags_raw) != 1 or flags_raw[0] & ~(FLAG_IS_CA | FLAG_ROOT):
        raise MalformedError("bad flags byte")
    entries = CertEntries(
        subject=wire.decode_name_value(wire.require(fields, wire.TAG_SUBJECT)),
        issuer=wire.decode_name_value(wire.require(fields, wire.TAG_ISSUER)),
        serial=serial,
        not_before=wire.decode_u64(wire.require(fields, wire.TAG_NOT_BEFORE)),
        not_after=wire.decode_u64(wire.require(fields, wire.TAG_NOT_AFTER)),
        subject_pk=wire.require(fields, wire.TAG_SUBJECT_PK),
        is_ca=bool(flags_raw[0] & FLAG_IS_CA),
        root_flag=bool(flags_raw[0] & FLAG_ROOT),
    )
    try:
        entries.validate()
    except ParameterError as exc:
        raise MalformedError(str(exc)) from exc
    return entries


def decode_entries(data: bytes) -> CertEntries:
    return _entries_from_fields(wire.parse_container(data, _ENTRY_TAGS))


def encode_certificate(cert: PufCertificate) -> bytes:
    body = canonical_encode_entries(cert.entries) + wire.record(wire.TAG_SIG, cert.sig)
    if cert.ext_rp is not None:
        body += wire.record(wire.TAG_EXT_RP, cert.ext_rp)
    body += wire.record(wire.TAG_STYLE, bytes([cert.style.value]))
    return body


def decode_certificate(data: bytes) -> PufCertificate:
    fields = wire.parse_container(data, _CERT_TAGS)
    style_raw = wire.require(fields, wire.TAG_STYLE)
    if len(style_raw) != 1 or style_raw[0] not in (0, 1):
        raise MalformedError("bad style byte")
    sig = wire.require(fields, wire.TAG_SIG)
    if not sig:
        raise MalformedError("empty signature")
    return PufCertificate(
        entries=_entries_from_fields({t: v for t, v in fields.items() if t in _ENTRY_TAGS}),
        sig=sig,
        ext_rp=fields.get(wire.TAG_EXT_RP),
        style=CertStyle(style_raw[0]),
    )


def armor_certificate(cert: PufCertificate) -> str:
    return wire.armor(wire.CERT_ARMOR_LABEL, encode_certificate(cert))


def dearmor_certificate(text: str) -> PufCertificate:
    return decode_certificate(wire.dearmor(text, wire.CERT_ARMOR_LABEL))


# ---------------------------------------------------------------------------
# Signature construction
# ---------------------------------------------------------------------------

def compute_hc(entries: CertEntries, ts: int, issuer_name: str, n_bits: int) -> bytes:
    """Challenge for the signing response: H(entries || ts || issuer)."""
    return kernels.hash_n(
        n_bits,
        canonical_encode_entries(entries),
        wire.encode_u64(ts),
        wire.encode_name(issuer_name),
    )


def sign_level(hc: bytes, response: bytes, issuer_response: bytes, issuer_h: bytes) -> tuple[bytes, bytes]:
    """One non-root level: h = H(R_up || hc || h_up), sig = R xor h."""
    width = len(hc)
    if not (len(response) == len(issuer_response) == len(issuer_h) == width):
        raise ParameterError("hc, responses, and hash pointer must share one width")
    h = kernels.hash_n(width * 8, issuer_response, hc, issuer_h)
    return kernels.xor_bytes(response, h), h


def sign_root(hc: bytes, response: bytes) -> tuple[bytes, bytes]:
    """Root self-signing: h = H(R || hc), sig = R xor h."""
    if len(response) != len(hc):
        raise ParameterError("hc and response must share one width")
    h = kernels.hash_n(len(hc) * 8, response, hc)
    return kernels.xor_bytes(response, h), h


@dataclass(frozen=True)
class IssuanceRecord:
    """Private per-level record the issuer keeps for invocation vectors."""

    ts: int
    instance_id: str
    response: bytes
    h: bytes
    rp: bytes
    hc: bytes


def root_self_sign(entries: CertEntries, ts: int, root_group) -> tuple[PufCertificate, IssuanceRecord]:
    if not entries.root_flag:
        raise ParameterError("root entries must carry the root flag")
    entries = replace(entries, subject_pk=root_group.group_proof)
    hc = compute_hc(entries, ts, entries.issuer, root_group.params.n_bits)
    instance = root_group.select_instance()
    response = instance.evaluate(hc)
    sig, h = sign_root(hc, response)
    cert = PufCertificate(entries=entries, sig=sig, ext_rp=None, style=CertStyle.PUF_SIGNED)
    record = IssuanceRecord(
        ts=ts,
        instance_id=instance.instance_id,
        response=response,
        h=h,
        rp=root_group.identity_response(instance),
        hc=hc,
    )
    return cert, record


def issue_cert(
    entries: CertEntries,
    ts: int,
    issuer_group,
    issuer_response: bytes,
    issuer_h: bytes,
) -> tuple[PufCertificate, IssuanceRecord]:
    """Sign one level below the issuer; entries.issuer must already be set."""
    if entries.issuer != issuer_group.ca_name:
        raise ParameterError("entries.issuer does not name the issuing group")
    hc = compute_hc(entries, ts, entries.issuer, issuer_group.params.n_bits)
    instance = issuer_group.select_instance()
    response = instance.evaluate(hc)
    sig, h = sign_level(hc, response, issuer_response, issuer_h)
    rp = issuer_group.identity_response(instance)
    cert = PufCertificate(entries=entries, sig=sig, ext_rp=rp, style=CertStyle.PUF_SIGNED)
    record = IssuanceRecord(
        ts=ts, instance_id=instance.instance_id, response=response, h=h, rp=rp, hc=hc
    )
    return cert, record


def _random_serial(rng: Optional[random.Random]) -> bytes:
    return rng.randbytes(8) if rng is not None else secrets.token_bytes(8)


def build_chain(
    root_group,
    intermediate_groups: Sequence,
    domain_subject: str,
    domain_pk: bytes,
    ts_source: Callable[[], int],
    rng: Optional[random.Random] = None,
    ca_validity_ms: int = DEFAULT_CA_VALIDITY_MS,
    domain_validity_ms: int = DEFAULT_DOMAIN_VALIDITY_MS,
) -> tuple[CertChain, list[IssuanceRecord]]:
    """Build the full root -> intermediates -> domain chain in one pass.

    Returns the chain and the per-level issuance records the caller needs to
    assemble the matching invocation-vector chain.
    """
    ts = ts_source()
    root_entries = CertEntries(
        subject=root_group.ca_name,
        issuer=root_group.ca_name,
        serial=_random_serial(rng),
        not_before=ts,
        not_after=ts + ca_validity_ms,
        subject_pk=root_group.group_proof,
        is_ca=True,
        root_flag=True,
    )
    cert, record = root_self_sign(root_entries, ts, root_group)
    certs = [cert]
    records = [record]
    issuer_group = root_group

    for group in intermediate_groups:
        ts = ts_source()
        entries = CertEntries(
            subject=group.ca_name,
            issuer=issuer_group.ca_name,
            serial=_random_serial(rng),
            not_before=ts,
            not_after=ts + ca_validity_ms,
            subject_pk=group.group_proof,
            is_ca=True,
        )
        cert, record = issue_cert(entries, ts, issuer_group, records[-1].response, records[-1].h)
        certs.append(cert)
        records.append(record)
        issuer_group = group

    ts = ts_source()
    domain_entries = CertEntries(
        subject=domain_subject,
        issuer=issuer_group.ca_name,
        serial=_random_serial(rng),
        not_before=ts,
        not_after=ts + domain_validity_ms,
        subject_pk=domain_pk,
    )
    cert, record = issue_cert(domain_entries, ts, issuer_group, records[-1].response, records[-1].h)
    certs.append(cert)
    records.append(record)

    chain = CertChain(certs=tuple(certs))
    chain.validate_shape()
    return chain, records

"""Invocation vectors and the append-only transparency log.

Every issuance produces an invocation vector: a description tuple Z naming
the invoking CA, the device manufacturer, the invocation time, and the
complement of the used instance's identity response, plus an authenticated
tag H(R || Z || cert || T_up) keyed by the response embedded in that
certificate's signature. Tags nest root-to-leaf so the vector chain mirrors
the certificate chain.

The log keeps two parallel append-only Merkle trees (certificates and
vectors) with aligned leaf indices, gated on an authorized-submitter list.
Leaf and node hashing follow the usual 0x00/0x01 domain separation, and
inclusion/consistency proofs are standard audit paths verifiable offline
against a signed head.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Optional, Sequence

from . import kernels, wire
from .certmodel import CertChain, IssuanceRecord, PufCertificate, encode_certificate
from .errors import (
    AuthorizationError,
    MalformedError,
    NotLoggedError,
    RangeError,
)


@dataclass(frozen=True)
class Piv:
    """One invocation vector: description tuple Z plus authenticated tag."""

    z_ca_name: str
    z_manufacturer: str
    z_ts: int
    z_rp_complement: bytes
    tag: bytes


def encode_piv_z(piv: Piv) -> bytes:
    """The Z tuple alone, as fed to the tag computation."""
    return (
        wire.record(wire.TAG_Z_CA_NAME, wire.name_value(piv.z_ca_name))
        + wire.record(wire.TAG_Z_MANUFACTURER, wire.name_value(piv.z_manufacturer))
        + wire.record(wire.TAG_Z_TS, wire.encode_u64(piv.z_ts))
        + wire.record(wire.TAG_Z_RP_COMPLEMENT, piv.z_rp_complement)
    )


def encode_piv(piv: Piv) -> bytes:
    return encode_piv_z(piv) + wire.record(wire.TAG_PIV_TAG, piv.tag)


_PIV_TAGS = (
    wire.TAG_Z_CA_NAME,
    wire.TAG_Z_MANUFACTURER,
    wire.TAG_Z_TS,
    wire.TAG_Z_RP_COMPLEMENT,
    wire.TAG_PIV_TAG,
)


def decode_piv(data: bytes) -> Piv:
    fields = wire.parse_container(data, _PIV_TAGS)
    return Piv(
        z_ca_name=wire.decode_name_value(wire.require(fields, wire.TAG_Z_CA_NAME)),
        z_manufacturer=wire.decode_name_value(wire.require(fields, wire.TAG_Z_MANUFACTURER)),
        z_ts=wire.decode_u64(wire.require(fields, wire.TAG_Z_TS)),
        z_rp_complement=wire.require(fields, wire.TAG_Z_RP_COMPLEMENT),
        tag=wire.require(fields, wire.TAG_PIV_TAG),
    )


def compute_piv_tag(response: bytes, z_bytes: bytes, cert_bytes: bytes, higher_tag: bytes) -> bytes:
    """Keyed tag over Z, the certificate, and the next-higher tag."""
    return kernels.hash_n(len(response) * 8, response, z_bytes, cert_bytes, higher_tag)


def root_tag_sentinel(n_bits: int) -> bytes:
    return kernels.zeros(n_bits // 8)


def make_piv(record: IssuanceRecord, group, certificate: PufCertificate, higher_tag: bytes) -> Piv:
    """Assemble the vector for one issuance.

    A mismatched higher_tag produces a vector that simply fails verification
    later; no error is raised here.
    """
    instance = group.instances.get(record.instance_id)
    manufacturer = instance.manufacturer if instance is not None else "unknown"
    complement = kernels.xor_bytes(group.group_proof, record.rp)
    draft = Piv(
        z_ca_name=group.ca_name,
        z_manufacturer=manufacturer,
        z_ts=record.ts,
        z_rp_complement=complement,
        tag=b"",
    )
    tag = compute_piv_tag(
        record.response, encode_piv_z(draft), encode_certificate(certificate), higher_tag
    )
    return Piv(
        z_ca_name=draft.z_ca_name,
        z_manufacturer=draft.z_manufacturer,
        z_ts=draft.z_ts,
        z_rp_complement=complement,
        tag=tag,
    )


@dataclass(frozen=True)
class PivChain:
    pivs: tuple[Piv, ...]

    def __len__(self) -> int:
        return len(self.pivs)


def build_piv_chain(chain: CertChain, records: Sequence[IssuanceRecord], issuer_groups: Sequence) -> PivChain:
    """Vector chain aligned with a certificate chain.

    issuer_groups[i] is the group whose instance produced level i; for the
    root that is the root's own group.
    """
    if not (len(chain) == len(records) == len(issuer_groups)):
        raise ValueError("chain, records, and issuer groups must align")
    higher_tag = root_tag_sentinel(chain.certs[0].n_bits)
    pivs = []
    for cert, record, group in zip(chain.certs, records, issuer_groups):
        piv = make_piv(record, group, cert, higher_tag)
        pivs.append(piv)
        higher_tag = piv.tag
    return PivChain(pivs=tuple(pivs))


# ---------------------------------------------------------------------------
# Merkle tree (0x00/0x01 domain-separated hashing, audit paths)
# ---------------------------------------------------------------------------

class MerkleTree:
    """Append-only tree over leaf hashes with standard audit paths."""

    def __init__(self):
        self.leaf_hashes: list[bytes] = []

    @property
    def size(self) -> int:
        return len(self.leaf_hashes)

    def append(self, leaf: bytes) -> int:
        self.leaf_hashes.append(kernels.merkle_leaf_hash(leaf))
        return len(self.leaf_hashes) - 1

    def root(self, size: Optional[int] = None) -> bytes:
        size = self.size if size is None else size
        if size < 0 or size > self.size:
            raise RangeError(f"size {size} out of range")
        return kernels.merkle_root(self.leaf_hashes[:size])

    def inclusion_path(self, index: int, size: Optional[int] = None) -> list[bytes]:
        size = self.size if size is None else size
        if not 0 <= index < size <= self.size:
            raise RangeError(f"leaf {index} not in tree of size {size}")
        return self._path(index, 0, size)

    def _path(self, m: int, lo: int, hi: int) -> list[bytes]:
        n = hi - lo
        if n == 1:
            return []
        k = 1 << ((n - 1).bit_length() - 1)
        if m < k:
            return self._path(m, lo, lo + k) + [self._subtree_root(lo + k, hi)]
        return self._path(m - k, lo + k, hi) + [self._subtree_root(lo, lo + k)]

    def _subtree_root(self, lo: int, hi: int) -> bytes:
        return kernels.merkle_root(self.leaf_hashes[lo:hi])

    def consistency_path(self, old_size: int, new_size: int) -> list[bytes]:
        if not 0 <= old_size <= new_size <= self.size:
            raise RangeError(f"sizes ({old_size}, {new_size}) out of range")
        if old_size == new_size or old_size == 0:
            return []
        return self._subproof(old_size, 0, new_size, True)

    def _subproof(self, m: int, lo: int, hi: int, complete: bool) -> list[bytes]:
        n = hi - lo
        if m == n:
            return [] if complete else [self._subtree_root(lo, hi)]
        k = 1 << ((n - 1).bit_length() - 1)
        if m <= k:
            return self._subproof(m, lo, lo + k, complete) + [self._subtree_root(lo + k, hi)]
        return self._subproof(m - k, lo + k, hi, False) + [self._subtree_root(lo, lo + k)]


def verify_inclusion(leaf_hash: bytes, index: int, size: int, path: Sequence[bytes], root: bytes) -> bool:
    if index < 0 or size <= 0 or index >= size:
        return False
    fn, sn = index, size - 1
    r = leaf_hash
    for p in path:
        if sn == 0:
            return False
        if fn & 1 or fn == sn:
            r = kernels.merkle_node_hash(p, r)
            if not fn & 1:
                while fn and not fn & 1:
                    fn >>= 1
                    sn >>= 1
        else:
            r = kernels.merkle_node_hash(r, p)
        fn >>= 1
        sn >>= 1
    return sn == 0 and r == root


def verify_consistency(old_size: int, old_root: bytes, new_size: int, new_root: bytes, path: Sequence[bytes]) -> bool:
    if old_size < 0 or new_size < old_size:
        return False
    if old_size == new_size:
        return not path and old_root == new_root
    if old_size == 0:
        return not path
    path = list(path)
    if old_size & (old_size - 1) == 0:
        path = [old_root] + path
    if not path:
        return False
    fn, sn = old_size - 1, new_size - 1
    while fn & 1:
        fn >>= 1
        sn >>= 1
    fr = sr = path[0]
    for c in path[1:]:
        if sn == 0:
            return False
        if fn & 1 or fn == sn:
            fr = kernels.merkle_node_hash(c, fr)
            sr = kernels.merkle_node_hash(c, sr)
            if not fn & 1:
                while fn and not fn & 1:
                    fn >>= 1
                    sn >>= 1
        else:
            sr = kernels.merkle_node_hash(sr, c)
        fn >>= 1
        sn >>= 1
    return sn == 0 and fr == old_root and sr == new_root


# ---------------------------------------------------------------------------
# Signed heads and proofs
# ---------------------------------------------------------------------------

_HEAD_DOMAIN = b"ACHD"


@dataclass(frozen=True)
class SignedHead:
    log_name: str
    tree_size: int
    cert_root: bytes
    piv_root: bytes
    timestamp: int
    head_tag: bytes


def _head_mac(key: bytes, head: SignedHead) -> bytes:
    return kernels.sha256(
        key
        + _HEAD_DOMAIN
        + wire.encode_name(head.log_name)
        + wire.encode_u64(head.tree_size)
        + head.cert_root
        + head.piv_root
        + wire.encode_u64(head.timestamp)
    )


def verify_head(head: SignedHead, key: bytes) -> bool:
    return _head_mac(key, head) == head.head_tag


def encode_head(head: SignedHead) -> bytes:
    return (
        wire.record(wire.TAG_HEAD_LOG_NAME, wire.name_value(head.log_name))
        + wire.record(wire.TAG_HEAD_TREE_SIZE, wire.encode_u64(head.tree_size))
        + wire.record(wire.TAG_HEAD_CERT_ROOT, head.cert_root)
        + wire.record(wire.TAG_HEAD_PIV_ROOT, head.piv_root)
        + wire.record(wire.TAG_HEAD_TIMESTAMP, wire.encode_u64(head.timestamp))
        + wire.record(wire.TAG_HEAD_TAG, head.head_tag)
    )


_HEAD_TAGS = (
    wire.TAG_HEAD_LOG_NAME,
    wire.TAG_HEAD_TREE_SIZE,
    wire.TAG_HEAD_CERT_ROOT,
    wire.TAG_HEAD_PIV_ROOT,
    wire.TAG_HEAD_TIMESTAMP,
    wire.TAG_HEAD_TAG,
)


def decode_head(data: bytes) -> SignedHead:
    fields = wire.parse_container(data, _HEAD_TAGS)
    head = SignedHead(
        log_name=wire.decode_name_value(wire.require(fields, wire.TAG_HEAD_LOG_NAME)),
        tree_size=wire.decode_u64(wire.require(fields, wire.TAG_HEAD_TREE_SIZE)),
        cert_root=wire.require(fields, wire.TAG_HEAD_CERT_ROOT),
        piv_root=wire.require(fields, wire.TAG_HEAD_PIV_ROOT),
        timestamp=wire.decode_u64(wire.require(fields, wire.TAG_HEAD_TIMESTAMP)),
        head_tag=wire.require(fields, wire.TAG_HEAD_TAG),
    )
    if len(head.cert_root) != 32 or len(head.piv_root) != 32 or len(head.head_tag) != 32:
        raise MalformedError("head roots and tag must be 32 bytes")
    return head


PROOF_INCLUSION = "inclusion"
PROOF_CONSISTENCY = "consistency"
TREE_CERT = "cert"
TREE_PIV = "piv"


@dataclass(frozen=True)
class LogProof:
    kind: str
    tree: str
    path: tuple[bytes, ...]
    head: SignedHead
    leaf_index: int = 0
    old_size: int = 0
    new_size: int = 0


def encode_proof(proof: LogProof) -> bytes:
    kind = 0 if proof.kind == PROOF_INCLUSION else 1
    tree = 0 if proof.tree == TREE_CERT else 1
    body = wire.record(wire.TAG_PROOF_KIND, bytes([kind]))
    body += wire.record(wire.TAG_PROOF_TREE, bytes([tree]))
    if proof.kind == PROOF_INCLUSION:
        body += wire.record(wire.TAG_PROOF_LEAF_INDEX, wire.encode_u64(proof.leaf_index))
    else:
        body += wire.record(wire.TAG_PROOF_OLD_SIZE, wire.encode_u64(proof.old_size))
        body += wire.record(wire.TAG_PROOF_NEW_SIZE, wire.encode_u64(proof.new_size))
    body += wire.record(wire.TAG_PROOF_PATH, b"".join(proof.path))
    body += wire.record(wire.TAG_PROOF_HEAD, encode_head(proof.head))
    return body


_PROOF_TAGS = (
    wire.TAG_PROOF_KIND,
    wire.TAG_PROOF_TREE,
    wire.TAG_PROOF_LEAF_INDEX,
    wire.TAG_PROOF_OLD_SIZE,
    wire.TAG_PROOF_NEW_SIZE,
    wire.TAG_PROOF_PATH,
    wire.TAG_PROOF_HEAD,
)


def decode_proof(data: bytes) -> LogProof:
    fields = wire.parse_container(data, _PROOF_TAGS)
    kind_raw = wire.require(fields, wire.TAG_PROOF_KIND)
    tree_raw = wire.require(fields, wire.TAG_PROOF_TREE)
    if len(kind_raw) != 1 or kind_raw[0] not in (0, 1):
        raise MalformedError("bad proof kind")
    if len(tree_raw) != 1 or tree_raw[0] not in (0, 1):
        raise MalformedError("bad proof tree")
    path_raw = wire.require(fields, wire.TAG_PROOF_PATH)
    if len(path_raw) % 32:
        raise MalformedError("proof path is not a whole number of nodes")
    path = tuple(path_raw[i : i + 32] for i in range(0, len(path_raw), 32))
    kind = PROOF_INCLUSION if kind_raw[0] == 0 else PROOF_CONSISTENCY
    if kind == PROOF_INCLUSION:
        if wire.TAG_PROOF_LEAF_INDEX not in fields or wire.TAG_PROOF_OLD_SIZE in fields:
            raise MalformedError("inclusion proof fields inconsistent")
    else:
        if wire.TAG_PROOF_LEAF_INDEX in fields:
            raise MalformedError("consistency proof fields inconsistent")
    return LogProof(
        kind=kind,
        tree=TREE_CERT if tree_raw[0] == 0 else TREE_PIV,
        path=path,
        head=decode_head(wire.require(fields, wire.TAG_PROOF_HEAD)),
        leaf_index=wire.decode_u64(fields[wire.TAG_PROOF_LEAF_INDEX]) if wire.TAG_PROOF_LEAF_INDEX in fields else 0,
        old_size=wire.decode_u64(fields[wire.TAG_PROOF_OLD_SIZE]) if wire.TAG_PROOF_OLD_SIZE in fields else 0,
        new_size=wire.decode_u64(fields[wire.TAG_PROOF_NEW_SIZE]) if wire.TAG_PROOF_NEW_SIZE in fields else 0,
    )


def proof_root(proof: LogProof) -> bytes:
    return proof.head.cert_root if proof.tree == TREE_CERT else proof.head.piv_root


def verify_proof(proof: LogProof, leaf_bytes: Optional[bytes] = None, old_root: Optional[bytes] = None) -> bool:
    """Stateless proof check against the head carried by the proof."""
    if proof.kind == PROOF_INCLUSION:
        if leaf_bytes is None:
            return False
        return verify_inclusion(
            kernels.merkle_leaf_hash(leaf_bytes),
            proof.leaf_index,
            proof.head.tree_size,
            proof.path,
            proof_root(proof),
        )
    if old_root is None:
        return False
    return verify_consistency(
        proof.old_size, old_root, proof.new_size, proof_root(proof), proof.path
    )


# ---------------------------------------------------------------------------
# The log itself
# ---------------------------------------------------------------------------

def _now_ms() -> int:
    return int(time.time() * 1000)


@dataclass
class AuditFinding:
    kind: str
    detail: str


@dataclass
class AuditReport:
    findings: list[AuditFinding]
    invocation_counts: dict[str, int]

    @property
    def clean(self) -> bool:
        return not self.findings


class PivLog:
    """Two aligned append-only trees over certificates and their vectors."""

    def __init__(self, name: str, secret: bytes, authorized_submitters: Optional[set[str]] = None):
        self.name = name
        self.secret = secret
        self.authorized_submitters: set[str] = set(authorized_submitters or ())
        self.cert_tree = MerkleTree()
        self.piv_tree = MerkleTree()
        self.records: list[tuple[bytes, bytes, int]] = []
        self._cert_index: dict[bytes, int] = {}
        self.last_head: Optional[SignedHead] = None

    @property
    def tree_size(self) -> int:
        return self.cert_tree.size

    def authorize(self, ca_name: str) -> None:
        self.authorized_submitters.add(ca_name)

    def head(self, ts: Optional[int] = None) -> SignedHead:
        ts = _now_ms() if ts is None else ts
        draft = SignedHead(
            log_name=self.name,
            tree_size=self.tree_size,
            cert_root=self.cert_tree.root(),
            piv_root=self.piv_tree.root(),
            timestamp=ts,
            head_tag=b"",
        )
        head = SignedHead(
            log_name=draft.log_name,
            tree_size=draft.tree_size,
            cert_root=draft.cert_root,
            piv_root=draft.piv_root,
            timestamp=draft.timestamp,
            head_tag=_head_mac(self.secret, draft),
        )
        self.last_head = head
        return head

    def append(self, submitter: str, cert: PufCertificate, piv: Piv, ts: Optional[int] = None) -> tuple[int, SignedHead]:
        if submitter not in self.authorized_submitters:
            raise AuthorizationError(f"{submitter} is not an authorized submitter")
        ts = _now_ms() if ts is None else ts
        cert_bytes = encode_certificate(cert)
        piv_bytes = encode_piv(piv)
        index = self.cert_tree.append(cert_bytes)
        self.piv_tree.append(piv_bytes)
        self.records.append((cert_bytes, piv_bytes, ts))
        self._cert_index[kernels.sha256(cert_bytes)] = index
        return index, self.head(ts)

    def find_certificate(self, cert: PufCertificate) -> int:
        index = self._cert_index.get(kernels.sha256(encode_certificate(cert)))
        if index is None:
            raise NotLoggedError(f"certificate for {cert.entries.subject} was never logged")
        return index

    def inclusion_proof(self, leaf_index: int, tree: str = TREE_CERT, head: Optional[SignedHead] = None) -> LogProof:
        merkle = self.cert_tree if tree == TREE_CERT else self.piv_tree
        head = head or self.head()
        return LogProof(
            kind=PROOF_INCLUSION,
            tree=tree,
            path=tuple(merkle.inclusion_path(leaf_index, head.tree_size)),
            head=head,
            leaf_index=leaf_index,
        )

    def consistency_proof(self, old_size: int, new_size: int, tree: str = TREE_CERT) -> LogProof:
        merkle = self.cert_tree if tree == TREE_CERT else self.piv_tree
        if new_size > merkle.size:
            raise RangeError(f"new size {new_size} exceeds the log")
        head = self.head()
        return LogProof(
            kind=PROOF_CONSISTENCY,
            tree=tree,
            path=tuple(merkle.consistency_path(old_size, new_size)),
            head=head,
            old_size=old_size,
            new_size=new_size,
        )

    def audit_scan(self) -> AuditReport:
        findings: list[AuditFinding] = []
        counts: dict[str, int] = {}
        cert_recount = MerkleTree()
        piv_recount = MerkleTree()
        for i, (cert_bytes, piv_bytes, _) in enumerate(self.records):
            cert_recount.append(cert_bytes)
            piv_recount.append(piv_bytes)
            try:
                piv = decode_piv(piv_bytes)
            except MalformedError:
                findings.append(AuditFinding("malformed-piv", f"leaf {i} does not parse"))
                continue
            counts[piv.z_ca_name] = counts.get(piv.z_ca_name, 0) + 1
            if piv.z_ca_name not in self.authorized_submitters:
                findings.append(
                    AuditFinding("foreign-submitter", f"leaf {i} names unauthorized CA {piv.z_ca_name}")
                )
        if self.last_head is not None:
            size = self.last_head.tree_size
            if size > cert_recount.size:
                findings.append(AuditFinding("head-mismatch", "published head exceeds stored leaves"))
            else:
                if cert_recount.root(size) != self.last_head.cert_root:
                    findings.append(AuditFinding("head-mismatch", "certificate tree root diverges from published head"))
                if piv_recount.root(size) != self.last_head.piv_root:
                    findings.append(AuditFinding("head-mismatch", "vector tree root diverges from published head"))
        return AuditReport(findings=findings, invocation_counts=counts)

    # -- persistence ("ACLG") ------------------------------------------------

    MAGIC = b"ACLG"

    def save(self, path: str) -> None:
        records = [
            wire.encode_list([cert_bytes, piv_bytes, wire.encode_u64(ts)])
            for cert_bytes, piv_bytes, ts in self.records
        ]
        body = (
            wire.record(wire.TAG_LOG_NAME, wire.name_value(self.name))
            + wire.record(wire.TAG_LOG_SECRET, self.secret)
            + wire.record(
                wire.TAG_LOG_SUBMITTERS,
                wire.encode_list([s.encode("utf-8") for s in sorted(self.authorized_submitters)]),
            )
            + wire.record(wire.TAG_LOG_RECORDS, wire.encode_list(records))
            + wire.record(
                wire.TAG_LOG_LAST_HEAD,
                encode_head(self.last_head) if self.last_head else b"",
            )
        )
        wire.write_file(path, self.MAGIC, body, secret=True)

    @classmethod
    def load(cls, path: str) -> "PivLog":
        tags = (
            wire.TAG_LOG_NAME,
            wire.TAG_LOG_SECRET,
            wire.TAG_LOG_SUBMITTERS,
            wire.TAG_LOG_RECORDS,
            wire.TAG_LOG_LAST_HEAD,
        )
        fields = wire.parse_container(wire.read_file(path, cls.MAGIC), tags)
        log = cls(
            name=wire.decode_name_value(wire.require(fields, wire.TAG_LOG_NAME)),
            secret=wire.require(fields, wire.TAG_LOG_SECRET),
            authorized_submitters={
                s.decode("utf-8") for s in wire.decode_list(wire.require(fields, wire.TAG_LOG_SUBMITTERS))
            },
        )
        for item in wire.decode_list(wire.require(fields, wire.TAG_LOG_RECORDS)):
            parts = wire.decode_list(item)
            if len(parts) != 3:
                raise MalformedError("bad log record")
            cert_bytes, piv_bytes, ts_raw = parts
            index = log.cert_tree.append(cert_bytes)
            log.piv_tree.append(piv_bytes)
            log.records.append((cert_bytes, piv_bytes, wire.decode_u64(ts_raw)))
            log._cert_index[kernels.sha256(cert_bytes)] = index
        head_raw = wire.require(fields, wire.TAG_LOG_LAST_HEAD)
        if head_raw:
            log.last_head = decode_head(head_raw)
        return log


# ---------------------------------------------------------------------------
# Stapled bundles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StapledBundle:
    """Everything a client needs to verify offline: both chains, per-level
    inclusion proofs for both trees, and the signed head they refer to."""

    cert_chain: CertChain
    piv_chain: PivChain
    cert_proofs: tuple[LogProof, ...]
    piv_proofs: tuple[LogProof, ...]
    head: SignedHead


def build_bundle(log: PivLog, chain: CertChain, pivs: PivChain) -> StapledBundle:
    if len(chain) != len(pivs):
        raise MalformedError("certificate and vector chains differ in length")
    head = log.head()
    cert_proofs = []
    piv_proofs = []
    for cert in chain.certs:
        index = log.find_certificate(cert)
        cert_proofs.append(log.inclusion_proof(index, TREE_CERT, head))
        piv_proofs.append(log.inclusion_proof(index, TREE_PIV, head))
    return StapledBundle(
        cert_chain=chain,
        piv_chain=pivs,
        cert_proofs=tuple(cert_proofs),
        piv_proofs=tuple(piv_proofs),
        head=head,
    )


def encode_bundle(bundle: StapledBundle) -> bytes:
    inner = (
        wire.record(
            wire.TAG_BUNDLE_CERTS,
            wire.encode_list([encode_certificate(c) for c in bundle.cert_chain.certs]),
        )
        + wire.record(
            wire.TAG_BUNDLE_PIVS,
            wire.encode_list([encode_piv(p) for p in bundle.piv_chain.pivs]),
        )
        + wire.record(
            wire.TAG_BUNDLE_CERT_PROOFS,
            wire.encode_list([encode_proof(p) for p in bundle.cert_proofs]),
        )
        + wire.record(
            wire.TAG_BUNDLE_PIV_PROOFS,
            wire.encode_list([encode_proof(p) for p in bundle.piv_proofs]),
        )
        + wire.record(wire.TAG_BUNDLE_HEAD, encode_head(bundle.head))
    )
    return wire.record(wire.TAG_BUNDLE, inner)


def decode_bundle(data: bytes) -> StapledBundle:
    outer = wire.parse_container(data, (wire.TAG_BUNDLE,))
    inner_tags = (
        wire.TAG_BUNDLE_CERTS,
        wire.TAG_BUNDLE_PIVS,
        wire.TAG_BUNDLE_CERT_PROOFS,
        wire.TAG_BUNDLE_PIV_PROOFS,
        wire.TAG_BUNDLE_HEAD,
    )
    fields = wire.parse_container(wire.require(outer, wire.TAG_BUNDLE), inner_tags)
    from .certmodel import decode_certificate

    certs = tuple(
        decode_certificate(raw) for raw in wire.decode_list(wire.require(fields, wire.TAG_BUNDLE_CERTS))
    )
    pivs = tuple(decode_piv(raw) for raw in wire.decode_list(wire.require(fields, wire.TAG_BUNDLE_PIVS)))
    cert_proofs = tuple(
        decode_proof(raw) for raw in wire.decode_list(wire.require(fields, wire.TAG_BUNDLE_CERT_PROOFS))
    )
    piv_proofs = tuple(
        decode_proof(raw) for raw in wire.decode_list(wire.require(fields, wire.TAG_BUNDLE_PIV_PROOFS))
    )
    return StapledBundle(
        cert_chain=CertChain(certs=certs),
        piv_chain=PivChain(pivs=pivs),
        cert_proofs=cert_proofs,
        piv_proofs=piv_proofs,
        head=decode_head(wire.require(fields, wire.TAG_BUNDLE_HEAD)),
    )

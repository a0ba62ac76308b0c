"""Simulated PUF instances and per-CA PUF groups.

An instance is a keyed one-way mapping from n-bit challenges to n-bit
responses: response = H(seed || challenge), with optional noise injection
corrected by a majority vote so the public interface stays deterministic.
A group accumulates the XOR of every active instance's identity response
into the group proof, supports incremental membership updates, and rotates
issuance across instances with a seeded uniform selector.
"""

from __future__ import annotations

import random
import secrets
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Optional

import numpy as np

from . import kernels, wire
from .errors import (
    EmptyGroupError,
    GroupExhaustedError,
    InstanceUnavailableError,
    MalformedError,
    MembershipError,
    NotAMemberError,
    ParameterError,
)

ECC_VOTE_SAMPLES = 9

# Counts every instance evaluation in the process; the bench harness reads it
# and the verification-purity test asserts it never moves during verify.
_eval_counter = 0


def eval_count() -> int:
    return _eval_counter


@dataclass(frozen=True)
class PufParams:
    """Family parameters.

    latency_ms defaults to 0 so unit and acceptance runs are fast; the bench
    harness passes its own figure when simulating hardware timing.
    """

    n_bits: int = 256
    latency_ms: float = 0.0
    noise_rate: float = 0.0

    def __post_init__(self):
        if self.n_bits <= 0 or self.n_bits % 8 != 0:
            raise ParameterError("n_bits must be a positive multiple of 8")
        if not 0.0 <= self.noise_rate < 0.5:
            raise ParameterError("noise_rate must be in [0, 0.5)")
        if self.latency_ms < 0:
            raise ParameterError("latency_ms must be non-negative")

    @property
    def n_bytes(self) -> int:
        return self.n_bits // 8


class InstanceStatus(Enum):
    ACTIVE = 0
    FAILED = 1
    RETIRED = 2


@dataclass
class PufInstance:
    """One simulated device.

    The seed is the device secret; it never leaves the group state file and
    must not appear in any public artifact. seed=None models a device whose
    secret was destroyed: metadata survives but evaluation is impossible.
    """

    instance_id: str
    seed: Optional[bytes]
    params: PufParams
    manufacturer: str = "simfab"
    status: InstanceStatus = InstanceStatus.ACTIVE

    def evaluate(self, challenge: bytes) -> bytes:
        global _eval_counter
        if self.status is not InstanceStatus.ACTIVE:
            raise InstanceUnavailableError(f"instance {self.instance_id} is {self.status.name.lower()}")
        if self.seed is None:
            raise InstanceUnavailableError(f"instance {self.instance_id} has no device secret")
        if len(challenge) != self.params.n_bytes:
            raise ParameterError(
                f"challenge must be {self.params.n_bytes} bytes, got {len(challenge)}"
            )
        _eval_counter += 1
        if self.params.latency_ms > 0:
            time.sleep(self.params.latency_ms / 1000.0)
        clean = kernels.puf_response(self.seed, challenge, self.params.n_bits)
        if self.params.noise_rate == 0.0:
            return clean
        return _majority_vote(self.raw_noisy_samples(challenge), self.params.n_bits)

    def raw_noisy_samples(self, challenge: bytes, count: int = ECC_VOTE_SAMPLES) -> list[bytes]:
        """Pre-correction read-outs.

        Noise is drawn from a generator keyed by (seed, challenge) so repeated
        reads of one pair see the same flips; that is what keeps the corrected
        interface deterministic rather than merely stable in expectation.
        """
        if self.seed is None:
            raise InstanceUnavailableError(f"instance {self.instance_id} has no device secret")
        clean = kernels.puf_response(self.seed, challenge, self.params.n_bits)
        rng = random.Random(kernels.sha256(self.seed + challenge + b"noise"))
        n_bits = self.params.n_bits
        samples = []
        for _ in range(count):
            flips = 0
            for bit in range(n_bits):
                if rng.random() < self.params.noise_rate:
                    flips |= 1 << bit
            noisy = int.from_bytes(clean, "big") ^ flips
            samples.append(noisy.to_bytes(self.params.n_bytes, "big"))
        return samples


def _majority_vote(samples: list[bytes], n_bits: int) -> bytes:
    ints = [int.from_bytes(s, "big") for s in samples]
    out = 0
    threshold = len(samples) // 2
    for bit in range(n_bits):
        ones = sum((v >> bit) & 1 for v in ints)
        if ones > threshold:
            out |= 1 << bit
    return out.to_bytes(n_bits // 8, "big")


def new_instance(
    params: PufParams,
    manufacturer: str = "simfab",
    rng: Optional[random.Random] = None,
    instance_id: Optional[str] = None,
) -> PufInstance:
    if rng is None:
        seed = secrets.token_bytes(32)
        iid = instance_id or secrets.token_hex(8)
    else:
        seed = rng.randbytes(32)
        iid = instance_id or rng.randbytes(8).hex()
    return PufInstance(instance_id=iid, seed=seed, params=params, manufacturer=manufacturer)


@dataclass
class PufGroup:
    """A CA's set of installed instances plus the accumulated group proof."""

    ca_name: str
    identity_challenge: bytes
    params: PufParams
    rotation_seed: bytes
    instances: dict[str, PufInstance] = field(default_factory=dict)
    group_proof: bytes = b""
    selection_log: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._rotation = random.Random(self.rotation_seed)
        self._identity_cache: dict[str, bytes] = {}
        if not self.group_proof:
            self.group_proof = kernels.zeros(self.params.n_bytes)

    # -- membership ---------------------------------------------------------

    def active_instances(self) -> list[PufInstance]:
        return [i for i in self.instances.values() if i.status is InstanceStatus.ACTIVE]

    def identity_response(self, instance: PufInstance) -> bytes:
        member = self.instances.get(instance.instance_id)
        if member is None or member is not instance:
            raise NotAMemberError(f"instance {instance.instance_id} is not in group {self.ca_name}")
        cached = self._identity_cache.get(instance.instance_id)
        if cached is not None:
            return cached
        rp = instance.evaluate(self.identity_challenge)
        self._identity_cache[instance.instance_id] = rp
        return rp

    def add_instance(self, instance: PufInstance) -> bytes:
        if instance.instance_id in self.instances:
            raise MembershipError(f"instance {instance.instance_id} already present")
        if instance.params.n_bits != self.params.n_bits:
            raise ParameterError("instance width differs from group width")
        self.instances[instance.instance_id] = instance
        rp = self.identity_response(instance)
        self.group_proof = kernels.xor_bytes(self.group_proof, rp)
        return self.group_proof

    def remove_instance(self, instance_id: str, status: InstanceStatus = InstanceStatus.RETIRED) -> bytes:
        instance = self.instances.get(instance_id)
        if instance is None or instance.status is not InstanceStatus.ACTIVE:
            raise MembershipError(f"no active instance {instance_id} in group {self.ca_name}")
        rp = self.identity_response(instance)
        instance.status = status
        self.group_proof = kernels.xor_bytes(self.group_proof, rp)
        return self.group_proof

    def compute_group_proof(self) -> bytes:
        """Recompute the proof from scratch; must equal the incremental value."""
        active = self.active_instances()
        if not active:
            raise EmptyGroupError(f"group {self.ca_name} has no active instance")
        proof = kernels.zeros(self.params.n_bytes)
        for instance in active:
            proof = kernels.xor_bytes(proof, instance.evaluate(self.identity_challenge))
        self.group_proof = proof
        return proof

    def select_instance(self) -> PufInstance:
        active = self.active_instances()
        if not active:
            raise GroupExhaustedError(f"group {self.ca_name} has no active instance")
        choice = self._rotation.choice(active)
        self.selection_log.append(choice.instance_id)
        return choice


def evaluate(instance: PufInstance, challenge: bytes) -> bytes:
    return instance.evaluate(challenge)


def identity_response(instance: PufInstance, group: PufGroup) -> bytes:
    return group.identity_response(instance)


def new_group(
    ca_name: str,
    num_instances: int,
    params: Optional[PufParams] = None,
    rng: Optional[random.Random] = None,
    manufacturer: str = "simfab",
) -> PufGroup:
    if num_instances < 1:
        raise ParameterError("a group needs at least one instance")
    params = params or PufParams()
    if rng is None:
        challenge = secrets.token_bytes(params.n_bytes)
        rotation_seed = secrets.token_bytes(16)
    else:
        challenge = rng.randbytes(params.n_bytes)
        rotation_seed = rng.randbytes(16)
    group = PufGroup(
        ca_name=ca_name,
        identity_challenge=challenge,
        params=params,
        rotation_seed=rotation_seed,
    )
    for _ in range(num_instances):
        group.add_instance(new_instance(params, manufacturer=manufacturer, rng=rng))
    return group


# ---------------------------------------------------------------------------
# Statistical suite
# ---------------------------------------------------------------------------

@dataclass
class PufStatsReport:
    bit_bias: np.ndarray
    mean_inter_hd: float
    mean_intra_hd: float
    sample_count: int

    def summary(self) -> str:
        n = self.bit_bias.shape[0]
        return (
            f"n={n} samples={self.sample_count} "
            f"inter_hd={self.mean_inter_hd:.2f} intra_hd={self.mean_intra_hd:.2f} "
            f"bias=[{self.bit_bias.min():.3f}, {self.bit_bias.max():.3f}]"
        )


def run_stat_suite(
    params: PufParams,
    num_instances: int,
    num_challenges: int,
    rng: Optional[random.Random] = None,
) -> PufStatsReport:
    """Measure bit bias, inter- and intra-instance Hamming distance.

    Inter distance pairs every two instances on the same challenge; intra
    distance pairs consecutive distinct challenges on one instance.
    """
    if num_instances < 2:
        raise ParameterError("need at least two instances")
    if num_challenges < 1:
        raise ParameterError("need at least one challenge")
    rng = rng or random.Random()
    instances = [new_instance(params, rng=rng) for _ in range(num_instances)]
    challenges = [rng.randbytes(params.n_bytes) for _ in range(num_challenges)]

    raw = np.empty((num_instances, num_challenges, params.n_bytes), dtype=np.uint8)
    for i, inst in enumerate(instances):
        for j, ch in enumerate(challenges):
            raw[i, j] = np.frombuffer(inst.evaluate(ch), dtype=np.uint8)
    bits = np.unpackbits(raw, axis=2)

    bit_bias = bits.reshape(-1, params.n_bits).mean(axis=0)

    inter_sum = 0
    inter_pairs = 0
    for i in range(num_instances):
        for j in range(i + 1, num_instances):
            inter_sum += int(np.sum(bits[i] != bits[j]))
            inter_pairs += num_challenges

    if num_challenges > 1:
        intra_diff = bits[:, 1:, :] != bits[:, :-1, :]
        intra_hd = float(np.sum(intra_diff)) / (num_instances * (num_challenges - 1))
    else:
        intra_hd = float("nan")

    return PufStatsReport(
        bit_bias=bit_bias,
        mean_inter_hd=inter_sum / inter_pairs,
        mean_intra_hd=intra_hd,
        sample_count=num_instances * num_challenges,
    )


# ---------------------------------------------------------------------------
# Group state file ("ACPG", secret, mode 0600)
# ---------------------------------------------------------------------------

GROUP_MAGIC = b"ACPG"

_GROUP_TAGS = (
    wire.TAG_GROUP_CA_NAME,
    wire.TAG_GROUP_CHALLENGE,
    wire.TAG_GROUP_N_BITS,
    wire.TAG_GROUP_ROTATION_SEED,
    wire.TAG_GROUP_NOISE_MILLI,
    wire.TAG_GROUP_PROOF,
    wire.TAG_GROUP_INSTANCES,
    wire.TAG_GROUP_LATENCY_US,
)


def _encode_instance(instance: PufInstance) -> bytes:
    return wire.encode_list(
        [
            instance.instance_id.encode("utf-8"),
            instance.seed if instance.seed is not None else b"",
            instance.manufacturer.encode("utf-8"),
            bytes([instance.status.value]),
        ]
    )


def _decode_instance(data: bytes, params: PufParams) -> PufInstance:
    parts = wire.decode_list(data)
    if len(parts) != 4 or len(parts[3]) != 1:
        raise MalformedError("bad instance record")
    return PufInstance(
        instance_id=parts[0].decode("utf-8"),
        seed=parts[1] if parts[1] else None,
        params=params,
        manufacturer=parts[2].decode("utf-8"),
        status=InstanceStatus(parts[3][0]),
    )


def save_group(group: PufGroup, path: str) -> None:
    body = (
        wire.record(wire.TAG_GROUP_CA_NAME, wire.name_value(group.ca_name))
        + wire.record(wire.TAG_GROUP_CHALLENGE, group.identity_challenge)
        + wire.record(wire.TAG_GROUP_N_BITS, group.params.n_bits.to_bytes(2, "big"))
        + wire.record(wire.TAG_GROUP_ROTATION_SEED, group.rotation_seed)
        + wire.record(wire.TAG_GROUP_NOISE_MILLI, int(group.params.noise_rate * 1000).to_bytes(2, "big"))
        + wire.record(wire.TAG_GROUP_PROOF, group.group_proof)
        + wire.record(
            wire.TAG_GROUP_INSTANCES,
            wire.encode_list([_encode_instance(i) for i in group.instances.values()]),
        )
        + wire.record(wire.TAG_GROUP_LATENCY_US, int(group.params.latency_ms * 1000).to_bytes(4, "big"))
    )
    wire.write_file(path, GROUP_MAGIC, body, secret=True)


def load_group(path: str) -> PufGroup:
    fields = wire.parse_container(wire.read_file(path, GROUP_MAGIC), _GROUP_TAGS)
    n_bits = int.from_bytes(wire.require(fields, wire.TAG_GROUP_N_BITS), "big")
    params = PufParams(
        n_bits=n_bits,
        latency_ms=int.from_bytes(wire.require(fields, wire.TAG_GROUP_LATENCY_US), "big") / 1000.0,
        noise_rate=int.from_bytes(wire.require(fields, wire.TAG_GROUP_NOISE_MILLI), "big") / 1000.0,
    )
    group = PufGroup(
        ca_name=wire.decode_name_value(wire.require(fields, wire.TAG_GROUP_CA_NAME)),
        identity_challenge=wire.require(fields, wire.TAG_GROUP_CHALLENGE),
        params=params,
        rotation_seed=wire.require(fields, wire.TAG_GROUP_ROTATION_SEED),
        group_proof=wire.require(fields, wire.TAG_GROUP_PROOF),
    )
    for item in wire.decode_list(wire.require(fields, wire.TAG_GROUP_INSTANCES)):
        instance = _decode_instance(item, params)
        group.instances[instance.instance_id] = instance
    return group

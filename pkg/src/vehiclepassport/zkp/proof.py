"""Threshold proofs over committed vehicle metrics.

A metric is committed as C = g^value * h^blinding.  To show the metric
clears a public threshold without revealing it, both sides reduce the
claim to "d lies in [0, 2^bits)" for a difference d that the verifier can
commit to on their own, homomorphically, from C and the threshold alone:

    value >  t   ->  d = value - t - 1   on  C_d = C / g^(t+1)
    value <  t   ->  d = t - value - 1   on  C_d = g^(t-1) / C
    value <= t   ->  d = t - value       on  C_d = g^t / C
    value >= t   ->  d = value - t       on  C_d = C / g^t

The prover then commits to each bit of d, proves every bit is 0 or 1 with
a two-branch OR proof (the real branch is a Schnorr proof, the other is
simulated, and the two sub-challenges must add up to the transcript
challenge), and finally proves that the bit commitments weighted by 2^i
open to the same value as C_d.  The single challenge is the sha256 of the
whole first-round transcript, so proofs are non-interactive and bind the
parameters, the statement, and every commitment.

Proving and verifying are pure functions of their arguments; nothing here
touches storage or keys.
"""

from __future__ import annotations

import dataclasses
import functools
import hashlib
import operator
import secrets

from ..crypto import canonical_serialize
from ..errors import (
    BadWitness,
    MalformedProof,
    NotFound,
    OutOfRange,
    PredicateNotSatisfied,
    Unsupported,
)
from .group import (
    GROUP_TAG_2048,
    GROUP_TAG_512,
    Group,
    PROD_GROUP,
    SMALL_GROUP,
    hash_to_group,
)

try:  # libgmp makes a ~40 ms verify out of a ~400 ms one
    import gmpy2 as _gmp

    def _powmod(base: int, exp: int, mod: int) -> int:
        return int(_gmp.powmod(base, exp, mod))

    def _invert(a: int, mod: int) -> int:
        return int(_gmp.invert(a, mod))

except ImportError:  # pragma: no cover - correct but slow
    _powmod = pow

    def _invert(a: int, mod: int) -> int:
        return pow(a, -1, mod)


PROOF_BITS = 32

FS_TAG = b"vehiclepassport/zkp/fs/v1"
H_TAG_2048 = b"vehiclepassport/zkp/h/v1/2048"
H_TAG_512 = b"vehiclepassport/zkp/h/v1/512"

KINDS = (
    "BatteryHealthGT",
    "MileageLT",
    "WarrantyExpiryGT",
    "AccessRequestCountLE",
    "ServiceLogCountGE",
)

# kind -> (comparison, exponent sign on C, g-exponent offset as fn of t).
# C_d = g^offset * C^sign commits to d = offset + sign*value with blinding
# sign*r, which is why the prover never sends C_d at all.
_REDUCTIONS = {
    "BatteryHealthGT": (operator.gt, 1, lambda t: -(t + 1)),
    "MileageLT": (operator.lt, -1, lambda t: t - 1),
    "WarrantyExpiryGT": (operator.gt, 1, lambda t: -(t + 1)),
    "AccessRequestCountLE": (operator.le, -1, lambda t: t),
    "ServiceLogCountGE": (operator.ge, 1, lambda t: -t),
}

_COMPARATOR_TEXT = {
    "BatteryHealthGT": "value > threshold",
    "MileageLT": "value < threshold",
    "WarrantyExpiryGT": "value > threshold",
    "AccessRequestCountLE": "value <= threshold",
    "ServiceLogCountGE": "value >= threshold",
}


@dataclasses.dataclass(frozen=True)
class ProofParams:
    group: Group
    h: int  # second generator, hash-derived, discrete log base g unknown
    bits: int

    @property
    def element_size(self) -> int:
        return self.group.element_size

    @property
    def scalar_size(self) -> int:
        return self.group.scalar_size


@functools.lru_cache(maxsize=None)
def _cached_params(group: Group, h_tag: bytes, bits: int) -> ProofParams:
    return ProofParams(group=group, h=hash_to_group(group, h_tag), bits=bits)


def setup(bits: int = PROOF_BITS) -> ProofParams:
    """Production parameters; deterministic, so every call agrees."""
    if bits != PROOF_BITS:
        raise Unsupported(f"comparator width is fixed at {PROOF_BITS} bits")
    return _cached_params(PROD_GROUP, H_TAG_2048, PROOF_BITS)


def insecure_small_params(bits: int = 6) -> ProofParams:
    """Tiny parameters over the 512-bit group so exhaustive enumeration is
    affordable.  Offers no security whatsoever; test use only."""
    if not 1 <= bits <= 16:
        raise Unsupported("small-parameter width must be 1..16 bits")
    return _cached_params(SMALL_GROUP, H_TAG_512, bits)


def _params_doc(params: ProofParams) -> dict:
    return {
        "bits": params.bits,
        "p": format(params.group.p, "x"),
        "q": format(params.group.q, "x"),
        "g": format(params.group.g, "x"),
        "h": format(params.h, "x"),
    }


def serialize_params(params: ProofParams) -> bytes:
    return canonical_serialize(_params_doc(params))


def parse_params(doc: dict) -> ProofParams:
    try:
        group = Group(p=int(doc["p"], 16), q=int(doc["q"], 16), g=int(doc["g"], 16))
        h = int(doc["h"], 16)
        bits = doc["bits"]
    except (KeyError, TypeError, ValueError) as exc:
        raise MalformedProof(f"bad parameter document: {exc}") from exc
    if not isinstance(bits, int) or not 1 <= bits <= 64:
        raise MalformedProof("bad parameter document: bits out of range")
    if not 1 < h < group.p or not 1 < group.g < group.p:
        raise MalformedProof("bad parameter document: generator out of range")
    return ProofParams(group=group, h=h, bits=bits)


def params_id(params: ProofParams) -> bytes:
    return hashlib.sha256(serialize_params(params)).digest()


@dataclasses.dataclass(frozen=True)
class ThresholdStatement:
    kind: str
    threshold: int
    commitment: int

    def __post_init__(self):
        if self.kind not in _REDUCTIONS:
            raise NotFound(f"unknown statement kind {self.kind!r}")
        if (
            isinstance(self.threshold, bool)
            or not isinstance(self.threshold, int)
            or not 0 <= self.threshold < (1 << 32)
        ):
            raise OutOfRange("threshold must be an unsigned 32-bit integer")


@dataclasses.dataclass
class BitProof:
    t0: int
    t1: int
    c0: int  # c1 is reconstructed as challenge - c0 mod q
    z0: int
    z1: int


@dataclasses.dataclass
class ThresholdProof:
    bit_commitments: list[int]
    bit_proofs: list[BitProof]
    link_t: int
    link_z: int
    challenge: bytes


def commit(params: ProofParams, value: int, blinding: int) -> int:
    """Pedersen commitment g^value * h^blinding."""
    if (
        isinstance(value, bool)
        or not isinstance(value, int)
        or not 0 <= value < (1 << params.bits)
    ):
        raise OutOfRange(f"value must fit in {params.bits} unsigned bits")
    p, q = params.group.p, params.group.q
    return (
        _powmod(params.group.g, value, p) * _powmod(params.h, blinding % q, p) % p
    )


def derived_commitment(params: ProofParams, statement: ThresholdStatement) -> int:
    """The verifier-side commitment to the difference d, computed from the
    public statement alone."""
    _, sign, offset = _REDUCTIONS[statement.kind]
    p, q = params.group.p, params.group.q
    base = _powmod(params.group.g, offset(statement.threshold) % q, p)
    c = statement.commitment % p
    if sign < 0:
        c = _invert(c, p)
    return base * c % p


def _challenge_bytes(params, statement, bit_comms, first_messages, link_t) -> bytes:
    esz = params.element_size
    fs = hashlib.sha256()
    fs.update(FS_TAG)
    fs.update(params_id(params))
    fs.update(bytes([KINDS.index(statement.kind)]))
    fs.update(statement.threshold.to_bytes(4, "big"))
    fs.update(statement.commitment.to_bytes(esz, "big"))
    for b in bit_comms:
        fs.update(b.to_bytes(esz, "big"))
    for t0, t1 in first_messages:
        fs.update(t0.to_bytes(esz, "big"))
        fs.update(t1.to_bytes(esz, "big"))
    fs.update(link_t.to_bytes(esz, "big"))
    return fs.digest()


def prove(
    params: ProofParams,
    statement: ThresholdStatement,
    value: int,
    blinding: int,
    rng=None,
) -> tuple[ThresholdProof, dict]:
    """Prove the statement for a witness opening its commitment.

    Raises BadWitness when (value, blinding) does not open the commitment
    and PredicateNotSatisfied when the comparison is simply false; a proof
    of a false predicate is a statement this node never issues.
    """
    rng = rng or secrets.SystemRandom()
    p, q = params.group.p, params.group.q
    g, h = params.group.g, params.h

    if commit(params, value, blinding) != statement.commitment % p:
        raise BadWitness("witness does not open the statement commitment")
    cmp_fn, sign, offset = _REDUCTIONS[statement.kind]
    if not cmp_fn(value, statement.threshold):
        raise PredicateNotSatisfied(f"{statement.kind} does not hold for the committed value")
    d = offset(statement.threshold) + sign * value
    if not 0 <= d < (1 << params.bits):
        raise OutOfRange("difference does not fit the comparator width")
    r_d = (sign * blinding) % q

    g_inv = _invert(g, p)
    bit_comms: list[int] = []
    secrets_by_bit = []
    first_messages = []
    for i in range(params.bits):
        b = (d >> i) & 1
        s = rng.randrange(q)
        hs = _powmod(h, s, p)
        big_b = hs if b == 0 else g * hs % p
        w = rng.randrange(q)
        if b == 0:
            # real branch proves B = h^s; branch 1 is simulated backwards
            t0 = _powmod(h, w, p)
            c1, z1 = rng.randrange(q), rng.randrange(q)
            x1 = big_b * g_inv % p
            t1 = _powmod(h, z1, p) * _powmod(_invert(x1, p), c1, p) % p
            secrets_by_bit.append((b, s, w, None, c1, None, z1))
        else:
            # real branch proves B/g = h^s; branch 0 is simulated
            t1 = _powmod(h, w, p)
            c0, z0 = rng.randrange(q), rng.randrange(q)
            t0 = _powmod(h, z0, p) * _powmod(_invert(big_b, p), c0, p) % p
            secrets_by_bit.append((b, s, w, c0, None, z0, None))
        bit_comms.append(big_b)
        first_messages.append((t0, t1))

    s_sum = 0
    for i, (_, s, *_rest) in enumerate(secrets_by_bit):
        s_sum += s << i
    e = (r_d - s_sum) % q
    w_link = rng.randrange(q)
    link_t = _powmod(h, w_link, p)

    challenge = _challenge_bytes(params, statement, bit_comms, first_messages, link_t)
    c = int.from_bytes(challenge, "big") % q

    bit_proofs = []
    for i, (b, s, w, c0, c1, z0, z1) in enumerate(secrets_by_bit):
        if b == 0:
            c0 = (c - c1) % q
            z0 = (w + c0 * s) % q
        else:
            c1 = (c - c0) % q
            z1 = (w + c1 * s) % q
        t0, t1 = first_messages[i]
        bit_proofs.append(BitProof(t0=t0, t1=t1, c0=c0, z0=z0, z1=z1))

    link_z = (w_link + c * e) % q
    proof = ThresholdProof(
        bit_commitments=bit_comms,
        bit_proofs=bit_proofs,
        link_t=link_t,
        link_z=link_z,
        challenge=challenge,
    )
    return proof, {"threshold": statement.threshold, "result": 1}


def _check_shape(params: ProofParams, proof: ThresholdProof) -> None:
    p, q = params.group.p, params.group.q

    def element(x):
        if isinstance(x, bool) or not isinstance(x, int) or not 1 <= x < p:
            raise MalformedProof("group element out of range")

    def scalar(x):
        if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < q:
            raise MalformedProof("scalar out of range")

    if len(proof.bit_commitments) != params.bits or len(proof.bit_proofs) != params.bits:
        raise MalformedProof(f"expected {params.bits} bit commitments and proofs")
    if not isinstance(proof.challenge, bytes) or len(proof.challenge) != 32:
        raise MalformedProof("challenge must be 32 bytes")
    for x in proof.bit_commitments:
        element(x)
    for bp in proof.bit_proofs:
        element(bp.t0)
        element(bp.t1)
        scalar(bp.c0)
        scalar(bp.z0)
        scalar(bp.z1)
    element(proof.link_t)
    scalar(proof.link_z)


def verify(
    params: ProofParams,
    statement: ThresholdStatement,
    proof: ThresholdProof,
    public_signals: dict,
) -> bool:
    """Check a proof; False for a failed proof, MalformedProof only when
    the object is structurally not a proof at all."""
    _check_shape(params, proof)
    p, q = params.group.p, params.group.q
    g, h = params.group.g, params.h

    if not isinstance(public_signals, dict):
        return False
    if public_signals.get("result") != 1:
        return False
    if public_signals.get("threshold") != statement.threshold:
        return False
    if not 1 <= statement.commitment < p:
        return False

    first_messages = [(bp.t0, bp.t1) for bp in proof.bit_proofs]
    expected = _challenge_bytes(
        params, statement, proof.bit_commitments, first_messages, proof.link_t
    )
    if expected != proof.challenge:
        return False
    c = int.from_bytes(expected, "big") % q

    g_inv = _invert(g, p)
    for big_b, bp in zip(proof.bit_commitments, proof.bit_proofs):
        c1 = (c - bp.c0) % q
        if _powmod(h, bp.z0, p) != bp.t0 * _powmod(big_b, bp.c0, p) % p:
            return False
        x1 = big_b * g_inv % p
        if _powmod(h, bp.z1, p) != bp.t1 * _powmod(x1, c1, p) % p:
            return False

    # fold Π B_i^(2^i) by Horner from the top bit down
    acc = 1
    for big_b in reversed(proof.bit_commitments):
        acc = acc * acc % p
        acc = acc * big_b % p
    y = derived_commitment(params, statement) * _invert(acc, p) % p
    return _powmod(h, proof.link_z, p) == proof.link_t * _powmod(y, c, p) % p


# -- wire format -----------------------------------------------------------

_MAGIC = b"VPZK"
_VERSION = 1


def proof_size(params: ProofParams) -> int:
    esz, ssz = params.element_size, params.scalar_size
    body = 4 + params.bits * (esz + 2 * esz + 3 * ssz) + esz + ssz + 32
    return 4 + 1 + 4 + body  # magic, version, length prefix, body


def serialize_proof(params: ProofParams, proof: ThresholdProof) -> bytes:
    esz, ssz = params.element_size, params.scalar_size
    body = bytearray()
    body.append(params.bits)
    body += esz.to_bytes(2, "big")
    body.append(ssz)
    for big_b in proof.bit_commitments:
        body += big_b.to_bytes(esz, "big")
    for bp in proof.bit_proofs:
        body += bp.t0.to_bytes(esz, "big")
        body += bp.t1.to_bytes(esz, "big")
        body += bp.c0.to_bytes(ssz, "big")
        body += bp.z0.to_bytes(ssz, "big")
        body += bp.z1.to_bytes(ssz, "big")
    body += proof.link_t.to_bytes(esz, "big")
    body += proof.link_z.to_bytes(ssz, "big")
    body += proof.challenge
    return _MAGIC + bytes([_VERSION]) + len(body).to_bytes(4, "big") + bytes(body)


def deserialize_proof(params: ProofParams, data: bytes) -> ThresholdProof:
    if not isinstance(data, (bytes, bytearray)):
        raise MalformedProof("proof must be bytes")
    data = bytes(data)
    if len(data) < 13 or data[:4] != _MAGIC:
        raise MalformedProof("bad magic")
    if data[4] != _VERSION:
        raise MalformedProof(f"unsupported version {data[4]}")
    declared = int.from_bytes(data[5:9], "big")
    body = data[9:]
    if len(body) != declared:
        raise MalformedProof("length prefix does not match the payload")
    if len(data) != proof_size(params):
        raise MalformedProof("proof size does not match the parameters")
    bits, esz, ssz = body[0], int.from_bytes(body[1:3], "big"), body[3]
    if bits != params.bits or esz != params.element_size or ssz != params.scalar_size:
        raise MalformedProof("geometry does not match the parameters")

    pos = 4

    def take(n: int) -> bytes:
        nonlocal pos
        chunk = body[pos : pos + n]
        pos += n
        return chunk

    def element() -> int:
        x = int.from_bytes(take(esz), "big")
        if not 1 <= x < params.group.p:
            raise MalformedProof("group element out of range")
        return x

    def scalar() -> int:
        x = int.from_bytes(take(ssz), "big")
        if x >= params.group.q:
            raise MalformedProof("scalar out of range")
        return x

    bit_comms = [element() for _ in range(bits)]
    bit_proofs = []
    for _ in range(bits):
        t0, t1 = element(), element()
        c0, z0, z1 = scalar(), scalar(), scalar()
        bit_proofs.append(BitProof(t0=t0, t1=t1, c0=c0, z0=z0, z1=z1))
    link_t = element()
    link_z = scalar()
    challenge = take(32)
    return ThresholdProof(
        bit_commitments=bit_comms,
        bit_proofs=bit_proofs,
        link_t=link_t,
        link_z=link_z,
        challenge=challenge,
    )


def verification_params(kind: str, params: ProofParams | None = None) -> dict:
    """Everything a remote party needs to check proofs of this kind with no
    trust in this node."""
    if kind not in _REDUCTIONS:
        raise NotFound(f"unknown proof kind {kind!r}")
    if params is None:
        params = setup()
    return {
        "kind": kind,
        "comparator": _COMPARATOR_TEXT[kind],
        "params": _params_doc(params),
        "paramsId": params_id(params).hex(),
        "proofSize": proof_size(params),
    }

"""Hashing, canonical serialization, signatures, and keyed MACs.

Everything else in the package builds on these primitives.  All functions
are pure; the only state is the module-level window table inside the curve
implementation, which is computed once and read-only afterwards.
"""

import dataclasses
import hashlib
import hmac as _hmac
import json
import random

from . import secp256k1
from .errors import InvalidSignature, UnserializableValue, WeakKey
from .keccak import keccak256

__all__ = [
    "sha256",
    "keccak256",
    "hmac_sha256",
    "canonical_serialize",
    "KeyPair",
    "generate_keypair",
    "keypair_from_secret",
    "sign",
    "recover_address",
    "verify_address",
    "to_hex",
    "from_hex",
]

MIN_MAC_KEY_LEN = 16


def sha256(data: bytes) -> bytes:
    return hashlib.sha256(data).digest()


def hmac_sha256(key: bytes, message: bytes) -> bytes:
    if len(key) < MIN_MAC_KEY_LEN:
        raise WeakKey(f"MAC key must be at least {MIN_MAC_KEY_LEN} bytes, got {len(key)}")
    return _hmac.new(key, message, hashlib.sha256).digest()


def canonical_serialize(document) -> bytes:
    """Deterministic JSON bytes: sorted keys, no whitespace, UTF-8.

    Floats use Python's shortest round-trip repr.  Non-finite floats are
    rejected rather than silently emitting Infinity/NaN tokens that JSON
    parsers disagree on.
    """
    try:
        text = json.dumps(
            document,
            sort_keys=True,
            separators=(",", ":"),
            ensure_ascii=False,
            allow_nan=False,
        )
    except (TypeError, ValueError) as exc:
        raise UnserializableValue(str(exc)) from exc
    return text.encode("utf-8")


@dataclasses.dataclass(frozen=True)
class KeyPair:
    secret: int
    public: tuple
    address: bytes  # 20 bytes

    @property
    def address_hex(self) -> str:
        return to_hex(self.address)


def _address_of(public) -> bytes:
    return keccak256(secp256k1.encode_public(public))[-20:]


def generate_keypair(seed: int | None = None) -> KeyPair:
    """Fresh keypair; pass a seed only in tests that need reproducibility."""
    rng = random.Random(seed) if seed is not None else None
    secret = secp256k1.new_secret(rng)
    public = secp256k1.public_key(secret)
    return KeyPair(secret=secret, public=public, address=_address_of(public))


def keypair_from_secret(secret: int) -> KeyPair:
    public = secp256k1.public_key(secret)
    return KeyPair(secret=secret, public=public, address=_address_of(public))


def sign(secret: int, message: bytes) -> bytes:
    """Sign a 32-byte digest; callers hash their payloads first."""
    if len(message) != 32:
        raise InvalidSignature("sign() expects a 32-byte digest")
    return secp256k1.sign(secret, message)


def recover_address(message: bytes, signature: bytes) -> bytes:
    point = secp256k1.recover(message, signature)
    return _address_of(point)


def verify_address(message: bytes, signature: bytes, address: bytes) -> bool:
    try:
        return recover_address(message, signature) == address
    except InvalidSignature:
        return False


def to_hex(data: bytes) -> str:
    return "0x" + data.hex()


def from_hex(text: str) -> bytes:
    if text.startswith(("0x", "0X")):
        text = text[2:]
    try:
        return bytes.fromhex(text)
    except ValueError as exc:
        raise UnserializableValue(f"bad hex string: {exc}") from exc

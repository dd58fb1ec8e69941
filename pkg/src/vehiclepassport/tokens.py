"""Compact three-segment MAC tokens (header.claims.signature).

Same shape as an HS256 JWT: base64url segments over canonical JSON, the
third segment an HMAC-SHA256 over the first two.  The server key is the
only secret; possession of a valid token is the whole credential.
"""

from __future__ import annotations

import base64
import binascii
import hmac as _hmac
import json

from .crypto import canonical_serialize, hmac_sha256
from .errors import InvalidToken

_HEADER = {"alg": "HS256", "typ": "JWT"}


def _b64url(data: bytes) -> str:
    return base64.urlsafe_b64encode(data).rstrip(b"=").decode("ascii")


def _unb64url(segment: str) -> bytes:
    pad = "=" * (-len(segment) % 4)
    try:
        return base64.urlsafe_b64decode(segment + pad)
    except (binascii.Error, ValueError) as exc:
        raise InvalidToken("segment is not valid base64url") from exc


def encode(claims: dict, key: bytes) -> str:
    signing_input = _b64url(canonical_serialize(_HEADER)) + "." + _b64url(
        canonical_serialize(claims)
    )
    mac = hmac_sha256(key, signing_input.encode("ascii"))
    return signing_input + "." + _b64url(mac)


def decode(token: str, key: bytes) -> dict:
    """Verify the MAC and return the claims; expiry is the caller's job."""
    parts = token.split(".")
    if len(parts) != 3:
        raise InvalidToken("token must have three segments")
    signing_input = parts[0] + "." + parts[1]
    expected = hmac_sha256(key, signing_input.encode("ascii"))
    if not _hmac.compare_digest(expected, _unb64url(parts[2])):
        raise InvalidToken("MAC mismatch")
    try:
        claims = json.loads(_unb64url(parts[1]).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise InvalidToken("claims segment is not valid JSON") from exc
    if not isinstance(claims, dict):
        raise InvalidToken("claims must be an object")
    return claims

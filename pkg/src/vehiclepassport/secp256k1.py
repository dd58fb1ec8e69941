"""secp256k1 ECDSA with deterministic nonces and public-key recovery.

Signatures are 65 bytes r||s||v with low-s normalization, so one
(digest, signature) pair recovers exactly one public key.  Nonces follow
RFC 6979, making signing a pure function of (secret, digest).
"""

import hashlib
import hmac
import secrets

from .errors import InvalidSignature

P = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEFFFFFC2F
N = 0xFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFFEBAAEDCE6AF48A03BBFD25E8CD0364141
GX = 0x79BE667EF9DCBBAC55A06295CE870B07029BFCDB2DCE28D959F2815B16F81798
GY = 0x483ADA7726A3C4655DA4FBFC0E1108A8FD17B448A68554199C47D08FFB10D4B8

_INF = (0, 0, 0)  # Jacobian point at infinity (z == 0)


def _inv(a: int, m: int) -> int:
    return pow(a, -1, m)


def _jac_double(pt):
    x, y, z = pt
    if not z or not y:
        return _INF
    ysq = (y * y) % P
    s = (4 * x * ysq) % P
    m = (3 * x * x) % P
    nx = (m * m - 2 * s) % P
    ny = (m * (s - nx) - 8 * ysq * ysq) % P
    nz = (2 * y * z) % P
    return nx, ny, nz


def _jac_add(p1, p2):
    if not p1[2]:
        return p2
    if not p2[2]:
        return p1
    x1, y1, z1 = p1
    x2, y2, z2 = p2
    z1z1 = (z1 * z1) % P
    z2z2 = (z2 * z2) % P
    u1 = (x1 * z2z2) % P
    u2 = (x2 * z1z1) % P
    s1 = (y1 * z2z2 * z2) % P
    s2 = (y2 * z1z1 * z1) % P
    if u1 == u2:
        if s1 != s2:
            return _INF
        return _jac_double(p1)
    h = (u2 - u1) % P
    hh = (h * h) % P
    hhh = (h * hh) % P
    r = (s2 - s1) % P
    v = (u1 * hh) % P
    nx = (r * r - hhh - 2 * v) % P
    ny = (r * (v - nx) - s1 * hhh) % P
    nz = (h * z1 * z2) % P
    return nx, ny, nz


def _to_affine(pt):
    x, y, z = pt
    if not z:
        return None
    zi = _inv(z, P)
    zi2 = (zi * zi) % P
    return (x * zi2) % P, (y * zi2 * zi) % P


def _to_jac(affine):
    return (affine[0], affine[1], 1)


def _scalar_mult(k: int, point) -> tuple | None:
    """k * point for an affine point; returns affine or None for infinity."""
    k %= N
    if k == 0:
        return None
    # 4-bit windows, most significant first
    table = [_INF, _to_jac(point)]
    for _ in range(14):
        table.append(_jac_add(table[-1], table[1]))
    acc = _INF
    for shift in range(252, -4, -4):
        if acc[2]:
            acc = _jac_double(_jac_double(_jac_double(_jac_double(acc))))
        digit = (k >> shift) & 0xF
        if digit:
            acc = _jac_add(acc, table[digit])
    return _to_affine(acc)


_G_TABLE = None


def _base_mult(k: int):
    """k * G with a cached window table for the generator."""
    global _G_TABLE
    if _G_TABLE is None:
        table = [_INF, _to_jac((GX, GY))]
        for _ in range(14):
            table.append(_jac_add(table[-1], table[1]))
        _G_TABLE = table
    k %= N
    if k == 0:
        return None
    acc = _INF
    for shift in range(252, -4, -4):
        if acc[2]:
            acc = _jac_double(_jac_double(_jac_double(_jac_double(acc))))
        digit = (k >> shift) & 0xF
        if digit:
            acc = _jac_add(acc, _G_TABLE[digit])
    return _to_affine(acc)


def _dual_mult(k1: int, k2: int, point2):
    """k1*G + k2*point2 via interleaved (Shamir) evaluation."""
    k1 %= N
    k2 %= N
    g = _to_jac((GX, GY))
    p2 = _to_jac(point2)
    gp = _jac_add(g, p2)
    acc = _INF
    for i in range(255, -1, -1):
        if acc[2]:
            acc = _jac_double(acc)
        b1 = (k1 >> i) & 1
        b2 = (k2 >> i) & 1
        if b1 and b2:
            acc = _jac_add(acc, gp)
        elif b1:
            acc = _jac_add(acc, g)
        elif b2:
            acc = _jac_add(acc, p2)
    return _to_affine(acc)


def public_key(secret: int) -> tuple:
    if not 1 <= secret < N:
        raise InvalidSignature("secret scalar out of range")
    return _base_mult(secret)


def new_secret(rng=None) -> int:
    if rng is None:
        return secrets.randbelow(N - 1) + 1
    return rng.getrandbits(256) % (N - 1) + 1


def _rfc6979_nonce(secret: int, digest32: bytes) -> int:
    h1 = digest32
    x = secret.to_bytes(32, "big")
    v = b"\x01" * 32
    k = b"\x00" * 32
    k = hmac.new(k, v + b"\x00" + x + h1, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    k = hmac.new(k, v + b"\x01" + x + h1, hashlib.sha256).digest()
    v = hmac.new(k, v, hashlib.sha256).digest()
    while True:
        v = hmac.new(k, v, hashlib.sha256).digest()
        candidate = int.from_bytes(v, "big")
        if 1 <= candidate < N:
            return candidate
        k = hmac.new(k, v + b"\x00", hashlib.sha256).digest()
        v = hmac.new(k, v, hashlib.sha256).digest()


def sign(secret: int, digest32: bytes) -> bytes:
    if len(digest32) != 32:
        raise InvalidSignature("message must be a 32-byte digest")
    if not 1 <= secret < N:
        raise InvalidSignature("secret scalar out of range")
    z = int.from_bytes(digest32, "big")
    k = _rfc6979_nonce(secret, digest32)
    while True:
        rx, ry = _base_mult(k)
        r = rx % N
        if r == 0:
            k = (k + 1) % N or 1
            continue
        s = (_inv(k, N) * (z + r * secret)) % N
        if s == 0:
            k = (k + 1) % N or 1
            continue
        v = ry & 1
        if s > N // 2:
            s = N - s
            v ^= 1
        return r.to_bytes(32, "big") + s.to_bytes(32, "big") + bytes([v])


def recover(digest32: bytes, signature: bytes) -> tuple:
    """Recover the affine public key that produced signature over digest32."""
    if len(digest32) != 32:
        raise InvalidSignature("message must be a 32-byte digest")
    if len(signature) != 65:
        raise InvalidSignature("signature must be 65 bytes r||s||v")
    r = int.from_bytes(signature[:32], "big")
    s = int.from_bytes(signature[32:64], "big")
    v = signature[64]
    if v not in (0, 1) or not 1 <= r < N or not 1 <= s < N:
        raise InvalidSignature()
    x = r
    y_sq = (pow(x, 3, P) + 7) % P
    y = pow(y_sq, (P + 1) // 4, P)
    if (y * y) % P != y_sq:
        raise InvalidSignature("r is not a valid curve x-coordinate")
    if y & 1 != v:
        y = P - y
    z = int.from_bytes(digest32, "big")
    r_inv = _inv(r, N)
    point = _dual_mult((-z * r_inv) % N, (s * r_inv) % N, (x, y))
    if point is None:
        raise InvalidSignature("recovered point at infinity")
    return point


def encode_public(point) -> bytes:
    """64-byte x||y encoding used for address derivation."""
    return point[0].to_bytes(32, "big") + point[1].to_bytes(32, "big")

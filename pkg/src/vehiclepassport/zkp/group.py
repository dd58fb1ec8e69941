"""Schnorr groups backing the threshold proofs.

Both parameter sets are fixed below and were derived deterministically from
public domain tags (sha256 counter expansion, then a straight search for
q | p - 1), so there is no hidden randomness to trust; derive_group()
reproduces them from scratch and the test suite checks that it does.  The
production group is a 2048-bit prime with a 256-bit prime-order subgroup.
The small 512/160 group exists so exhaustive protocol tests finish in
seconds; it offers no security margin and must never leave the test suite.
"""

from __future__ import annotations

import dataclasses
import hashlib

try:  # libgmp-backed fast path; plain pow() works too, just ~10x slower
    from gmpy2 import is_prime as _is_prime
    from gmpy2 import next_prime as _next_prime
except ImportError:  # pragma: no cover
    _is_prime = None
    _next_prime = None


@dataclasses.dataclass(frozen=True)
class Group:
    p: int  # field prime
    q: int  # order of the working subgroup, q | p - 1
    g: int  # generator of that subgroup

    @property
    def element_size(self) -> int:
        return (self.p.bit_length() + 7) // 8

    @property
    def scalar_size(self) -> int:
        return (self.q.bit_length() + 7) // 8


def expand(tag: bytes, nbytes: int) -> bytes:
    """Counter-mode sha256 stream; the anyone-can-recompute randomness
    source for parameter derivation."""
    out = b""
    ctr = 0
    while len(out) < nbytes:
        out += hashlib.sha256(tag + ctr.to_bytes(4, "big")).digest()
        ctr += 1
    return out[:nbytes]


def derive_group(p_bits: int, q_bits: int, tag: bytes) -> Group:
    """Regenerate a group from its domain tag.

    q is the next prime above a hash-derived q_bits seed (top and low bits
    pinned); the cofactor starts at a hash-derived point in the upper half
    of the p_bits range and walks upward in steps of 2q until p = c*q + 1
    is prime.  Fully deterministic, so independent runs agree bit for bit.
    """
    if _next_prime is None:  # pragma: no cover
        raise RuntimeError("group derivation needs gmpy2; install it or use the fixed groups")
    qseed = int.from_bytes(expand(tag + b"/q", q_bits // 8), "big")
    qseed |= (1 << (q_bits - 1)) | 1
    q = int(_next_prime(qseed))
    cseed = int.from_bytes(expand(tag + b"/c", p_bits // 8), "big")
    c = ((1 << (p_bits - 1)) + (cseed % (1 << (p_bits - 2)))) // q
    c += c % 2
    while True:
        p = c * q + 1
        if p.bit_length() != p_bits:
            raise AssertionError("search outran the bit budget")
        if _is_prime(p):
            break
        c += 2
    a = 2
    while True:
        g = pow(a, (p - 1) // q, p)
        if g != 1:
            break
        a += 1
    return Group(p=p, q=q, g=g)


def hash_to_group(group: Group, tag: bytes) -> int:
    """Map a domain tag to a subgroup element with unknown discrete log:
    hash to a field element, then raise to the cofactor."""
    cofactor = (group.p - 1) // group.q
    ctr = 0
    while True:
        seed = expand(tag + b"/%d" % ctr, group.element_size)
        u = int.from_bytes(seed, "big") % group.p
        h = pow(u, cofactor, group.p)
        if h != 1 and h != group.g:
            return h
        ctr += 1  # pragma: no cover - astronomically unlikely


GROUP_TAG_2048 = b"vehiclepassport/zkp/group/v1/2048"
GROUP_TAG_512 = b"vehiclepassport/zkp/group/v1/512"

# derive_group(2048, 256, GROUP_TAG_2048)
PROD_GROUP = Group(
    p=int(
        "8426dc6348eb2514b87d4f9d882bc59814a2d416ba46f32309fecc68810bf343"
        "9d945a664ee0c27ad337e5083f7b32ca6c33903f10bca87e39867aecd1a1ba08"
        "76b38c04f97dd6b8dfb8430ec1b99ed33942f775eca83b5d58c19d21e5f7150d"
        "4be0674a92c7c48d35608b1ac45c9b82be16c81acb3e289d8856b8824b611528"
        "569faf9ce919f3bf56a15d908540833afb8be41d045cd0934287ccac197e52d2"
        "d8ac45d108aa14c0c9568b65995f155140203a7a5dcc4dd44d49aa9eabd42df6"
        "24862c765e955b07c6874e217879880e969965d60cb23ad039b5f98a89a23878"
        "e479766d524d9bad042f331aae80c6082fffcbe8f96445d203cfbdc3c00e3747",
        16,
    ),
    q=int("d14e8baa3aa212d5590db77a84a3476607f479e34b0c5ad72e7091141fdad64f", 16),
    g=int(
        "8220572a03e2fa2a1718269c5ff6551b86c34368d8172a0dc7b028d7cee9edba"
        "e8d48c09f9eccbf0183d4a28518a3b6bb0222853c80161624bb48150973823a7"
        "e877445c8a8f9668532517e4fe063a7d043d01a694e4c944441f9e55cc8587f2"
        "c2e7bd2fb14bf9ec989ad0dcfd29f1b823d2fd87e866a995b0c50618a6a00469"
        "7d3069786834b4753def83ebfb4efb63ac45995b0c9753b996ba9ff148341520"
        "e30dcce55e43c6a6f7978e86d199c6d7b8cd4ae8b9a38fbac448d7ffb5e6c94f"
        "0ed9e28dc83062c19148e0c629e61968e2aa1c0e6619cc150ffb6ecfd08cff49"
        "b65f0eda64eb7c614b57b03ec5655209f8ae5db0d09d7b89b9747acc4d971509",
        16,
    ),
)

# derive_group(512, 160, GROUP_TAG_512) - exhaustive-test group, NOT secure
SMALL_GROUP = Group(
    p=int(
        "879da9afeff2e634d8c2be0660d75595b7946c98ddbb51e087da5a53eff719b9"
        "14c67953a6b514ca39e75c8b177ebad862a749b6568129bde57b82dd267f9fb9",
        16,
    ),
    q=int("d6101dd6d4cc99a8fdab80478fc04fc116b45e37", 16),
    g=int(
        "19c2b79ae0da29d85f87622474b115919bef19c9dffcca9307bd0082c6831dfd"
        "3c0b68c8fc8487a9e216a26d5a1a1e2f963ce2169b11204d63d60f33abb91aea",
        16,
    ),
)

"""Keccak-256 (original 0x01 padding, not NIST SHA-3).

hashlib only ships the SHA-3 finalists, whose domain-separation byte
differs, so the sponge is implemented here.  State is a flat list of 25
lanes indexed x + 5y; rho/pi are folded into one precomputed permutation
table so each round is two passes over the state.
"""

_MASK = (1 << 64) - 1

_RC = (
    0x0000000000000001, 0x0000000000008082, 0x800000000000808A,
    0x8000000080008000, 0x000000000000808B, 0x0000000080000001,
    0x8000000080008081, 0x8000000000008009, 0x000000000000008A,
    0x0000000000000088, 0x0000000080008009, 0x000000008000000A,
    0x000000008000808B, 0x800000000000008B, 0x8000000000008089,
    0x8000000000008003, 0x8000000000008002, 0x8000000000000080,
    0x000000000000800A, 0x800000008000000A, 0x8000000080008081,
    0x8000000000008080, 0x0000000080000001, 0x8000000080008008,
)

# Combined rho rotation and pi destination for source lane x + 5y:
# lane (x, y) rotates by _ROT[x+5y] and lands at (y, 2x+3y).
_ROT = [0] * 25
_DST = [0] * 25
for _x in range(5):
    for _y in range(5):
        _src = _x + 5 * _y
        _DST[_src] = _y + 5 * ((2 * _x + 3 * _y) % 5)
_ROT_OFFSETS = {
    (0, 0): 0, (1, 0): 1, (2, 0): 62, (3, 0): 28, (4, 0): 27,
    (0, 1): 36, (1, 1): 44, (2, 1): 6, (3, 1): 55, (4, 1): 20,
    (0, 2): 3, (1, 2): 10, (2, 2): 43, (3, 2): 25, (4, 2): 39,
    (0, 3): 41, (1, 3): 45, (2, 3): 15, (3, 3): 21, (4, 3): 8,
    (0, 4): 18, (1, 4): 2, (2, 4): 61, (3, 4): 56, (4, 4): 14,
}
for (_x, _y), _r in _ROT_OFFSETS.items():
    _ROT[_x + 5 * _y] = _r

_RATE = 136  # 1088-bit rate for 256-bit output


def _permute(s: list) -> None:
    rot = _ROT
    dst = _DST
    for rc in _RC:
        # theta
        c0 = s[0] ^ s[5] ^ s[10] ^ s[15] ^ s[20]
        c1 = s[1] ^ s[6] ^ s[11] ^ s[16] ^ s[21]
        c2 = s[2] ^ s[7] ^ s[12] ^ s[17] ^ s[22]
        c3 = s[3] ^ s[8] ^ s[13] ^ s[18] ^ s[23]
        c4 = s[4] ^ s[9] ^ s[14] ^ s[19] ^ s[24]
        d0 = c4 ^ (((c1 << 1) | (c1 >> 63)) & _MASK)
        d1 = c0 ^ (((c2 << 1) | (c2 >> 63)) & _MASK)
        d2 = c1 ^ (((c3 << 1) | (c3 >> 63)) & _MASK)
        d3 = c2 ^ (((c4 << 1) | (c4 >> 63)) & _MASK)
        d4 = c3 ^ (((c0 << 1) | (c0 >> 63)) & _MASK)
        for y in (0, 5, 10, 15, 20):
            s[y] ^= d0
            s[y + 1] ^= d1
            s[y + 2] ^= d2
            s[y + 3] ^= d3
            s[y + 4] ^= d4
        # rho + pi
        b = [0] * 25
        for i in range(25):
            lane = s[i]
            r = rot[i]
            b[dst[i]] = ((lane << r) | (lane >> (64 - r))) & _MASK if r else lane
        # chi
        for y in (0, 5, 10, 15, 20):
            b0, b1, b2, b3, b4 = b[y], b[y + 1], b[y + 2], b[y + 3], b[y + 4]
            s[y] = b0 ^ (~b1 & b2)
            s[y + 1] = b1 ^ (~b2 & b3)
            s[y + 2] = b2 ^ (~b3 & b4)
            s[y + 3] = b3 ^ (~b4 & b0)
            s[y + 4] = b4 ^ (~b0 & b1)
        # iota
        s[0] ^= rc


def keccak256(data: bytes) -> bytes:
    state = [0] * 25
    n = len(data)
    full_end = n - (n % _RATE)
    for start in range(0, full_end, _RATE):
        block = data[start:start + _RATE]
        for i in range(17):
            state[i] ^= int.from_bytes(block[8 * i:8 * i + 8], "little")
        _permute(state)
    tail = bytearray(data[full_end:])
    pad = _RATE - len(tail)
    if pad == 1:
        tail.append(0x81)
    else:
        tail.append(0x01)
        tail.extend(b"\x00" * (pad - 2))
        tail.append(0x80)
    for i in range(17):
        state[i] ^= int.from_bytes(tail[8 * i:8 * i + 8], "little")
    _permute(state)
    return b"".join(state[i].to_bytes(8, "little") for i in range(4))

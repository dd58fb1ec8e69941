// Keccak-256 with the original 0x01 padding (pre-NIST, the variant the
// node uses for addresses, anchors, and request digests).  Lanes are
// BigInt; throughput is irrelevant at the message sizes the console
// hashes, fidelity is everything.

const MASK = (1n << 64n) - 1n;
const RATE = 136;

const RC = [
  0x0000000000000001n, 0x0000000000008082n, 0x800000000000808an,
  0x8000000080008000n, 0x000000000000808bn, 0x0000000080000001n,
  0x8000000080008081n, 0x8000000000008009n, 0x000000000000008an,
  0x0000000000000088n, 0x0000000080008009n, 0x000000008000000an,
  0x000000008000808bn, 0x800000000000008bn, 0x8000000000008089n,
  0x8000000000008003n, 0x8000000000008002n, 0x8000000000000080n,
  0x000000000000800an, 0x800000008000000an, 0x8000000080008081n,
  0x8000000000008080n, 0x0000000080000001n, 0x8000000080008008n,
];

// rho rotation amounts and pi destinations for source lane x + 5y
const ROT: bigint[] = new Array(25).fill(0n);
const DST: number[] = new Array(25).fill(0);
{
  const offsets: Record<string, number> = {
    "0,0": 0, "1,0": 1, "2,0": 62, "3,0": 28, "4,0": 27,
    "0,1": 36, "1,1": 44, "2,1": 6, "3,1": 55, "4,1": 20,
    "0,2": 3, "1,2": 10, "2,2": 43, "3,2": 25, "4,2": 39,
    "0,3": 41, "1,3": 45, "2,3": 15, "3,3": 21, "4,3": 8,
    "0,4": 18, "1,4": 2, "2,4": 61, "3,4": 56, "4,4": 14,
  };
  for (let x = 0; x < 5; x++) {
    for (let y = 0; y < 5; y++) {
      const src = x + 5 * y;
      DST[src] = y + 5 * ((2 * x + 3 * y) % 5);
      ROT[src] = BigInt(offsets[`${x},${y}`]);
    }
  }
}

function rotl(v: bigint, n: bigint): bigint {
  if (n === 0n) return v;
  return ((v << n) | (v >> (64n - n))) & MASK;
}

function permute(s: bigint[]): void {
  for (const rc of RC) {
    const c0 = s[0] ^ s[5] ^ s[10] ^ s[15] ^ s[20];
    const c1 = s[1] ^ s[6] ^ s[11] ^ s[16] ^ s[21];
    const c2 = s[2] ^ s[7] ^ s[12] ^ s[17] ^ s[22];
    const c3 = s[3] ^ s[8] ^ s[13] ^ s[18] ^ s[23];
    const c4 = s[4] ^ s[9] ^ s[14] ^ s[19] ^ s[24];
    const d0 = c4 ^ rotl(c1, 1n);
    const d1 = c0 ^ rotl(c2, 1n);
    const d2 = c1 ^ rotl(c3, 1n);
    const d3 = c2 ^ rotl(c4, 1n);
    const d4 = c3 ^ rotl(c0, 1n);
    for (let y = 0; y < 25; y += 5) {
      s[y] ^= d0; s[y + 1] ^= d1; s[y + 2] ^= d2; s[y + 3] ^= d3; s[y + 4] ^= d4;
    }
    const moved: bigint[] = new Array(25);
    for (let i = 0; i < 25; i++) moved[DST[i]] = rotl(s[i], ROT[i]);
    for (let y = 0; y < 25; y += 5) {
      const a0 = moved[y], a1 = moved[y + 1], a2 = moved[y + 2];
      const a3 = moved[y + 3], a4 = moved[y + 4];
      s[y] = a0 ^ (~a1 & MASK & a2);
      s[y + 1] = a1 ^ (~a2 & MASK & a3);
      s[y + 2] = a2 ^ (~a3 & MASK & a4);
      s[y + 3] = a3 ^ (~a4 & MASK & a0);
      s[y + 4] = a4 ^ (~a0 & MASK & a1);
    }
    s[0] ^= rc;
  }
}

function absorbBlock(state: bigint[], block: Uint8Array): void {
  for (let i = 0; i < 17; i++) {
    let lane = 0n;
    for (let j = 7; j >= 0; j--) {
      lane = (lane << 8n) | BigInt(block[8 * i + j]);
    }
    state[i] ^= lane;
  }
  permute(state);
}

export function keccak256(data: Uint8Array): Uint8Array {
  const state: bigint[] = new Array(25).fill(0n);
  const fullEnd = data.length - (data.length % RATE);
  for (let start = 0; start < fullEnd; start += RATE) {
    absorbBlock(state, data.subarray(start, start + RATE));
  }
  const tail = new Uint8Array(RATE);
  tail.set(data.subarray(fullEnd));
  const used = data.length - fullEnd;
  if (used === RATE - 1) {
    tail[used] = 0x81;
  } else {
    tail[used] = 0x01;
    tail[RATE - 1] |= 0x80;
  }
  absorbBlock(state, tail);

  const out = new Uint8Array(32);
  for (let i = 0; i < 4; i++) {
    let lane = state[i];
    for (let j = 0; j < 8; j++) {
      out[8 * i + j] = Number(lane & 0xffn);
      lane >>= 8n;
    }
  }
  return out;
}

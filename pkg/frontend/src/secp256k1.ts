// secp256k1 ECDSA matching the node: RFC 6979 nonces, 65-byte r||s||v
// signatures with low-s normalization, and keccak-based addresses.
// Signing here is what keeps private keys off the wire; everything the
// server ever sees is a signature plus the claimed address.

import { bigintToBytes, bytesToBigint, concatBytes } from "./hex.js";
import { keccak256 } from "./keccak.js";
import { hmacSha256 } from "./sha256.js";

export const P = 0xfffffffffffffffffffffffffffffffffffffffffffffffffffffffefffffc2fn;
export const N = 0xfffffffffffffffffffffffffffffffebaaedce6af48a03bbfd25e8cd0364141n;
const GX = 0x79be667ef9dcbbac55a06295ce870b07029bfcdb2dce28d959f2815b16f81798n;
const GY = 0x483ada7726a3c4655da4fbfc0e1108a8fd17b448a68554199c47d08ffb10d4b8n;

type Jac = [bigint, bigint, bigint];
const INF: Jac = [0n, 0n, 0n];

function mod(a: bigint, m: bigint): bigint {
  const r = a % m;
  return r < 0n ? r + m : r;
}

export function modInv(a: bigint, m: bigint): bigint {
  let [t, newT] = [0n, 1n];
  let [r, newR] = [m, mod(a, m)];
  while (newR !== 0n) {
    const q = r / newR;
    [t, newT] = [newT, t - q * newT];
    [r, newR] = [newR, r - q * newR];
  }
  if (r !== 1n) throw new Error("not invertible");
  return mod(t, m);
}

export function modPow(base: bigint, exp: bigint, m: bigint): bigint {
  let b = mod(base, m);
  let e = exp;
  let acc = 1n;
  while (e > 0n) {
    if (e & 1n) acc = (acc * b) % m;
    b = (b * b) % m;
    e >>= 1n;
  }
  return acc;
}

function jacDouble(pt: Jac): Jac {
  const [x, y, z] = pt;
  if (z === 0n || y === 0n) return INF;
  const ysq = mod(y * y, P);
  const s = mod(4n * x * ysq, P);
  const m = mod(3n * x * x, P);
  const nx = mod(m * m - 2n * s, P);
  const ny = mod(m * (s - nx) - 8n * ysq * ysq, P);
  const nz = mod(2n * y * z, P);
  return [nx, ny, nz];
}

function jacAdd(p1: Jac, p2: Jac): Jac {
  if (p1[2] === 0n) return p2;
  if (p2[2] === 0n) return p1;
  const [x1, y1, z1] = p1;
  const [x2, y2, z2] = p2;
  const z1z1 = mod(z1 * z1, P);
  const z2z2 = mod(z2 * z2, P);
  const u1 = mod(x1 * z2z2, P);
  const u2 = mod(x2 * z1z1, P);
  const s1 = mod(y1 * z2z2 * z2, P);
  const s2 = mod(y2 * z1z1 * z1, P);
  if (u1 === u2) {
    if (s1 !== s2) return INF;
    return jacDouble(p1);
  }
  const h = mod(u2 - u1, P);
  const hh = mod(h * h, P);
  const hhh = mod(h * hh, P);
  const r = mod(s2 - s1, P);
  const v = mod(u1 * hh, P);
  const nx = mod(r * r - hhh - 2n * v, P);
  const ny = mod(r * (v - nx) - s1 * hhh, P);
  const nz = mod(h * z1 * z2, P);
  return [nx, ny, nz];
}

function toAffine(pt: Jac): [bigint, bigint] | null {
  const [x, y, z] = pt;
  if (z === 0n) return null;
  const zi = modInv(z, P);
  const zi2 = mod(zi * zi, P);
  return [mod(x * zi2, P), mod(y * zi2 * zi, P)];
}

function scalarMult(k: bigint, point: [bigint, bigint]): [bigint, bigint] | null {
  const kk = mod(k, N);
  if (kk === 0n) return null;
  const table: Jac[] = [INF, [point[0], point[1], 1n]];
  for (let i = 0; i < 14; i++) table.push(jacAdd(table[table.length - 1], table[1]));
  let acc = INF;
  for (let shift = 252n; shift >= 0n; shift -= 4n) {
    if (acc[2] !== 0n) acc = jacDouble(jacDouble(jacDouble(jacDouble(acc))));
    const digit = Number((kk >> shift) & 0xfn);
    if (digit) acc = jacAdd(acc, table[digit]);
  }
  return toAffine(acc);
}

let gTable: Jac[] | null = null;

function baseMult(k: bigint): [bigint, bigint] | null {
  if (gTable === null) {
    gTable = [INF, [GX, GY, 1n]];
    for (let i = 0; i < 14; i++) gTable.push(jacAdd(gTable[gTable.length - 1], gTable[1]));
  }
  const kk = mod(k, N);
  if (kk === 0n) return null;
  let acc = INF;
  for (let shift = 252n; shift >= 0n; shift -= 4n) {
    if (acc[2] !== 0n) acc = jacDouble(jacDouble(jacDouble(jacDouble(acc))));
    const digit = Number((kk >> shift) & 0xfn);
    if (digit) acc = jacAdd(acc, gTable[digit]);
  }
  return toAffine(acc);
}

function dualMult(k1: bigint, k2: bigint, point2: [bigint, bigint]): [bigint, bigint] | null {
  const a = mod(k1, N);
  const b = mod(k2, N);
  const g: Jac = [GX, GY, 1n];
  const p2: Jac = [point2[0], point2[1], 1n];
  const gp = jacAdd(g, p2);
  let acc = INF;
  for (let i = 255n; i >= 0n; i--) {
    if (acc[2] !== 0n) acc = jacDouble(acc);
    const b1 = (a >> i) & 1n;
    const b2 = (b >> i) & 1n;
    if (b1 && b2) acc = jacAdd(acc, gp);
    else if (b1) acc = jacAdd(acc, g);
    else if (b2) acc = jacAdd(acc, p2);
  }
  return toAffine(acc);
}

export function publicKey(secret: bigint): [bigint, bigint] {
  if (secret < 1n || secret >= N) throw new Error("secret scalar out of range");
  const pt = baseMult(secret);
  if (pt === null) throw new Error("secret scalar out of range");
  return pt;
}

export function encodePublic(point: [bigint, bigint]): Uint8Array {
  return concatBytes(bigintToBytes(point[0], 32), bigintToBytes(point[1], 32));
}

export function addressOf(point: [bigint, bigint]): Uint8Array {
  return keccak256(encodePublic(point)).slice(-20);
}

function rfc6979Nonce(secret: bigint, digest32: Uint8Array): bigint {
  const x = bigintToBytes(secret, 32);
  let v: Uint8Array = new Uint8Array(32).fill(0x01);
  let k: Uint8Array = new Uint8Array(32).fill(0x00);
  k = hmacSha256(k, concatBytes(v, Uint8Array.of(0x00), x, digest32));
  v = hmacSha256(k, v);
  k = hmacSha256(k, concatBytes(v, Uint8Array.of(0x01), x, digest32));
  v = hmacSha256(k, v);
  for (;;) {
    v = hmacSha256(k, v);
    const candidate = bytesToBigint(v);
    if (candidate >= 1n && candidate < N) return candidate;
    k = hmacSha256(k, concatBytes(v, Uint8Array.of(0x00)));
    v = hmacSha256(k, v);
  }
}

export function sign(secret: bigint, digest32: Uint8Array): Uint8Array {
  if (digest32.length !== 32) throw new Error("message must be a 32-byte digest");
  if (secret < 1n || secret >= N) throw new Error("secret scalar out of range");
  const z = bytesToBigint(digest32);
  let k = rfc6979Nonce(secret, digest32);
  for (;;) {
    const pt = baseMult(k);
    if (pt === null) {
      k = mod(k + 1n, N) || 1n;
      continue;
    }
    const [rx, ry] = pt;
    const r = mod(rx, N);
    if (r === 0n) {
      k = mod(k + 1n, N) || 1n;
      continue;
    }
    let s = mod(modInv(k, N) * (z + r * secret), N);
    if (s === 0n) {
      k = mod(k + 1n, N) || 1n;
      continue;
    }
    let v = Number(ry & 1n);
    if (s > N / 2n) {
      s = N - s;
      v ^= 1;
    }
    return concatBytes(bigintToBytes(r, 32), bigintToBytes(s, 32), Uint8Array.of(v));
  }
}

export function recover(digest32: Uint8Array, signature: Uint8Array): [bigint, bigint] {
  if (digest32.length !== 32) throw new Error("message must be a 32-byte digest");
  if (signature.length !== 65) throw new Error("signature must be 65 bytes r||s||v");
  const r = bytesToBigint(signature.subarray(0, 32));
  const s = bytesToBigint(signature.subarray(32, 64));
  const v = signature[64];
  if ((v !== 0 && v !== 1) || r < 1n || r >= N || s < 1n || s >= N) {
    throw new Error("invalid signature");
  }
  const x = r;
  const ySq = mod(modPow(x, 3n, P) + 7n, P);
  let y = modPow(ySq, (P + 1n) / 4n, P);
  if (mod(y * y, P) !== ySq) throw new Error("r is not a valid curve x-coordinate");
  if (Number(y & 1n) !== v) y = P - y;
  const z = bytesToBigint(digest32);
  const rInv = modInv(r, N);
  const point = dualMult(mod(-z * rInv, N), mod(s * rInv, N), [x, y]);
  if (point === null) throw new Error("recovered point at infinity");
  return point;
}

export function recoverAddress(digest32: Uint8Array, signature: Uint8Array): Uint8Array {
  return addressOf(recover(digest32, signature));
}

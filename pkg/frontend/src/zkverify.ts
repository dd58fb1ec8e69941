// Client-side checking of the node's threshold proofs.
//
// This is a deliberate re-implementation of the server's verifier: the
// playground's whole point is that "valid" is computed here, in the
// browser, from the public verification parameters alone, so the node
// could lie in its response body and the badge would still be honest.
// The server and this file must agree bit for bit on the transcript
// hash and the wire format; the vector suite pins both against proofs
// the server actually produced.

import { canonicalSerialize, type JsonValue } from "./canonical.js";
import { bigintToBytes, bytesToBigint, concatBytes, utf8 } from "./hex.js";
import { sha256 } from "./sha256.js";

export const KINDS = [
  "BatteryHealthGT",
  "MileageLT",
  "WarrantyExpiryGT",
  "AccessRequestCountLE",
  "ServiceLogCountGE",
] as const;

export type ProofKind = (typeof KINDS)[number];

// kind -> sign on C and g-exponent offset; C_d = g^offset(t) * C^sign
// commits to the difference the range argument covers.
const REDUCTIONS: Record<ProofKind, { sign: 1 | -1; offset: (t: bigint) => bigint }> = {
  BatteryHealthGT: { sign: 1, offset: (t) => -(t + 1n) },
  MileageLT: { sign: -1, offset: (t) => t - 1n },
  WarrantyExpiryGT: { sign: 1, offset: (t) => -(t + 1n) },
  AccessRequestCountLE: { sign: -1, offset: (t) => t },
  ServiceLogCountGE: { sign: 1, offset: (t) => -t },
};

const FS_TAG = utf8("vehiclepassport/zkp/fs/v1");
const MAGIC = utf8("VPZK");
const VERSION = 1;

export class MalformedProof extends Error {}

export interface ProofParams {
  p: bigint;
  q: bigint;
  g: bigint;
  h: bigint;
  bits: number;
  elementSize: number;
  scalarSize: number;
}

export interface ThresholdStatement {
  kind: ProofKind;
  threshold: bigint;
  commitment: bigint;
}

interface BitProof {
  t0: bigint;
  t1: bigint;
  c0: bigint;
  z0: bigint;
  z1: bigint;
}

export interface ThresholdProof {
  bitCommitments: bigint[];
  bitProofs: BitProof[];
  linkT: bigint;
  linkZ: bigint;
  challenge: Uint8Array;
}

function mod(a: bigint, m: bigint): bigint {
  const r = a % m;
  return r < 0n ? r + m : r;
}

function modInv(a: bigint, m: bigint): bigint {
  let [t, newT] = [0n, 1n];
  let [r, newR] = [m, mod(a, m)];
  while (newR !== 0n) {
    const q = r / newR;
    [t, newT] = [newT, t - q * newT];
    [r, newR] = [newR, r - q * newR];
  }
  if (r !== 1n) throw new MalformedProof("element is not invertible");
  return mod(t, m);
}

// 4-bit fixed window; exponents here are up to 256 bits over a 2048-bit
// modulus, and the window close to halves the multiply count.
function modPow(base: bigint, exp: bigint, m: bigint): bigint {
  if (exp < 0n) throw new MalformedProof("negative exponent");
  let b = mod(base, m);
  if (exp === 0n) return 1n;
  const table: bigint[] = new Array(16);
  table[0] = 1n;
  for (let i = 1; i < 16; i++) table[i] = (table[i - 1] * b) % m;
  const nibbles: number[] = [];
  let e = exp;
  while (e > 0n) {
    nibbles.push(Number(e & 0xfn));
    e >>= 4n;
  }
  let acc = table[nibbles[nibbles.length - 1]];
  for (let i = nibbles.length - 2; i >= 0; i--) {
    acc = (acc * acc) % m;
    acc = (acc * acc) % m;
    acc = (acc * acc) % m;
    acc = (acc * acc) % m;
    if (nibbles[i]) acc = (acc * table[nibbles[i]]) % m;
  }
  return acc;
}

function hexNoPad(x: bigint): string {
  return x.toString(16);
}

function paramsDoc(params: ProofParams): JsonValue {
  return {
    bits: params.bits,
    p: hexNoPad(params.p),
    q: hexNoPad(params.q),
    g: hexNoPad(params.g),
    h: hexNoPad(params.h),
  };
}

export function paramsId(params: ProofParams): Uint8Array {
  return sha256(canonicalSerialize(paramsDoc(params)));
}

export function parseParams(doc: {
  bits: number;
  p: string;
  q: string;
  g: string;
  h: string;
}): ProofParams {
  let p: bigint, q: bigint, g: bigint, h: bigint;
  try {
    p = BigInt("0x" + doc.p);
    q = BigInt("0x" + doc.q);
    g = BigInt("0x" + doc.g);
    h = BigInt("0x" + doc.h);
  } catch {
    throw new MalformedProof("bad parameter document");
  }
  const bits = doc.bits;
  if (!Number.isInteger(bits) || bits < 1 || bits > 64) {
    throw new MalformedProof("bad parameter document: bits out of range");
  }
  if (!(1n < h && h < p) || !(1n < g && g < p)) {
    throw new MalformedProof("bad parameter document: generator out of range");
  }
  const elementSize = Math.ceil(p.toString(2).length / 8);
  const scalarSize = Math.ceil(q.toString(2).length / 8);
  return { p, q, g, h, bits, elementSize, scalarSize };
}

export function proofSize(params: ProofParams): number {
  const esz = params.elementSize;
  const ssz = params.scalarSize;
  const body = 4 + params.bits * (esz + 2 * esz + 3 * ssz) + esz + ssz + 32;
  return 4 + 1 + 4 + body;
}

export function deserializeProof(params: ProofParams, data: Uint8Array): ThresholdProof {
  if (data.length < 13 || !MAGIC.every((b, i) => data[i] === b)) {
    throw new MalformedProof("bad magic");
  }
  if (data[4] !== VERSION) throw new MalformedProof(`unsupported version ${data[4]}`);
  const declared = Number(bytesToBigint(data.subarray(5, 9)));
  const body = data.subarray(9);
  if (body.length !== declared) {
    throw new MalformedProof("length prefix does not match the payload");
  }
  if (data.length !== proofSize(params)) {
    throw new MalformedProof("proof size does not match the parameters");
  }
  const bits = body[0];
  const esz = (body[1] << 8) | body[2];
  const ssz = body[3];
  if (bits !== params.bits || esz !== params.elementSize || ssz !== params.scalarSize) {
    throw new MalformedProof("geometry does not match the parameters");
  }

  let pos = 4;
  const take = (n: number): Uint8Array => {
    const chunk = body.subarray(pos, pos + n);
    pos += n;
    return chunk;
  };
  const element = (): bigint => {
    const x = bytesToBigint(take(esz));
    if (!(1n <= x && x < params.p)) throw new MalformedProof("group element out of range");
    return x;
  };
  const scalar = (): bigint => {
    const x = bytesToBigint(take(ssz));
    if (x >= params.q) throw new MalformedProof("scalar out of range");
    return x;
  };

  const bitCommitments: bigint[] = [];
  for (let i = 0; i < bits; i++) bitCommitments.push(element());
  const bitProofs: BitProof[] = [];
  for (let i = 0; i < bits; i++) {
    const t0 = element();
    const t1 = element();
    const c0 = scalar();
    const z0 = scalar();
    const z1 = scalar();
    bitProofs.push({ t0, t1, c0, z0, z1 });
  }
  const linkT = element();
  const linkZ = scalar();
  const challenge = new Uint8Array(take(32));
  return { bitCommitments, bitProofs, linkT, linkZ, challenge };
}

function derivedCommitment(params: ProofParams, statement: ThresholdStatement): bigint {
  const { sign, offset } = REDUCTIONS[statement.kind];
  const base = modPow(params.g, mod(offset(statement.threshold), params.q), params.p);
  let c = mod(statement.commitment, params.p);
  if (sign < 0) c = modInv(c, params.p);
  return (base * c) % params.p;
}

function challengeBytes(
  params: ProofParams,
  statement: ThresholdStatement,
  proof: ThresholdProof,
): Uint8Array {
  const esz = params.elementSize;
  const parts: Uint8Array[] = [
    FS_TAG,
    paramsId(params),
    Uint8Array.of(KINDS.indexOf(statement.kind)),
    bigintToBytes(statement.threshold, 4),
    bigintToBytes(statement.commitment, esz),
  ];
  for (const b of proof.bitCommitments) parts.push(bigintToBytes(b, esz));
  for (const bp of proof.bitProofs) {
    parts.push(bigintToBytes(bp.t0, esz), bigintToBytes(bp.t1, esz));
  }
  parts.push(bigintToBytes(proof.linkT, esz));
  return sha256(concatBytes(...parts));
}

function checkShape(params: ProofParams, proof: ThresholdProof): void {
  const element = (x: bigint) => {
    if (!(1n <= x && x < params.p)) throw new MalformedProof("group element out of range");
  };
  const scalar = (x: bigint) => {
    if (!(0n <= x && x < params.q)) throw new MalformedProof("scalar out of range");
  };
  if (proof.bitCommitments.length !== params.bits || proof.bitProofs.length !== params.bits) {
    throw new MalformedProof(`expected ${params.bits} bit commitments and proofs`);
  }
  if (proof.challenge.length !== 32) throw new MalformedProof("challenge must be 32 bytes");
  for (const x of proof.bitCommitments) element(x);
  for (const bp of proof.bitProofs) {
    element(bp.t0);
    element(bp.t1);
    scalar(bp.c0);
    scalar(bp.z0);
    scalar(bp.z1);
  }
  element(proof.linkT);
  scalar(proof.linkZ);
}

export function verify(
  params: ProofParams,
  statement: ThresholdStatement,
  proof: ThresholdProof,
  publicSignals: { threshold?: unknown; result?: unknown },
): boolean {
  checkShape(params, proof);
  const { p, q, g, h } = params;

  if (publicSignals === null || typeof publicSignals !== "object") return false;
  if (publicSignals.result !== 1) return false;
  if (
    typeof publicSignals.threshold !== "number" ||
    BigInt(publicSignals.threshold) !== statement.threshold
  ) {
    return false;
  }
  if (!(1n <= statement.commitment && statement.commitment < p)) return false;
  if (!(0n <= statement.threshold && statement.threshold < 1n << 32n)) return false;

  const expected = challengeBytes(params, statement, proof);
  if (expected.length !== proof.challenge.length) return false;
  let diff = 0;
  for (let i = 0; i < 32; i++) diff |= expected[i] ^ proof.challenge[i];
  if (diff !== 0) return false;
  const c = mod(bytesToBigint(expected), q);

  const gInv = modInv(g, p);
  for (let i = 0; i < params.bits; i++) {
    const bigB = proof.bitCommitments[i];
    const bp = proof.bitProofs[i];
    const c1 = mod(c - bp.c0, q);
    if (modPow(h, bp.z0, p) !== (bp.t0 * modPow(bigB, bp.c0, p)) % p) return false;
    const x1 = (bigB * gInv) % p;
    if (modPow(h, bp.z1, p) !== (bp.t1 * modPow(x1, c1, p)) % p) return false;
  }

  // fold the weighted product of bit commitments by Horner, top bit first
  let acc = 1n;
  for (let i = proof.bitCommitments.length - 1; i >= 0; i--) {
    acc = (acc * acc) % p;
    acc = (acc * proof.bitCommitments[i]) % p;
  }
  const y = (derivedCommitment(params, statement) * modInv(acc, p)) % p;
  return modPow(h, proof.linkZ, p) === (proof.linkT * modPow(y, c, p)) % p;
}

// Canonical JSON bytes compatible with the server's serializer: keys
// sorted by code point, compact separators, UTF-8 with non-ASCII kept
// literal, and a number syntax the server reparses to the identical
// value.  Request digests are keccak256 of these bytes, so one byte of
// drift here means every signed call fails auth.

import { utf8 } from "./hex.js";

export type JsonValue =
  | null
  | boolean
  | number
  | string
  | JsonValue[]
  | { [key: string]: JsonValue };

function codePoints(s: string): number[] {
  return Array.from(s).map((ch) => ch.codePointAt(0) as number);
}

function compareKeys(a: string, b: string): number {
  const pa = codePoints(a);
  const pb = codePoints(b);
  const n = Math.min(pa.length, pb.length);
  for (let i = 0; i < n; i++) {
    if (pa[i] !== pb[i]) return pa[i] - pb[i];
  }
  return pa.length - pb.length;
}

function encodeNumber(x: number): string {
  if (!Number.isFinite(x)) throw new Error("non-finite numbers are not serializable");
  if (Object.is(x, -0)) {
    // the server would write -0.0, which String(-0) cannot reproduce
    throw new Error("negative zero does not survive the wire");
  }
  if (Number.isInteger(x)) {
    if (Math.abs(x) > Number.MAX_SAFE_INTEGER) {
      throw new Error("integer exceeds the exact range");
    }
    return String(x);
  }
  // Shortest round-trip decimals agree across runtimes; only the
  // plain-vs-exponent switchover differs, so stay inside the range where
  // both sides print plain decimals.
  const abs = Math.abs(x);
  if (abs !== 0 && (abs < 1e-4 || abs >= 1e16)) {
    throw new Error(`float ${x} is outside the cross-runtime plain-decimal range`);
  }
  return String(x);
}

function encodeValue(value: JsonValue, out: string[]): void {
  if (value === null) {
    out.push("null");
  } else if (typeof value === "boolean") {
    out.push(value ? "true" : "false");
  } else if (typeof value === "number") {
    out.push(encodeNumber(value));
  } else if (typeof value === "string") {
    out.push(JSON.stringify(value));
  } else if (Array.isArray(value)) {
    out.push("[");
    value.forEach((item, i) => {
      if (i > 0) out.push(",");
      encodeValue(item, out);
    });
    out.push("]");
  } else if (typeof value === "object") {
    const keys = Object.keys(value).sort(compareKeys);
    out.push("{");
    keys.forEach((key, i) => {
      if (i > 0) out.push(",");
      out.push(JSON.stringify(key), ":");
      encodeValue((value as Record<string, JsonValue>)[key], out);
    });
    out.push("}");
  } else {
    throw new Error(`value of type ${typeof value} is not serializable`);
  }
}

export function canonicalSerialize(document: JsonValue): Uint8Array {
  const parts: string[] = [];
  encodeValue(document, parts);
  return utf8(parts.join(""));
}

// Loads tests/vectors.json, which the pre-build oracle script
// (oracle/gen_vectors.py) produced from the server implementation.
// Nothing in here computes an expected value; the suite only compares
// against what the server said.

import fs from "node:fs";
import path from "node:path";
import type { JsonValue } from "../src/canonical.js";

export interface HashVector {
  name: string;
  data: string;
  keccak256: string;
  sha256: string;
}

export interface HmacVector {
  name: string;
  key: string;
  message: string;
  mac: string;
}

export interface CanonicalVector {
  name: string;
  doc: JsonValue;
  canonical: string;
  keccak256: string;
}

export interface SignatureVector {
  seed: number;
  secret: string;
  public: string;
  address: string;
  digest: string;
  signature: string;
}

export interface ZkCase {
  kind: string;
  value: number;
  threshold: number;
  commitment: string;
  proof: string;
  publicSignals: { threshold: number; result: number };
}

export interface ZkParamsDoc {
  bits: number;
  p: string;
  q: string;
  g: string;
  h: string;
}

export interface Vectors {
  note: string;
  hashes: HashVector[];
  hmacs: HmacVector[];
  canonical: CanonicalVector[];
  signatures: SignatureVector[];
  flows: {
    transfer: {
      payload: Record<string, JsonValue>;
      canonical: string;
      digest: string;
      sellerSignature: string;
      buyerSignature: string;
    };
    serviceLog: { logHash: string; centerSignature: string };
    login: { body: Record<string, JsonValue>; digest: string };
    emptyBodyDigest: string;
  };
  zk: {
    smallParams: ZkParamsDoc;
    smallParamsId: string;
    smallProofSize: number;
    smallCases: ZkCase[];
    mutationOffsets: number[];
    prodParams: ZkParamsDoc;
    prodParamsId: string;
    prodProofSize: number;
    prodCase: ZkCase;
  };
}

// resolved from the package root; the jsdom environment rules out
// import.meta.url tricks
const raw = fs.readFileSync(path.resolve(process.cwd(), "tests", "vectors.json"), "utf8");

export const vectors: Vectors = JSON.parse(raw);

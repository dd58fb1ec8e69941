// The client-side proof checker against proofs the server actually
// generated, pinned by the pre-build oracle script.  Acceptance of the
// genuine blobs and rejection of every mutated one is what makes the
// playground's verdict worth anything.

import { describe, expect, it } from "vitest";
import { bytesToHex, hexToBytes } from "../src/hex.js";
import {
  deserializeProof,
  MalformedProof,
  paramsId,
  parseParams,
  proofSize,
  verify,
  type ProofKind,
  type ThresholdStatement,
} from "../src/zkverify.js";
import { vectors, type ZkCase, type ZkParamsDoc } from "./fixtures.js";

const zk = vectors.zk;

function statementOf(c: ZkCase): ThresholdStatement {
  return {
    kind: c.kind as ProofKind,
    threshold: BigInt(c.threshold),
    commitment: BigInt("0x" + c.commitment),
  };
}

function checkCase(doc: ZkParamsDoc, c: ZkCase): boolean {
  const params = parseParams(doc);
  const proof = deserializeProof(params, hexToBytes(c.proof));
  return verify(params, statementOf(c), proof, c.publicSignals);
}

describe("parameter handling", () => {
  it("hashes the parameter documents to the server's ids", () => {
    expect(bytesToHex(paramsId(parseParams(zk.smallParams)))).toBe(zk.smallParamsId);
    expect(bytesToHex(paramsId(parseParams(zk.prodParams)))).toBe(zk.prodParamsId);
  });

  it("computes the server's proof sizes", () => {
    expect(proofSize(parseParams(zk.smallParams))).toBe(zk.smallProofSize);
    expect(proofSize(parseParams(zk.prodParams))).toBe(zk.prodProofSize);
    expect(hexToBytes(zk.prodCase.proof).length).toBe(zk.prodProofSize);
  });

  it("rejects corrupt parameter documents", () => {
    expect(() => parseParams({ ...zk.smallParams, bits: 0 })).toThrow(MalformedProof);
    expect(() => parseParams({ ...zk.smallParams, bits: 65 })).toThrow(MalformedProof);
    expect(() => parseParams({ ...zk.smallParams, g: "01" })).toThrow(/generator/);
    expect(() => parseParams({ ...zk.smallParams, p: "xyz" })).toThrow(MalformedProof);
  });
});

describe("accepting genuine proofs", () => {
  for (const c of zk.smallCases) {
    it(`verifies the server's ${c.kind} proof`, () => {
      expect(checkCase(zk.smallParams, c)).toBe(true);
    });
  }

  it("verifies a production-sized proof", () => {
    expect(checkCase(zk.prodParams, zk.prodCase)).toBe(true);
  });
});

describe("rejecting tampered proofs", () => {
  const params = parseParams(zk.smallParams);
  const base = zk.smallCases[0];
  const statement = statementOf(base);

  for (const offset of zk.mutationOffsets) {
    it(`rejects a byte flip at offset ${offset}`, () => {
      const blob = hexToBytes(base.proof);
      blob[offset] ^= 0x01;
      let ok: boolean;
      try {
        ok = verify(params, statement, deserializeProof(params, blob), base.publicSignals);
      } catch (err) {
        if (!(err instanceof MalformedProof)) throw err;
        ok = false;
      }
      expect(ok).toBe(false);
    });
  }

  it("rejects a truncated blob and a padded one", () => {
    const blob = hexToBytes(base.proof);
    expect(() => deserializeProof(params, blob.subarray(0, blob.length - 1))).toThrow(
      MalformedProof,
    );
    const padded = new Uint8Array(blob.length + 1);
    padded.set(blob);
    expect(() => deserializeProof(params, padded)).toThrow(MalformedProof);
  });

  it("rejects bad magic and unknown versions", () => {
    const wrongMagic = hexToBytes(base.proof);
    wrongMagic[0] ^= 0xff;
    expect(() => deserializeProof(params, wrongMagic)).toThrow(/magic/);

    const wrongVersion = hexToBytes(base.proof);
    wrongVersion[4] = 9;
    expect(() => deserializeProof(params, wrongVersion)).toThrow(/version/);
  });

  it("rejects a proof sized for different parameters", () => {
    const prod = parseParams(zk.prodParams);
    expect(() => deserializeProof(prod, hexToBytes(base.proof))).toThrow(/size/);
  });

  it("rejects lying public signals", () => {
    const proof = deserializeProof(params, hexToBytes(base.proof));
    expect(verify(params, statement, proof, { ...base.publicSignals, result: 0 })).toBe(false);
    expect(
      verify(params, statement, proof, {
        result: 1,
        threshold: base.publicSignals.threshold + 1,
      }),
    ).toBe(false);
  });

  it("rejects a statement the proof was not made for", () => {
    const proof = deserializeProof(params, hexToBytes(base.proof));
    const wrongKind = { ...statement, kind: "MileageLT" as ProofKind };
    expect(verify(params, wrongKind, proof, base.publicSignals)).toBe(false);

    const wrongThreshold = { ...statement, threshold: statement.threshold + 1n };
    expect(
      verify(params, wrongThreshold, proof, {
        result: 1,
        threshold: base.publicSignals.threshold + 1,
      }),
    ).toBe(false);
  });

  it("rejects an out-of-range commitment in the statement", () => {
    const proof = deserializeProof(params, hexToBytes(base.proof));
    expect(
      verify(params, { ...statement, commitment: 0n }, proof, base.publicSignals),
    ).toBe(false);
    expect(
      verify(params, { ...statement, commitment: params.p }, proof, base.publicSignals),
    ).toBe(false);
  });
});

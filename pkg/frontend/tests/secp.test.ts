// Curve port against signatures the server produced, pinned by the
// pre-build oracle script.  Determinism matters as much as validity: the
// server recomputes these signatures when it checks stored transfer
// payloads, so ours must be byte-identical, not merely verifiable.

import { describe, expect, it } from "vitest";
import { payloadDigest } from "../src/api.js";
import { bytesToHex, hexToBytes } from "../src/hex.js";
import { keccak256 } from "../src/keccak.js";
import {
  addressOf,
  encodePublic,
  publicKey,
  recoverAddress,
  sign,
} from "../src/secp256k1.js";
import { Wallet } from "../src/wallet.js";
import { vectors } from "./fixtures.js";

describe("key derivation and signing", () => {
  for (const v of vectors.signatures) {
    it(`agrees with the server for the seed-${v.seed} key`, () => {
      const secret = BigInt("0x" + v.secret);
      const point = publicKey(secret);
      expect(bytesToHex(encodePublic(point))).toBe(v.public);
      expect(bytesToHex(addressOf(point))).toBe(v.address);

      const digest = hexToBytes(v.digest);
      expect(bytesToHex(sign(secret, digest))).toBe(v.signature);
      expect(bytesToHex(recoverAddress(digest, hexToBytes(v.signature)))).toBe(v.address);
    });
  }

  it("recovers a different address when the digest is tampered", () => {
    const v = vectors.signatures[0];
    const digest = hexToBytes(v.digest);
    digest[7] ^= 0xff;
    expect(bytesToHex(recoverAddress(digest, hexToBytes(v.signature)))).not.toBe(v.address);
  });
});

describe("flow digests", () => {
  it("computes the transfer payload digest and both signatures", () => {
    const t = vectors.flows.transfer;
    const digest = payloadDigest(t.payload);
    expect(bytesToHex(digest)).toBe(t.digest);

    const seller = Wallet.fromSecretHex(vectors.signatures[0].secret);
    const buyer = Wallet.fromSecretHex(vectors.signatures[1].secret);
    expect(bytesToHex(seller.signDigest(digest))).toBe(t.sellerSignature);
    expect(bytesToHex(buyer.signDigest(digest))).toBe(t.buyerSignature);
  });

  it("countersigns a service log hash the way the server expects", () => {
    const s = vectors.flows.serviceLog;
    const center = Wallet.fromSecretHex(vectors.signatures[2].secret);
    expect(bytesToHex(center.signDigest(hexToBytes(s.logHash)))).toBe(s.centerSignature);
  });

  it("digests the login body and the empty body", () => {
    expect(bytesToHex(payloadDigest(vectors.flows.login.body))).toBe(
      vectors.flows.login.digest,
    );
    expect(bytesToHex(keccak256(new Uint8Array(0)))).toBe(vectors.flows.emptyBodyDigest);
  });
});

describe("wallet", () => {
  it("exports the secret it was built from", () => {
    const v = vectors.signatures[0];
    const wallet = Wallet.fromSecretHex("0x" + v.secret);
    expect(wallet.exportSecretHex()).toBe(v.secret);
    expect(wallet.addressHex).toBe("0x" + v.address);
  });

  it("generates distinct usable keys", () => {
    const a = Wallet.generate();
    const b = Wallet.generate();
    expect(a.exportSecretHex()).not.toBe(b.exportSecretHex());
    const digest = keccak256(new Uint8Array([1, 2, 3]));
    expect(bytesToHex(recoverAddress(digest, a.signDigest(digest)))).toBe(
      bytesToHex(a.address),
    );
  });

  it("rejects out-of-range secrets", () => {
    expect(() => Wallet.fromSecretHex("00".repeat(32))).toThrow(/out of range/);
    expect(() => Wallet.fromSecretHex("ff".repeat(32))).toThrow(/out of range/);
    expect(() => Wallet.fromSecretHex("abcd")).toThrow(/32 bytes/);
  });
});

// In-memory wallet for the console session.  Secrets exist only inside
// this object; nothing here writes to storage, and the API layer only
// ever receives digests to sign.  Closing the tab forgets the key, and
// that is the intended behaviour.

import { bigintToBytes, bytesToBigint, bytesToHex, hexToBytes, to0x } from "./hex.js";
import * as curve from "./secp256k1.js";

export class Wallet {
  readonly address: Uint8Array;
  readonly addressHex: string;
  private readonly secret: bigint;

  private constructor(secret: bigint) {
    this.secret = secret;
    this.address = curve.addressOf(curve.publicKey(secret));
    this.addressHex = to0x(this.address);
  }

  static generate(): Wallet {
    const raw = new Uint8Array(32);
    crypto.getRandomValues(raw);
    const secret = (bytesToBigint(raw) % (curve.N - 1n)) + 1n;
    return new Wallet(secret);
  }

  static fromSecretHex(hex: string): Wallet {
    const raw = hexToBytes(hex.trim());
    if (raw.length !== 32) throw new Error("secret must be 32 bytes of hex");
    const secret = bytesToBigint(raw);
    if (secret < 1n || secret >= curve.N) throw new Error("secret scalar out of range");
    return new Wallet(secret);
  }

  signDigest(digest32: Uint8Array): Uint8Array {
    return curve.sign(this.secret, digest32);
  }

  /** Hex export for the key the user just generated; shown once so it
   * can be saved, never retained anywhere else. */
  exportSecretHex(): string {
    return bytesToHex(bigintToBytes(this.secret, 32));
  }
}

// HTTP client for the node.  Two authentication styles, mirroring what
// the server accepts: a one-time signature login that yields a bearer
// session for the routine calls, and per-request body signatures where
// the wallet itself must vouch for the payload.  In both cases the
// secret never leaves the Wallet object; only digests go in, only
// signatures come out.

import { canonicalSerialize, type JsonValue } from "./canonical.js";
import { to0x, utf8 } from "./hex.js";
import { keccak256 } from "./keccak.js";
import type { Wallet } from "./wallet.js";

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
  ) {
    super(message);
  }
}

const EMPTY_DIGEST_INPUT = new Uint8Array(0);

export class ApiClient {
  private session: string | null = null;

  constructor(
    readonly baseUrl: string,
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  get hasSession(): boolean {
    return this.session !== null;
  }

  setSession(token: string | null): void {
    this.session = token;
  }

  private async parse(res: Response): Promise<unknown> {
    const text = await res.text();
    let data: unknown = null;
    if (text) {
      try {
        data = JSON.parse(text);
      } catch {
        data = text;
      }
    }
    if (!res.ok) {
      const envelope = data as { error?: { code?: string; message?: string } } | null;
      const code = envelope?.error?.code ?? `HTTP_${res.status}`;
      const message = envelope?.error?.message ?? res.statusText;
      throw new ApiError(res.status, code, message);
    }
    return data;
  }

  /** Unauthenticated or bearer-session request. */
  async call(method: string, path: string, body?: JsonValue): Promise<unknown> {
    const headers: Record<string, string> = {};
    if (this.session) headers["authorization"] = `Bearer ${this.session}`;
    let payload: Uint8Array | undefined;
    if (body !== undefined) {
      payload = canonicalSerialize(body);
      headers["content-type"] = "application/json";
    }
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: payload as BodyInit | undefined,
    });
    return this.parse(res);
  }

  /** Request authenticated by signing the body digest with the wallet.
   * The body on the wire is the same canonical bytes the digest covers. */
  async signedCall(
    wallet: Wallet,
    method: string,
    path: string,
    body?: JsonValue,
  ): Promise<unknown> {
    let payload: Uint8Array | undefined;
    let digestInput: Uint8Array = EMPTY_DIGEST_INPUT;
    const headers: Record<string, string> = {};
    if (body !== undefined && !isEmptyObject(body)) {
      payload = canonicalSerialize(body);
      digestInput = payload;
      headers["content-type"] = "application/json";
    }
    const digest = keccak256(digestInput);
    headers["x-sig-keccak"] = to0x(wallet.signDigest(digest));
    headers["x-wallet"] = wallet.addressHex;
    const res = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers,
      body: payload as BodyInit | undefined,
    });
    return this.parse(res);
  }
}

function isEmptyObject(v: JsonValue): boolean {
  return (
    typeof v === "object" && v !== null && !Array.isArray(v) && Object.keys(v).length === 0
  );
}

/** Digest a payload exactly the way the server will when it checks the
 * embedded signatures: keccak over the canonical serialization. */
export function payloadDigest(payload: JsonValue): Uint8Array {
  return keccak256(canonicalSerialize(payload));
}

export function textBytes(s: string): Uint8Array {
  return utf8(s);
}

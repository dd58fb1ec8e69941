// Controller tying the API client, the wallet, and the rendered screens
// together.  All state is client-side and rebuilt from API reads; the
// only thing that survives a render is this object.  Signatures happen
// here, in the page, against digests computed locally; consequently the
// network never carries anything but public data and signatures.

import { ApiClient, ApiError, payloadDigest, type FetchLike } from "./api.js";
import type { JsonValue } from "./canonical.js";
import { bytesToHex, hexToBytes, to0x } from "./hex.js";
import {
  accessRequestWire,
  approveResponse,
  finalizeResponse,
  loginResponse,
  passportStatus,
  pendingServiceLogWire,
  proofResponse,
  serviceLogWire,
  transferStepResponse,
  vehicleWire,
  vkeyDoc,
  type AccessRequestWire,
  type OwnerWire,
  type PassportStatus,
  type PendingServiceLogWire,
  type ProofResponse,
  type VehicleWire,
} from "./schema.js";
import {
  deserializeProof,
  MalformedProof,
  paramsId,
  parseParams,
  verify,
  type ProofKind,
  type ThresholdStatement,
} from "./zkverify.js";
import { Wallet } from "./wallet.js";
import * as views from "./views.js";

const BATTERY_SCALE = 100;

const ROUTE_FIELD: Record<string, "threshold" | "timestamp"> = {
  batteryHealth: "threshold",
  mileage: "threshold",
  warrantyExpiry: "timestamp",
  accessRequestCount: "threshold",
  serviceLogCount: "threshold",
};

export interface AppOptions {
  nodeUrl?: string;
  fetchImpl?: FetchLike;
  pollMs?: number;
  nowMs?: () => number;
}

interface StoredProof {
  route: string;
  rawThreshold: number;
  response: ProofResponse;
  bytes: Uint8Array;
}

export class ConsoleApp {
  client: ApiClient;
  wallet: Wallet | null = null;
  role: string | null = null;
  owner: OwnerWire | null = null;

  private mount: HTMLElement;
  private nodeUrl: string;
  private readonly fetchImpl?: FetchLike;
  private readonly pollMs: number;
  private readonly nowMs: () => number;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  private tab: views.TabName = "portfolio";
  private vehicles: VehicleWire[] = [];
  private badges = new Map<string, PassportStatus>();
  private pendingAccess: AccessRequestWire[] = [];
  private dismissed = new Set<string>();
  private issuedTokens = new Map<string, string>();
  private pendingLogs: PendingServiceLogWire[] = [];
  private serviceReceipt: string | null = null;
  private ticket: string | null = null;
  private transferStatus: string | null = null;
  private proof: StoredProof | null = null;
  private pgVerdict: string | null = null;
  private pgMeta: string | null = null;
  private flash: string | null = null;

  constructor(mount: HTMLElement, opts: AppOptions = {}) {
    this.mount = mount;
    this.nodeUrl = opts.nodeUrl ?? "http://127.0.0.1:8000";
    this.fetchImpl = opts.fetchImpl;
    this.pollMs = opts.pollMs ?? 15000;
    this.nowMs = opts.nowMs ?? (() => Date.now());
    this.client = new ApiClient(this.nodeUrl, this.fetchImpl);
    mount.addEventListener("click", (event) => {
      const target = (event.target as HTMLElement).closest<HTMLElement>("[data-action]");
      if (target) void this.dispatch(target);
    });
    this.render();
  }

  // -- actions -----------------------------------------------------------

  private async dispatch(el: HTMLElement): Promise<void> {
    const action = el.dataset.action as string;
    this.flash = null;
    try {
      switch (action) {
        case "generate": {
          const wallet = Wallet.generate();
          this.input("secret-input").value = wallet.exportSecretHex();
          const box = this.mount.querySelector("#generated-secret");
          if (box) {
            box.textContent =
              `fresh key for ${wallet.addressHex}; save the secret above, it is shown only now`;
          }
          return;
        }
        case "login":
          return await this.login();
        case "tab":
          this.tab = (el.dataset.tab ?? "portfolio") as views.TabName;
          break;
        case "refresh":
          return await this.refresh();
        case "reanchor":
          return await this.reanchor(el.dataset.vehicle as string);
        case "approve-access":
          return await this.approveAccess(el.dataset.request as string);
        case "dismiss-access": {
          const id = el.dataset.request as string;
          this.dismissed.add(id);
          this.pendingAccess = this.pendingAccess.filter((r) => r.id !== id);
          break;
        }
        case "countersign":
          return await this.countersign(el.dataset.pending as string);
        case "seller-initiate":
          return await this.sellerInitiate();
        case "copy-ticket":
          await this.copyTicket();
          return;
        case "buyer-confirm":
          return await this.buyerConfirm();
        case "finalize":
          return await this.finalize();
        case "prove":
          return await this.prove();
        case "verify-proof":
          return await this.verifyProof(false);
        case "mutate-proof":
          return await this.verifyProof(true);
      }
    } catch (err) {
      this.flash = err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
    }
    this.render();
  }

  async login(): Promise<void> {
    try {
      this.nodeUrl = this.input("node-url").value.trim() || this.nodeUrl;
      this.client = new ApiClient(this.nodeUrl, this.fetchImpl);
      const secret = this.input("secret-input").value.trim();
      if (!secret) throw new Error("import or generate a wallet secret first");
      this.wallet = Wallet.fromSecretHex(secret);
      const name = this.input("name-input").value.trim();
      const email = this.input("email-input").value.trim();
      const body: JsonValue = name && email ? { name, email } : {};
      const raw = await this.client.signedCall(this.wallet, "POST", "/api/login", body);
      const data = loginResponse.parse(raw);
      this.client.setSession(data.token);
      this.role = data.role;
      this.owner = data.owner;
      await this.refresh();
      if (this.pollMs > 0) {
        this.pollTimer = setInterval(() => void this.refresh(), this.pollMs);
      }
    } catch (err) {
      this.wallet = null;
      this.render();
      const box = this.mount.querySelector("#login-error");
      if (box) {
        box.textContent =
          err instanceof ApiError ? `${err.code}: ${err.message}` : String(err);
      }
    }
  }

  stop(): void {
    if (this.pollTimer !== null) clearInterval(this.pollTimer);
    this.pollTimer = null;
  }

  async refresh(): Promise<void> {
    if (!this.wallet) return;
    const rawVehicles = (await this.client.call(
      "GET",
      `/api/vehicle/owner/${this.wallet.addressHex}`,
    )) as unknown[];
    this.vehicles = rawVehicles.map((v) => vehicleWire.parse(v));

    this.badges = new Map();
    for (const v of this.vehicles) {
      const status = passportStatus.parse(
        await this.client.call("GET", `/api/vehicle/${v.id}/passport`),
      );
      this.badges.set(v.id, status);
    }

    const approvals = (await this.client.call("GET", "/api/owner/approvals")) as unknown[];
    this.pendingAccess = approvals
      .map((r) => accessRequestWire.parse(r))
      .filter((r) => !this.dismissed.has(r.id));

    if (this.owner) {
      const pending = (await this.client.call(
        "GET",
        `/api/service-log/pending/${this.owner.id}`,
      )) as unknown[];
      this.pendingLogs = pending.map((p) => pendingServiceLogWire.parse(p));
    }
    this.render();
  }

  private async reanchor(vehicleId: string): Promise<void> {
    const status = passportStatus.parse(
      await this.client.call("POST", "/api/vehicle/reanchor", { vehicleId }),
    );
    this.badges.set(vehicleId, status);
    await this.refresh();
  }

  private async approveAccess(requestId: string): Promise<void> {
    const { token } = approveResponse.parse(
      await this.client.call("POST", `/api/approve/${requestId}`),
    );
    this.issuedTokens.set(requestId, token);
    await this.refresh();
    this.issuedTokens.delete(requestId); // rendered once, then gone
  }

  private async countersign(pendingId: string): Promise<void> {
    if (!this.wallet) return;
    const row = this.pendingLogs.find((p) => p.id === pendingId);
    if (!row) throw new Error("pending entry vanished; refresh");
    const signature = this.wallet.signDigest(hexToBytes(row.logHash));
    const final = serviceLogWire.parse(
      await this.client.call("POST", `/api/service-log/approve/${pendingId}`, {
        ownerSignature: to0x(signature),
      }),
    );
    this.serviceReceipt = final.anchorTxHash;
    await this.refresh();
  }

  private async sellerInitiate(): Promise<void> {
    if (!this.wallet) return;
    const vehicleId = (this.mount.querySelector("#sell-vehicle") as HTMLSelectElement).value;
    const buyer = this.input("buyer-wallet").value.trim().toLowerCase();
    const payload: JsonValue = {
      vehicleId,
      from: this.wallet.addressHex,
      to: buyer,
      timestamp: this.nowMs(),
    };
    const sellerSignature = to0x(this.wallet.signDigest(payloadDigest(payload)));
    const step = transferStepResponse.parse(
      await this.client.call("POST", "/api/vehicle/initiate-transfer", {
        payload,
        sellerSignature,
      }),
    );
    this.ticket = JSON.stringify({ payload, sellerSignature }, null, 2);
    this.transferStatus = `initiated: ${step.vehicleId} is ${step.status}`;
    this.render();
  }

  private async copyTicket(): Promise<void> {
    if (this.ticket && navigator.clipboard) {
      await navigator.clipboard.writeText(this.ticket);
    }
  }

  private async buyerConfirm(): Promise<void> {
    if (!this.wallet) return;
    const text = (this.mount.querySelector("#ticket-in") as HTMLTextAreaElement).value;
    const finalize = (this.mount.querySelector("#finalize-flag") as HTMLInputElement).checked;
    let ticket: { payload: JsonValue; sellerSignature: string };
    try {
      ticket = JSON.parse(text);
    } catch {
      throw new Error("ticket is not valid JSON");
    }
    const buyerSignature = to0x(this.wallet.signDigest(payloadDigest(ticket.payload)));
    const step = transferStepResponse.parse(
      await this.client.call("POST", "/api/vehicle/confirm-transfer", {
        payload: ticket.payload,
        sellerSignature: ticket.sellerSignature,
        buyerSignature,
        finalize,
      }),
    );
    this.transferStatus = `confirmed: ${step.vehicleId} is ${step.status}` +
      (step.txHash ? `, tx ${step.txHash}` : "");
    await this.refresh();
  }

  private async finalize(): Promise<void> {
    const vehicleId = this.input("finalize-vehicle").value.trim();
    const receipt = finalizeResponse.parse(
      await this.client.call("POST", "/api/vehicle/finalize-transfer", { vehicleId }),
    );
    this.transferStatus = `finalized at height ${receipt.height}, tx ${receipt.txHash}`;
    await this.refresh();
  }

  // -- playground --------------------------------------------------------

  private scaleThreshold(kind: string, raw: number): bigint {
    if (kind === "BatteryHealthGT") return BigInt(Math.round(raw * BATTERY_SCALE));
    if (!Number.isInteger(raw)) throw new Error(`${kind} takes an integer threshold`);
    return BigInt(raw);
  }

  private async prove(): Promise<void> {
    const vehicleId = (this.mount.querySelector("#pg-vehicle") as HTMLSelectElement).value;
    const route = (this.mount.querySelector("#pg-route") as HTMLSelectElement).value;
    const raw = Number(this.input("pg-threshold").value);
    if (!Number.isFinite(raw)) throw new Error("threshold must be a number");
    const body: JsonValue = { vehicleId };
    (body as Record<string, JsonValue>)[ROUTE_FIELD[route]] = raw;
    const response = proofResponse.parse(
      await this.client.call("POST", `/api/zkp/${route}`, body),
    );
    this.proof = {
      route,
      rawThreshold: raw,
      response,
      bytes: hexToBytes(response.proof),
    };
    this.pgVerdict = null;
    this.pgMeta = `${response.kind}: ${this.proof.bytes.length} byte proof received; not yet verified`;
    this.render();
  }

  private async verifyProof(mutate: boolean): Promise<void> {
    if (!this.proof) return;
    const doc = vkeyDoc.parse(await this.client.call("GET", `/api/vkey/${this.proof.route}`));
    const params = parseParams(doc.params);
    if (bytesToHex(paramsId(params)) !== doc.paramsId) {
      this.pgVerdict = "invalid (verification parameters do not hash to their id)";
      this.render();
      return;
    }
    const bytes = new Uint8Array(this.proof.bytes);
    if (mutate) {
      const at = Math.min(40, bytes.length - 1);
      bytes[at] ^= 0x01;
    }
    const statement: ThresholdStatement = {
      kind: this.proof.response.kind as ProofKind,
      threshold: this.scaleThreshold(this.proof.response.kind, this.proof.rawThreshold),
      commitment: BigInt(this.proof.response.commitment),
    };
    const started = performance.now();
    let ok: boolean;
    try {
      const parsed = deserializeProof(params, bytes);
      ok = verify(params, statement, parsed, this.proof.response.publicSignals);
    } catch (err) {
      if (!(err instanceof MalformedProof)) throw err;
      ok = false;
    }
    const elapsed = Math.round(performance.now() - started);
    this.pgVerdict = ok ? "valid" : "invalid";
    this.pgMeta =
      `${statement.kind} at threshold ${statement.threshold} ` +
      `(${mutate ? "mutated copy" : "as served"}): checked locally in ${elapsed} ms`;
    this.render();
  }

  // -- rendering ---------------------------------------------------------

  private input(id: string): HTMLInputElement {
    return this.mount.querySelector(`#${id}`) as HTMLInputElement;
  }

  render(): void {
    if (!this.wallet || !this.client.hasSession) {
      this.mount.innerHTML = views.loginPanel(this.nodeUrl);
      return;
    }
    let body: string;
    switch (this.tab) {
      case "portfolio":
        body = views.portfolioView(this.vehicles, this.badges);
        break;
      case "access":
        body = views.accessView(this.pendingAccess, this.issuedTokens);
        break;
      case "service":
        body = views.serviceView(this.pendingLogs, this.serviceReceipt);
        break;
      case "transfer":
        body = views.transferView(this.vehicles, this.ticket, this.transferStatus);
        break;
      case "playground":
        body = views.playgroundView(this.vehicles, {
          verdict: this.pgVerdict,
          meta: this.pgMeta,
          hasProof: this.proof !== null,
        });
        break;
    }
    const flash = this.flash ? `<p class="error" id="flash">${escapeText(this.flash)}</p>` : "";
    this.mount.innerHTML = views.header(this.wallet.addressHex, this.role ?? "?") + flash + body;
    const ticketIn = this.mount.querySelector("#ticket-in") as HTMLTextAreaElement | null;
    if (ticketIn && this.lastTicketInput) ticketIn.value = this.lastTicketInput;
    ticketIn?.addEventListener("input", () => {
      this.lastTicketInput = ticketIn.value;
    });
  }

  private lastTicketInput = "";
}

function escapeText(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

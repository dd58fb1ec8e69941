// HTML for the five screens.  Render functions are pure string builders
// over the app state; the controller swaps them into the mount node and
// handles events by delegation, so there is nothing to unbind between
// renders.

import type {
  AccessRequestWire,
  PassportStatus,
  PendingServiceLogWire,
  VehicleWire,
} from "./schema.js";

export type TabName = "portfolio" | "access" | "service" | "transfer" | "playground";

export const ZK_ROUTE_LABELS: Record<string, string> = {
  batteryHealth: "battery health above (%)",
  mileage: "mileage below (km)",
  warrantyExpiry: "warranty valid past (unix s)",
  accessRequestCount: "access requests at most",
  serviceLogCount: "service entries at least",
};

function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function loginPanel(nodeUrl: string): string {
  return `
  <section class="panel" id="login-panel">
    <h2>Connect</h2>
    <label>Node URL <input id="node-url" value="${esc(nodeUrl)}" size="40"></label>
    <label>Wallet secret (hex) <input id="secret-input" type="password" size="40"
      placeholder="paste to import, or generate"></label>
    <button data-action="generate">Generate key</button>
    <div id="generated-secret"></div>
    <label>Name <input id="name-input" placeholder="needed on first login"></label>
    <label>Email <input id="email-input"></label>
    <button data-action="login">Sign in with wallet</button>
    <div id="login-error" class="error"></div>
  </section>`;
}

export function header(addressHex: string, role: string): string {
  return `
  <header>
    <span id="who">${esc(addressHex)} &middot; ${esc(role)}</span>
    <nav>
      <button data-action="tab" data-tab="portfolio">Portfolio</button>
      <button data-action="tab" data-tab="access">Access requests</button>
      <button data-action="tab" data-tab="service">Service logs</button>
      <button data-action="tab" data-tab="transfer">Transfer</button>
      <button data-action="tab" data-tab="playground">ZK playground</button>
      <button data-action="refresh">Refresh</button>
    </nav>
  </header>`;
}

const BADGE_CLASS: Record<PassportStatus["status"], string> = {
  UpToDate: "badge-ok",
  OutOfDate: "badge-stale",
  NotAnchored: "badge-none",
};

export function portfolioView(
  vehicles: VehicleWire[],
  badges: Map<string, PassportStatus>,
): string {
  if (vehicles.length === 0) {
    return `<section class="panel"><p>No vehicles held by this wallet.</p></section>`;
  }
  const cards = vehicles.map((v) => {
    const badge = badges.get(v.id);
    const status = badge?.status ?? "NotAnchored";
    const reanchor =
      status === "OutOfDate"
        ? `<button data-action="reanchor" data-vehicle="${esc(v.id)}">Re-anchor</button>`
        : "";
    return `
    <article class="vehicle-card" data-vehicle="${esc(v.id)}">
      <h3>${esc(v.manufacturer)} ${esc(v.model)}</h3>
      <p class="vin">${esc(v.vin)}</p>
      <span class="badge ${BADGE_CLASS[status]}">${status}</span>
      <dl>
        <dt>Battery</dt><dd>${v.batteryHealth.toFixed(1)} %</dd>
        <dt>Mileage</dt><dd>${v.mileage} km</dd>
        <dt>Warranty</dt><dd>${esc(v.warrantyExpiry)}</dd>
        <dt>Anchor</dt><dd class="hash">${esc(v.anchorTxHash ?? "none")}</dd>
      </dl>
      ${reanchor}
    </article>`;
  });
  return `<section class="panel" id="portfolio">${cards.join("")}</section>`;
}

export function accessView(
  requests: AccessRequestWire[],
  issuedTokens: Map<string, string>,
): string {
  if (requests.length === 0 && issuedTokens.size === 0) {
    return `<section class="panel"><p>No pending access requests.</p></section>`;
  }
  const cards = requests.map(
    (r) => `
    <article class="access-card" data-request="${esc(r.id)}">
      <p><strong>${esc(r.requester)}</strong> asks for
         <code>${esc(r.fields)}</code>
         on vehicle <code>${esc(r.vehicleId)}</code></p>
      <p>expires ${esc(r.expiresAt)}</p>
      <button data-action="approve-access" data-request="${esc(r.id)}">Approve</button>
      <button data-action="dismiss-access" data-request="${esc(r.id)}">Dismiss</button>
    </article>`,
  );
  const reveals = [...issuedTokens.entries()].map(
    ([id, token]) => `
    <article class="token-reveal" data-request="${esc(id)}">
      <p>Scoped token issued; hand it to the requester now, it is not shown again:</p>
      <code class="token">${esc(token)}</code>
    </article>`,
  );
  return `<section class="panel" id="access">${cards.join("")}${reveals.join("")}</section>`;
}

export function serviceView(pending: PendingServiceLogWire[], receipt: string | null): string {
  const receiptHtml = receipt
    ? `<p id="service-receipt">Anchored: <code class="hash">${esc(receipt)}</code></p>`
    : `<p id="service-receipt"></p>`;
  if (pending.length === 0) {
    return `<section class="panel"><p>No service entries waiting for a countersignature.</p>${receiptHtml}</section>`;
  }
  const cards = pending.map(
    (p) => `
    <article class="service-card" data-pending="${esc(p.id)}">
      <p><strong>${esc(p.centerEmail)}</strong>: ${esc(p.description)}</p>
      <p>serviced ${esc(p.servicedAt)} &middot; vehicle <code>${esc(p.vehicleId)}</code></p>
      <p>log hash <code class="hash">${esc(p.logHash)}</code></p>
      <button data-action="countersign" data-pending="${esc(p.id)}">Countersign</button>
    </article>`,
  );
  return `<section class="panel" id="service">${cards.join("")}${receiptHtml}</section>`;
}

export function transferView(
  vehicles: VehicleWire[],
  ticket: string | null,
  status: string | null,
): string {
  const options = vehicles
    .map((v) => `<option value="${esc(v.id)}">${esc(v.vin)}</option>`)
    .join("");
  return `
  <section class="panel" id="transfer">
    <div class="wizard-col">
      <h3>Sell</h3>
      <label>Vehicle <select id="sell-vehicle">${options}</select></label>
      <label>Buyer wallet <input id="buyer-wallet" size="44"></label>
      <button data-action="seller-initiate">Sign &amp; initiate</button>
      <label>Offer ticket (give this to the buyer)
        <textarea id="ticket-out" rows="6" cols="60" readonly>${esc(ticket ?? "")}</textarea>
      </label>
      <button data-action="copy-ticket" ${ticket ? "" : "disabled"}>Copy ticket</button>
    </div>
    <div class="wizard-col">
      <h3>Buy</h3>
      <label>Paste the seller's ticket
        <textarea id="ticket-in" rows="6" cols="60"></textarea>
      </label>
      <label><input type="checkbox" id="finalize-flag" checked> finalize on chain immediately</label>
      <button data-action="buyer-confirm">Countersign &amp; confirm</button>
      <button data-action="finalize">Finalize pending transfer</button>
      <label>Vehicle id for finalize <input id="finalize-vehicle" size="40"></label>
    </div>
    <p id="transfer-status">${esc(status ?? "")}</p>
  </section>`;
}

export interface PlaygroundState {
  verdict: string | null;
  meta: string | null;
  hasProof: boolean;
}

export function playgroundView(vehicles: VehicleWire[], pg: PlaygroundState): string {
  const options = vehicles
    .map((v) => `<option value="${esc(v.id)}">${esc(v.vin)}</option>`)
    .join("");
  const routes = Object.entries(ZK_ROUTE_LABELS)
    .map(([route, label]) => `<option value="${esc(route)}">${esc(label)}</option>`)
    .join("");
  return `
  <section class="panel" id="playground">
    <label>Vehicle <select id="pg-vehicle">${options}</select></label>
    <label>Claim <select id="pg-route">${routes}</select></label>
    <label>Threshold <input id="pg-threshold" type="number" value="80"></label>
    <button data-action="prove">Request proof</button>
    <button data-action="verify-proof" ${pg.hasProof ? "" : "disabled"}>Verify locally</button>
    <button data-action="mutate-proof" ${pg.hasProof ? "" : "disabled"}>Flip a byte, verify again</button>
    <p id="pg-meta">${esc(pg.meta ?? "")}</p>
    <p id="pg-verdict" class="${pg.verdict === "valid" ? "ok" : "bad"}">${esc(pg.verdict ?? "")}</p>
  </section>`;
}

export function shellStyles(): string {
  return `
  body { font-family: system-ui, sans-serif; margin: 1rem auto; max-width: 70rem; color: #1c2330; }
  header { display: flex; justify-content: space-between; align-items: center; gap: 1rem; flex-wrap: wrap; }
  nav button { margin-right: .3rem; }
  .panel { border: 1px solid #d3d9e4; border-radius: 8px; padding: 1rem; margin-top: 1rem; }
  .vehicle-card, .access-card, .service-card { border-bottom: 1px solid #e7ebf2; padding: .6rem 0; }
  .badge { padding: .1rem .5rem; border-radius: 9px; font-size: .8rem; }
  .badge-ok { background: #d9f2de; color: #1d6b33; }
  .badge-stale { background: #fbe9cf; color: #8a5a10; }
  .badge-none { background: #e8e8ec; color: #555; }
  .hash, .token { word-break: break-all; font-size: .8rem; }
  .error { color: #a21a2e; }
  .ok { color: #1d6b33; } .bad { color: #a21a2e; }
  .wizard-col { display: inline-block; vertical-align: top; margin-right: 2rem; }
  label { display: block; margin: .4rem 0; }
  `;
}

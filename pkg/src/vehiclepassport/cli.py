"""Multi-actor command-line client for a running or embedded node.

Every command talks HTTP: against --node URL for a live daemon, or, with
--embedded, against an in-process gateway built from VP_* environment
configuration.  Signing happens locally with keys from the encrypted
keystore; secrets never go on the wire.

Exit codes: 0 ok, 2 validation, 3 auth, 4 conflict or wrong state,
5 transport or server failure.
"""

from __future__ import annotations

import json

import click
import httpx

from . import zkp
from .config import NodeConfig
from .crypto import (
    KeyPair,
    canonical_serialize,
    from_hex,
    generate_keypair,
    hmac_sha256,
    keccak256,
    sign,
    to_hex,
)
from .errors import PassportError
from .keystore import Keystore
from .node import ZK_ROUTES, PassportNode
from .service_log import compute_log_hash

_EXIT_FOR_STATUS = {400: 2, 404: 2, 422: 2, 401: 3, 403: 3, 409: 4, 410: 4, 429: 4}

KIND_TO_ROUTE = {kind: route for route, (kind, _) in ZK_ROUTES.items()}


def exit_code_for(status: int) -> int:
    if 200 <= status < 300:
        return 0
    return _EXIT_FOR_STATUS.get(status, 5)


class ApiClient:
    """Thin sync HTTP wrapper; owns the embedded node when there is one."""

    def __init__(self, base_url: str, embedded: PassportNode | None = None):
        self.node = embedded
        if embedded is not None:
            from fastapi.testclient import TestClient

            from .api import create_app

            self._http = TestClient(create_app(embedded))
        else:
            self._http = httpx.Client(base_url=base_url, timeout=30.0)

    def close(self) -> None:
        self._http.close()
        if self.node is not None:
            self.node.close()

    def now_ms(self) -> int:
        if self.node is not None:
            return self.node.clock.now_ms()
        import time

        return int(time.time() * 1000)

    def call(
        self,
        method: str,
        path: str,
        body: dict | None = None,
        signer: KeyPair | None = None,
        headers: dict | None = None,
    ):
        headers = dict(headers or {})
        if signer is not None:
            digest = keccak256(canonical_serialize(body) if body else b"")
            headers["x-sig-keccak"] = to_hex(sign(signer.secret, digest))
            headers["x-wallet"] = to_hex(signer.address)
        kwargs: dict = {"headers": headers}
        if body is not None:
            kwargs["content"] = canonical_serialize(body)
            headers["content-type"] = "application/json"
        try:
            response = self._http.request(method, path, **kwargs)
        except httpx.HTTPError as exc:
            click.echo(f"error TRANSPORT: {exc}", err=True)
            raise SystemExit(5) from exc
        content_type = response.headers.get("content-type", "")
        if content_type.startswith("application/json"):
            return response.status_code, response.json()
        if content_type.startswith("application/ld+json"):
            return response.status_code, response.content
        return response.status_code, response.text


class Session:
    """Per-invocation state shared by all commands."""

    def __init__(self, node_url, embedded, json_mode, keystore_path, passphrase, seed):
        self.json_mode = json_mode
        self._keystore_path = keystore_path
        self._passphrase = passphrase
        self._keystore: Keystore | None = None
        embedded_node = None
        if embedded:
            config = NodeConfig.from_env()
            if seed is not None:
                config.seed = seed
            embedded_node = PassportNode(config)
        self.client = ApiClient(node_url, embedded_node)

    def keystore(self) -> Keystore:
        if self._keystore is None:
            if not self._passphrase:
                click.echo(
                    "error BAD_REQUEST: keystore passphrase required "
                    "(--passphrase or VP_KEYSTORE_PASS)",
                    err=True,
                )
                raise SystemExit(2)
            try:
                self._keystore = Keystore(self._keystore_path, self._passphrase)
            except PassportError as exc:
                click.echo(f"error {exc.code}: {exc.message}", err=True)
                raise SystemExit(exit_code_for(exc.http_status)) from exc
        return self._keystore

    def actor(self, name: str) -> KeyPair:
        try:
            return self.keystore().get(name)
        except PassportError as exc:
            click.echo(f"error {exc.code}: {exc.message}", err=True)
            raise SystemExit(exit_code_for(exc.http_status)) from exc

    def emit(self, status: int, data, human) -> None:
        """Print the outcome and exit non-zero when the API said no."""
        code = exit_code_for(status)
        if code == 0:
            if self.json_mode:
                click.echo(json.dumps(data, indent=2, sort_keys=True))
            else:
                text = human(data) if callable(human) else human
                if text:
                    click.echo(text)
            return
        if self.json_mode:
            click.echo(json.dumps(data, indent=2, sort_keys=True), err=True)
        else:
            error = data.get("error", {}) if isinstance(data, dict) else {}
            click.echo(
                f"error {error.get('code', status)}: {error.get('message', '')}", err=True
            )
        raise SystemExit(code)


pass_session = click.make_pass_decorator(Session)


@click.group()
@click.option("--node", "node_url", default="http://127.0.0.1:8000", envvar="VP_NODE_URL",
              show_default=True, help="Base URL of the node.")
@click.option("--embedded", is_flag=True,
              help="Run an in-process node from VP_* environment configuration.")
@click.option("--json", "json_mode", is_flag=True, help="Print raw API response bodies.")
@click.option("--keystore", "keystore_path", default="keystore.vpk", envvar="VP_KEYSTORE",
              show_default=True, help="Path of the encrypted keystore file.")
@click.option("--passphrase", envvar="VP_KEYSTORE_PASS", default=None,
              help="Keystore passphrase (or set VP_KEYSTORE_PASS).")
@click.option("--seed", type=int, default=None,
              help="Deterministic ids and clock for an embedded node.")
@click.pass_context
def main(ctx, node_url, embedded, json_mode, keystore_path, passphrase, seed):
    ctx.obj = Session(node_url, embedded, json_mode, keystore_path, passphrase, seed)
    ctx.call_on_close(ctx.obj.client.close)


@main.command()
@click.argument("name")
@click.option("--seed", type=int, default=None, help="Reproducible key for tests.")
@click.option("--overwrite", is_flag=True)
@pass_session
def keygen(session, name, seed, overwrite):
    """Create a keypair under NAME in the keystore."""
    keypair = generate_keypair(seed=seed)
    try:
        session.keystore().add(name, keypair, overwrite=overwrite)
    except PassportError as exc:
        click.echo(f"error {exc.code}: {exc.message}", err=True)
        raise SystemExit(exit_code_for(exc.http_status)) from exc
    session.emit(200, {"name": name, "wallet": to_hex(keypair.address)},
                 f"{name} {to_hex(keypair.address)}")


@main.group()
def owner():
    """Owner account operations."""


@owner.command("register")
@click.option("--actor", required=True)
@click.option("--name", "display_name", required=True)
@click.option("--email", required=True)
@pass_session
def owner_register(session, actor, display_name, email):
    """Create (or fetch) the owner row for an actor's wallet."""
    keypair = session.actor(actor)
    body = {"wallet": to_hex(keypair.address), "name": display_name, "email": email}
    status, data = session.client.call("POST", "/api/login", body, signer=keypair)
    session.emit(status, data, lambda d: f"{d['role']} {d['owner']['id']}")


@main.group()
def matter():
    """Factory-side routes (OEM role)."""


@matter.command("create-vehicle")
@click.option("--actor", required=True)
@click.option("--vin", required=True)
@click.option("--model", required=True)
@click.option("--manufacturer", required=True)
@click.option("--warranty-expiry", type=int, required=True, help="Unix seconds.")
@click.option("--battery-health", type=float, default=100.0, show_default=True)
@click.option("--mileage", type=int, default=0, show_default=True)
@click.option("--charging-cycles", type=int, default=0, show_default=True)
@click.option("--driving-pattern", default="unknown", show_default=True)
@click.option("--owner-wallet", default=None, help="Initial holder; defaults to the actor.")
@pass_session
def matter_create(session, actor, vin, model, manufacturer, warranty_expiry,
                  battery_health, mileage, charging_cycles, driving_pattern, owner_wallet):
    keypair = session.actor(actor)
    body = {
        "vin": vin,
        "model": model,
        "manufacturer": manufacturer,
        "warrantyExpiry": warranty_expiry,
        "batteryHealth": battery_health,
        "mileage": mileage,
        "chargingCycles": charging_cycles,
        "drivingPattern": driving_pattern,
    }
    if owner_wallet:
        body["ownerWallet"] = owner_wallet
    status, data = session.client.call("POST", "/api/matter/vehicles", body, signer=keypair)
    session.emit(status, data,
                 lambda d: f"{d['vehicleId']} token={d['tokenId']} anchor={d['anchorTxHash']}")


@matter.command("sell")
@click.option("--actor", required=True, help="Selling OEM actor.")
@click.option("--vehicle", "vehicle_id", required=True)
@click.option("--buyer-actor", required=True, help="Buyer actor present at the point of sale.")
@pass_session
def matter_sell(session, actor, vehicle_id, buyer_actor):
    """Run initiate, confirm, and finalize as one point-of-sale step."""
    seller = session.actor(actor)
    buyer = session.actor(buyer_actor)
    payload = {
        "vehicleId": vehicle_id,
        "from": to_hex(seller.address),
        "to": to_hex(buyer.address),
        "timestamp": session.client.now_ms(),
    }
    digest = keccak256(canonical_serialize(payload))
    body = {
        "payload": payload,
        "sellerSignature": to_hex(sign(seller.secret, digest)),
        "buyerSignature": to_hex(sign(buyer.secret, digest)),
    }
    status, data = session.client.call("POST", "/api/matter/sell-vehicle", body, signer=seller)
    session.emit(status, data,
                 lambda d: f"{d['status']} tx={d['txHash']} "
                           f"steps={'>'.join(e['step'] for e in d['events'])}")


@main.group()
def access():
    """Selective-disclosure requests and scoped tokens."""


@access.command("request")
@click.option("--actor", required=True)
@click.option("--vehicle", "vehicle_id", required=True)
@click.option("--requester", required=True, help="Contact string shown to the owner.")
@click.option("--fields", required=True, help="Comma-separated field names.")
@pass_session
def access_request(session, actor, vehicle_id, requester, fields):
    keypair = session.actor(actor)
    body = {
        "vehicleId": vehicle_id,
        "requester": requester,
        "fields": [f for f in fields.split(",") if f],
    }
    status, data = session.client.call("POST", "/api/access-request", body, signer=keypair)
    session.emit(status, data, lambda d: f"{d['id']} {d['status']}")


@access.command("approve")
@click.argument("request_id")
@click.option("--actor", required=True)
@pass_session
def access_approve(session, request_id, actor):
    keypair = session.actor(actor)
    status, data = session.client.call(
        "POST", f"/api/approve/{request_id}", {}, signer=keypair
    )
    session.emit(status, data, lambda d: d["token"])


@access.command("redeem")
@click.argument("token")
@pass_session
def access_redeem(session, token):
    status, data = session.client.call("GET", f"/api/access/{token}")
    session.emit(status, data,
                 lambda d: "\n".join(f"{k}={v}" for k, v in sorted(d["data"].items())))


@main.group()
def service():
    """Dual-signature service history."""


@service.command("submit")
@click.option("--actor", required=True, help="Service-center actor; signs the log hash.")
@click.option("--vehicle", "vehicle_id", required=True)
@click.option("--description", required=True)
@click.option("--center-email", required=True)
@click.option("--serviced-at", type=int, required=True, help="Unix seconds.")
@pass_session
def service_submit(session, actor, vehicle_id, description, center_email, serviced_at):
    keypair = session.actor(actor)
    log_hash = compute_log_hash(vehicle_id, description, center_email, serviced_at)
    body = {
        "vehicleId": vehicle_id,
        "description": description,
        "centerEmail": center_email,
        "servicedAt": serviced_at,
        "centerSignature": to_hex(sign(keypair.secret, log_hash)),
    }
    status, data = session.client.call("POST", "/api/service-log/request", body, signer=keypair)
    session.emit(status, data, lambda d: f"{d['id']} {d['logHash']}")


@service.command("approve")
@click.argument("pending_id")
@click.option("--actor", required=True, help="Vehicle owner; countersigns the log hash.")
@pass_session
def service_approve(session, pending_id, actor):
    keypair = session.actor(actor)
    status, data = session.client.call("POST", "/api/login", {}, signer=keypair)
    if exit_code_for(status) != 0 or not data.get("owner"):
        session.emit(403 if exit_code_for(status) == 0 else status,
                     {"error": {"code": "ROLE_MISMATCH",
                                "message": "actor has no owner row"}}, "")
    owner_id = data["owner"]["id"]
    status, listed = session.client.call(
        "GET", f"/api/service-log/pending/{owner_id}", signer=keypair
    )
    if exit_code_for(status) != 0:
        session.emit(status, listed, "")
    match = next((p for p in listed if p["id"] == pending_id), None)
    if match is None:
        session.emit(404, {"error": {"code": "NOT_FOUND",
                                     "message": f"no pending log {pending_id}"}}, "")
    body = {"ownerSignature": to_hex(sign(keypair.secret, from_hex(match["logHash"])))}
    status, data = session.client.call(
        "POST", f"/api/service-log/approve/{pending_id}", body, signer=keypair
    )
    session.emit(status, data, lambda d: f"{d['status']} anchor={d['anchorTxHash']}")


@main.group()
def transfer():
    """Three-step ownership transfer."""


@transfer.command("init")
@click.option("--actor", required=True, help="Seller actor.")
@click.option("--vehicle", "vehicle_id", required=True)
@click.option("--to-wallet", default=None, help="Buyer wallet address.")
@click.option("--to-actor", default=None, help="Buyer actor name, if local.")
@click.option("--out", "out_path", default=None,
              help="Ticket file for the buyer; default transfer-<vehicle>.json")
@pass_session
def transfer_init(session, actor, vehicle_id, to_wallet, to_actor, out_path):
    keypair = session.actor(actor)
    if (to_wallet is None) == (to_actor is None):
        click.echo("error BAD_REQUEST: give exactly one of --to-wallet / --to-actor", err=True)
        raise SystemExit(2)
    if to_actor is not None:
        to_wallet = to_hex(session.actor(to_actor).address)
    payload = {
        "vehicleId": vehicle_id,
        "from": to_hex(keypair.address),
        "to": to_wallet,
        "timestamp": session.client.now_ms(),
    }
    digest = keccak256(canonical_serialize(payload))
    ticket = {"payload": payload, "sellerSignature": to_hex(sign(keypair.secret, digest))}
    status, data = session.client.call(
        "POST", "/api/vehicle/initiate-transfer", ticket, signer=keypair
    )
    if exit_code_for(status) == 0:
        out_path = out_path or f"transfer-{vehicle_id[:8]}.json"
        with open(out_path, "w", encoding="utf-8") as handle:
            json.dump(ticket, handle, indent=2)
        data = {**data, "ticket": out_path}
    session.emit(status, data, lambda d: f"{d['status']} ticket={d['ticket']}")


@transfer.command("confirm")
@click.option("--actor", required=True, help="Buyer actor.")
@click.option("--ticket", "ticket_path", required=True, type=click.Path(exists=True))
@click.option("--finalize", is_flag=True, help="Also run the chain half in the same call.")
@pass_session
def transfer_confirm(session, actor, ticket_path, finalize):
    keypair = session.actor(actor)
    with open(ticket_path, "r", encoding="utf-8") as handle:
        ticket = json.load(handle)
    digest = keccak256(canonical_serialize(ticket["payload"]))
    body = {
        "payload": ticket["payload"],
        "sellerSignature": ticket["sellerSignature"],
        "buyerSignature": to_hex(sign(keypair.secret, digest)),
        "finalize": finalize,
    }
    status, data = session.client.call(
        "POST", "/api/vehicle/confirm-transfer", body, signer=keypair
    )
    session.emit(status, data, lambda d: f"{d['status']} tx={d.get('txHash')}")


@transfer.command("finalize")
@click.option("--actor", required=True, help="Seller actor.")
@click.option("--vehicle", "vehicle_id", required=True)
@pass_session
def transfer_finalize(session, actor, vehicle_id):
    keypair = session.actor(actor)
    status, data = session.client.call(
        "POST", "/api/vehicle/finalize-transfer", {"vehicleId": vehicle_id}, signer=keypair
    )
    session.emit(status, data, lambda d: f"finalized tx={d['txHash']}")


@main.group()
def telemetry():
    """Batch ingest and snapshot sync."""


def _synthetic_points(vehicle, n, end_ms):
    """Hourly frames walking backwards from end_ms, consistent with the row."""
    points = []
    for i in range(n):
        ts = end_ms - (n - 1 - i) * 3_600_000
        points.append({
            "vehicleId": vehicle["id"],
            "timestamp": ts,
            "mileage": float(vehicle["mileage"]) + i * 1.2,
            "batteryHealth": max(0.0, float(vehicle["batteryHealth"]) - i * 0.001),
            "chargingCycles": int(vehicle["chargingCycles"]) + i // 24,
            "drivingPattern": vehicle["drivingPattern"],
        })
    return points


@telemetry.command("ingest")
@click.option("--vehicle", "vehicle_id", required=True)
@click.option("--key-id", default=None, help="Provisioned API key id.")
@click.option("--secret", default=None, help="Hex batch-MAC secret for the key.")
@click.option("--actor", default=None, help="OEM actor; provisions a key when none given.")
@click.option("--points", "points_path", default=None, type=click.Path(exists=True),
              help="JSON file with the batch.")
@click.option("--generate", "generate_n", type=int, default=None,
              help="Generate N synthetic hourly frames instead.")
@click.option("--unit", default="km", show_default=True)
@pass_session
def telemetry_ingest(session, vehicle_id, key_id, secret, actor, points_path,
                     generate_n, unit):
    if (key_id is None) != (secret is None):
        click.echo("error BAD_REQUEST: --key-id and --secret go together", err=True)
        raise SystemExit(2)
    if key_id is None:
        if actor is None:
            click.echo("error BAD_REQUEST: need --key-id/--secret or an OEM --actor", err=True)
            raise SystemExit(2)
        keypair = session.actor(actor)
        status, data = session.client.call(
            "POST", f"/api/sync-telemetry/key/{vehicle_id}", signer=keypair
        )
        if exit_code_for(status) != 0:
            session.emit(status, data, "")
        key_id, secret = data["keyId"], data["secret"]
        click.echo(f"provisioned key {key_id} secret={secret}", err=True)
    if (points_path is None) == (generate_n is None):
        click.echo("error BAD_REQUEST: give exactly one of --points / --generate", err=True)
        raise SystemExit(2)
    if points_path is not None:
        with open(points_path, "r", encoding="utf-8") as handle:
            points = json.load(handle)
    else:
        status, vehicle = session.client.call("GET", f"/api/vehicle/{vehicle_id}")
        if exit_code_for(status) != 0:
            session.emit(status, vehicle, "")
        points = _synthetic_points(vehicle, generate_n, session.client.now_ms())
    mac = hmac_sha256(from_hex(secret), canonical_serialize(points))
    body = {"unit": unit, "points": points, "mac": to_hex(mac)}
    status, data = session.client.call(
        "POST", f"/api/sync-telemetry/{vehicle_id}", body, headers={"x-api-key": key_id}
    )
    session.emit(status, data,
                 lambda d: f"accepted={d['ingest']['accepted']} "
                           f"duplicates={d['ingest']['duplicates']} "
                           f"outliers={d['ingest']['outliers']} "
                           f"synced={d['sync']['updated']}")


@telemetry.command("sync")
@click.option("--actor", required=True, help="Owner or OEM actor.")
@click.option("--vehicle", "vehicle_id", required=True)
@pass_session
def telemetry_sync(session, actor, vehicle_id):
    keypair = session.actor(actor)
    status, data = session.client.call(
        "POST", f"/api/sync-telemetry/run/{vehicle_id}", signer=keypair
    )
    session.emit(status, data, lambda d: f"updated={d['updated']} digest={d['newDigest']}")


@main.group(name="zkp")
def zkp_group():
    """Threshold proofs over private vehicle metrics."""


@zkp_group.command("prove")
@click.option("--actor", required=True)
@click.option("--vehicle", "vehicle_id", required=True)
@click.option("--kind", "route", required=True,
              type=click.Choice(sorted(ZK_ROUTES)), help="Proof route name.")
@click.option("--threshold", type=float, default=None)
@click.option("--timestamp", type=int, default=None, help="For warrantyExpiry.")
@click.option("--out", "out_path", default=None, help="Proof file; default proof-<kind>.json")
@pass_session
def zkp_prove(session, actor, vehicle_id, route, threshold, timestamp, out_path):
    keypair = session.actor(actor)
    field = ZK_ROUTES[route][1]
    value = timestamp if field == "timestamp" else threshold
    if value is None:
        click.echo(f"error BAD_REQUEST: --{field} is required for {route}", err=True)
        raise SystemExit(2)
    if isinstance(value, float) and value.is_integer() and route != "batteryHealth":
        value = int(value)
    body = {"vehicleId": vehicle_id, field: value}
    status, data = session.client.call("POST", f"/api/zkp/{route}", body, signer=keypair)
    if exit_code_for(status) == 0:
        out_path = out_path or f"proof-{route}.json"
        with open(out_path, "w", encoding="utf-8") as handle:
            json.dump(data, handle, indent=2)
        data = {**data, "file": out_path}
    session.emit(status, data, lambda d: d["file"])


@zkp_group.command("verify")
@click.option("--proof", "proof_path", required=True, type=click.Path(exists=True))
@pass_session
def zkp_verify(session, proof_path):
    """Check a proof file against the node's published parameters."""
    with open(proof_path, "r", encoding="utf-8") as handle:
        document = json.load(handle)
    route = KIND_TO_ROUTE.get(document.get("kind"))
    if route is None:
        click.echo(f"error BAD_REQUEST: unknown proof kind {document.get('kind')!r}", err=True)
        raise SystemExit(2)
    status, vkey_doc = session.client.call("GET", f"/api/vkey/{route}")
    if exit_code_for(status) != 0:
        session.emit(status, vkey_doc, "")
    try:
        params = zkp.parse_params(vkey_doc["params"])
        proof = zkp.deserialize_proof(params, from_hex(document["proof"]))
        statement = zkp.ThresholdStatement(
            kind=document["kind"],
            threshold=document["publicSignals"]["threshold"],
            commitment=int(document["commitment"][2:], 16),
        )
        valid = zkp.verify(params, statement, proof, document["publicSignals"])
    except (PassportError, KeyError, ValueError) as exc:
        click.echo(f"invalid ({exc})", err=True)
        raise SystemExit(2) from exc
    if session.json_mode:
        click.echo(json.dumps({"valid": valid}))
    else:
        click.echo("valid" if valid else "invalid")
    if not valid:
        raise SystemExit(2)


@main.group()
def passport():
    """Credential and anchor consistency."""


@passport.command("verify")
@click.option("--vehicle", "vehicle_id", required=True)
@pass_session
def passport_verify(session, vehicle_id):
    """Exit 0 only when the passport is anchored and current."""
    status, data = session.client.call("GET", f"/api/vehicle/{vehicle_id}/passport")
    session.emit(status, data, lambda d: f"{d['status']} digest={d['digest']}")
    if data.get("status") != "UpToDate":
        raise SystemExit(4)


@passport.command("reanchor")
@click.option("--actor", required=True, help="Current holder or OEM.")
@click.option("--vehicle", "vehicle_id", required=True)
@pass_session
def passport_reanchor(session, actor, vehicle_id):
    """Anchor the current row state so verify reports UpToDate again."""
    keypair = session.actor(actor)
    status, data = session.client.call(
        "POST", "/api/vehicle/reanchor", {"vehicleId": vehicle_id}, signer=keypair
    )
    session.emit(status, data, lambda d: f"{d['status']} anchor={d['anchorTxHash']}")


@main.group()
def node():
    """Daemon management."""


@node.command("serve")
@pass_session
def node_serve(session):
    """Serve the HTTP API with configuration from VP_* variables."""
    from .api import serve

    serve(PassportNode(NodeConfig.from_env()))


@main.group()
def scenario():
    """Scripted multi-actor runs."""


@scenario.command("run")
@click.argument("name")
@click.option("--seed", type=int, default=None,
              help="Actor-key seed; defaults to the embedded node's seed, then 1.")
@pass_session
def scenario_run(session, name, seed):
    """Drive a named scenario end to end; currently: full-lifecycle."""
    from .scenario import SCENARIOS

    if seed is None:
        node = session.client.node
        seed = (node.config.seed if node is not None else None) or 1
    runner = SCENARIOS.get(name)
    if runner is None:
        click.echo(f"error NOT_FOUND: no scenario {name!r} "
                   f"(have: {', '.join(sorted(SCENARIOS))})", err=True)
        raise SystemExit(2)
    steps = []

    def report(step: str, detail: str):
        steps.append({"step": step, "detail": detail})
        if not session.json_mode:
            click.echo(f"ok {step}: {detail}")

    try:
        summary = runner(session.client, seed, report)
    except PassportError as exc:
        click.echo(f"error {exc.code}: {exc.message}", err=True)
        raise SystemExit(exit_code_for(exc.http_status)) from exc
    if session.json_mode:
        click.echo(json.dumps({"steps": steps, **summary}, indent=2, sort_keys=True))
    else:
        click.echo(f"scenario {name} complete: {summary}")


if __name__ == "__main__":
    main()

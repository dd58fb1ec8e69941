"""HTTP gateway exposing the node as two logical route groups.

The main group carries disclosure, ownership, service-log, telemetry and
factory routes; the zkp group carries proof generation and verification
parameters.  Both can live in one app or be split across two processes so
the proof arithmetic stays off the request path of everything else.

Authentication is wallet-first: mutating requests carry an X-Sig-Keccak
header holding the caller's signature over keccak256 of the canonical
request body, plus the claimed address in X-Wallet.  Browsers may instead
log in once and present the resulting 30-minute session token as a
bearer header.  Telemetry ingest authenticates with a per-vehicle API key
rather than a wallet.
"""

from __future__ import annotations

import dataclasses
import json
import threading

from fastapi import FastAPI, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from starlette.exceptions import HTTPException as StarletteHTTPException

from . import tokens
from .crypto import canonical_serialize, from_hex, keccak256, recover_address, to_hex
from .errors import (
    AuthRequired,
    BadRequest,
    PassportError,
    RateLimited,
    RoleMismatch,
)
from .node import ROLE_ANONYMOUS, ROLE_OEM, ROLE_OWNER, ZK_ROUTES, PassportNode

SIG_HEADER = "x-sig-keccak"
WALLET_HEADER = "x-wallet"
API_KEY_HEADER = "x-api-key"
SESSION_SCOPE = "session"


@dataclasses.dataclass
class AuthContext:
    wallet: bytes | None
    role: str

    @property
    def anonymous(self) -> bool:
        return self.wallet is None


class RateLimiter:
    """Per-principal token bucket over the node clock."""

    def __init__(self, capacity: int, refill_per_s: float, clock):
        self._capacity = capacity
        self._refill = refill_per_s
        self._clock = clock
        self._buckets: dict[str, tuple[float, int]] = {}
        self._lock = threading.Lock()

    def take(self, key: str) -> bool:
        now = self._clock.now_ms()
        with self._lock:
            level, last = self._buckets.get(key, (float(self._capacity), now))
            level = min(self._capacity, level + (now - last) / 1000.0 * self._refill)
            if level < 1.0:
                self._buckets[key] = (level, now)
                return False
            self._buckets[key] = (level - 1.0, now)
            return True


def _error_body(code: str, message: str) -> dict:
    return {"error": {"code": code, "message": message}}


async def read_json(request: Request) -> dict:
    raw = await request.body()
    if not raw:
        return {}
    try:
        body = json.loads(raw)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise BadRequest(f"request body is not valid JSON: {exc}") from exc
    if not isinstance(body, dict):
        raise BadRequest("request body must be a JSON object")
    return body


def _require_str(body: dict, key: str) -> str:
    value = body.get(key)
    if not isinstance(value, str) or not value:
        raise BadRequest(f"body field {key!r} must be a non-empty string")
    return value


def _require_sig(body: dict, key: str) -> bytes:
    raw = from_hex(_require_str(body, key))
    if len(raw) != 65:
        raise BadRequest(f"body field {key!r} must be a 65-byte signature")
    return raw


def _vehicle_fields(body: dict) -> dict:
    for key in ("vin", "model", "manufacturer"):
        _require_str(body, key)
    expiry = body.get("warrantyExpiry")
    if isinstance(expiry, bool) or not isinstance(expiry, int):
        raise BadRequest("body field 'warrantyExpiry' must be a unix timestamp")
    return body


class Gateway:
    """Route handlers plus the authentication and rate-limit plumbing.

    One Gateway serves one node; route groups are mounted onto FastAPI
    apps by create_app / create_apps below.
    """

    def __init__(self, node: PassportNode, limiter: RateLimiter | None = None):
        self.node = node
        self.limiter = limiter or RateLimiter(
            node.config.rate_capacity, node.config.rate_refill_per_s, node.clock
        )

    # -- authentication ----------------------------------------------------

    async def _signature_wallet(self, request: Request) -> bytes | None:
        signature = request.headers.get(SIG_HEADER)
        claimed = request.headers.get(WALLET_HEADER)
        if signature is None:
            return None
        if claimed is None:
            raise AuthRequired("X-Sig-Keccak requires the X-Wallet header")
        body = await read_json(request)
        digest = keccak256(canonical_serialize(body) if body else b"")
        try:
            recovered = recover_address(digest, from_hex(signature))
            claimed_wallet = from_hex(claimed)
        except PassportError as exc:
            raise AuthRequired(f"signature rejected: {exc.message}") from exc
        if recovered != claimed_wallet:
            raise AuthRequired("signature does not recover to the claimed wallet")
        return recovered

    def _session_wallet(self, request: Request) -> bytes | None:
        header = request.headers.get("authorization")
        if header is None or not header.lower().startswith("bearer "):
            return None
        try:
            claims = tokens.decode(header[7:].strip(), self.node.config.mac_key)
        except PassportError as exc:
            raise AuthRequired(f"session token rejected: {exc.message}") from exc
        if claims.get("scope") != SESSION_SCOPE:
            raise AuthRequired("token is not a session token")
        exp = claims.get("exp")
        if not isinstance(exp, int) or self.node.clock.now_s() >= exp:
            raise AuthRequired("session token expired")
        try:
            return from_hex(claims["sub"])
        except (KeyError, PassportError) as exc:
            raise AuthRequired("session token carries no wallet") from exc

    async def authenticate(
        self,
        request: Request,
        mutating: bool = True,
        allow: tuple[str, ...] | None = None,
    ) -> AuthContext:
        wallet = await self._signature_wallet(request)
        if wallet is None:
            wallet = self._session_wallet(request)
        if wallet is None:
            if mutating or allow is not None:
                raise AuthRequired()
            return AuthContext(wallet=None, role=ROLE_ANONYMOUS)
        if mutating and not self.limiter.take(to_hex(wallet)):
            raise RateLimited()
        role = self.node.role_of(wallet)
        if allow is not None and role not in allow:
            raise RoleMismatch(f"route requires one of {', '.join(allow)}")
        return AuthContext(wallet=wallet, role=role)

    def _owner_of(self, vehicle_id: str):
        vehicle = self.node.vehicle(vehicle_id)
        return vehicle, self.node.store.owner_by_id(vehicle.owner_id)

    def _require_vehicle_owner(self, ctx: AuthContext, vehicle_id: str):
        vehicle, owner = self._owner_of(vehicle_id)
        if owner.wallet != ctx.wallet and ctx.role != ROLE_OEM:
            raise RoleMismatch("caller does not hold this vehicle")
        return vehicle, owner

    # -- main group --------------------------------------------------------

    def mount_main(self, app: FastAPI) -> None:
        node = self.node

        @app.post("/api/login")
        async def login(request: Request):
            ctx = await self.authenticate(request)
            body = await read_json(request)
            owner = node.store.find_owner_by_wallet(ctx.wallet)
            if owner is None and "name" in body and "email" in body:
                owner = node.register_owner(
                    ctx.wallet, _require_str(body, "name"), _require_str(body, "email")
                )
            now = node.clock.now_s()
            exp = now + node.config.session_ttl_s
            token = tokens.encode(
                {
                    "sub": to_hex(ctx.wallet),
                    "scope": SESSION_SCOPE,
                    "iat": now,
                    "exp": exp,
                },
                node.config.mac_key,
            )
            return {
                "token": token,
                "expiresAt": exp,
                "role": node.role_of(ctx.wallet),
                "owner": owner.to_wire() if owner else None,
            }

        @app.post("/api/access-request")
        async def access_request(request: Request):
            await self.authenticate(request)
            body = await read_json(request)
            fields = body.get("fields")
            if not isinstance(fields, list):
                raise BadRequest("body field 'fields' must be a list")
            created = node.request_access(
                _require_str(body, "vehicleId"), _require_str(body, "requester"), fields
            )
            return JSONResponse(created.to_wire(), status_code=201)

        @app.post("/api/approve/{request_id}")
        async def approve(request: Request, request_id: str):
            ctx = await self.authenticate(request, allow=(ROLE_OWNER, ROLE_OEM))
            token = node.approve_access(request_id, ctx.wallet)
            return {"token": token}

        @app.get("/api/access/{token}")
        async def redeem(token: str):
            return node.redeem_access(token)

        @app.get("/api/owner/approvals")
        async def approvals(request: Request):
            ctx = await self.authenticate(request, mutating=False, allow=(ROLE_OWNER, ROLE_OEM))
            return [r.to_wire() for r in node.pending_approvals(ctx.wallet)]

        @app.get("/api/vehicle/owner/{wallet}")
        async def portfolio(wallet: str):
            return [v.to_wire() for v in node.portfolio(from_hex(wallet))]

        @app.post("/api/vehicle/initiate-transfer")
        async def initiate_transfer(request: Request):
            await self.authenticate(request)
            body = await read_json(request)
            record = node.initiate_transfer(
                body.get("payload") or {}, _require_sig(body, "sellerSignature")
            )
            return {"vehicleId": record["vehicle_id"], "status": record["status"]}

        @app.post("/api/vehicle/confirm-transfer")
        async def confirm_transfer(request: Request):
            ctx = await self.authenticate(request)
            body = await read_json(request)
            record = node.confirm_transfer(
                body.get("payload") or {},
                _require_sig(body, "sellerSignature"),
                _require_sig(body, "buyerSignature"),
                ctx.wallet,
                and_finalize=bool(body.get("finalize", False)),
            )
            return {
                "vehicleId": record["vehicle_id"],
                "status": record["status"],
                "txHash": to_hex(record["tx_hash"]) if record["tx_hash"] else None,
            }

        @app.post("/api/vehicle/finalize-transfer")
        async def finalize_transfer(request: Request):
            ctx = await self.authenticate(request)
            body = await read_json(request)
            receipt = node.finalize_transfer(_require_str(body, "vehicleId"), ctx.wallet)
            return {"txHash": to_hex(receipt.tx_hash), "height": receipt.height}

        @app.post("/api/vehicle/reanchor")
        async def reanchor(request: Request):
            ctx = await self.authenticate(request)
            body = await read_json(request)
            vehicle_id = _require_str(body, "vehicleId")
            self._require_vehicle_owner(ctx, vehicle_id)
            return node.reanchor(vehicle_id)

        @app.get("/api/vehicle/{vehicle_id}")
        async def vehicle(vehicle_id: str):
            return node.vehicle(vehicle_id).to_wire()

        @app.get("/api/vehicle/{vehicle_id}/passport")
        async def passport(vehicle_id: str):
            return node.passport_status(vehicle_id)

        @app.get("/api/vehicle/{vehicle_id}/credential")
        async def credential(vehicle_id: str):
            return Response(
                content=node.credential_export(vehicle_id), media_type="application/ld+json"
            )

        @app.get("/api/vehicle/{vehicle_id}/transfer")
        async def transfer_status(vehicle_id: str):
            return node.transfer_status(vehicle_id)

        @app.get("/api/vehicle/{vehicle_id}/audit")
        async def audit_trail(vehicle_id: str):
            node.vehicle(vehicle_id)
            return node.store.audit_rows(subject=vehicle_id)

        @app.post("/api/service-log/request")
        async def service_request(request: Request):
            ctx = await self.authenticate(request)
            body = await read_json(request)
            serviced_at = body.get("servicedAt")
            if isinstance(serviced_at, bool) or not isinstance(serviced_at, int):
                raise BadRequest("body field 'servicedAt' must be a unix timestamp")
            pending = node.submit_service_log(
                _require_str(body, "vehicleId"),
                _require_str(body, "description"),
                _require_str(body, "centerEmail"),
                ctx.wallet,
                _require_sig(body, "centerSignature"),
                serviced_at,
            )
            return JSONResponse(pending.to_wire(), status_code=201)

        @app.get("/api/service-log/pending/{owner_id}")
        async def service_pending(request: Request, owner_id: str):
            ctx = await self.authenticate(request, mutating=False, allow=(ROLE_OWNER, ROLE_OEM))
            owner = node.store.owner_by_id(owner_id)
            if owner.wallet != ctx.wallet and ctx.role != ROLE_OEM:
                raise RoleMismatch("pending list belongs to another owner")
            return [p.to_wire() for p in node.pending_service_logs(owner.wallet)]

        @app.post("/api/service-log/approve/{pending_id}")
        async def service_approve(request: Request, pending_id: str):
            ctx = await self.authenticate(request, allow=(ROLE_OWNER, ROLE_OEM))
            body = await read_json(request)
            final = node.approve_service_log(
                pending_id, _require_sig(body, "ownerSignature"), ctx.wallet
            )
            return final.to_wire()

        @app.get("/api/service-log/vehicle/{vehicle_id}")
        async def service_history(vehicle_id: str):
            return [log.to_wire() for log in node.vehicle_service_logs(vehicle_id)]

        @app.post("/api/sync-telemetry/key/{vehicle_id}")
        async def telemetry_key(request: Request, vehicle_id: str):
            await self.authenticate(request, allow=(ROLE_OEM,))
            key_id, secret = node.provision_telemetry_key(vehicle_id)
            return JSONResponse({"keyId": key_id, "secret": secret.hex()}, status_code=201)

        @app.post("/api/sync-telemetry/run/{vehicle_id}")
        async def telemetry_run_sync(request: Request, vehicle_id: str):
            ctx = await self.authenticate(request)
            self._require_vehicle_owner(ctx, vehicle_id)
            return node.sync_telemetry(vehicle_id).to_wire()

        @app.post("/api/sync-telemetry/{vehicle_id}")
        async def sync_telemetry(request: Request, vehicle_id: str):
            key_id = request.headers.get(API_KEY_HEADER)
            if key_id is None:
                raise AuthRequired("telemetry ingest requires the x-api-key header")
            if not self.limiter.take(f"key:{key_id}"):
                raise RateLimited()
            body = await read_json(request)
            points = body.get("points")
            if not isinstance(points, list):
                raise BadRequest("body field 'points' must be a list")
            unit = body.get("unit", "km")
            mac = from_hex(_require_str(body, "mac"))
            report = node.ingest_telemetry(key_id, vehicle_id, points, mac, unit=unit)
            sync = node.sync_telemetry(vehicle_id)
            return {"ingest": report.to_wire(), "sync": sync.to_wire()}

        @app.get("/api/sync-telemetry/latest/{vehicle_id}")
        async def telemetry_latest(vehicle_id: str):
            return {"vehicleId": vehicle_id, "latest": node.latest_telemetry(vehicle_id)}

        @app.get("/api/sync-telemetry/aggregates/{vehicle_id}")
        async def telemetry_aggregates(vehicle_id: str):
            return node.telemetry_aggregates(vehicle_id).to_wire()

        @app.get("/api/matter/vehicles")
        async def inventory(request: Request):
            await self.authenticate(request, mutating=False, allow=(ROLE_OEM,))
            groups = node.inventory()
            return {
                "production": [v.to_wire() for v in groups["production"]],
                "customer": [v.to_wire() for v in groups["customer"]],
            }

        @app.post("/api/matter/vehicles")
        async def create_vehicle(request: Request):
            ctx = await self.authenticate(request, allow=(ROLE_OEM,))
            body = await read_json(request)
            owner = body.get("ownerWallet")
            wallet = from_hex(owner) if isinstance(owner, str) else ctx.wallet
            created = node.create_vehicle(_vehicle_fields(body), wallet)
            return JSONResponse(
                {
                    "vehicleId": created.id,
                    "anchorTxHash": to_hex(created.anchor_tx_hash),
                    "tokenId": str(created.vehicle_nft_token_id),
                    "vehicle": created.to_wire(),
                },
                status_code=201,
            )

        @app.post("/api/matter/import-vehicle")
        async def import_vehicle(request: Request):
            ctx = await self.authenticate(request, allow=(ROLE_OEM,))
            body = await read_json(request)
            owner = body.get("ownerWallet")
            wallet = from_hex(owner) if isinstance(owner, str) else ctx.wallet
            created = node.import_vehicle(_vehicle_fields(body), wallet)
            return JSONResponse(created.to_wire(), status_code=201)

        @app.post("/api/matter/mint-nft")
        async def mint_nft(request: Request):
            await self.authenticate(request, allow=(ROLE_OEM,))
            body = await read_json(request)
            minted = node.mint_nft(_require_str(body, "vehicleId"))
            return {
                "vehicleId": minted.id,
                "anchorTxHash": to_hex(minted.anchor_tx_hash),
                "tokenId": str(minted.vehicle_nft_token_id),
            }

        @app.post("/api/matter/sell-vehicle")
        async def sell_vehicle(request: Request):
            await self.authenticate(request, allow=(ROLE_OEM,))
            body = await read_json(request)
            return node.sell_vehicle(
                body.get("payload") or {},
                _require_sig(body, "sellerSignature"),
                _require_sig(body, "buyerSignature"),
            )

    # -- zkp group ---------------------------------------------------------

    def mount_zkp(self, app: FastAPI) -> None:
        node = self.node

        @app.post("/api/zkp/{route}")
        async def prove(request: Request, route: str):
            ctx = await self.authenticate(request)
            body = await read_json(request)
            vehicle_id = _require_str(body, "vehicleId")
            self._require_vehicle_owner(ctx, vehicle_id)
            field = ZK_ROUTES.get(route, (None, "threshold"))[1]
            if field not in body:
                raise BadRequest(f"body field {field!r} is required")
            return node.prove_threshold(route, vehicle_id, body[field])

        @app.get("/api/vkey/{route}")
        async def vkey(route: str):
            return node.vkey(route)


def _install_handlers(app: FastAPI, permissive_cors: bool) -> None:
    @app.exception_handler(PassportError)
    async def passport_error(_request: Request, exc: PassportError):
        return JSONResponse(_error_body(exc.code, exc.message), status_code=exc.http_status)

    @app.exception_handler(StarletteHTTPException)
    async def http_error(_request: Request, exc: StarletteHTTPException):
        code = {404: "NOT_FOUND", 405: "METHOD_NOT_ALLOWED"}.get(
            exc.status_code, f"HTTP_{exc.status_code}"
        )
        return JSONResponse(_error_body(code, str(exc.detail)), status_code=exc.status_code)

    if permissive_cors:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=["*"],
            allow_methods=["*"],
            allow_headers=["*"],
        )


def create_app(
    node: PassportNode,
    include_main: bool = True,
    include_zkp: bool = True,
    limiter: RateLimiter | None = None,
) -> FastAPI:
    app = FastAPI(title="vehiclepassport", docs_url=None, redoc_url=None, openapi_url=None)
    gateway = Gateway(node, limiter=limiter)
    _install_handlers(app, node.config.permissive_cors)
    if include_main:
        gateway.mount_main(app)
    if include_zkp:
        gateway.mount_zkp(app)
    return app


def create_apps(node: PassportNode) -> list[FastAPI]:
    """One app, or a main/zkp pair when the config asks for the split."""
    if not node.config.split_zkp:
        return [create_app(node)]
    limiter = RateLimiter(
        node.config.rate_capacity, node.config.rate_refill_per_s, node.clock
    )
    return [
        create_app(node, include_zkp=False, limiter=limiter),
        create_app(node, include_main=False, limiter=limiter),
    ]


def serve(node: PassportNode) -> None:
    """Run the configured app(s) until interrupted."""
    import uvicorn

    apps = create_apps(node)
    listens = [node.config.listen, node.config.zkp_listen][: len(apps)]
    servers = []
    for app, listen in zip(apps, listens):
        host, _, port = listen.rpartition(":")
        config = uvicorn.Config(app, host=host or "127.0.0.1", port=int(port), log_level="info")
        servers.append(uvicorn.Server(config))
    if len(servers) == 1:
        servers[0].run()
        return
    threads = [
        threading.Thread(target=server.run, daemon=True) for server in servers[1:]
    ]
    for thread in threads:
        thread.start()
    servers[0].run()

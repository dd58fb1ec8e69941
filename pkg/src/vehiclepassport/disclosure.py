"""Field-scoped selective disclosure.

A requester asks for named fields, the owner approves, and the backend
issues a one-time token good for ten minutes.  Redemption projects exactly
the approved columns and burns the token; replays get 410 semantics.
"""

from __future__ import annotations

from . import tokens
from .clock import Clock, iso_utc
from .errors import (
    Expired,
    FieldNotAllowed,
    Gone,
    InvalidState,
    InvalidToken,
    Unauthorized,
)
from .models import (
    ACCESS_APPROVED,
    ACCESS_EXPIRED,
    ACCESS_PENDING,
    ACCESS_USED,
    AccessRequest,
)
from .store import Store

FIELD_WHITELIST = frozenset(
    {"batteryHealth", "mileage", "warrantyExpiry", "model", "manufacturer"}
)

REQUEST_TTL_S = 600
TOKEN_TTL_S = 600

VERIFIED_BADGE = "sealed-disclosure"


def _project(vehicle, fields: set[str]) -> dict:
    values = {
        "batteryHealth": vehicle.battery_health,
        "mileage": vehicle.mileage,
        "warrantyExpiry": iso_utc(vehicle.warranty_expiry),
        "model": vehicle.model,
        "manufacturer": vehicle.manufacturer,
    }
    return {name: values[name] for name in sorted(fields)}


class DisclosureFlow:
    def __init__(self, store: Store, server_key: bytes, clock: Clock | None = None):
        self._store = store
        self._key = server_key
        self._clock = clock or Clock()

    def create_request(self, vehicle_id: str, requester: str, fields: list[str]) -> AccessRequest:
        requested = {f.strip() for f in fields if f.strip()}
        if not requested:
            raise FieldNotAllowed("no fields requested")
        outside = requested - FIELD_WHITELIST
        if outside:
            raise FieldNotAllowed(f"fields not disclosable: {', '.join(sorted(outside))}")
        self._store.vehicle_by_id(vehicle_id)  # NotFound if missing
        now = self._clock.now_s()
        request = AccessRequest(
            id=self._store.new_id(),
            vehicle_id=vehicle_id,
            requester=requester,
            fields=",".join(sorted(requested)),
            status=ACCESS_PENDING,
            token=None,
            created_at=now,
            expires_at=now + REQUEST_TTL_S,
        )
        self._store.insert_access_request(request)
        return request

    def approve(self, request_id: str, owner_wallet: bytes) -> str:
        request = self._store.access_request(request_id)
        vehicle = self._store.vehicle_by_id(request.vehicle_id)
        owner = self._store.owner_by_id(vehicle.owner_id)
        if owner.wallet != owner_wallet:
            raise Unauthorized("only the vehicle owner can approve")
        if request.status != ACCESS_PENDING:
            raise InvalidState(f"request is {request.status}, not pending")
        now = self._clock.now_s()
        if now >= request.expires_at:
            self._store.transition_request(request_id, ACCESS_PENDING, ACCESS_EXPIRED)
            raise Expired("pending request has expired")
        iat = now
        exp = iat + TOKEN_TTL_S
        claims = {
            "requestId": request.id,
            "vehicleId": request.vehicle_id,
            "fields": sorted(request.field_set()),
            "iat": iat,
            "exp": exp,
        }
        token = tokens.encode(claims, self._key)
        moved = self._store.transition_request(
            request_id, ACCESS_PENDING, ACCESS_APPROVED, token=token, expires_at=exp
        )
        if not moved:
            raise InvalidState("request changed state during approval")
        return token

    def redeem(self, token: str) -> dict:
        claims = tokens.decode(token, self._key)
        now = self._clock.now_s()
        exp = claims.get("exp")
        if not isinstance(exp, int) or now >= exp:
            raise Expired("token expired")
        request_id = claims.get("requestId")
        if not isinstance(request_id, str):
            raise InvalidToken("missing requestId claim")
        try:
            request = self._store.access_request(request_id)
        except Exception as exc:
            raise InvalidToken("token does not match a live request") from exc
        if request.token != token or request.vehicle_id != claims.get("vehicleId"):
            raise InvalidToken("token does not match the stored grant")

        moved = self._store.transition_request(request_id, ACCESS_APPROVED, ACCESS_USED)
        if not moved:
            current = self._store.access_request(request_id).status
            if current == ACCESS_USED:
                raise Gone("token already redeemed")
            if current == ACCESS_EXPIRED:
                raise Expired("request expired")
            raise InvalidState(f"request is {current}")

        vehicle = self._store.vehicle_by_id(request.vehicle_id)
        approved = set(claims.get("fields", []))
        return {"data": _project(vehicle, approved), "verified": VERIFIED_BADGE}

    def list_pending_for_owner(self, owner_wallet: bytes) -> list[AccessRequest]:
        owner = self._store.owner_by_wallet(owner_wallet)
        now = self._clock.now_s()
        out = []
        for vehicle in self._store.list_by_owner(owner.wallet):
            for request in self._store.requests_for_vehicle(vehicle.id):
                if request.status != ACCESS_PENDING:
                    continue
                if now >= request.expires_at:
                    self._store.transition_request(request.id, ACCESS_PENDING, ACCESS_EXPIRED)
                    continue
                out.append(request)
        return out

    def sweep_expired(self) -> int:
        """Lazily expire stale pending rows; returns how many were flipped."""
        now = self._clock.now_s()
        flipped = 0
        for request_id in self._store.stale_pending_requests(now):
            if self._store.transition_request(request_id, ACCESS_PENDING, ACCESS_EXPIRED):
                flipped += 1
        return flipped

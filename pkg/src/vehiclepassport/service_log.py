"""Dual-signature service history.

A service center signs the log hash and submits; the owner countersigns;
the hash is anchored and the row finalized atomically.  Both signatures
bind to the same digest, so anyone can later recover both addresses from
the stored hash and prove mutual consent.
"""

from __future__ import annotations

from .clock import Clock
from .crypto import canonical_serialize, keccak256, recover_address
from .errors import (
    BadSignature,
    DuplicateLogHash,
    InvalidLog,
    NotFound,
    Unauthorized,
)
from .ledger import Ledger
from .models import PendingServiceLog, ServiceLog
from .store import Store


def compute_log_hash(vehicle_id: str, description: str, center_email: str, serviced_at: int) -> bytes:
    if not description:
        raise InvalidLog("description must not be empty")
    payload = {
        "vehicleId": vehicle_id,
        "description": description,
        "centerEmail": center_email,
        "servicedAt": serviced_at,
    }
    return keccak256(canonical_serialize(payload))


class ServiceLogFlow:
    def __init__(self, store: Store, ledger: Ledger, clock: Clock | None = None):
        self._store = store
        self._ledger = ledger
        self._clock = clock or Clock()
        # fault-injection seam: called after the anchor lands but before the
        # store transaction runs
        self.after_anchor = None

    def submit_log(
        self,
        vehicle_id: str,
        description: str,
        center_email: str,
        center_wallet: bytes,
        center_signature: bytes,
        serviced_at: int,
    ) -> PendingServiceLog:
        vehicle = self._store.vehicle_by_id(vehicle_id)
        log_hash = compute_log_hash(vehicle.id, description, center_email, serviced_at)
        if recover_address(log_hash, center_signature) != center_wallet:
            raise BadSignature("signature does not recover to the declared center wallet")
        if (
            self._store.pending_log_by_hash(log_hash) is not None
            or self._store.service_log_by_hash(log_hash) is not None
            or self._ledger.is_log_anchored(log_hash) is not None
        ):
            raise DuplicateLogHash("identical log already submitted")
        pending = PendingServiceLog(
            id=self._store.new_id(),
            vehicle_id=vehicle.id,
            description=description,
            center_email=center_email,
            center_signature=center_signature,
            log_hash=log_hash,
            serviced_at=serviced_at,
            submitted_at=self._clock.now_s(),
        )
        self._store.insert_pending_log(pending)
        return pending

    def approve_log(self, pending_id: str, owner_signature: bytes, owner_wallet: bytes) -> ServiceLog:
        vehicle_id = self._store.pending_log(pending_id).vehicle_id
        with self._store.vehicle_lock(vehicle_id):
            pending = self._store.pending_log(pending_id)
            vehicle = self._store.vehicle_by_id(pending.vehicle_id)
            owner = self._store.owner_by_id(vehicle.owner_id)
            if owner.wallet != owner_wallet:
                raise Unauthorized("approver is not the current vehicle owner")
            if recover_address(pending.log_hash, owner_signature) != owner_wallet:
                raise Unauthorized("owner signature does not recover to the owner wallet")

            receipt = self._ledger.anchor_service_log(pending.log_hash, owner_wallet)
            if self.after_anchor is not None:
                self.after_anchor()
            final = ServiceLog(
                id=self._store.new_id(),
                vehicle_id=pending.vehicle_id,
                description=pending.description,
                serviced_at=pending.serviced_at,
                center_email=pending.center_email,
                center_signature=pending.center_signature,
                owner_signature=owner_signature,
                log_hash=pending.log_hash,
                anchor_tx_hash=receipt.tx_hash,
                status="finalized",
            )
            self._store.finalize_service_log(pending_id, final)
            return final

    def list_pending_logs(self, owner_wallet: bytes) -> list[PendingServiceLog]:
        owner = self._store.owner_by_wallet(owner_wallet)
        return self._store.pending_logs_for_owner(owner.id)

    def logs_for_vehicle(self, vehicle_id: str) -> list[ServiceLog]:
        self._store.vehicle_by_id(vehicle_id)  # NotFound if missing
        return self._store.service_logs_for_vehicle(vehicle_id)

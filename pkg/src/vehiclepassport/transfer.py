"""Trust-less ownership transfer in three steps.

The seller signs an off-chain payload, the buyer countersigns the exact
same bytes, and the seller finally executes the on-chain transfer.  The
pending flag on the vehicle stays up from initiation until the ledger
confirms, so observers can always tell a sale is in flight.
"""

from __future__ import annotations

import json

from .clock import Clock
from .crypto import canonical_serialize, from_hex, keccak256, recover_address, to_hex
from .errors import (
    BadSignature,
    InvalidRecipient,
    InvalidState,
    PayloadMismatch,
    StaleTimestamp,
    TransferAlreadyPending,
    Unauthorized,
    WrongBuyer,
)
from .ledger import Ledger, TxReceipt
from .store import Store

# how far a payload timestamp may drift from the node clock, either way
TRANSFER_FRESHNESS_MS = 300_000

_REQUIRED_KEYS = {"vehicleId", "from", "to", "timestamp"}


def transfer_payload_hash(payload: dict) -> bytes:
    return keccak256(canonical_serialize(payload))


def _validate_payload(payload: dict) -> tuple[str, bytes, bytes, int]:
    if set(payload) != _REQUIRED_KEYS:
        raise PayloadMismatch(
            f"payload keys must be exactly {sorted(_REQUIRED_KEYS)}, got {sorted(payload)}"
        )
    vehicle_id = payload["vehicleId"]
    src = from_hex(payload["from"])
    dst = from_hex(payload["to"])
    if len(src) != 20 or len(dst) != 20:
        raise PayloadMismatch("from/to must be 20-byte addresses")
    if src == dst:
        raise InvalidRecipient("transfer to self is meaningless")
    ts = payload["timestamp"]
    if not isinstance(ts, int) or ts <= 0:
        raise PayloadMismatch("timestamp must be unix milliseconds")
    return vehicle_id, src, dst, ts


class TransferFlow:
    def __init__(
        self,
        store: Store,
        ledger: Ledger,
        clock: Clock | None = None,
        freshness_ms: int = TRANSFER_FRESHNESS_MS,
    ):
        self._store = store
        self._ledger = ledger
        self._clock = clock or Clock()
        self._freshness_ms = freshness_ms

    def _check_fresh(self, ts_ms: int) -> None:
        if abs(self._clock.now_ms() - ts_ms) > self._freshness_ms:
            raise StaleTimestamp("payload timestamp outside the freshness window")

    def initiate_transfer(self, payload: dict, seller_signature: bytes) -> dict:
        vehicle_id, src, dst, ts = _validate_payload(payload)
        vehicle = self._store.vehicle_by_id(vehicle_id)
        self._check_fresh(ts)

        record = self._store.transfer_record(vehicle_id)
        if vehicle.nft_transfer_pending or (
            record is not None and record["status"] in ("pending", "confirmed")
        ):
            raise TransferAlreadyPending(f"vehicle {vehicle_id} already has a transfer in flight")

        digest = transfer_payload_hash(payload)
        signer = recover_address(digest, seller_signature)
        chain_owner = self._ledger.owner_of(vehicle.vehicle_nft_token_id)
        if signer != src or signer != chain_owner:
            raise Unauthorized("payload must be signed by the current token owner")

        with self._store.vehicle_lock(vehicle_id):
            payload_json = canonical_serialize(payload).decode("utf-8")
            self._store.insert_transfer(vehicle_id, payload_json, seller_signature)
            self._store.update_vehicle(vehicle_id, nft_transfer_pending=True)
        return self._store.transfer_record(vehicle_id)

    def confirm_transfer(
        self,
        payload: dict,
        seller_signature: bytes,
        buyer_signature: bytes,
        buyer_wallet: bytes,
    ) -> dict:
        vehicle_id, src, dst, ts = _validate_payload(payload)
        record = self._store.transfer_record(vehicle_id)
        if record is None or record["status"] != "pending":
            raise InvalidState("no pending transfer for this vehicle")
        if canonical_serialize(payload).decode("utf-8") != record["payload_json"]:
            raise PayloadMismatch("payload differs from the one the seller signed")
        if seller_signature != record["seller_signature"]:
            raise BadSignature("seller signature differs from the stored one")
        self._check_fresh(ts)
        if buyer_wallet != dst:
            raise WrongBuyer("buyer wallet does not match the payload recipient")

        digest = transfer_payload_hash(payload)
        if recover_address(digest, seller_signature) != src:
            raise BadSignature("seller signature does not recover to the payload sender")
        if recover_address(digest, buyer_signature) != buyer_wallet:
            raise BadSignature("buyer signature does not recover to the buyer wallet")

        buyer_row = self._store.owner_by_wallet(buyer_wallet)  # NotFound if unregistered
        with self._store.vehicle_lock(vehicle_id):
            self._store.update_transfer(vehicle_id, "confirmed", buyer_sig=buyer_signature)
            # database ownership moves now; the chain side waits for finalize
            self._store.update_vehicle(vehicle_id, owner_id=buyer_row.id)
        return self._store.transfer_record(vehicle_id)

    def finalize_transfer(self, vehicle_id: str, caller_wallet: bytes) -> TxReceipt:
        vehicle = self._store.vehicle_by_id(vehicle_id)
        record = self._store.transfer_record(vehicle_id)
        if record is None or record["status"] != "confirmed":
            raise InvalidState("transfer has not been confirmed by the buyer")
        payload = json.loads(record["payload_json"])
        src = from_hex(payload["from"])
        dst = from_hex(payload["to"])
        if caller_wallet != src:
            raise Unauthorized("only the seller can finalize the transfer")

        receipt = self._ledger.safe_transfer_from(
            src, dst, vehicle.vehicle_nft_token_id, caller_wallet
        )
        with self._store.vehicle_lock(vehicle_id):
            self._store.update_transfer(vehicle_id, "finalized", tx_hash=receipt.tx_hash)
            self._store.update_vehicle(vehicle_id, nft_transfer_pending=False)
        return receipt

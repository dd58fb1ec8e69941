"""Row-level domain objects shared by the store, credential, and API layers.

Attribute names are snake_case; the wire (and the relational schema) keep the
camelCase names, so each model knows how to render itself for transport.
"""

from __future__ import annotations

import dataclasses

from .clock import iso_utc
from .crypto import to_hex


@dataclasses.dataclass
class Owner:
    id: str
    name: str
    email: str
    wallet: bytes  # 20-byte address
    created_at: int
    updated_at: int

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "name": self.name,
            "email": self.email,
            "wallet": to_hex(self.wallet),
            "createdAt": iso_utc(self.created_at),
            "updatedAt": iso_utc(self.updated_at),
        }


@dataclasses.dataclass
class Vehicle:
    id: str
    vin: str
    model: str
    manufacturer: str
    owner_id: str
    battery_health: float
    mileage: int
    charging_cycles: int
    driving_pattern: str
    warranty_expiry: int
    anchor_tx_hash: bytes | None
    vehicle_nft_token_id: int | None
    nft_transfer_pending: bool
    hash: bytes | None
    telemetry_at: int  # ms timestamp of the newest synced reading, 0 = never
    created_at: int
    updated_at: int

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "vin": self.vin,
            "model": self.model,
            "manufacturer": self.manufacturer,
            "ownerId": self.owner_id,
            "batteryHealth": self.battery_health,
            "mileage": self.mileage,
            "chargingCycles": self.charging_cycles,
            "drivingPattern": self.driving_pattern,
            "warrantyExpiry": iso_utc(self.warranty_expiry),
            "anchorTxHash": to_hex(self.anchor_tx_hash) if self.anchor_tx_hash else None,
            "vehicleNftTokenId": str(self.vehicle_nft_token_id)
            if self.vehicle_nft_token_id is not None
            else None,
            "nftTransferPending": self.nft_transfer_pending,
            "hash": to_hex(self.hash) if self.hash else None,
            "telemetryAt": self.telemetry_at,
            "createdAt": iso_utc(self.created_at),
            "updatedAt": iso_utc(self.updated_at),
        }


ACCESS_PENDING = "pending"
ACCESS_APPROVED = "approved"
ACCESS_USED = "used"
ACCESS_EXPIRED = "expired"


@dataclasses.dataclass
class AccessRequest:
    id: str
    vehicle_id: str
    requester: str
    fields: str  # comma-separated on disk and on the wire
    status: str
    token: str | None
    created_at: int
    expires_at: int

    def field_set(self) -> set[str]:
        return {f.strip() for f in self.fields.split(",") if f.strip()}

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "vehicleId": self.vehicle_id,
            "requester": self.requester,
            "fields": self.fields,
            "status": self.status,
            "token": self.token,
            "createdAt": iso_utc(self.created_at),
            "expiresAt": iso_utc(self.expires_at),
        }


@dataclasses.dataclass
class PendingServiceLog:
    id: str
    vehicle_id: str
    description: str
    center_email: str
    center_signature: bytes
    log_hash: bytes
    serviced_at: int
    submitted_at: int

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "vehicleId": self.vehicle_id,
            "description": self.description,
            "centerEmail": self.center_email,
            "centerSignature": to_hex(self.center_signature),
            "logHash": to_hex(self.log_hash),
            "servicedAt": iso_utc(self.serviced_at),
            "submittedAt": iso_utc(self.submitted_at),
        }


@dataclasses.dataclass
class ServiceLog:
    id: str
    vehicle_id: str
    description: str
    serviced_at: int
    center_email: str
    center_signature: bytes
    owner_signature: bytes | None
    log_hash: bytes
    anchor_tx_hash: bytes | None
    status: str  # always "finalized" for rows in this table

    def to_wire(self) -> dict:
        return {
            "id": self.id,
            "vehicleId": self.vehicle_id,
            "description": self.description,
            "servicedAt": iso_utc(self.serviced_at),
            "centerEmail": self.center_email,
            "centerSignature": to_hex(self.center_signature),
            "ownerSignature": to_hex(self.owner_signature) if self.owner_signature else None,
            "logHash": to_hex(self.log_hash),
            "anchorTxHash": to_hex(self.anchor_tx_hash) if self.anchor_tx_hash else None,
            "status": self.status,
        }

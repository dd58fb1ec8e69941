"""Self-description credential for a vehicle plus the consistency check.

The credential is a plain dict in JSON-LD shape because it exists to be
canonically serialized and hashed; a class wrapper would just be in the way.
Two digests matter: the SHA-256 of the credential itself (stored in the
vehicle row) and the Keccak commitment over owner-key-bytes plus credential
(anchored on the ledger and minted into the token).
"""

from __future__ import annotations

import enum

from .clock import iso_utc
from .crypto import canonical_serialize, keccak256, sha256
from .errors import InvalidKey, InvalidVehicle, NoSuchToken
from .models import Vehicle

CREDENTIAL_CONTEXT = "https://www.w3.org/ns/credentials/v2"
CREDENTIAL_ISSUER = "did:web:matter.in"
VEHICLE_URN_PREFIX = "urn:matter:vehicle:"


class ConsistencyStatus(enum.Enum):
    UP_TO_DATE = "UpToDate"
    OUT_OF_DATE = "OutOfDate"
    NOT_ANCHORED = "NotAnchored"


def generate_credential(vehicle: Vehicle) -> dict:
    if not vehicle.vin:
        raise InvalidVehicle("vehicle has no vin")
    return {
        "@context": CREDENTIAL_CONTEXT,
        "id": VEHICLE_URN_PREFIX + vehicle.vin,
        "type": ["VerifiableCredential", "VehiclePassport"],
        "issuer": CREDENTIAL_ISSUER,
        "issuanceDate": iso_utc(vehicle.created_at),
        "credentialSubject": {
            "vehicleVIN": vehicle.vin,
            "model": vehicle.model,
            "manufacturer": vehicle.manufacturer,
            "batteryHealth": vehicle.battery_health,
            "mileage": vehicle.mileage,
            "warrantyValidUntil": iso_utc(vehicle.warranty_expiry),
        },
    }


def credential_digest(cred: dict) -> bytes:
    return sha256(canonical_serialize(cred))


def packed_commitment(public_key: bytes, cred: dict) -> bytes:
    """keccak256 over the raw key bytes concatenated with the canonical
    credential; this is the value that gets anchored and minted."""
    if not public_key:
        raise InvalidKey("empty key material")
    return keccak256(public_key + canonical_serialize(cred))


def verify_passport(vehicle: Vehicle, owner_key: bytes, ledger) -> ConsistencyStatus:
    """Recompute the commitment from current row state and compare it with
    what the ledger holds.  O(1) ledger reads: one token lookup, one anchor
    lookup."""
    if vehicle.vehicle_nft_token_id is None:
        return ConsistencyStatus.NOT_ANCHORED
    try:
        minted_hash = ledger.token_data_hash(vehicle.vehicle_nft_token_id)
    except NoSuchToken:
        return ConsistencyStatus.NOT_ANCHORED
    commitment = packed_commitment(owner_key, generate_credential(vehicle))
    if commitment == minted_hash and ledger.is_anchored(commitment) is not None:
        return ConsistencyStatus.UP_TO_DATE
    return ConsistencyStatus.OUT_OF_DATE

"""Node facade: one object wiring store, ledger, telemetry, disclosure,
service logs, transfers, and threshold proofs together.  The HTTP gateway
and the embedded CLI mode both talk to this class and nothing deeper.

Two invariants are enforced at this layer rather than inside the flows:

* every mutating operation leaves a ledger receipt or a signed audit row,
  so the full history is reconstructible from durable state alone;
* the proof routes source their private inputs from the vehicle row and
  never accept caller-supplied witness values.
"""

from __future__ import annotations

import random
import secrets
import uuid

from . import credential, zkp
from .clock import Clock, ManualClock
from .config import NodeConfig
from .crypto import (
    canonical_serialize,
    generate_keypair,
    keccak256,
    keypair_from_secret,
    to_hex,
)
from .disclosure import DisclosureFlow
from .errors import InvalidState, NotFound, OutOfRange, Unauthorized, Unsupported
from .ledger import Ledger, TxReceipt
from .models import Owner, Vehicle
from .service_log import ServiceLogFlow
from .store import Store, derive_token_id
from .telemetry import TelemetryService
from .transfer import TransferFlow

ROLE_OEM = "OEM"
ROLE_OWNER = "Owner"
ROLE_CENTER = "Center"
ROLE_ANONYMOUS = "Anonymous"

# route segment -> (statement kind, request field carrying the threshold)
ZK_ROUTES = {
    "batteryHealth": ("BatteryHealthGT", "threshold"),
    "mileage": ("MileageLT", "threshold"),
    "warrantyExpiry": ("WarrantyExpiryGT", "timestamp"),
    "accessRequestCount": ("AccessRequestCountLE", "threshold"),
    "serviceLogCount": ("ServiceLogCountGE", "threshold"),
}

# battery health is stored as a float percentage; the comparator works on
# integers, so both witness and threshold move to centipercent
BATTERY_SCALE = 100


class PassportNode:
    def __init__(self, config: NodeConfig | None = None, clock: Clock | None = None):
        self.config = config or NodeConfig()
        id_factory = None
        if self.config.seed is not None:
            if clock is None:
                clock = ManualClock()
            rng = random.Random(self.config.seed)
            id_factory = lambda: str(uuid.UUID(int=rng.getrandbits(128), version=4))  # noqa: E731
            if self.config.admin_secret is None:
                self.admin = generate_keypair(seed=self.config.seed)
        self.clock = clock or Clock()
        if self.config.admin_secret is not None:
            self.admin = keypair_from_secret(int.from_bytes(self.config.admin_secret, "big"))
        elif self.config.seed is None:
            self.admin = generate_keypair()
        self.store = Store(self.config.store_path, clock=self.clock, id_factory=id_factory)
        self.ledger = Ledger(
            self.admin.address, journal_path=self.config.journal_path, clock=self.clock
        )
        self.telemetry = TelemetryService(
            self.config.telemetry_path, clock=self.clock, id_factory=id_factory
        )
        self.disclosure = DisclosureFlow(self.store, self.config.mac_key, clock=self.clock)
        self.service_logs = ServiceLogFlow(self.store, self.ledger, clock=self.clock)
        self.transfers = TransferFlow(
            self.store,
            self.ledger,
            clock=self.clock,
            freshness_ms=self.config.transfer_freshness_ms,
        )
        if self.config.proof_bits == zkp.PROOF_BITS:
            self.proof_params = zkp.setup()
        else:
            self.proof_params = zkp.insecure_small_params(self.config.proof_bits)

    def close(self) -> None:
        self.telemetry.close()
        self.store.close()
        self.ledger.close()

    # -- principals --------------------------------------------------------

    def role_of(self, wallet: bytes) -> str:
        if wallet in self.config.oem_wallets:
            return ROLE_OEM
        if self.store.find_owner_by_wallet(wallet) is not None:
            return ROLE_OWNER
        return ROLE_CENTER

    def register_owner(self, wallet: bytes, name: str, email: str) -> Owner:
        owner = self.store.register_owner(wallet, name, email)
        self.store.append_audit(self.admin, "owner-register", owner.id, None, None)
        return owner

    # -- vehicles ----------------------------------------------------------

    def create_vehicle(self, fields: dict, owner_wallet: bytes) -> Vehicle:
        return self.store.create_vehicle(fields, self.admin, owner_wallet, self.ledger)

    def import_vehicle(self, fields: dict, owner_wallet: bytes) -> Vehicle:
        vehicle = self.store.import_vehicle(fields, owner_wallet)
        self.store.append_audit(self.admin, "vehicle-import", vehicle.id, None, vehicle.hash)
        return vehicle

    def mint_nft(self, vehicle_id: str) -> Vehicle:
        """Anchor and mint for a row imported without a token."""
        with self.store.vehicle_lock(vehicle_id):
            vehicle = self.store.vehicle_by_id(vehicle_id)
            if vehicle.vehicle_nft_token_id is not None:
                raise InvalidState(f"vehicle {vehicle_id} already carries a token")
            owner = self.store.owner_by_id(vehicle.owner_id)
            cred = credential.generate_credential(vehicle)
            commitment = credential.packed_commitment(owner.wallet, cred)
            receipt = self.ledger.anchor_hash(commitment, self.admin.address)
            token_id = derive_token_id(vehicle.id)
            self.ledger.mint(owner.wallet, token_id, commitment, self.admin.address)
            return self.store.update_vehicle(
                vehicle_id,
                anchor_tx_hash=receipt.tx_hash,
                vehicle_nft_token_id=token_id,
                hash=credential.credential_digest(cred),
            )

    def inventory(self) -> dict:
        """All vehicles, grouped by whether an OEM wallet still holds them."""
        production: list[Vehicle] = []
        customer: list[Vehicle] = []
        owner_wallets = {}
        for vehicle in self.store.all_vehicles():
            wallet = owner_wallets.get(vehicle.owner_id)
            if wallet is None:
                wallet = self.store.owner_by_id(vehicle.owner_id).wallet
                owner_wallets[vehicle.owner_id] = wallet
            (production if wallet in self.config.oem_wallets else customer).append(vehicle)
        return {"production": production, "customer": customer}

    def portfolio(self, wallet: bytes) -> list[Vehicle]:
        return self.store.list_by_owner(wallet)

    def vehicle(self, vehicle_id: str) -> Vehicle:
        return self.store.vehicle_by_id(vehicle_id)

    # -- passport consistency ---------------------------------------------

    def passport_status(self, vehicle_id: str) -> dict:
        vehicle = self.store.vehicle_by_id(vehicle_id)
        owner = self.store.owner_by_id(vehicle.owner_id)
        cred = credential.generate_credential(vehicle)
        status = credential.verify_passport(vehicle, owner.wallet, self.ledger)
        return {
            "vehicleId": vehicle.id,
            "status": status.value,
            "digest": to_hex(credential.credential_digest(cred)),
            "storedDigest": to_hex(vehicle.hash) if vehicle.hash else None,
            "anchorTxHash": to_hex(vehicle.anchor_tx_hash) if vehicle.anchor_tx_hash else None,
            "tokenId": str(vehicle.vehicle_nft_token_id)
            if vehicle.vehicle_nft_token_id is not None
            else None,
        }

    def credential_export(self, vehicle_id: str) -> bytes:
        """The credential document in its canonical byte form; hashing the
        returned bytes reproduces the anchored digest."""
        vehicle = self.store.vehicle_by_id(vehicle_id)
        return canonical_serialize(credential.generate_credential(vehicle))

    def reanchor(self, vehicle_id: str) -> dict:
        """Re-anchor the current row state after mutable fields moved.

        Telemetry sync, service logging, and ownership transfer all leave
        the stored digest behind the live row; this recomputes the
        credential, anchors the new owner-bound commitment, repoints the
        token data hash, and stores the fresh digest."""
        with self.store.vehicle_lock(vehicle_id):
            vehicle = self.store.vehicle_by_id(vehicle_id)
            if vehicle.vehicle_nft_token_id is None:
                raise InvalidState("vehicle has no token; mint before re-anchoring")
            owner = self.store.owner_by_id(vehicle.owner_id)
            cred = credential.generate_credential(vehicle)
            commitment = credential.packed_commitment(owner.wallet, cred)
            receipt = self.ledger.anchor_hash(commitment, self.admin.address)
            self.ledger.update_data_hash(
                vehicle.vehicle_nft_token_id, commitment, self.admin.address
            )
            self.store.update_vehicle(
                vehicle_id,
                anchor_tx_hash=receipt.tx_hash,
                hash=credential.credential_digest(cred),
            )
        return self.passport_status(vehicle_id)

    # -- selective disclosure ----------------------------------------------

    def request_access(self, vehicle_id: str, requester: str, fields: list[str]):
        request = self.disclosure.create_request(vehicle_id, requester, fields)
        self.store.append_audit(self.admin, "access-request", request.id, None, None)
        return request

    def approve_access(self, request_id: str, owner_wallet: bytes) -> str:
        token = self.disclosure.approve(request_id, owner_wallet)
        self.store.append_audit(self.admin, "access-approve", request_id, None, None)
        return token

    def redeem_access(self, token: str) -> dict:
        payload = self.disclosure.redeem(token)
        # the token itself never lands in durable state; its digest is
        # enough to correlate the redemption with the grant
        self.store.append_audit(
            self.admin, "access-redeem", to_hex(keccak256(token.encode())), None, None
        )
        return payload

    def pending_approvals(self, owner_wallet: bytes):
        return self.disclosure.list_pending_for_owner(owner_wallet)

    # -- service logs ------------------------------------------------------

    def submit_service_log(
        self,
        vehicle_id: str,
        description: str,
        center_email: str,
        center_wallet: bytes,
        center_signature: bytes,
        serviced_at: int,
    ):
        pending = self.service_logs.submit_log(
            vehicle_id,
            description,
            center_email,
            center_wallet,
            center_signature,
            serviced_at,
        )
        self.store.append_audit(self.admin, "service-submit", pending.id, None, pending.log_hash)
        return pending

    def approve_service_log(self, pending_id: str, owner_signature: bytes, owner_wallet: bytes):
        # the anchor receipt is the trail entry here
        return self.service_logs.approve_log(pending_id, owner_signature, owner_wallet)

    def pending_service_logs(self, owner_wallet: bytes):
        return self.service_logs.list_pending_logs(owner_wallet)

    def vehicle_service_logs(self, vehicle_id: str):
        return self.service_logs.logs_for_vehicle(vehicle_id)

    # -- transfers ---------------------------------------------------------

    def initiate_transfer(self, payload: dict, seller_signature: bytes) -> dict:
        record = self.transfers.initiate_transfer(payload, seller_signature)
        self.store.append_audit(self.admin, "transfer-initiate", payload["vehicleId"], None, None)
        return record

    def confirm_transfer(
        self,
        payload: dict,
        seller_signature: bytes,
        buyer_signature: bytes,
        buyer_wallet: bytes,
        and_finalize: bool = False,
    ) -> dict:
        record = self.transfers.confirm_transfer(
            payload, seller_signature, buyer_signature, buyer_wallet
        )
        self.store.append_audit(self.admin, "transfer-confirm", payload["vehicleId"], None, None)
        if and_finalize:
            # the seller's signature over this exact payload is treated as
            # standing authorization for the chain half of the swap
            from_wallet = bytes.fromhex(payload["from"][2:])
            self.finalize_transfer(payload["vehicleId"], from_wallet)
            record = self.store.transfer_record(payload["vehicleId"])
        return record

    def finalize_transfer(self, vehicle_id: str, caller_wallet: bytes) -> TxReceipt:
        return self.transfers.finalize_transfer(vehicle_id, caller_wallet)

    def transfer_status(self, vehicle_id: str) -> dict:
        self.store.vehicle_by_id(vehicle_id)  # NotFound if missing
        record = self.store.transfer_record(vehicle_id)
        if record is None:
            raise NotFound(f"no transfer on file for vehicle {vehicle_id}")
        return {
            "vehicleId": record["vehicle_id"],
            "status": record["status"],
            "txHash": to_hex(record["tx_hash"]) if record["tx_hash"] else None,
            "updatedAt": record["updated_at"],
        }

    def sell_vehicle(self, payload: dict, seller_signature: bytes, buyer_signature: bytes) -> dict:
        """Point-of-sale convenience: run all three transfer steps in one
        call, collecting a status event per step.  Progress is also
        observable through the transfer status endpoint while this runs."""
        events = []

        def mark(step: str):
            events.append({"step": step, "at": self.clock.now_ms()})

        self.initiate_transfer(payload, seller_signature)
        mark("initiated")
        buyer_wallet = bytes.fromhex(payload["to"][2:])
        self.transfers.confirm_transfer(payload, seller_signature, buyer_signature, buyer_wallet)
        mark("confirmed")
        seller_wallet = bytes.fromhex(payload["from"][2:])
        receipt = self.finalize_transfer(payload["vehicleId"], seller_wallet)
        mark("finalized")
        self.store.append_audit(self.admin, "vehicle-sell", payload["vehicleId"], None, None)
        return {
            "vehicleId": payload["vehicleId"],
            "status": "finalized",
            "txHash": to_hex(receipt.tx_hash),
            "events": events,
        }

    # -- telemetry ---------------------------------------------------------

    def provision_telemetry_key(self, vehicle_id: str) -> tuple[str, bytes]:
        self.store.vehicle_by_id(vehicle_id)  # NotFound if missing
        key_id, secret = self.telemetry.provision_key(vehicle_id)
        self.store.append_audit(self.admin, "telemetry-key", vehicle_id, None, None)
        return key_id, secret

    def ingest_telemetry(
        self, key_id: str, vehicle_id: str, points: list[dict], mac: bytes, unit: str = "km"
    ):
        bound_vehicle, secret = self.telemetry.key_lookup(key_id)
        if bound_vehicle != vehicle_id:
            raise Unauthorized("API key is bound to a different vehicle")
        return self.telemetry.ingest_batch(vehicle_id, points, mac, secret, unit=unit)

    def latest_telemetry(self, vehicle_id: str) -> dict | None:
        self.store.vehicle_by_id(vehicle_id)
        return self.telemetry.latest(vehicle_id)

    def sync_telemetry(self, vehicle_id: str):
        return self.telemetry.sync_snapshot(vehicle_id, self.store, self.admin)

    def telemetry_aggregates(self, vehicle_id: str):
        self.store.vehicle_by_id(vehicle_id)
        return self.telemetry.aggregates(vehicle_id)

    # -- threshold proofs --------------------------------------------------

    def _witness_for(self, kind: str, vehicle: Vehicle) -> int:
        if kind == "BatteryHealthGT":
            return round(vehicle.battery_health * BATTERY_SCALE)
        if kind == "MileageLT":
            return vehicle.mileage
        if kind == "WarrantyExpiryGT":
            return vehicle.warranty_expiry
        if kind == "AccessRequestCountLE":
            return len(self.store.requests_for_vehicle(vehicle.id))
        if kind == "ServiceLogCountGE":
            return len(self.store.service_logs_for_vehicle(vehicle.id))
        raise NotFound(f"unknown statement kind {kind!r}")

    def _scale_threshold(self, kind: str, raw) -> int:
        if isinstance(raw, bool) or not isinstance(raw, (int, float)):
            raise OutOfRange("threshold must be a number")
        if kind == "BatteryHealthGT":
            return round(raw * BATTERY_SCALE)
        if isinstance(raw, float):
            if not raw.is_integer():
                raise OutOfRange(f"{kind} takes an integer threshold")
            raw = int(raw)
        return raw

    def prove_threshold(self, route: str, vehicle_id: str, raw_threshold) -> dict:
        if route not in ZK_ROUTES:
            raise NotFound(f"no proof route named {route!r}")
        kind, _ = ZK_ROUTES[route]
        vehicle = self.store.vehicle_by_id(vehicle_id)
        value = self._witness_for(kind, vehicle)
        threshold = self._scale_threshold(kind, raw_threshold)
        params = self.proof_params
        if not 0 <= value < (1 << params.bits):
            raise Unsupported(
                f"vehicle value {value} does not fit the {params.bits}-bit comparator"
            )
        blinding = secrets.randbelow(params.group.q)
        commitment = zkp.commit(params, value, blinding)
        statement = zkp.ThresholdStatement(kind=kind, threshold=threshold, commitment=commitment)
        proof, public_signals = zkp.prove(params, statement, value, blinding)
        blob = zkp.serialize_proof(params, proof)
        return {
            "kind": kind,
            "commitment": to_hex(commitment.to_bytes(params.group.element_size, "big")),
            "proof": to_hex(blob),
            "publicSignals": public_signals,
        }

    def vkey(self, route: str) -> dict:
        if route not in ZK_ROUTES:
            raise NotFound(f"no proof route named {route!r}")
        kind, _ = ZK_ROUTES[route]
        return zkp.verification_params(kind, self.proof_params)

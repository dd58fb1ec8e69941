"""Authoritative relational state: owners, vehicles, access requests, and
service logs, stored in an embedded SQLite database with WAL journaling.

Column names are the camelCase wire names so the schema reads like the
entity tables it mirrors; the row objects translate to snake_case
attributes.  Timestamps live as unix seconds and are only rendered
ISO-8601 at the edges.
"""

from __future__ import annotations

import csv
import sqlite3
import threading
import uuid
from collections import defaultdict

from . import credential
from .clock import Clock
from .crypto import KeyPair, canonical_serialize, from_hex, keccak256, sign, to_hex
from .errors import AlreadyRegistered, DuplicateVin, NotFound
from .models import (
    AccessRequest,
    Owner,
    PendingServiceLog,
    ServiceLog,
    Vehicle,
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS owners (
    id TEXT PRIMARY KEY,
    name TEXT NOT NULL,
    email TEXT NOT NULL,
    wallet TEXT NOT NULL UNIQUE,
    createdAt INTEGER NOT NULL,
    updatedAt INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS vehicles (
    id TEXT PRIMARY KEY,
    vin TEXT NOT NULL UNIQUE,
    model TEXT NOT NULL,
    manufacturer TEXT NOT NULL,
    ownerId TEXT NOT NULL REFERENCES owners(id),
    batteryHealth REAL NOT NULL,
    mileage INTEGER NOT NULL,
    chargingCycles INTEGER NOT NULL,
    drivingPattern TEXT NOT NULL,
    warrantyExpiry INTEGER NOT NULL,
    anchorTxHash TEXT,
    vehicleNftTokenId TEXT,
    nftTransferPending INTEGER NOT NULL DEFAULT 0,
    hash TEXT,
    telemetryAt INTEGER NOT NULL DEFAULT 0,
    createdAt INTEGER NOT NULL,
    updatedAt INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS access_requests (
    id TEXT PRIMARY KEY,
    vehicleId TEXT NOT NULL REFERENCES vehicles(id),
    requester TEXT NOT NULL,
    fields TEXT NOT NULL,
    status TEXT NOT NULL,
    token TEXT,
    createdAt INTEGER NOT NULL,
    expiresAt INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS pending_service_logs (
    id TEXT PRIMARY KEY,
    vehicleId TEXT NOT NULL REFERENCES vehicles(id),
    description TEXT NOT NULL,
    centerEmail TEXT NOT NULL,
    centerSignature TEXT NOT NULL,
    logHash TEXT NOT NULL UNIQUE,
    servicedAt INTEGER NOT NULL,
    submittedAt INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS service_logs (
    id TEXT PRIMARY KEY,
    vehicleId TEXT NOT NULL REFERENCES vehicles(id),
    description TEXT NOT NULL,
    servicedAt INTEGER NOT NULL,
    centerEmail TEXT NOT NULL,
    centerSignature TEXT NOT NULL,
    ownerSignature TEXT,
    logHash TEXT NOT NULL UNIQUE,
    anchorTxHash TEXT,
    status TEXT NOT NULL
);
CREATE TABLE IF NOT EXISTS transfers (
    vehicleId TEXT PRIMARY KEY REFERENCES vehicles(id),
    payload TEXT NOT NULL,
    sellerSignature TEXT NOT NULL,
    buyerSignature TEXT,
    status TEXT NOT NULL,
    txHash TEXT,
    createdAt INTEGER NOT NULL,
    updatedAt INTEGER NOT NULL
);
CREATE TABLE IF NOT EXISTS audit_log (
    id TEXT PRIMARY KEY,
    at INTEGER NOT NULL,
    actor TEXT NOT NULL,
    action TEXT NOT NULL,
    subject TEXT NOT NULL,
    prevDigest TEXT,
    newDigest TEXT,
    signature TEXT NOT NULL
);
"""

EXPORTABLE_TABLES = (
    "owners",
    "vehicles",
    "access_requests",
    "pending_service_logs",
    "service_logs",
    "audit_log",
)


def derive_token_id(vehicle_id: str) -> int:
    """Low 64 bits of the keccak digest of the vehicle UUID; both the store
    and any external verifier can re-derive it."""
    return int.from_bytes(keccak256(vehicle_id.encode("utf-8"))[-8:], "big")


def _opt_hex(value: str | None) -> bytes | None:
    return from_hex(value) if value else None


class Store:
    """All reads/writes go through one connection guarded by a lock; flows
    that need read-modify-write atomicity per vehicle take the vehicle lock
    first."""

    def __init__(
        self,
        db_path: str = ":memory:",
        clock: Clock | None = None,
        id_factory=None,
    ):
        self._clock = clock or Clock()
        self._ids = id_factory or (lambda: str(uuid.uuid4()))
        self._conn = sqlite3.connect(db_path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA foreign_keys=ON")
        self._conn.executescript(_SCHEMA)
        self._lock = threading.RLock()
        self._vehicle_locks: dict[str, threading.RLock] = defaultdict(threading.RLock)

    def close(self) -> None:
        self._conn.close()

    def new_id(self) -> str:
        return self._ids()

    def vehicle_lock(self, vehicle_id: str) -> threading.RLock:
        with self._lock:
            return self._vehicle_locks[vehicle_id]

    # -- owners ------------------------------------------------------------

    def register_owner(self, wallet: bytes, name: str, email: str) -> Owner:
        now = self._clock.now_s()
        owner = Owner(
            id=self._ids(), name=name, email=email, wallet=wallet, created_at=now, updated_at=now
        )
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO owners VALUES (?,?,?,?,?,?)",
                    (owner.id, name, email, to_hex(wallet), now, now),
                )
                self._conn.commit()
            except sqlite3.IntegrityError as exc:
                self._conn.rollback()
                raise AlreadyRegistered(f"wallet {to_hex(wallet)} already registered") from exc
        return owner

    def _owner_from_row(self, row) -> Owner:
        return Owner(
            id=row["id"],
            name=row["name"],
            email=row["email"],
            wallet=from_hex(row["wallet"]),
            created_at=row["createdAt"],
            updated_at=row["updatedAt"],
        )

    def owner_by_wallet(self, wallet: bytes) -> Owner:
        row = self._conn.execute(
            "SELECT * FROM owners WHERE wallet = ?", (to_hex(wallet),)
        ).fetchone()
        if row is None:
            raise NotFound(f"no owner with wallet {to_hex(wallet)}")
        return self._owner_from_row(row)

    def owner_by_id(self, owner_id: str) -> Owner:
        row = self._conn.execute("SELECT * FROM owners WHERE id = ?", (owner_id,)).fetchone()
        if row is None:
            raise NotFound(f"no owner {owner_id}")
        return self._owner_from_row(row)

    def find_owner_by_wallet(self, wallet: bytes) -> Owner | None:
        try:
            return self.owner_by_wallet(wallet)
        except NotFound:
            return None

    # -- vehicles ----------------------------------------------------------

    def create_vehicle(
        self,
        fields: dict,
        admin: KeyPair,
        initial_owner_wallet: bytes,
        ledger,
    ) -> Vehicle:
        """Insert the row, generate its credential, anchor the packed
        commitment, and mint the vehicle-bound token, in that order."""
        owner = self.owner_by_wallet(initial_owner_wallet)
        now = self._clock.now_s()
        vehicle = Vehicle(
            id=self._ids(),
            vin=fields["vin"],
            model=fields["model"],
            manufacturer=fields["manufacturer"],
            owner_id=owner.id,
            battery_health=float(fields.get("batteryHealth", 100.0)),
            mileage=int(fields.get("mileage", 0)),
            charging_cycles=int(fields.get("chargingCycles", 0)),
            driving_pattern=fields.get("drivingPattern", "unknown"),
            warranty_expiry=int(fields["warrantyExpiry"]),
            anchor_tx_hash=None,
            vehicle_nft_token_id=None,
            nft_transfer_pending=False,
            hash=None,
            telemetry_at=0,
            created_at=now,
            updated_at=now,
        )
        with self._lock:
            existing = self._conn.execute(
                "SELECT id FROM vehicles WHERE vin = ?", (vehicle.vin,)
            ).fetchone()
            if existing is not None:
                raise DuplicateVin(f"vin {vehicle.vin} already registered")

            cred = credential.generate_credential(vehicle)
            commitment = credential.packed_commitment(initial_owner_wallet, cred)
            receipt = ledger.anchor_hash(commitment, admin.address)
            token_id = derive_token_id(vehicle.id)
            ledger.mint(initial_owner_wallet, token_id, commitment, admin.address)

            vehicle.anchor_tx_hash = receipt.tx_hash
            vehicle.vehicle_nft_token_id = token_id
            vehicle.hash = credential.credential_digest(cred)
            self._conn.execute(
                "INSERT INTO vehicles VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?)",
                (
                    vehicle.id,
                    vehicle.vin,
                    vehicle.model,
                    vehicle.manufacturer,
                    vehicle.owner_id,
                    vehicle.battery_health,
                    vehicle.mileage,
                    vehicle.charging_cycles,
                    vehicle.driving_pattern,
                    vehicle.warranty_expiry,
                    to_hex(vehicle.anchor_tx_hash),
                    str(token_id),
                    0,
                    to_hex(vehicle.hash),
                    0,
                    now,
                    now,
                ),
            )
            self._conn.commit()
        return vehicle

    def import_vehicle(self, fields: dict, owner_wallet: bytes) -> Vehicle:
        """Insert a legacy-stock row with no anchor and no token.  The row
        becomes a full passport once the mint endpoint runs against it."""
        owner = self.owner_by_wallet(owner_wallet)
        now = self._clock.now_s()
        vehicle = Vehicle(
            id=self._ids(),
            vin=fields["vin"],
            model=fields["model"],
            manufacturer=fields["manufacturer"],
            owner_id=owner.id,
            battery_health=float(fields.get("batteryHealth", 100.0)),
            mileage=int(fields.get("mileage", 0)),
            charging_cycles=int(fields.get("chargingCycles", 0)),
            driving_pattern=fields.get("drivingPattern", "unknown"),
            warranty_expiry=int(fields["warrantyExpiry"]),
            anchor_tx_hash=None,
            vehicle_nft_token_id=None,
            nft_transfer_pending=False,
            hash=None,
            telemetry_at=0,
            created_at=now,
            updated_at=now,
        )
        with self._lock:
            existing = self._conn.execute(
                "SELECT id FROM vehicles WHERE vin = ?", (vehicle.vin,)
            ).fetchone()
            if existing is not None:
                raise DuplicateVin(f"vin {vehicle.vin} already registered")
            vehicle.hash = credential.credential_digest(credential.generate_credential(vehicle))
            self._conn.execute(
                "INSERT INTO vehicles VALUES (?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?,?)",
                (
                    vehicle.id,
                    vehicle.vin,
                    vehicle.model,
                    vehicle.manufacturer,
                    vehicle.owner_id,
                    vehicle.battery_health,
                    vehicle.mileage,
                    vehicle.charging_cycles,
                    vehicle.driving_pattern,
                    vehicle.warranty_expiry,
                    None,
                    None,
                    0,
                    to_hex(vehicle.hash),
                    0,
                    now,
                    now,
                ),
            )
            self._conn.commit()
        return vehicle

    def _vehicle_from_row(self, row) -> Vehicle:
        return Vehicle(
            id=row["id"],
            vin=row["vin"],
            model=row["model"],
            manufacturer=row["manufacturer"],
            owner_id=row["ownerId"],
            battery_health=row["batteryHealth"],
            mileage=row["mileage"],
            charging_cycles=row["chargingCycles"],
            driving_pattern=row["drivingPattern"],
            warranty_expiry=row["warrantyExpiry"],
            anchor_tx_hash=_opt_hex(row["anchorTxHash"]),
            vehicle_nft_token_id=int(row["vehicleNftTokenId"])
            if row["vehicleNftTokenId"]
            else None,
            nft_transfer_pending=bool(row["nftTransferPending"]),
            hash=_opt_hex(row["hash"]),
            telemetry_at=row["telemetryAt"],
            created_at=row["createdAt"],
            updated_at=row["updatedAt"],
        )

    def vehicle_by_id(self, vehicle_id: str) -> Vehicle:
        row = self._conn.execute("SELECT * FROM vehicles WHERE id = ?", (vehicle_id,)).fetchone()
        if row is None:
            raise NotFound(f"no vehicle {vehicle_id}")
        return self._vehicle_from_row(row)

    def vehicle_by_vin(self, vin: str) -> Vehicle:
        row = self._conn.execute("SELECT * FROM vehicles WHERE vin = ?", (vin,)).fetchone()
        if row is None:
            raise NotFound(f"no vehicle with vin {vin}")
        return self._vehicle_from_row(row)

    def list_by_owner(self, wallet: bytes) -> list[Vehicle]:
        owner = self.owner_by_wallet(wallet)
        rows = self._conn.execute(
            "SELECT * FROM vehicles WHERE ownerId = ? ORDER BY createdAt, id", (owner.id,)
        ).fetchall()
        return [self._vehicle_from_row(r) for r in rows]

    def all_vehicles(self) -> list[Vehicle]:
        rows = self._conn.execute("SELECT * FROM vehicles ORDER BY createdAt, id").fetchall()
        return [self._vehicle_from_row(row) for row in rows]

    def update_vehicle(self, vehicle_id: str, **changes) -> Vehicle:
        """Mutate named columns (snake_case keys) and bump updatedAt."""
        column_for = {
            "model": "model",
            "manufacturer": "manufacturer",
            "owner_id": "ownerId",
            "battery_health": "batteryHealth",
            "mileage": "mileage",
            "charging_cycles": "chargingCycles",
            "driving_pattern": "drivingPattern",
            "warranty_expiry": "warrantyExpiry",
            "anchor_tx_hash": "anchorTxHash",
            "vehicle_nft_token_id": "vehicleNftTokenId",
            "nft_transfer_pending": "nftTransferPending",
            "hash": "hash",
            "telemetry_at": "telemetryAt",
        }
        sets = []
        values = []
        for key, value in changes.items():
            column = column_for[key]
            if key in ("anchor_tx_hash", "hash") and isinstance(value, bytes):
                value = to_hex(value)
            if key == "vehicle_nft_token_id":
                value = str(value)
            if key == "nft_transfer_pending":
                value = int(bool(value))
            sets.append(f"{column} = ?")
            values.append(value)
        sets.append("updatedAt = ?")
        values.append(self._clock.now_s())
        values.append(vehicle_id)
        with self._lock:
            cur = self._conn.execute(
                f"UPDATE vehicles SET {', '.join(sets)} WHERE id = ?", values
            )
            self._conn.commit()
        if cur.rowcount == 0:
            raise NotFound(f"no vehicle {vehicle_id}")
        return self.vehicle_by_id(vehicle_id)

    # -- access requests ---------------------------------------------------

    def insert_access_request(self, request: AccessRequest) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO access_requests VALUES (?,?,?,?,?,?,?,?)",
                (
                    request.id,
                    request.vehicle_id,
                    request.requester,
                    request.fields,
                    request.status,
                    request.token,
                    request.created_at,
                    request.expires_at,
                ),
            )
            self._conn.commit()

    def _request_from_row(self, row) -> AccessRequest:
        return AccessRequest(
            id=row["id"],
            vehicle_id=row["vehicleId"],
            requester=row["requester"],
            fields=row["fields"],
            status=row["status"],
            token=row["token"],
            created_at=row["createdAt"],
            expires_at=row["expiresAt"],
        )

    def access_request(self, request_id: str) -> AccessRequest:
        row = self._conn.execute(
            "SELECT * FROM access_requests WHERE id = ?", (request_id,)
        ).fetchone()
        if row is None:
            raise NotFound(f"no access request {request_id}")
        return self._request_from_row(row)

    def requests_for_vehicle(self, vehicle_id: str) -> list[AccessRequest]:
        rows = self._conn.execute(
            "SELECT * FROM access_requests WHERE vehicleId = ? ORDER BY createdAt, id",
            (vehicle_id,),
        ).fetchall()
        return [self._request_from_row(r) for r in rows]

    def transition_request(
        self,
        request_id: str,
        from_status: str,
        to_status: str,
        token: str | None = None,
        expires_at: int | None = None,
    ) -> bool:
        """Compare-and-swap on status; returns False if the row was not in
        from_status (somebody else won the race or the state is wrong)."""
        sets = ["status = ?"]
        values: list = [to_status]
        if token is not None:
            sets.append("token = ?")
            values.append(token)
        if expires_at is not None:
            sets.append("expiresAt = ?")
            values.append(expires_at)
        values.extend([request_id, from_status])
        with self._lock:
            cur = self._conn.execute(
                f"UPDATE access_requests SET {', '.join(sets)} WHERE id = ? AND status = ?",
                values,
            )
            self._conn.commit()
        return cur.rowcount == 1

    def stale_pending_requests(self, now: int) -> list[str]:
        rows = self._conn.execute(
            "SELECT id FROM access_requests WHERE status = ? AND expiresAt <= ?",
            ("pending", now),
        ).fetchall()
        return [r["id"] for r in rows]

    # -- service logs ------------------------------------------------------

    def insert_pending_log(self, log: PendingServiceLog) -> None:
        with self._lock:
            self._conn.execute(
                "INSERT INTO pending_service_logs VALUES (?,?,?,?,?,?,?,?)",
                (
                    log.id,
                    log.vehicle_id,
                    log.description,
                    log.center_email,
                    to_hex(log.center_signature),
                    to_hex(log.log_hash),
                    log.serviced_at,
                    log.submitted_at,
                ),
            )
            self._conn.commit()

    def _pending_from_row(self, row) -> PendingServiceLog:
        return PendingServiceLog(
            id=row["id"],
            vehicle_id=row["vehicleId"],
            description=row["description"],
            center_email=row["centerEmail"],
            center_signature=from_hex(row["centerSignature"]),
            log_hash=from_hex(row["logHash"]),
            serviced_at=row["servicedAt"],
            submitted_at=row["submittedAt"],
        )

    def pending_log(self, pending_id: str) -> PendingServiceLog:
        row = self._conn.execute(
            "SELECT * FROM pending_service_logs WHERE id = ?", (pending_id,)
        ).fetchone()
        if row is None:
            raise NotFound(f"no pending log {pending_id}")
        return self._pending_from_row(row)

    def pending_log_by_hash(self, log_hash: bytes) -> PendingServiceLog | None:
        row = self._conn.execute(
            "SELECT * FROM pending_service_logs WHERE logHash = ?", (to_hex(log_hash),)
        ).fetchone()
        return self._pending_from_row(row) if row else None

    def pending_logs_for_owner(self, owner_id: str) -> list[PendingServiceLog]:
        rows = self._conn.execute(
            "SELECT p.* FROM pending_service_logs p JOIN vehicles v ON p.vehicleId = v.id"
            " WHERE v.ownerId = ? ORDER BY p.submittedAt, p.id",
            (owner_id,),
        ).fetchall()
        return [self._pending_from_row(r) for r in rows]

    def service_log_by_hash(self, log_hash: bytes) -> ServiceLog | None:
        row = self._conn.execute(
            "SELECT * FROM service_logs WHERE logHash = ?", (to_hex(log_hash),)
        ).fetchone()
        return self._service_log_from_row(row) if row else None

    def _service_log_from_row(self, row) -> ServiceLog:
        return ServiceLog(
            id=row["id"],
            vehicle_id=row["vehicleId"],
            description=row["description"],
            serviced_at=row["servicedAt"],
            center_email=row["centerEmail"],
            center_signature=from_hex(row["centerSignature"]),
            owner_signature=_opt_hex(row["ownerSignature"]),
            log_hash=from_hex(row["logHash"]),
            anchor_tx_hash=_opt_hex(row["anchorTxHash"]),
            status=row["status"],
        )

    def service_logs_for_vehicle(self, vehicle_id: str) -> list[ServiceLog]:
        rows = self._conn.execute(
            "SELECT * FROM service_logs WHERE vehicleId = ? ORDER BY servicedAt, id",
            (vehicle_id,),
        ).fetchall()
        return [self._service_log_from_row(r) for r in rows]

    def finalize_service_log(self, pending_id: str, final: ServiceLog) -> None:
        """Insert the finalized row and delete the pending row in one
        transaction; exactly one of the two rows survives any crash."""
        with self._lock:
            try:
                self._conn.execute(
                    "INSERT INTO service_logs VALUES (?,?,?,?,?,?,?,?,?,?)",
                    (
                        final.id,
                        final.vehicle_id,
                        final.description,
                        final.serviced_at,
                        final.center_email,
                        to_hex(final.center_signature),
                        to_hex(final.owner_signature),
                        to_hex(final.log_hash),
                        to_hex(final.anchor_tx_hash),
                        final.status,
                    ),
                )
                cur = self._conn.execute(
                    "DELETE FROM pending_service_logs WHERE id = ?", (pending_id,)
                )
                if cur.rowcount != 1:
                    raise NotFound(f"no pending log {pending_id}")
                self._conn.commit()
            except BaseException:
                self._conn.rollback()
                raise

    # -- transfers ---------------------------------------------------------

    def insert_transfer(self, vehicle_id: str, payload_json: str, seller_sig: bytes) -> None:
        now = self._clock.now_s()
        with self._lock:
            # a finished transfer row may be replaced by a new one
            self._conn.execute(
                "DELETE FROM transfers WHERE vehicleId = ? AND status = 'finalized'",
                (vehicle_id,),
            )
            self._conn.execute(
                "INSERT INTO transfers VALUES (?,?,?,?,?,?,?,?)",
                (vehicle_id, payload_json, to_hex(seller_sig), None, "pending", None, now, now),
            )
            self._conn.commit()

    def transfer_record(self, vehicle_id: str) -> dict | None:
        row = self._conn.execute(
            "SELECT * FROM transfers WHERE vehicleId = ?", (vehicle_id,)
        ).fetchone()
        if row is None:
            return None
        return {
            "vehicle_id": row["vehicleId"],
            "payload_json": row["payload"],
            "seller_signature": from_hex(row["sellerSignature"]),
            "buyer_signature": _opt_hex(row["buyerSignature"]),
            "status": row["status"],
            "tx_hash": _opt_hex(row["txHash"]),
            "created_at": row["createdAt"],
            "updated_at": row["updatedAt"],
        }

    def update_transfer(
        self,
        vehicle_id: str,
        status: str,
        buyer_sig: bytes | None = None,
        tx_hash: bytes | None = None,
    ) -> None:
        sets = ["status = ?", "updatedAt = ?"]
        values: list = [status, self._clock.now_s()]
        if buyer_sig is not None:
            sets.append("buyerSignature = ?")
            values.append(to_hex(buyer_sig))
        if tx_hash is not None:
            sets.append("txHash = ?")
            values.append(to_hex(tx_hash))
        values.append(vehicle_id)
        with self._lock:
            self._conn.execute(
                f"UPDATE transfers SET {', '.join(sets)} WHERE vehicleId = ?", values
            )
            self._conn.commit()

    def delete_transfer(self, vehicle_id: str) -> None:
        with self._lock:
            self._conn.execute("DELETE FROM transfers WHERE vehicleId = ?", (vehicle_id,))
            self._conn.commit()

    # -- audits ------------------------------------------------------------

    def append_audit(
        self,
        signer: KeyPair,
        action: str,
        subject: str,
        prev_digest: bytes | None,
        new_digest: bytes | None,
    ) -> dict:
        """Append a node-signed audit row.  The signature covers the keccak
        digest of the canonical row body, so any later edit to the row is
        detectable with the node's public address alone."""
        row = {
            "id": self._ids(),
            "at": self._clock.now_s(),
            "actor": to_hex(signer.address),
            "action": action,
            "subject": subject,
            "prevDigest": to_hex(prev_digest) if prev_digest else None,
            "newDigest": to_hex(new_digest) if new_digest else None,
        }
        signature = sign(signer.secret, keccak256(canonical_serialize(row)))
        with self._lock:
            self._conn.execute(
                "INSERT INTO audit_log VALUES (?,?,?,?,?,?,?,?)",
                (
                    row["id"],
                    row["at"],
                    row["actor"],
                    row["action"],
                    row["subject"],
                    row["prevDigest"],
                    row["newDigest"],
                    to_hex(signature),
                ),
            )
            self._conn.commit()
        row["signature"] = to_hex(signature)
        return row

    def audit_rows(self, subject: str | None = None) -> list[dict]:
        if subject is None:
            rows = self._conn.execute("SELECT * FROM audit_log ORDER BY at, rowid").fetchall()
        else:
            rows = self._conn.execute(
                "SELECT * FROM audit_log WHERE subject = ? ORDER BY at, rowid", (subject,)
            ).fetchall()
        return [dict(r) for r in rows]

    def export_csv(self, table: str, path: str) -> int:
        """Dump one table to CSV; returns the number of rows written."""
        if table not in EXPORTABLE_TABLES:
            raise NotFound(f"unknown table {table}")
        rows = self._conn.execute(f"SELECT * FROM {table}").fetchall()
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            if rows:
                writer.writerow(rows[0].keys())
            for row in rows:
                writer.writerow(list(row))
        return len(rows)

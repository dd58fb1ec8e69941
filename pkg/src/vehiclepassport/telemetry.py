"""Time-series side of the node: authenticated batch ingestion, outlier
screening, snapshot sync into the authoritative vehicle row, and the
aggregates served to dashboards.

Telemetry lives in its own SQLite database, physically apart from the
entity store.  Rows cluster on (vehicleId, timestamp) and carry a derived
week number so scans stay contiguous per vehicle per week; aged-segment
compression is deliberately not implemented.

Raw rows never leave this module through the HTTP surface; callers that
are not the ingest path get aggregates or the single latest frame.
"""

from __future__ import annotations

import dataclasses
import hmac as _hmac
import math
import secrets
import sqlite3
import threading
import uuid
from collections import defaultdict

import numpy as np

from . import credential
from .clock import Clock
from .crypto import KeyPair, canonical_serialize, hmac_sha256, to_hex
from .errors import BatchTooLarge, MacMismatch, NotFound, OutOfRange, Unsupported

MAX_BATCH = 250
OUTLIER_SIGMA = 7.0
OUTLIER_MIN_SAMPLES = 30
OUTLIER_WINDOW = 1000
MI_TO_KM = 1.609344
DAY_MS = 86_400_000
SLOPE_WINDOW_DAYS = 30

_POINT_FIELDS = frozenset(
    {"vehicleId", "timestamp", "mileage", "batteryHealth", "chargingCycles", "drivingPattern"}
)

_SCHEMA = """
CREATE TABLE IF NOT EXISTS telemetry (
    vehicleId TEXT NOT NULL,
    timestamp INTEGER NOT NULL,
    mileage REAL NOT NULL,
    batteryHealth REAL NOT NULL,
    chargingCycles INTEGER NOT NULL,
    drivingPattern TEXT NOT NULL,
    week INTEGER NOT NULL,
    PRIMARY KEY (vehicleId, timestamp)
) WITHOUT ROWID;
CREATE INDEX IF NOT EXISTS telemetry_by_week ON telemetry (vehicleId, week);
CREATE TABLE IF NOT EXISTS api_keys (
    keyId TEXT PRIMARY KEY,
    vehicleId TEXT NOT NULL,
    secret TEXT NOT NULL
);
"""


@dataclasses.dataclass
class IngestReport:
    accepted: int
    duplicates: int
    outliers: int

    def to_wire(self) -> dict:
        return {
            "accepted": self.accepted,
            "duplicates": self.duplicates,
            "outliers": self.outliers,
        }


@dataclasses.dataclass
class SyncReport:
    updated: bool
    prev_digest: bytes | None
    new_digest: bytes | None

    def to_wire(self) -> dict:
        return {
            "updated": self.updated,
            "prevDigest": to_hex(self.prev_digest) if self.prev_digest else None,
            "newDigest": to_hex(self.new_digest) if self.new_digest else None,
        }


@dataclasses.dataclass
class AggregateReport:
    battery_health_slope: float | None  # percent per day, None until 2+ samples
    daily_km: list[float]
    charging_cycles: int | None

    def to_wire(self) -> dict:
        return {
            "batteryHealthSlope": self.battery_health_slope,
            "dailyKm": self.daily_km,
            "chargingCycles": self.charging_cycles,
        }


def _require_number(value, label: str):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise OutOfRange(f"{label} must be numeric")
    if isinstance(value, float) and not math.isfinite(value):
        raise OutOfRange(f"{label} must be finite")
    return value


class TelemetryService:
    """Owns the telemetry database and its per-vehicle batch keys.

    Batches are authenticated with an HMAC computed by the sender over the
    canonical serialization of the point list exactly as transmitted, so
    verification happens before any normalization touches the data.  Unit
    normalization (mi -> km) and invariant checks come next, then the
    outlier screen: once a vehicle has at least OUTLIER_MIN_SAMPLES stored
    frames, any point further than OUTLIER_SIGMA population deviations
    from the trailing-window mean of any numeric field is dropped.  The
    window statistics are computed once when the batch arrives, so a batch
    cannot drag the mean toward its own outliers.  A flat window (sigma 0)
    rejects every value that moves at all; that is deliberate.
    """

    def __init__(self, db_path: str = ":memory:", clock: Clock | None = None, id_factory=None):
        self._clock = clock or Clock()
        self._ids = id_factory or (lambda: str(uuid.uuid4()))
        self._conn = sqlite3.connect(db_path, check_same_thread=False)
        self._conn.row_factory = sqlite3.Row
        self._conn.execute("PRAGMA journal_mode=WAL")
        self._conn.execute("PRAGMA synchronous=NORMAL")
        self._conn.executescript(_SCHEMA)
        self._lock = threading.RLock()
        self._vehicle_locks: dict[str, threading.RLock] = defaultdict(threading.RLock)

    def close(self) -> None:
        self._conn.close()

    # -- api keys ----------------------------------------------------------

    def provision_key(self, vehicle_id: str, secret: bytes | None = None) -> tuple[str, bytes]:
        """Mint a batch-signing key for one vehicle; returns (keyId, secret).
        The secret is handed out exactly once and stored server-side for
        verification."""
        if secret is None:
            secret = secrets.token_bytes(32)
        if len(secret) < 16:
            raise OutOfRange("telemetry key must be at least 16 bytes")
        key_id = self._ids()
        with self._lock:
            self._conn.execute(
                "INSERT INTO api_keys VALUES (?,?,?)", (key_id, vehicle_id, secret.hex())
            )
            self._conn.commit()
        return key_id, secret

    def key_lookup(self, key_id: str) -> tuple[str, bytes]:
        row = self._conn.execute(
            "SELECT vehicleId, secret FROM api_keys WHERE keyId = ?", (key_id,)
        ).fetchone()
        if row is None:
            raise NotFound(f"no telemetry key {key_id}")
        return row["vehicleId"], bytes.fromhex(row["secret"])

    # -- ingestion ---------------------------------------------------------

    def ingest_batch(
        self,
        vehicle_id: str,
        points: list[dict],
        mac: bytes,
        secret: bytes,
        unit: str = "km",
    ) -> IngestReport:
        if len(points) > MAX_BATCH:
            raise BatchTooLarge(f"batch of {len(points)} exceeds {MAX_BATCH} points")
        expected = hmac_sha256(secret, canonical_serialize(points))
        if not _hmac.compare_digest(expected, mac):
            raise MacMismatch()
        if unit not in ("km", "mi"):
            raise Unsupported(f"unit must be km or mi, got {unit!r}")

        candidates = [self._validated(vehicle_id, p, i, unit) for i, p in enumerate(points)]

        with self._vehicle_locks[vehicle_id]:
            stats = self._window_stats(vehicle_id)
            if stats is not None:
                kept = []
                for row in candidates:
                    if self._is_outlier(row, stats):
                        continue
                    kept.append(row)
                outliers = len(candidates) - len(kept)
                candidates = kept
            else:
                outliers = 0

            with self._lock:
                cur = self._conn.executemany(
                    "INSERT OR IGNORE INTO telemetry VALUES (?,?,?,?,?,?,?)", candidates
                )
                self._conn.commit()
            accepted = cur.rowcount
        return IngestReport(
            accepted=accepted, duplicates=len(candidates) - accepted, outliers=outliers
        )

    def _validated(self, vehicle_id: str, point: dict, index: int, unit: str) -> tuple:
        if not isinstance(point, dict):
            raise OutOfRange(f"point {index} is not an object")
        extra = set(point) - _POINT_FIELDS
        if extra:
            raise OutOfRange(f"point {index} has unexpected fields {sorted(extra)}")
        missing = _POINT_FIELDS - set(point)
        if missing:
            raise OutOfRange(f"point {index} is missing fields {sorted(missing)}")
        if point["vehicleId"] != vehicle_id:
            raise OutOfRange(f"point {index} addressed to a different vehicle")
        ts = point["timestamp"]
        if isinstance(ts, bool) or not isinstance(ts, int) or ts <= 0:
            raise OutOfRange(f"point {index} timestamp must be positive unix milliseconds")
        mileage = float(_require_number(point["mileage"], f"point {index} mileage"))
        if unit == "mi":
            mileage *= MI_TO_KM
        if mileage < 0:
            raise OutOfRange(f"point {index} mileage is negative")
        health = float(_require_number(point["batteryHealth"], f"point {index} batteryHealth"))
        if not 0.0 <= health <= 100.0:
            raise OutOfRange(f"point {index} batteryHealth outside [0, 100]")
        cycles = point["chargingCycles"]
        if isinstance(cycles, bool) or not isinstance(cycles, int) or cycles < 0:
            raise OutOfRange(f"point {index} chargingCycles must be a non-negative integer")
        if not isinstance(point["drivingPattern"], str):
            raise OutOfRange(f"point {index} drivingPattern must be a string")
        return (
            vehicle_id,
            ts,
            mileage,
            health,
            cycles,
            point["drivingPattern"],
            ts // (7 * DAY_MS),
        )

    def _window_stats(self, vehicle_id: str):
        rows = self._conn.execute(
            "SELECT mileage, batteryHealth, chargingCycles FROM telemetry"
            " WHERE vehicleId = ? ORDER BY timestamp DESC LIMIT ?",
            (vehicle_id, OUTLIER_WINDOW),
        ).fetchall()
        if len(rows) < OUTLIER_MIN_SAMPLES:
            return None
        data = np.array(rows, dtype=np.float64)
        return data.mean(axis=0), data.std(axis=0)  # population sigma

    @staticmethod
    def _is_outlier(row: tuple, stats) -> bool:
        mu, sigma = stats
        # row layout: (vehicleId, ts, mileage, batteryHealth, chargingCycles, ...)
        for i, value in enumerate(row[2:5]):
            if abs(value - mu[i]) > OUTLIER_SIGMA * sigma[i]:
                return True
        return False

    # -- reads -------------------------------------------------------------

    def latest(self, vehicle_id: str) -> dict | None:
        row = self._conn.execute(
            "SELECT vehicleId, timestamp, mileage, batteryHealth, chargingCycles,"
            " drivingPattern FROM telemetry WHERE vehicleId = ?"
            " ORDER BY timestamp DESC LIMIT 1",
            (vehicle_id,),
        ).fetchone()
        return dict(row) if row else None

    def count(self, vehicle_id: str) -> int:
        row = self._conn.execute(
            "SELECT COUNT(*) AS n FROM telemetry WHERE vehicleId = ?", (vehicle_id,)
        ).fetchone()
        return row["n"]

    # -- snapshot sync -----------------------------------------------------

    def sync_snapshot(self, vehicle_id: str, store, signer: KeyPair) -> SyncReport:
        """Copy the newest telemetry frame into the vehicle row when it is
        strictly newer than the last synced frame.

        Mileage is floored to whole km and clamped so the stored odometer
        never runs backwards even if a newer frame reports less; battery
        health and cycle count are copied as-is.  Every applied sync leaves
        a node-signed audit row carrying the credential digest before and
        after the copy.
        """
        vehicle = store.vehicle_by_id(vehicle_id)
        with store.vehicle_lock(vehicle_id):
            vehicle = store.vehicle_by_id(vehicle_id)
            last = self.latest(vehicle_id)
            prev_digest = credential.credential_digest(credential.generate_credential(vehicle))
            if last is None or last["timestamp"] <= vehicle.telemetry_at:
                return SyncReport(updated=False, prev_digest=prev_digest, new_digest=prev_digest)
            updated = store.update_vehicle(
                vehicle_id,
                mileage=max(vehicle.mileage, math.floor(last["mileage"])),
                battery_health=last["batteryHealth"],
                charging_cycles=last["chargingCycles"],
                telemetry_at=last["timestamp"],
            )
            new_digest = credential.credential_digest(credential.generate_credential(updated))
            store.append_audit(
                signer,
                action="telemetry-sync",
                subject=vehicle_id,
                prev_digest=prev_digest,
                new_digest=new_digest,
            )
        return SyncReport(updated=True, prev_digest=prev_digest, new_digest=new_digest)

    # -- aggregates --------------------------------------------------------

    def aggregates(self, vehicle_id: str) -> AggregateReport:
        """Dashboard rollup: battery-health slope over the trailing
        SLOPE_WINDOW_DAYS (least squares, percent per day), per-day km
        deltas over the same window, and the latest cumulative cycle
        count.  The window anchors at the newest stored frame."""
        last = self.latest(vehicle_id)
        if last is None:
            return AggregateReport(battery_health_slope=None, daily_km=[], charging_cycles=None)
        since = last["timestamp"] - SLOPE_WINDOW_DAYS * DAY_MS
        rows = self._conn.execute(
            "SELECT timestamp, mileage, batteryHealth FROM telemetry"
            " WHERE vehicleId = ? AND timestamp >= ? ORDER BY timestamp",
            (vehicle_id, since),
        ).fetchall()

        xs = np.array([r["timestamp"] for r in rows], dtype=np.float64) / DAY_MS
        ys = np.array([r["batteryHealth"] for r in rows], dtype=np.float64)
        slope = None
        if len(rows) >= 2:
            xc = xs - xs.mean()
            var = float(np.dot(xc, xc))
            if var > 0.0:
                slope = float(np.dot(xc, ys - ys.mean()) / var)

        day_max: dict[int, float] = {}
        for r in rows:
            day = r["timestamp"] // DAY_MS
            m = r["mileage"]
            if day not in day_max or m > day_max[day]:
                day_max[day] = m
        days = sorted(day_max)
        daily_km = [day_max[b] - day_max[a] for a, b in zip(days, days[1:])]

        return AggregateReport(
            battery_health_slope=slope,
            daily_km=daily_km,
            charging_cycles=last["chargingCycles"],
        )

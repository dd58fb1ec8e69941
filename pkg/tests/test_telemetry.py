import random
import statistics

import pytest
from conftest import FIXTURE_VEHICLE_ID

from vehiclepassport import crypto
from vehiclepassport.errors import (
    BatchTooLarge,
    MacMismatch,
    NotFound,
    OutOfRange,
    Unsupported,
)
from vehiclepassport.telemetry import (
    DAY_MS,
    MAX_BATCH,
    MI_TO_KM,
    TelemetryService,
)

SECRET = b"telemetry-unit-test-secret-key01"
BASE_TS = 1_755_000_000_000  # ms
HOUR_MS = 3_600_000

# Outlier-window statistics for the 100-point synthetic window (seed 4242),
# pinned by the pre-build oracle script.
ORACLE_HEALTH_MU = 89.98977964000004
ORACLE_HEALTH_SIGMA = 0.4789255307397707
HEALTH_SPIKE_8S = 93.8211838859182  # rejected
HEALTH_SPIKE_6S = 92.86333282443866  # accepted
MILEAGE_SPIKE_8S = 10336.514272458131  # rejected
WINDOW_LAST_TS = 1_755_356_400_000
WINDOW_LAST_MILEAGE = 10118.8

# Least-squares slope pins for the 120-sample, 30-day series.
LINEAR_SLOPE = -0.09999999999999999
NOISY_SLOPE = -0.09983467932223958


def point(vid, ts, mileage=10_000.0, health=90.0, cycles=100, pattern="mixed"):
    return {
        "vehicleId": vid,
        "timestamp": ts,
        "mileage": mileage,
        "batteryHealth": health,
        "chargingCycles": cycles,
        "drivingPattern": pattern,
    }


def mac_for(points, secret=SECRET):
    return crypto.hmac_sha256(secret, crypto.canonical_serialize(points))


def ingest(svc, vid, points, secret=SECRET, unit="km"):
    return svc.ingest_batch(vid, points, mac_for(points, secret), secret, unit=unit)


def synthetic_window(vid, n=100, seed=4242):
    """Same generator the oracle script ran; constant string fields do not
    move the numeric statistics."""
    rng = random.Random(seed)
    return [
        point(
            vid,
            BASE_TS + i * HOUR_MS,
            mileage=round(10_000.0 + i * 1.2, 6),
            health=round(90.0 + rng.gauss(0.0, 0.5), 6),
            cycles=100 + i // 10,
        )
        for i in range(n)
    ]


@pytest.fixture
def svc():
    service = TelemetryService()
    yield service
    service.close()


VID = FIXTURE_VEHICLE_ID


class TestIngest:
    def test_fresh_batch_accepted(self, svc):
        pts = [point(VID, BASE_TS + i) for i in range(10)]
        report = ingest(svc, VID, pts)
        assert (report.accepted, report.duplicates, report.outliers) == (10, 0, 0)
        assert svc.count(VID) == 10

    def test_reingest_leaves_store_identical(self, svc):
        pts = [point(VID, BASE_TS + i, mileage=10_000.0 + i) for i in range(10)]
        ingest(svc, VID, pts)
        before = svc._conn.execute("SELECT * FROM telemetry ORDER BY timestamp").fetchall()
        report = ingest(svc, VID, pts)
        after = svc._conn.execute("SELECT * FROM telemetry ORDER BY timestamp").fetchall()
        assert (report.accepted, report.duplicates) == (0, 10)
        assert [tuple(r) for r in before] == [tuple(r) for r in after]

    def test_partially_duplicate_batch(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS + i) for i in range(10)])
        report = ingest(svc, VID, [point(VID, BASE_TS + i) for i in range(5, 15)])
        assert (report.accepted, report.duplicates) == (5, 5)

    def test_bad_mac_rejected(self, svc):
        pts = [point(VID, BASE_TS)]
        with pytest.raises(MacMismatch) as exc_info:
            svc.ingest_batch(VID, pts, b"\x00" * 32, SECRET)
        assert exc_info.value.code == "UNAUTHORIZED_BATCH"
        assert exc_info.value.http_status == 401
        assert svc.count(VID) == 0

    def test_mac_binds_transmitted_bytes(self, svc):
        pts = [point(VID, BASE_TS)]
        mac = mac_for(pts)
        pts[0]["mileage"] += 1
        with pytest.raises(MacMismatch):
            svc.ingest_batch(VID, pts, mac, SECRET)

    def test_batch_size_cap(self, svc):
        pts = [point(VID, BASE_TS + i) for i in range(MAX_BATCH + 1)]
        with pytest.raises(BatchTooLarge):
            ingest(svc, VID, pts)
        # exactly at the cap is fine
        report = ingest(svc, VID, pts[:MAX_BATCH])
        assert report.accepted == MAX_BATCH

    def test_unknown_unit(self, svc):
        pts = [point(VID, BASE_TS)]
        with pytest.raises(Unsupported):
            ingest(svc, VID, pts, unit="furlong")

    def test_miles_normalized_to_km(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS, mileage=100.0)], unit="mi")
        assert svc.latest(VID)["mileage"] == pytest.approx(100.0 * MI_TO_KM)

    def test_km_stored_as_sent(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS, mileage=100.0)], unit="km")
        assert svc.latest(VID)["mileage"] == 100.0

    @pytest.mark.parametrize(
        "mutate",
        [
            lambda p: p.update(mileage=-1.0),
            lambda p: p.update(batteryHealth=100.5),
            lambda p: p.update(batteryHealth=-0.1),
            lambda p: p.update(timestamp=0),
            lambda p: p.update(timestamp=True),
            lambda p: p.update(timestamp="soon"),
            lambda p: p.update(chargingCycles=-1),
            lambda p: p.update(chargingCycles=1.5),
            lambda p: p.update(drivingPattern=7),
            lambda p: p.update(vehicleId="someone-else"),
            lambda p: p.pop("mileage"),
            lambda p: p.update(extraField=1),
        ],
    )
    def test_invalid_point_rejected(self, svc, mutate):
        p = point(VID, BASE_TS)
        mutate(p)
        with pytest.raises(OutOfRange):
            ingest(svc, VID, [p])
        assert svc.count(VID) == 0


class TestOutlierScreen:
    def _seed_window(self, svc):
        window = synthetic_window(VID)
        report = ingest(svc, VID, window[:100])
        assert report.accepted == 100
        # guard: the replicated window really is the one the oracle measured
        healths = [p["batteryHealth"] for p in window]
        assert statistics.fmean(healths) == pytest.approx(ORACLE_HEALTH_MU, abs=1e-9)
        assert statistics.pstdev(healths) == pytest.approx(ORACLE_HEALTH_SIGMA, abs=1e-9)
        return window

    def _candidate(self, health, mileage=WINDOW_LAST_MILEAGE + 1.2):
        return point(VID, WINDOW_LAST_TS + HOUR_MS, mileage=mileage, health=health, cycles=109)

    def test_eight_sigma_spike_rejected(self, svc):
        self._seed_window(svc)
        report = ingest(svc, VID, [self._candidate(HEALTH_SPIKE_8S)])
        assert (report.accepted, report.outliers) == (0, 1)
        assert svc.count(VID) == 100

    def test_six_sigma_point_accepted(self, svc):
        self._seed_window(svc)
        report = ingest(svc, VID, [self._candidate(HEALTH_SPIKE_6S)])
        assert (report.accepted, report.outliers) == (1, 0)

    def test_mileage_spike_rejected_independently(self, svc):
        self._seed_window(svc)
        report = ingest(svc, VID, [self._candidate(90.0, mileage=MILEAGE_SPIKE_8S)])
        assert (report.accepted, report.outliers) == (0, 1)

    def test_window_statistics_fixed_at_batch_start(self, svc):
        self._seed_window(svc)
        batch = [
            self._candidate(HEALTH_SPIKE_8S),
            point(VID, WINDOW_LAST_TS + 2 * HOUR_MS, mileage=10_121.2, health=90.0, cycles=109),
        ]
        report = ingest(svc, VID, batch)
        assert (report.accepted, report.outliers) == (1, 1)

    def test_screen_inactive_below_thirty_samples(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS + i * HOUR_MS) for i in range(29)])
        report = ingest(svc, VID, [point(VID, BASE_TS + 29 * HOUR_MS, health=20.0)])
        assert report.accepted == 1

    def test_screen_active_at_thirty_samples(self, svc):
        other = "other-vehicle"
        ingest(svc, other, [point(other, BASE_TS + i * HOUR_MS) for i in range(30)])
        report = ingest(svc, other, [point(other, BASE_TS + 30 * HOUR_MS, health=20.0)])
        assert (report.accepted, report.outliers) == (0, 1)

    def test_flat_window_rejects_any_move(self, svc):
        # sigma is zero, so the strict rule drops every value that differs
        ingest(svc, VID, [point(VID, BASE_TS + i * HOUR_MS) for i in range(30)])
        moved = ingest(svc, VID, [point(VID, BASE_TS + 31 * HOUR_MS, health=90.0001)])
        same = ingest(svc, VID, [point(VID, BASE_TS + 32 * HOUR_MS)])
        assert moved.outliers == 1
        assert same.accepted == 1

    def test_windows_are_per_vehicle(self, svc):
        self._seed_window(svc)
        fresh = "fresh-vehicle"
        report = ingest(svc, fresh, [point(fresh, BASE_TS, health=20.0)])
        assert report.accepted == 1


class TestLatest:
    def test_empty(self, svc):
        assert svc.latest(VID) is None

    def test_max_timestamp_wins(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS + i) for i in (1, 2, 3)])
        assert svc.latest(VID)["timestamp"] == BASE_TS + 3

    def test_out_of_order_ingest(self, svc):
        for ts in (3, 1, 2):
            ingest(svc, VID, [point(VID, BASE_TS + ts, cycles=ts)])
        latest = svc.latest(VID)
        assert latest["timestamp"] == BASE_TS + 3
        assert latest["chargingCycles"] == 3


class TestSnapshotSync:
    @pytest.fixture
    def synced_world(self, world, svc):
        return world, svc

    def test_newer_telemetry_applied_with_floor(self, world, svc):
        ts = world.clock.now_ms() + HOUR_MS
        ingest(svc, world.vehicle.id, [point(world.vehicle.id, ts, mileage=12_345.9, health=96.4, cycles=320)])
        report = svc.sync_snapshot(world.vehicle.id, world.store, world.admin)
        assert report.updated is True
        fresh = world.store.vehicle_by_id(world.vehicle.id)
        assert fresh.mileage == 12_345
        assert fresh.battery_health == 96.4
        assert fresh.charging_cycles == 320
        assert fresh.telemetry_at == ts
        assert report.prev_digest != report.new_digest

    def test_sync_writes_signed_audit_row(self, world, svc):
        ts = world.clock.now_ms() + HOUR_MS
        ingest(svc, world.vehicle.id, [point(world.vehicle.id, ts, mileage=12_400.0)])
        report = svc.sync_snapshot(world.vehicle.id, world.store, world.admin)
        rows = world.store.audit_rows(subject=world.vehicle.id)
        assert len(rows) == 1
        row = rows[0]
        assert row["action"] == "telemetry-sync"
        assert row["prevDigest"] == crypto.to_hex(report.prev_digest)
        assert row["newDigest"] == crypto.to_hex(report.new_digest)
        body = {k: row[k] for k in ("id", "at", "actor", "action", "subject", "prevDigest", "newDigest")}
        digest = crypto.keccak256(crypto.canonical_serialize(body))
        recovered = crypto.recover_address(digest, crypto.from_hex(row["signature"]))
        assert recovered == world.admin.address

    def test_no_telemetry_is_noop(self, world, svc):
        report = svc.sync_snapshot(world.vehicle.id, world.store, world.admin)
        assert report.updated is False
        assert report.prev_digest == report.new_digest
        assert world.store.audit_rows(subject=world.vehicle.id) == []

    def test_second_sync_is_noop(self, world, svc):
        ts = world.clock.now_ms() + HOUR_MS
        ingest(svc, world.vehicle.id, [point(world.vehicle.id, ts, mileage=12_400.0)])
        svc.sync_snapshot(world.vehicle.id, world.store, world.admin)
        again = svc.sync_snapshot(world.vehicle.id, world.store, world.admin)
        assert again.updated is False
        assert len(world.store.audit_rows(subject=world.vehicle.id)) == 1

    def test_older_frames_do_not_retrigger(self, world, svc):
        vid = world.vehicle.id
        ts = world.clock.now_ms() + HOUR_MS
        ingest(svc, vid, [point(vid, ts, mileage=12_400.0)])
        svc.sync_snapshot(vid, world.store, world.admin)
        ingest(svc, vid, [point(vid, ts - HOUR_MS, mileage=12_500.0)])
        report = svc.sync_snapshot(vid, world.store, world.admin)
        assert report.updated is False
        assert world.store.vehicle_by_id(vid).mileage == 12_400

    def test_odometer_never_runs_backwards(self, world, svc):
        vid = world.vehicle.id
        ts = world.clock.now_ms() + HOUR_MS
        ingest(svc, vid, [point(vid, ts, mileage=9_000.5, health=96.0, cycles=315)])
        report = svc.sync_snapshot(vid, world.store, world.admin)
        fresh = world.store.vehicle_by_id(vid)
        assert report.updated is True
        assert fresh.mileage == 12_000  # unchanged, newer frame reported less
        assert fresh.telemetry_at == ts
        assert fresh.battery_health == 96.0

    def test_unknown_vehicle(self, world, svc):
        with pytest.raises(NotFound):
            svc.sync_snapshot("no-such-vehicle", world.store, world.admin)


class TestAggregates:
    def test_empty(self, svc):
        report = svc.aggregates(VID)
        assert report.battery_health_slope is None
        assert report.daily_km == []
        assert report.charging_cycles is None

    def test_constant_health_gives_zero_slope(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS + i * HOUR_MS, health=91.0) for i in range(5)])
        assert svc.aggregates(VID).battery_health_slope == pytest.approx(0.0, abs=1e-12)

    def test_single_sample_has_no_slope(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS)])
        assert svc.aggregates(VID).battery_health_slope is None

    def _decline_series(self, noise_seed=None):
        ts = [BASE_TS + i * (DAY_MS // 4) for i in range(120)]
        ys = [95.0 - 0.1 * ((t - BASE_TS) / DAY_MS) for t in ts]
        if noise_seed is not None:
            rng = random.Random(noise_seed)
            ys = [y + rng.gauss(0.0, 0.05) for y in ys]
        return [point(VID, t, health=y) for t, y in zip(ts, ys)]

    def test_linear_decline_recovered(self, svc):
        ingest(svc, VID, self._decline_series())
        slope = svc.aggregates(VID).battery_health_slope
        assert slope == pytest.approx(-0.1, abs=1e-6)
        assert slope == pytest.approx(LINEAR_SLOPE, abs=1e-9)

    def test_noisy_slope_matches_least_squares(self, svc):
        ingest(svc, VID, self._decline_series(noise_seed=99))
        slope = svc.aggregates(VID).battery_health_slope
        assert slope == pytest.approx(NOISY_SLOPE, abs=1e-9)

    def test_daily_km_deltas(self, svc):
        pts = [
            point(VID, BASE_TS + 0 * DAY_MS + HOUR_MS, mileage=100.0),
            point(VID, BASE_TS + 1 * DAY_MS + HOUR_MS, mileage=150.0),
            point(VID, BASE_TS + 2 * DAY_MS + HOUR_MS, mileage=160.0),
        ]
        ingest(svc, VID, pts)
        assert svc.aggregates(VID).daily_km == [50.0, 10.0]

    def test_daily_km_uses_daily_maxima(self, svc):
        pts = [
            point(VID, BASE_TS + HOUR_MS, mileage=100.0),
            point(VID, BASE_TS + 2 * HOUR_MS, mileage=120.0),
            point(VID, BASE_TS + DAY_MS + HOUR_MS, mileage=150.0),
        ]
        ingest(svc, VID, pts)
        assert svc.aggregates(VID).daily_km == [30.0]

    def test_window_anchors_at_latest_frame(self, svc):
        old = point(VID, BASE_TS, health=50.0, mileage=10.0)
        recent = [
            point(VID, BASE_TS + (31 + i) * DAY_MS, health=90.0, mileage=500.0 + i)
            for i in range(3)
        ]
        ingest(svc, VID, [old] + recent)
        report = svc.aggregates(VID)
        # the day-0 frame is outside the trailing window and must not drag the fit
        assert report.battery_health_slope == pytest.approx(0.0, abs=1e-12)
        assert report.daily_km == [1.0, 1.0]

    def test_cycles_come_from_latest_frame(self, svc):
        ingest(svc, VID, [point(VID, BASE_TS + i * HOUR_MS, cycles=100 + i) for i in range(4)])
        assert svc.aggregates(VID).charging_cycles == 103


class TestKeys:
    def test_provision_and_lookup(self, svc):
        key_id, secret = svc.provision_key(VID)
        assert len(secret) == 32
        assert svc.key_lookup(key_id) == (VID, secret)

    def test_explicit_secret(self, svc):
        key_id, secret = svc.provision_key(VID, secret=SECRET)
        assert secret == SECRET
        assert svc.key_lookup(key_id) == (VID, SECRET)

    def test_short_secret_rejected(self, svc):
        with pytest.raises(OutOfRange):
            svc.provision_key(VID, secret=b"tiny")

    def test_unknown_key(self, svc):
        with pytest.raises(NotFound):
            svc.key_lookup("missing")

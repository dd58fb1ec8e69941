import dataclasses

import pytest

from vehiclepassport import crypto
from vehiclepassport.clock import ManualClock
from vehiclepassport.ledger import Ledger
from vehiclepassport.models import Vehicle
from vehiclepassport.store import Store

# Matches the fixture used by the pre-build oracle script.
FIXTURE_VEHICLE_ID = "8b1a9953-c461-4f9a-b0f0-2e3f4d5c6b7a"
FIXTURE_OWNER_ADDRESS = bytes.fromhex("00112233445566778899aabbccddeeff00112233")
FIXTURE_CREATED_AT = 1736933400  # 2025-01-15T09:30:00Z
FIXTURE_WARRANTY = 1845936000  # 2028-06-30T00:00:00Z


def make_fixture_vehicle(**overrides) -> Vehicle:
    base = dict(
        id=FIXTURE_VEHICLE_ID,
        vin="WVWZZZ1JZXW000001",
        model="ID.4 GTX",
        manufacturer="Volkswagen",
        owner_id="owner-0001",
        battery_health=97.5,
        mileage=12000,
        charging_cycles=310,
        driving_pattern="eco",
        warranty_expiry=FIXTURE_WARRANTY,
        anchor_tx_hash=None,
        vehicle_nft_token_id=None,
        nft_transfer_pending=False,
        hash=None,
        telemetry_at=0,
        created_at=FIXTURE_CREATED_AT,
        updated_at=FIXTURE_CREATED_AT,
    )
    base.update(overrides)
    return Vehicle(**base)


@pytest.fixture
def fixture_vehicle() -> Vehicle:
    return make_fixture_vehicle()


@pytest.fixture
def admin_keypair():
    return crypto.generate_keypair(seed=1000)


@pytest.fixture
def owner_keypair():
    return crypto.generate_keypair(seed=1001)


SERVER_MAC_KEY = b"unit-test-server-mac-key-32bytes"


@dataclasses.dataclass
class World:
    """One registered owner with one anchored vehicle, ready for flow tests."""

    clock: ManualClock
    admin: crypto.KeyPair
    owner: crypto.KeyPair
    store: Store
    ledger: Ledger
    owner_row: object
    vehicle: Vehicle


@pytest.fixture
def world():
    clock = ManualClock()
    admin = crypto.generate_keypair(seed=1000)
    owner = crypto.generate_keypair(seed=1001)
    store = Store(clock=clock)
    ledger = Ledger(admin=admin.address, clock=clock)
    owner_row = store.register_owner(owner.address, "Ada Driver", "ada@example.com")
    vehicle = store.create_vehicle(
        {
            "vin": "WVWZZZ1JZXW000001",
            "model": "ID.4 GTX",
            "manufacturer": "Volkswagen",
            "batteryHealth": 97.5,
            "mileage": 12000,
            "chargingCycles": 310,
            "drivingPattern": "eco",
            "warrantyExpiry": FIXTURE_WARRANTY,
        },
        admin,
        owner.address,
        ledger,
    )
    yield World(clock, admin, owner, store, ledger, owner_row, vehicle)
    store.close()

"""Store behavior: registration, vehicle creation, CAS transitions, export."""

import pytest

from vehiclepassport import credential, crypto
from vehiclepassport.clock import ManualClock
from vehiclepassport.credential import ConsistencyStatus
from vehiclepassport.errors import AlreadyRegistered, DuplicateVin, NotFound
from vehiclepassport.ledger import Ledger
from vehiclepassport.models import ACCESS_APPROVED, ACCESS_PENDING, AccessRequest
from vehiclepassport.store import Store, derive_token_id

from conftest import FIXTURE_CREATED_AT, FIXTURE_WARRANTY


@pytest.fixture
def env():
    clock = ManualClock()
    admin = crypto.generate_keypair(seed=1000)
    ledger = Ledger(admin=admin.address, clock=clock)
    store = Store(clock=clock)
    yield store, ledger, admin, clock
    store.close()


VEHICLE_FIELDS = {
    "vin": "WVWZZZ1JZXW000001",
    "model": "ID.4 GTX",
    "manufacturer": "Volkswagen",
    "batteryHealth": 97.5,
    "mileage": 12000,
    "chargingCycles": 310,
    "drivingPattern": "eco",
    "warrantyExpiry": FIXTURE_WARRANTY,
}


class TestOwners:
    def test_register_and_lookup(self, env):
        store, _, _, _ = env
        wallet = b"\x11" * 20
        owner = store.register_owner(wallet, "Ada", "ada@example.com")
        assert store.owner_by_wallet(wallet).id == owner.id
        assert store.owner_by_id(owner.id).email == "ada@example.com"

    def test_duplicate_wallet(self, env):
        store, _, _, _ = env
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        with pytest.raises(AlreadyRegistered):
            store.register_owner(wallet, "Eve", "eve@example.com")

    def test_unknown_wallet(self, env):
        store, _, _, _ = env
        with pytest.raises(NotFound):
            store.owner_by_wallet(b"\x99" * 20)


class TestCreateVehicle:
    def test_create_anchors_and_mints(self, env):
        store, ledger, admin, _ = env
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        vehicle = store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)

        assert vehicle.anchor_tx_hash is not None
        assert vehicle.hash is not None
        token_id = vehicle.vehicle_nft_token_id
        assert token_id == derive_token_id(vehicle.id)
        assert ledger.owner_of(token_id) == wallet

        status = credential.verify_passport(vehicle, wallet, ledger)
        assert status is ConsistencyStatus.UP_TO_DATE

    def test_duplicate_vin(self, env):
        store, ledger, admin, _ = env
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        with pytest.raises(DuplicateVin):
            store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)

    def test_unregistered_owner(self, env):
        store, ledger, admin, _ = env
        with pytest.raises(NotFound):
            store.create_vehicle(VEHICLE_FIELDS, admin, b"\x42" * 20, ledger)

    def test_commitment_is_anchored(self, env):
        store, ledger, admin, _ = env
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        vehicle = store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        cred = credential.generate_credential(vehicle)
        commitment = credential.packed_commitment(wallet, cred)
        assert ledger.is_anchored(commitment) is not None


class TestPortfolio:
    def test_list_by_owner(self, env):
        store, ledger, admin, _ = env
        wallet = b"\x11" * 20
        other = b"\x22" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        store.register_owner(other, "Bob", "bob@example.com")
        store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        second = dict(VEHICLE_FIELDS, vin="WVWZZZ1JZXW000002")
        store.create_vehicle(second, admin, wallet, ledger)

        assert len(store.list_by_owner(wallet)) == 2
        assert store.list_by_owner(other) == []
        with pytest.raises(NotFound):
            store.list_by_owner(b"\x33" * 20)

    def test_ownership_change_moves_vehicle(self, env):
        store, ledger, admin, _ = env
        wallet = b"\x11" * 20
        other = b"\x22" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        buyer = store.register_owner(other, "Bob", "bob@example.com")
        vehicle = store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        store.update_vehicle(vehicle.id, owner_id=buyer.id)
        assert store.list_by_owner(wallet) == []
        assert len(store.list_by_owner(other)) == 1


class TestUpdateVehicle:
    def test_update_bumps_updated_at(self, env):
        store, ledger, admin, clock = env
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        vehicle = store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        clock.advance(60)
        updated = store.update_vehicle(vehicle.id, mileage=12500)
        assert updated.mileage == 12500
        assert updated.updated_at == vehicle.updated_at + 60

    def test_update_unknown_vehicle(self, env):
        store, _, _, _ = env
        with pytest.raises(NotFound):
            store.update_vehicle("nope", mileage=1)


class TestAccessRequestCas:
    def _seed_request(self, store, ledger, admin):
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        vehicle = store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        request = AccessRequest(
            id="req-1",
            vehicle_id=vehicle.id,
            requester="insurer@example.com",
            fields="batteryHealth,mileage",
            status=ACCESS_PENDING,
            token=None,
            created_at=FIXTURE_CREATED_AT,
            expires_at=0,
        )
        store.insert_access_request(request)
        return request

    def test_cas_success_and_conflict(self, env):
        store, ledger, admin, _ = env
        request = self._seed_request(store, ledger, admin)
        assert store.transition_request(request.id, ACCESS_PENDING, ACCESS_APPROVED, token="t")
        # second transition from pending must lose
        assert not store.transition_request(request.id, ACCESS_PENDING, ACCESS_APPROVED)
        assert store.access_request(request.id).status == ACCESS_APPROVED

    def test_field_set_parsing(self, env):
        store, ledger, admin, _ = env
        request = self._seed_request(store, ledger, admin)
        assert store.access_request(request.id).field_set() == {"batteryHealth", "mileage"}


class TestExport:
    def test_csv_round_trip(self, env, tmp_path):
        store, ledger, admin, _ = env
        wallet = b"\x11" * 20
        store.register_owner(wallet, "Ada", "ada@example.com")
        store.create_vehicle(VEHICLE_FIELDS, admin, wallet, ledger)
        out = tmp_path / "vehicles.csv"
        count = store.export_csv("vehicles", str(out))
        assert count == 1
        text = out.read_text()
        assert "WVWZZZ1JZXW000001" in text
        assert text.splitlines()[0].startswith("id,vin,model")

    def test_export_unknown_table(self, env, tmp_path):
        store, _, _, _ = env
        with pytest.raises(NotFound):
            store.export_csv("secrets", str(tmp_path / "x.csv"))

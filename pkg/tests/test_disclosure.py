"""Selective disclosure: request, approval, one-time redemption."""

import base64
import json
import threading

import pytest

from vehiclepassport import tokens
from vehiclepassport.disclosure import FIELD_WHITELIST, DisclosureFlow
from vehiclepassport.errors import (
    Expired,
    FieldNotAllowed,
    Gone,
    InvalidState,
    InvalidToken,
    NotFound,
    Unauthorized,
)

from conftest import SERVER_MAC_KEY


@pytest.fixture
def flow(world):
    return DisclosureFlow(world.store, SERVER_MAC_KEY, clock=world.clock)


def decode_claims(token):
    seg = token.split(".")[1]
    return json.loads(base64.urlsafe_b64decode(seg + "=" * (-len(seg) % 4)))


class TestCreateRequest:
    def test_happy_path(self, world, flow):
        request = flow.create_request(
            world.vehicle.id, "insurer@example.com", ["batteryHealth", "warrantyExpiry"]
        )
        assert request.status == "pending"
        assert request.expires_at == request.created_at + 600
        assert request.field_set() == {"batteryHealth", "warrantyExpiry"}

    def test_field_outside_whitelist(self, world, flow):
        with pytest.raises(FieldNotAllowed):
            flow.create_request(world.vehicle.id, "x", ["gpsTrace"])

    def test_partially_bad_field_list(self, world, flow):
        with pytest.raises(FieldNotAllowed):
            flow.create_request(world.vehicle.id, "x", ["mileage", "vin"])

    def test_empty_fields(self, world, flow):
        with pytest.raises(FieldNotAllowed):
            flow.create_request(world.vehicle.id, "x", [])

    def test_unknown_vehicle(self, flow):
        with pytest.raises(NotFound):
            flow.create_request("missing-id", "x", ["mileage"])

    def test_whitelist_is_the_documented_set(self):
        assert FIELD_WHITELIST == {
            "batteryHealth",
            "mileage",
            "warrantyExpiry",
            "model",
            "manufacturer",
        }


class TestApprove:
    def test_token_scopes_match_request(self, world, flow):
        request = flow.create_request(world.vehicle.id, "x", ["mileage", "model"])
        token = flow.approve(request.id, world.owner.address)
        claims = decode_claims(token)
        assert sorted(claims["fields"]) == ["mileage", "model"]
        assert claims["requestId"] == request.id
        assert claims["vehicleId"] == world.vehicle.id
        assert claims["exp"] - claims["iat"] == 600

    def test_reference_timestamps(self, world, flow):
        # approval at a known instant pins iat and exp
        world.clock.set_s(1733097600)
        request = flow.create_request(world.vehicle.id, "x", ["batteryHealth"])
        token = flow.approve(request.id, world.owner.address)
        claims = decode_claims(token)
        assert claims["iat"] == 1733097600
        assert claims["exp"] == 1733098200

    def test_wrong_owner(self, world, flow):
        request = flow.create_request(world.vehicle.id, "x", ["mileage"])
        stranger = world.admin  # registered admin key, but not the vehicle owner
        with pytest.raises(Unauthorized):
            flow.approve(request.id, stranger.address)

    def test_expired_pending_row(self, world, flow):
        request = flow.create_request(world.vehicle.id, "x", ["mileage"])
        world.clock.advance(601)
        with pytest.raises(Expired):
            flow.approve(request.id, world.owner.address)
        assert world.store.access_request(request.id).status == "expired"

    def test_double_approval(self, world, flow):
        request = flow.create_request(world.vehicle.id, "x", ["mileage"])
        flow.approve(request.id, world.owner.address)
        with pytest.raises(InvalidState):
            flow.approve(request.id, world.owner.address)


class TestRedeem:
    def _grant(self, world, flow, fields):
        request = flow.create_request(world.vehicle.id, "x", fields)
        return flow.approve(request.id, world.owner.address)

    def test_projection_exact(self, world, flow):
        token = self._grant(world, flow, ["batteryHealth", "warrantyExpiry"])
        result = flow.redeem(token)
        assert set(result["data"].keys()) == {"batteryHealth", "warrantyExpiry"}
        assert result["data"]["batteryHealth"] == 97.5
        assert result["data"]["warrantyExpiry"] == "2028-06-30T00:00:00Z"
        assert result["verified"]

    def test_replay_gets_gone(self, world, flow):
        token = self._grant(world, flow, ["mileage"])
        flow.redeem(token)
        with pytest.raises(Gone):
            flow.redeem(token)

    def test_expired_token(self, world, flow):
        token = self._grant(world, flow, ["mileage"])
        world.clock.advance(600)
        with pytest.raises(Expired):
            flow.redeem(token)

    def test_tampered_segments(self, world, flow):
        token = self._grant(world, flow, ["mileage"])
        header, claims, mac = token.split(".")
        # flip one character in each segment in turn
        for i, segment in enumerate((header, claims, mac)):
            mutated = list(segment)
            mutated[0] = "A" if mutated[0] != "A" else "B"
            parts = [header, claims, mac]
            parts[i] = "".join(mutated)
            with pytest.raises((InvalidToken, Expired)):
                flow.redeem(".".join(parts))

    def test_token_from_wrong_key(self, world, flow):
        token = self._grant(world, flow, ["mileage"])
        claims = decode_claims(token)
        forged = tokens.encode(claims, b"another-key-of-32-bytes-exactly!")
        with pytest.raises(InvalidToken):
            flow.redeem(forged)

    def test_concurrent_redemption_single_winner(self, world, flow):
        token = self._grant(world, flow, ["mileage"])
        results = []
        barrier = threading.Barrier(8)

        def worker():
            barrier.wait()
            try:
                flow.redeem(token)
                results.append("ok")
            except Gone:
                results.append("gone")

        threads = [threading.Thread(target=worker) for _ in range(8)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert results.count("ok") == 1
        assert results.count("gone") == 7


class TestPendingList:
    def test_lists_only_live_pending(self, world, flow):
        keep = flow.create_request(world.vehicle.id, "a", ["mileage"])
        flow.create_request(world.vehicle.id, "b", ["model"])
        world.clock.advance(601)
        # both now expired
        assert flow.list_pending_for_owner(world.owner.address) == []
        assert world.store.access_request(keep.id).status == "expired"

    def test_singleton(self, world, flow):
        request = flow.create_request(world.vehicle.id, "a", ["mileage"])
        found = flow.list_pending_for_owner(world.owner.address)
        assert [r.id for r in found] == [request.id]

    def test_unknown_owner(self, flow):
        with pytest.raises(NotFound):
            flow.list_pending_for_owner(b"\x31" * 20)

    def test_sweeper(self, world, flow):
        flow.create_request(world.vehicle.id, "a", ["mileage"])
        flow.create_request(world.vehicle.id, "b", ["model"])
        world.clock.advance(601)
        assert flow.sweep_expired() == 2
        assert flow.sweep_expired() == 0


class TestTokenCodec:
    def test_round_trip(self):
        claims = {"requestId": "r1", "vehicleId": "v1", "fields": ["mileage"], "iat": 1, "exp": 601}
        token = tokens.encode(claims, SERVER_MAC_KEY)
        assert tokens.decode(token, SERVER_MAC_KEY) == claims

    def test_no_padding_in_output(self):
        token = tokens.encode({"a": 1}, SERVER_MAC_KEY)
        assert "=" not in token

    def test_wrong_segment_count(self):
        with pytest.raises(InvalidToken):
            tokens.decode("onlyone", SERVER_MAC_KEY)
        with pytest.raises(InvalidToken):
            tokens.decode("a.b", SERVER_MAC_KEY)

    def test_garbage_base64(self):
        token = tokens.encode({"a": 1}, SERVER_MAC_KEY)
        head, claims, mac = token.split(".")
        with pytest.raises(InvalidToken):
            tokens.decode(f"{head}.!!!!.{mac}", SERVER_MAC_KEY)

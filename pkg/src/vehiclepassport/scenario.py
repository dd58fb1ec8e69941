"""Scripted multi-actor runs for demos and smoke checks.

Each scenario drives the node purely over HTTP, exactly as separate CLI
invocations would, and asserts the state it expects after every step.
With an embedded seeded node (``--embedded --seed N``) a run is fully
reproducible: actor keys, vehicle ids, token ids, digests, and tx hashes
all derive from the seed.  Raw disclosure tokens and proof bytes are kept
out of step details because those stay randomized on purpose.
"""

from __future__ import annotations

import json

from . import zkp
from .crypto import (
    canonical_serialize,
    from_hex,
    generate_keypair,
    hmac_sha256,
    keccak256,
    sign,
    to_hex,
)
from .errors import PassportError
from .node import ZK_ROUTES
from .service_log import compute_log_hash

WARRANTY_YEARS_S = 3 * 365 * 86_400


class StepFailed(PassportError):
    code = "SCENARIO_STEP_FAILED"
    http_status = 500
    default_message = "a scenario step did not produce the expected state"


def _ok(status: int, data, step: str, want: int = 200):
    if status != want:
        raise StepFailed(f"{step}: expected HTTP {want}, got {status}: {json.dumps(data)}")
    return data


def _signed_transfer(payload: dict, *keypairs) -> list[str]:
    digest = keccak256(canonical_serialize(payload))
    return [to_hex(sign(kp.secret, digest)) for kp in keypairs]


def full_lifecycle(client, seed: int, report) -> dict:
    """Factory floor to second owner: create, ingest, sell, service,
    disclose, prove, transfer, and end with a clean passport."""
    oem = generate_keypair(seed=seed * 100 + 1)
    ada = generate_keypair(seed=seed * 100 + 2)
    bob = generate_keypair(seed=seed * 100 + 3)
    center = generate_keypair(seed=seed * 100 + 4)
    insurer = generate_keypair(seed=seed * 100 + 5)

    if client.node is not None and oem.address not in client.node.config.oem_wallets:
        # Embedded nodes are private sandboxes; teach this one our factory.
        client.node.config.oem_wallets = (*client.node.config.oem_wallets, oem.address)

    roles = {}
    for name, keypair in (("oem", oem), ("ada", ada), ("bob", bob)):
        body = {
            "wallet": to_hex(keypair.address),
            "name": f"{name}-{seed}",
            "email": f"{name}{seed}@example.org",
        }
        data = _ok(*client.call("POST", "/api/login", body, signer=keypair), step="login")
        roles[name] = data["role"]
    if roles["oem"] != "OEM":
        raise StepFailed(
            f"wallet {to_hex(oem.address)} is not configured as OEM on this node; "
            "add it to VP_OEM_WALLETS"
        )
    report("actors", f"oem={roles['oem']} ada={roles['ada']} bob={roles['bob']}")

    now_s = client.now_ms() // 1000
    created = _ok(*client.call("POST", "/api/matter/vehicles", {
        "vin": f"SCN{seed % 10**6:06d}VIN001",
        "model": "ID.4 GTX",
        "manufacturer": "Volkswagen",
        "warrantyExpiry": now_s + WARRANTY_YEARS_S,
        "batteryHealth": 96.0,
        "mileage": 8000,
        "chargingCycles": 120,
        "drivingPattern": "mixed",
    }, signer=oem), step="create-vehicle", want=201)
    vehicle_id = created["vehicleId"]
    report("create-vehicle", f"{vehicle_id} token={created['tokenId']}")

    key = _ok(*client.call("POST", f"/api/sync-telemetry/key/{vehicle_id}", signer=oem),
              step="telemetry-key", want=201)
    vehicle = _ok(*client.call("GET", f"/api/vehicle/{vehicle_id}"), step="vehicle")
    points = []
    for i in range(48):
        points.append({
            "vehicleId": vehicle_id,
            "timestamp": client.now_ms() - (47 - i) * 3_600_000,
            "mileage": float(vehicle["mileage"]) + i * 1.2,
            "batteryHealth": 96.0 - i * 0.001,
            "chargingCycles": 120 + i // 24,
            "drivingPattern": "mixed",
        })
    mac = hmac_sha256(from_hex(key["secret"]), canonical_serialize(points))
    ingested = _ok(*client.call(
        "POST", f"/api/sync-telemetry/{vehicle_id}",
        {"unit": "km", "points": points, "mac": to_hex(mac)},
        headers={"x-api-key": key["keyId"]},
    ), step="telemetry-ingest")
    if ingested["ingest"]["accepted"] != 48 or not ingested["sync"]["updated"]:
        raise StepFailed(f"telemetry-ingest: unexpected report {json.dumps(ingested)}")
    report("telemetry-ingest", "accepted=48 synced=True")

    anchored = _ok(*client.call("POST", "/api/vehicle/reanchor",
                                {"vehicleId": vehicle_id}, signer=oem), step="reanchor")
    if anchored["status"] != "UpToDate":
        raise StepFailed(f"reanchor: passport is {anchored['status']}")
    report("reanchor", f"status={anchored['status']}")

    payload = {
        "vehicleId": vehicle_id,
        "from": to_hex(oem.address),
        "to": to_hex(ada.address),
        "timestamp": client.now_ms(),
    }
    seller_sig, buyer_sig = _signed_transfer(payload, oem, ada)
    sold = _ok(*client.call("POST", "/api/matter/sell-vehicle", {
        "payload": payload,
        "sellerSignature": seller_sig,
        "buyerSignature": buyer_sig,
    }, signer=oem), step="sell")
    if sold["status"] != "finalized":
        raise StepFailed(f"sell: transfer is {sold['status']}")
    _ok(*client.call("POST", "/api/vehicle/reanchor",
                     {"vehicleId": vehicle_id}, signer=ada), step="reanchor-after-sale")
    report("sell", f"ada holds {vehicle_id} tx={sold['txHash']}")

    serviced_at = client.now_ms() // 1000
    log_hash = compute_log_hash(
        vehicle_id, "battery coolant service", "garage@example.org", serviced_at
    )
    pending = _ok(*client.call("POST", "/api/service-log/request", {
        "vehicleId": vehicle_id,
        "description": "battery coolant service",
        "centerEmail": "garage@example.org",
        "servicedAt": serviced_at,
        "centerSignature": to_hex(sign(center.secret, log_hash)),
    }, signer=center), step="service-submit", want=201)
    final = _ok(*client.call(
        "POST", f"/api/service-log/approve/{pending['id']}",
        {"ownerSignature": to_hex(sign(ada.secret, from_hex(pending["logHash"])))},
        signer=ada,
    ), step="service-approve")
    report("service-log", f"{final['status']} anchor={final['anchorTxHash']}")

    requested = _ok(*client.call("POST", "/api/access-request", {
        "vehicleId": vehicle_id,
        "requester": f"insurer{seed}@example.org",
        "fields": ["batteryHealth", "mileage"],
    }, signer=insurer), step="access-request", want=201)
    approved = _ok(*client.call("POST", f"/api/approve/{requested['id']}",
                                {}, signer=ada), step="access-approve")
    disclosed = _ok(*client.call("GET", f"/api/access/{approved['token']}"),
                    step="access-redeem")
    status, replay = client.call("GET", f"/api/access/{approved['token']}")
    if status != 410 or replay["error"]["code"] != "GONE":
        raise StepFailed(f"access-replay: expected 410 GONE, got {status} {json.dumps(replay)}")
    report("disclosure",
           f"request={requested['id']} fields={sorted(disclosed['data'])} replay=GONE")

    proof_doc = _ok(*client.call("POST", "/api/zkp/batteryHealth",
                                 {"vehicleId": vehicle_id, "threshold": 80},
                                 signer=ada), step="zkp-prove")
    vkey_doc = _ok(*client.call("GET", "/api/vkey/batteryHealth"), step="vkey")
    params = zkp.parse_params(vkey_doc["params"])
    proof = zkp.deserialize_proof(params, from_hex(proof_doc["proof"]))
    statement = zkp.ThresholdStatement(
        kind=ZK_ROUTES["batteryHealth"][0],
        threshold=proof_doc["publicSignals"]["threshold"],
        commitment=int(proof_doc["commitment"][2:], 16),
    )
    if not zkp.verify(params, statement, proof, proof_doc["publicSignals"]):
        raise StepFailed("zkp: proof from the node did not verify locally")
    report("zkp", f"kind={proof_doc['kind']} threshold=80 valid=True")

    payload = {
        "vehicleId": vehicle_id,
        "from": to_hex(ada.address),
        "to": to_hex(bob.address),
        "timestamp": client.now_ms(),
    }
    seller_sig, buyer_sig = _signed_transfer(payload, ada, bob)
    _ok(*client.call("POST", "/api/vehicle/initiate-transfer",
                     {"payload": payload, "sellerSignature": seller_sig},
                     signer=ada), step="transfer-init")
    _ok(*client.call("POST", "/api/vehicle/confirm-transfer",
                     {"payload": payload, "sellerSignature": seller_sig,
                      "buyerSignature": buyer_sig},
                     signer=bob), step="transfer-confirm")
    finalized = _ok(*client.call("POST", "/api/vehicle/finalize-transfer",
                                 {"vehicleId": vehicle_id}, signer=ada),
                    step="transfer-finalize")
    _ok(*client.call("POST", "/api/vehicle/reanchor",
                     {"vehicleId": vehicle_id}, signer=bob),
        step="reanchor-after-transfer")
    report("transfer", f"bob holds {vehicle_id} tx={finalized['txHash']}")

    passport = _ok(*client.call("GET", f"/api/vehicle/{vehicle_id}/passport"),
                   step="passport")
    if passport["status"] != "UpToDate":
        raise StepFailed(f"passport: final status is {passport['status']}")
    portfolio = _ok(*client.call("GET", f"/api/vehicle/owner/{to_hex(bob.address)}"),
                    step="portfolio")
    if vehicle_id not in {v["id"] for v in portfolio}:
        raise StepFailed("portfolio: vehicle is not listed under the new owner")
    logs = _ok(*client.call("GET", f"/api/service-log/vehicle/{vehicle_id}"),
               step="service-history")
    report("verify", f"status={passport['status']} owner=bob serviceLogs={len(logs)}")

    return {
        "vehicleId": vehicle_id,
        "tokenId": created["tokenId"],
        "finalStatus": passport["status"],
        "finalOwner": to_hex(bob.address),
        "digest": passport["digest"],
        "serviceLogs": len(logs),
        "seed": seed,
    }


SCENARIOS = {"full-lifecycle": full_lifecycle}

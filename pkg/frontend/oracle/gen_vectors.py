"""Emit the vector file the TypeScript suite checks its ports against.

Run from frontend/ before the tests:

    python3 oracle/gen_vectors.py

Every expected value in tests/vectors.json comes out of the Python node
implementation, so the TS hash, curve, serializer, and proof-verifier
ports are pinned to the exact bytes the server produces rather than to
hand-copied constants.
"""

from __future__ import annotations

import json
import pathlib
import random

from vehiclepassport import zkp
from vehiclepassport.crypto import (
    canonical_serialize,
    generate_keypair,
    hmac_sha256,
    keccak256,
    sha256,
    sign,
)
from vehiclepassport.service_log import compute_log_hash
from vehiclepassport.transfer import transfer_payload_hash

OUT = pathlib.Path(__file__).resolve().parent.parent / "tests" / "vectors.json"


def det_bytes(tag: str, n: int) -> bytes:
    """sha256 counter stream; reproducible filler for hash inputs."""
    out = b""
    ctr = 0
    while len(out) < n:
        out += sha256(f"{tag}/{ctr}".encode())
        ctr += 1
    return out[:n]


def hash_vectors() -> list[dict]:
    cases = [
        ("empty", b""),
        ("abc", b"abc"),
        ("rate-minus-one", det_bytes("pad", 135)),
        ("rate-exact", det_bytes("pad", 136)),
        ("rate-plus-one", det_bytes("pad", 137)),
        ("two-blocks", det_bytes("blocks", 300)),
        ("utf8-text", "signed by the owner — café \U0001f697".encode()),
    ]
    return [
        {
            "name": name,
            "data": data.hex(),
            "keccak256": keccak256(data).hex(),
            "sha256": sha256(data).hex(),
        }
        for name, data in cases
    ]


def hmac_vectors() -> list[dict]:
    cases = [
        ("short-key", det_bytes("k1", 16), b"telemetry batch"),
        ("block-key", det_bytes("k2", 64), det_bytes("m2", 200)),
        ("long-key", det_bytes("k3", 100), det_bytes("m3", 50)),
    ]
    return [
        {
            "name": name,
            "key": key.hex(),
            "message": msg.hex(),
            "mac": hmac_sha256(key, msg).hex(),
        }
        for name, key, msg in cases
    ]


def canonical_vectors() -> list[dict]:
    docs = [
        ("flat", {"b": 1, "a": 2, "c": [1, 2, 3]}),
        ("nested", {"outer": {"z": None, "y": [True, False]}, "empty": {}, "list": []}),
        (
            "strings",
            {
                "quote": 'she said "hi"',
                "backslash": "a\\b",
                "controls": "tab\there\nnewline\rret\x01raw",
                "unicode": "café 中文 \U0001f697",
            },
        ),
        ("unicode-keys", {"é": 1, "z": 2, "a": 3}),
        ("astral-key-order", {"\U0001f600": 1, "ﬀ": 2}),
        ("integers", {"zero": 0, "neg": -5, "big": 9007199254740991, "ts": 1755907200123}),
        ("floats", {"half": 82.5, "tenth": 0.1, "tiny": 0.0001, "mixed": 12345.678}),
        (
            "transfer-shaped",
            {
                "vehicleId": "a3a2bb49-0000-4000-8000-1234567890ab",
                "from": "0x00a1b2c3d4e5f60718293a4b5c6d7e8f90a1b2c3",
                "to": "0xffeeddccbbaa99887766554433221100ffeeddcc",
                "timestamp": 1755907200123,
            },
        ),
    ]
    return [
        {
            "name": name,
            "doc": doc,
            "canonical": canonical_serialize(doc).hex(),
            "keccak256": keccak256(canonical_serialize(doc)).hex(),
        }
        for name, doc in docs
    ]


def signature_vectors() -> list[dict]:
    out = []
    for seed in (1, 2, 3):
        pair = generate_keypair(seed=seed)
        digest = sha256(f"console vector digest {seed}".encode())
        out.append(
            {
                "seed": seed,
                "secret": format(pair.secret, "064x"),
                "public": pair.public[0].to_bytes(32, "big").hex()
                + pair.public[1].to_bytes(32, "big").hex(),
                "address": pair.address.hex(),
                "digest": digest.hex(),
                "signature": sign(pair.secret, digest).hex(),
            }
        )
    return out


def flow_vectors() -> dict:
    seller = generate_keypair(seed=1)
    buyer = generate_keypair(seed=2)
    center = generate_keypair(seed=3)
    payload = {
        "vehicleId": "a3a2bb49-0000-4000-8000-1234567890ab",
        "from": "0x" + seller.address.hex(),
        "to": "0x" + buyer.address.hex(),
        "timestamp": 1755907200123,
    }
    digest = transfer_payload_hash(payload)
    log_hash = compute_log_hash(
        "a3a2bb49-0000-4000-8000-1234567890ab",
        "brake pads and a coolant flush",
        "workshop@example.org",
        1755900000,
    )
    login_body = {"name": "Ada", "email": "ada@example.org"}
    return {
        "transfer": {
            "payload": payload,
            "canonical": canonical_serialize(payload).hex(),
            "digest": digest.hex(),
            "sellerSignature": sign(seller.secret, digest).hex(),
            "buyerSignature": sign(buyer.secret, digest).hex(),
        },
        "serviceLog": {
            "logHash": log_hash.hex(),
            "centerSignature": sign(center.secret, log_hash).hex(),
        },
        "login": {
            "body": login_body,
            "digest": keccak256(canonical_serialize(login_body)).hex(),
        },
        "emptyBodyDigest": keccak256(b"").hex(),
    }


def _params_doc(params) -> dict:
    return json.loads(zkp.serialize_params(params))


def _zk_case(params, kind: str, value: int, threshold: int, seed: int) -> dict:
    rng = random.Random(seed)
    blinding = rng.randrange(params.group.q)
    commitment = zkp.commit(params, value, blinding)
    statement = zkp.ThresholdStatement(kind=kind, threshold=threshold, commitment=commitment)
    proof, signals = zkp.prove(params, statement, value, blinding, rng=rng)
    blob = zkp.serialize_proof(params, proof)
    assert zkp.verify(params, statement, proof, signals)
    return {
        "kind": kind,
        "value": value,
        "threshold": threshold,
        "commitment": commitment.to_bytes(params.group.element_size, "big").hex(),
        "proof": blob.hex(),
        "publicSignals": signals,
    }


def zk_vectors() -> dict:
    small = zkp.insecure_small_params(6)
    small_cases = [
        _zk_case(small, "BatteryHealthGT", 52, 40, seed=101),
        _zk_case(small, "MileageLT", 9, 30, seed=102),
        _zk_case(small, "WarrantyExpiryGT", 63, 0, seed=103),
        _zk_case(small, "AccessRequestCountLE", 7, 7, seed=104),
        _zk_case(small, "ServiceLogCountGE", 5, 5, seed=105),
    ]
    prod = zkp.setup()
    prod_case = _zk_case(prod, "BatteryHealthGT", 9150, 8000, seed=106)
    base = bytes.fromhex(small_cases[0]["proof"])
    mutation_offsets = sorted({9, 13, 80, 200, 500, 900, len(base) - 40, len(base) - 1})
    return {
        "smallParams": _params_doc(small),
        "smallParamsId": zkp.params_id(small).hex(),
        "smallProofSize": zkp.proof_size(small),
        "smallCases": small_cases,
        "mutationOffsets": mutation_offsets,
        "prodParams": _params_doc(prod),
        "prodParamsId": zkp.params_id(prod).hex(),
        "prodProofSize": zkp.proof_size(prod),
        "prodCase": prod_case,
    }


def main() -> None:
    vectors = {
        "note": "regenerate with: python3 oracle/gen_vectors.py (run from frontend/)",
        "hashes": hash_vectors(),
        "hmacs": hmac_vectors(),
        "canonical": canonical_vectors(),
        "signatures": signature_vectors(),
        "flows": flow_vectors(),
        "zk": zk_vectors(),
    }
    OUT.write_text(json.dumps(vectors, indent=1, sort_keys=True) + "\n")
    print(f"wrote {OUT} ({OUT.stat().st_size} bytes)")


if __name__ == "__main__":
    main()

"""Deterministic in-process ledger with the semantics of three contracts:
an anchor registry, a service-log anchor registry, and a vehicle-bound token.

Every mutation appends one canonical-JSON line to a journal file, so a
restarted node replays the file and reconstructs identical state (same
heights, timestamps, and transaction hashes).
"""

from __future__ import annotations

import dataclasses
import json
import os
import threading

from .clock import Clock
from .crypto import canonical_serialize, from_hex, keccak256, to_hex
from .errors import (
    AlreadyAnchored,
    AlreadyMinted,
    InvalidRecipient,
    NoSuchToken,
    Unauthorized,
    WrongFrom,
)

ZERO_ADDRESS = b"\x00" * 20

EV_ANCHORED = "Anchored"
EV_LOG_ANCHORED = "LogAnchored"
EV_MINTED = "Minted"
EV_TRANSFERRED = "Transferred"
EV_HASH_UPDATED = "VehicleDataHashUpdated"

# op tag used in the txHash preimage and the journal, per event
_OP_TAG = {
    EV_ANCHORED: "anchor",
    EV_LOG_ANCHORED: "loganchor",
    EV_MINTED: "mint",
    EV_TRANSFERRED: "transfer",
    EV_HASH_UPDATED: "sethash",
}


@dataclasses.dataclass(frozen=True)
class AnchorRecord:
    submitter: bytes
    timestamp: int


@dataclasses.dataclass
class TokenRecord:
    owner: bytes
    data_hash: bytes


@dataclasses.dataclass(frozen=True)
class TxReceipt:
    tx_hash: bytes
    height: int
    event: str
    payload: dict
    timestamp: int

    def to_wire(self) -> dict:
        return {
            "txHash": to_hex(self.tx_hash),
            "height": self.height,
            "event": self.event,
            "payload": self.payload,
            "timestamp": self.timestamp,
        }


class Ledger:
    """Single-writer ledger; all mutations serialize on one lock."""

    def __init__(self, admin: bytes, journal_path: str | None = None, clock: Clock | None = None):
        self._admin = admin
        self._clock = clock or Clock()
        self._journal_path = journal_path
        self._lock = threading.Lock()
        self._anchors: dict[bytes, AnchorRecord] = {}
        self._log_anchors: dict[bytes, AnchorRecord] = {}
        self._tokens: dict[int, TokenRecord] = {}
        self._receipts: dict[bytes, TxReceipt] = {}
        self._height = 0
        self._last_ts = 0
        self._journal_fh = None
        if journal_path:
            if os.path.exists(journal_path):
                self._replay(journal_path)
            self._journal_fh = open(journal_path, "a", encoding="utf-8")

    # -- internals ---------------------------------------------------------

    def _next_ts(self) -> int:
        now = self._clock.now_s()
        ts = now if now > self._last_ts else self._last_ts + 1
        self._last_ts = ts
        return ts

    @staticmethod
    def _tx_hash(height: int, event: str, material: bytes) -> bytes:
        return keccak256(height.to_bytes(8, "big") + _OP_TAG[event].encode() + material)

    def _commit(self, event: str, material: bytes, payload: dict, ts: int) -> TxReceipt:
        self._height += 1
        tx_hash = self._tx_hash(self._height, event, material)
        receipt = TxReceipt(tx_hash, self._height, event, payload, ts)
        self._receipts[tx_hash] = receipt
        if self._journal_fh is not None:
            line = canonical_serialize(
                {
                    "height": receipt.height,
                    "op": _OP_TAG[event],
                    "ts": ts,
                    "payload": payload,
                    "txHash": to_hex(tx_hash),
                }
            ).decode("utf-8")
            self._journal_fh.write(line + "\n")
            self._journal_fh.flush()
            os.fsync(self._journal_fh.fileno())
        return receipt

    def _replay(self, path: str) -> None:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                entry = json.loads(line)
                self._apply(entry)

    def _apply(self, entry: dict) -> None:
        op = entry["op"]
        ts = entry["ts"]
        payload = entry["payload"]
        self._last_ts = ts
        if op == "anchor":
            h = from_hex(payload["hash"])
            self._anchors[h] = AnchorRecord(from_hex(payload["submitter"]), ts)
            material = h
            event = EV_ANCHORED
        elif op == "loganchor":
            h = from_hex(payload["hash"])
            self._log_anchors[h] = AnchorRecord(from_hex(payload["submitter"]), ts)
            material = h
            event = EV_LOG_ANCHORED
        elif op == "mint":
            token_id = int(payload["tokenId"])
            to = from_hex(payload["to"])
            data_hash = from_hex(payload["dataHash"])
            self._tokens[token_id] = TokenRecord(to, data_hash)
            material = token_id.to_bytes(8, "big") + to + data_hash
            event = EV_MINTED
        elif op == "transfer":
            token_id = int(payload["tokenId"])
            src = from_hex(payload["from"])
            dst = from_hex(payload["to"])
            self._tokens[token_id].owner = dst
            material = token_id.to_bytes(8, "big") + src + dst
            event = EV_TRANSFERRED
        elif op == "sethash":
            token_id = int(payload["tokenId"])
            data_hash = from_hex(payload["dataHash"])
            self._tokens[token_id].data_hash = data_hash
            material = token_id.to_bytes(8, "big") + data_hash
            event = EV_HASH_UPDATED
        else:
            raise ValueError(f"unknown journal op {op!r}")
        self._height = entry["height"]
        tx_hash = from_hex(entry["txHash"])
        expected = self._tx_hash(self._height, event, material)
        if tx_hash != expected:
            raise ValueError(f"journal corrupt at height {self._height}")
        self._receipts[tx_hash] = TxReceipt(tx_hash, self._height, event, payload, ts)

    # -- anchor registry ---------------------------------------------------

    def anchor_hash(self, h: bytes, submitter: bytes) -> TxReceipt:
        with self._lock:
            if h in self._anchors:
                raise AlreadyAnchored()
            ts = self._next_ts()
            self._anchors[h] = AnchorRecord(submitter, ts)
            return self._commit(
                EV_ANCHORED, h, {"hash": to_hex(h), "submitter": to_hex(submitter)}, ts
            )

    def is_anchored(self, h: bytes) -> AnchorRecord | None:
        return self._anchors.get(h)

    # -- service log registry (separate namespace) -------------------------

    def anchor_service_log(self, h: bytes, submitter: bytes) -> TxReceipt:
        with self._lock:
            if h in self._log_anchors:
                raise AlreadyAnchored()
            ts = self._next_ts()
            self._log_anchors[h] = AnchorRecord(submitter, ts)
            return self._commit(
                EV_LOG_ANCHORED, h, {"hash": to_hex(h), "submitter": to_hex(submitter)}, ts
            )

    def is_log_anchored(self, h: bytes) -> AnchorRecord | None:
        return self._log_anchors.get(h)

    # -- vehicle token -----------------------------------------------------

    def mint(self, to: bytes, token_id: int, data_hash: bytes, caller: bytes) -> TxReceipt:
        with self._lock:
            if caller != self._admin:
                raise Unauthorized("only the registry administrator can mint")
            if token_id in self._tokens:
                raise AlreadyMinted()
            if to == ZERO_ADDRESS:
                raise InvalidRecipient("cannot mint to the zero address")
            ts = self._next_ts()
            self._tokens[token_id] = TokenRecord(to, data_hash)
            material = token_id.to_bytes(8, "big") + to + data_hash
            return self._commit(
                EV_MINTED,
                material,
                {"tokenId": str(token_id), "to": to_hex(to), "dataHash": to_hex(data_hash)},
                ts,
            )

    def owner_of(self, token_id: int) -> bytes:
        record = self._tokens.get(token_id)
        if record is None:
            raise NoSuchToken(f"token {token_id} not minted")
        return record.owner

    def token_data_hash(self, token_id: int) -> bytes:
        record = self._tokens.get(token_id)
        if record is None:
            raise NoSuchToken(f"token {token_id} not minted")
        return record.data_hash

    def safe_transfer_from(self, src: bytes, dst: bytes, token_id: int, caller: bytes) -> TxReceipt:
        with self._lock:
            record = self._tokens.get(token_id)
            if record is None:
                raise NoSuchToken(f"token {token_id} not minted")
            if caller != record.owner:
                raise Unauthorized("caller does not own the token")
            if src != record.owner:
                raise WrongFrom("from address is not the current owner")
            if dst == ZERO_ADDRESS:
                raise InvalidRecipient("cannot transfer to the zero address")
            ts = self._next_ts()
            record.owner = dst
            material = token_id.to_bytes(8, "big") + src + dst
            return self._commit(
                EV_TRANSFERRED,
                material,
                {"tokenId": str(token_id), "from": to_hex(src), "to": to_hex(dst)},
                ts,
            )

    def update_data_hash(self, token_id: int, data_hash: bytes, caller: bytes) -> TxReceipt:
        """Replace the commitment held by a token after a data refresh.
        Gated to the registry administrator, mirroring the mint path."""
        with self._lock:
            if caller != self._admin:
                raise Unauthorized("only the registry administrator can update the hash")
            record = self._tokens.get(token_id)
            if record is None:
                raise NoSuchToken(f"token {token_id} not minted")
            ts = self._next_ts()
            record.data_hash = data_hash
            material = token_id.to_bytes(8, "big") + data_hash
            return self._commit(
                EV_HASH_UPDATED,
                material,
                {"tokenId": str(token_id), "dataHash": to_hex(data_hash)},
                ts,
            )

    # -- explorer ----------------------------------------------------------

    def receipt(self, tx_hash: bytes) -> TxReceipt | None:
        return self._receipts.get(tx_hash)

    @property
    def height(self) -> int:
        return self._height

    def close(self) -> None:
        if self._journal_fh is not None:
            self._journal_fh.close()
            self._journal_fh = None

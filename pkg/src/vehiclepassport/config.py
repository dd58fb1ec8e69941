"""Node configuration.

Everything the process needs is collected here: storage paths, the server
MAC key, the admin signing key, wallets flagged as OEM, rate limits, the
transfer freshness window, and the comparator width used by the proof
routes.  Values come from explicit constructor arguments or, for the
daemon entry point, from ``VP_*`` environment variables.
"""

from __future__ import annotations

import dataclasses
import os
import secrets

from .crypto import from_hex

DEFAULT_SESSION_TTL_S = 30 * 60
DEFAULT_RATE_CAPACITY = 10
DEFAULT_RATE_REFILL_PER_S = 10.0


def _env_bool(name: str, default: bool) -> bool:
    raw = os.environ.get(name)
    if raw is None:
        return default
    return raw.strip().lower() in ("1", "true", "yes", "on")


@dataclasses.dataclass
class NodeConfig:
    store_path: str = ":memory:"
    telemetry_path: str = ":memory:"
    journal_path: str | None = None
    # symmetric key for disclosure and session tokens; ephemeral by default
    mac_key: bytes = dataclasses.field(default_factory=lambda: secrets.token_bytes(32))
    # node identity: signs audit rows and submits ledger transactions
    admin_secret: bytes | None = None
    # wallets allowed on the /api/matter/* routes
    oem_wallets: tuple[bytes, ...] = ()
    listen: str = "127.0.0.1:8000"
    zkp_listen: str = "127.0.0.1:8001"
    # serve /api/zkp and /api/vkey from a second app instead of inline
    split_zkp: bool = False
    rate_capacity: int = DEFAULT_RATE_CAPACITY
    rate_refill_per_s: float = DEFAULT_RATE_REFILL_PER_S
    session_ttl_s: int = DEFAULT_SESSION_TTL_S
    transfer_freshness_ms: int = 300_000
    # 32 is the production comparator width; 1..16 selects the small
    # test-only parameter set
    proof_bits: int = 32
    permissive_cors: bool = True
    # deterministic ids and a frozen clock for reproducible scenario runs;
    # only meaningful within a single process lifetime
    seed: int | None = None

    @classmethod
    def from_env(cls) -> "NodeConfig":
        env = os.environ
        kwargs: dict = {}
        if "VP_STORE_PATH" in env:
            kwargs["store_path"] = env["VP_STORE_PATH"]
        if "VP_TELEMETRY_PATH" in env:
            kwargs["telemetry_path"] = env["VP_TELEMETRY_PATH"]
        if "VP_JOURNAL_PATH" in env:
            kwargs["journal_path"] = env["VP_JOURNAL_PATH"]
        if "VP_MAC_KEY" in env:
            kwargs["mac_key"] = from_hex(env["VP_MAC_KEY"])
        if "VP_ADMIN_SECRET" in env:
            kwargs["admin_secret"] = from_hex(env["VP_ADMIN_SECRET"])
        if "VP_OEM_WALLETS" in env:
            kwargs["oem_wallets"] = tuple(
                from_hex(part.strip())
                for part in env["VP_OEM_WALLETS"].split(",")
                if part.strip()
            )
        if "VP_LISTEN" in env:
            kwargs["listen"] = env["VP_LISTEN"]
        if "VP_ZKP_LISTEN" in env:
            kwargs["zkp_listen"] = env["VP_ZKP_LISTEN"]
        kwargs["split_zkp"] = _env_bool("VP_SPLIT_ZKP", False)
        if "VP_RATE_CAPACITY" in env:
            kwargs["rate_capacity"] = int(env["VP_RATE_CAPACITY"])
        if "VP_RATE_REFILL_PER_S" in env:
            kwargs["rate_refill_per_s"] = float(env["VP_RATE_REFILL_PER_S"])
        if "VP_SESSION_TTL_S" in env:
            kwargs["session_ttl_s"] = int(env["VP_SESSION_TTL_S"])
        if "VP_TRANSFER_FRESHNESS_MS" in env:
            kwargs["transfer_freshness_ms"] = int(env["VP_TRANSFER_FRESHNESS_MS"])
        if "VP_PROOF_BITS" in env:
            kwargs["proof_bits"] = int(env["VP_PROOF_BITS"])
        kwargs["permissive_cors"] = _env_bool("VP_PERMISSIVE_CORS", True)
        if "VP_SEED" in env:
            kwargs["seed"] = int(env["VP_SEED"])
        return cls(**kwargs)

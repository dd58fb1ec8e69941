"""Tamper-evident vehicle passports: ledger anchoring, selective disclosure,
dual-signature workflows, telemetry sync, and commitment-based range proofs."""

__version__ = "0.1.0"

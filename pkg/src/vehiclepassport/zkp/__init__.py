"""Zero-knowledge threshold proofs over committed vehicle metrics."""

from .group import PROD_GROUP, SMALL_GROUP, Group, derive_group, hash_to_group
from .proof import (
    KINDS,
    PROOF_BITS,
    BitProof,
    ProofParams,
    ThresholdProof,
    ThresholdStatement,
    commit,
    derived_commitment,
    deserialize_proof,
    insecure_small_params,
    params_id,
    parse_params,
    proof_size,
    prove,
    serialize_params,
    serialize_proof,
    setup,
    verification_params,
    verify,
)

__all__ = [
    "Group",
    "PROD_GROUP",
    "SMALL_GROUP",
    "derive_group",
    "hash_to_group",
    "KINDS",
    "PROOF_BITS",
    "BitProof",
    "ProofParams",
    "ThresholdProof",
    "ThresholdStatement",
    "commit",
    "derived_commitment",
    "deserialize_proof",
    "insecure_small_params",
    "params_id",
    "parse_params",
    "proof_size",
    "prove",
    "serialize_params",
    "serialize_proof",
    "setup",
    "verification_params",
    "verify",
]

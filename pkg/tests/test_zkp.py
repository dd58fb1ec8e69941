import operator
import random

import pytest

from vehiclepassport.errors import (
    BadWitness,
    MalformedProof,
    NotFound,
    OutOfRange,
    PredicateNotSatisfied,
    Unsupported,
)
from vehiclepassport.zkp import (
    KINDS,
    PROD_GROUP,
    SMALL_GROUP,
    ThresholdStatement,
    commit,
    derive_group,
    deserialize_proof,
    hash_to_group,
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
from vehiclepassport.zkp.group import GROUP_TAG_2048, GROUP_TAG_512

_PLAIN_COMPARE = {
    "BatteryHealthGT": operator.gt,
    "MileageLT": operator.lt,
    "WarrantyExpiryGT": operator.gt,
    "AccessRequestCountLE": operator.le,
    "ServiceLogCountGE": operator.ge,
}


@pytest.fixture(scope="module")
def small():
    return insecure_small_params(6)


@pytest.fixture(scope="module")
def prod():
    return setup()


def make_proof(params, kind, value, threshold, rng):
    r = rng.randrange(params.group.q)
    c = commit(params, value, r)
    st = ThresholdStatement(kind=kind, threshold=threshold, commitment=c)
    proof, signals = prove(params, st, value, r, rng=rng)
    return st, proof, signals, r


class TestGroups:
    def test_derivation_reproduces_production_group(self):
        assert derive_group(2048, 256, GROUP_TAG_2048) == PROD_GROUP

    def test_derivation_reproduces_small_group(self):
        assert derive_group(512, 160, GROUP_TAG_512) == SMALL_GROUP

    @pytest.mark.parametrize("group", [PROD_GROUP, SMALL_GROUP])
    def test_generator_has_subgroup_order(self, group):
        assert (group.p - 1) % group.q == 0
        assert group.g != 1
        assert pow(group.g, group.q, group.p) == 1

    def test_hash_to_group_lands_in_subgroup(self):
        h = hash_to_group(SMALL_GROUP, b"unit-test-tag")
        assert h not in (1, SMALL_GROUP.g)
        assert pow(h, SMALL_GROUP.q, SMALL_GROUP.p) == 1


class TestSetup:
    def test_deterministic(self):
        assert serialize_params(setup()) == serialize_params(setup())

    def test_width_is_fixed(self):
        with pytest.raises(Unsupported):
            setup(16)

    def test_second_generator_is_fresh(self, prod):
        assert prod.h != prod.group.g
        assert prod.h != 1
        assert pow(prod.h, prod.group.q, prod.group.p) == 1

    def test_params_document_round_trips(self, prod):
        doc = verification_params("BatteryHealthGT")
        parsed = parse_params(doc["params"])
        assert parsed == prod
        assert params_id(parsed).hex() == doc["paramsId"]

    def test_small_params_width_bounds(self):
        with pytest.raises(Unsupported):
            insecure_small_params(0)
        with pytest.raises(Unsupported):
            insecure_small_params(17)

    def test_parse_rejects_garbage(self):
        with pytest.raises(MalformedProof):
            parse_params({"p": "zz", "q": "3", "g": "2", "h": "4", "bits": 6})
        with pytest.raises(MalformedProof):
            parse_params({"q": "3", "g": "2", "h": "4", "bits": 6})


class TestCommit:
    def test_zero_zero_is_identity(self, small):
        assert commit(small, 0, 0) == 1

    def test_blinding_hides(self, small):
        assert commit(small, 9, 1) != commit(small, 9, 2)

    def test_homomorphism(self, small):
        p = small.group.p
        lhs = commit(small, 5, 11) * commit(small, 7, 13) % p
        assert lhs == commit(small, 12, 24)

    def test_negative_blinding_wraps(self, small):
        q = small.group.q
        assert commit(small, 3, -5) == commit(small, 3, q - 5)

    @pytest.mark.parametrize("value", [-1, 64, 1 << 20, True, 1.5, "9"])
    def test_value_range(self, small, value):
        with pytest.raises(OutOfRange):
            commit(small, value, 1)


class TestStatement:
    def test_unknown_kind(self):
        with pytest.raises(NotFound):
            ThresholdStatement(kind="OdometerEQ", threshold=1, commitment=2)

    @pytest.mark.parametrize("threshold", [-1, 1 << 32, True, 2.0])
    def test_threshold_range(self, threshold):
        with pytest.raises(OutOfRange):
            ThresholdStatement(kind="MileageLT", threshold=threshold, commitment=2)


class TestProve:
    def test_strict_greater_holds(self, small):
        rng = random.Random(10)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 40, 30, rng)
        assert signals == {"threshold": 30, "result": 1}
        assert verify(small, st, proof, signals) is True

    def test_equal_value_fails_strict_comparison(self, small):
        rng = random.Random(11)
        r = rng.randrange(small.group.q)
        c = commit(small, 30, r)
        st = ThresholdStatement(kind="BatteryHealthGT", threshold=30, commitment=c)
        with pytest.raises(PredicateNotSatisfied):
            prove(small, st, 30, r, rng=rng)

    def test_wrong_blinding_is_bad_witness(self, small):
        rng = random.Random(12)
        c = commit(small, 40, 7)
        st = ThresholdStatement(kind="BatteryHealthGT", threshold=30, commitment=c)
        with pytest.raises(BadWitness):
            prove(small, st, 40, 8, rng=rng)

    def test_wrong_value_is_bad_witness(self, small):
        rng = random.Random(13)
        c = commit(small, 40, 7)
        st = ThresholdStatement(kind="BatteryHealthGT", threshold=30, commitment=c)
        with pytest.raises(BadWitness):
            prove(small, st, 41, 7, rng=rng)

    @pytest.mark.parametrize(
        "kind,value,threshold,holds",
        [
            ("BatteryHealthGT", 31, 30, True),
            ("BatteryHealthGT", 30, 30, False),
            ("WarrantyExpiryGT", 63, 62, True),
            ("WarrantyExpiryGT", 62, 62, False),
            ("MileageLT", 29, 30, True),
            ("MileageLT", 30, 30, False),
            ("AccessRequestCountLE", 30, 30, True),
            ("AccessRequestCountLE", 31, 30, False),
            ("ServiceLogCountGE", 30, 30, True),
            ("ServiceLogCountGE", 29, 30, False),
        ],
    )
    def test_comparator_boundaries(self, small, kind, value, threshold, holds):
        rng = random.Random(value * 100 + threshold)
        if holds:
            st, proof, signals, _ = make_proof(small, kind, value, threshold, rng)
            assert verify(small, st, proof, signals) is True
        else:
            r = rng.randrange(small.group.q)
            st = ThresholdStatement(
                kind=kind, threshold=threshold, commitment=commit(small, value, r)
            )
            with pytest.raises(PredicateNotSatisfied):
                prove(small, st, value, r, rng=rng)

    def test_true_predicate_with_oversized_difference(self, small):
        # v < t holds but t - v - 1 needs more than 6 bits
        rng = random.Random(14)
        r = rng.randrange(small.group.q)
        st = ThresholdStatement(kind="MileageLT", threshold=100, commitment=commit(small, 5, r))
        with pytest.raises(OutOfRange):
            prove(small, st, 5, r, rng=rng)


class TestVerify:
    def test_statement_binding_theta_plus_one(self, small):
        rng = random.Random(20)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 40, 30, rng)
        shifted = ThresholdStatement(kind=st.kind, threshold=31, commitment=st.commitment)
        assert verify(small, shifted, proof, {"threshold": 31, "result": 1}) is False

    def test_kind_binding(self, small):
        rng = random.Random(21)
        st, proof, signals, _ = make_proof(small, "ServiceLogCountGE", 40, 30, rng)
        other = ThresholdStatement(kind="BatteryHealthGT", threshold=30, commitment=st.commitment)
        assert verify(small, other, proof, signals) is False

    def test_public_signals_checked(self, small):
        rng = random.Random(22)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 40, 30, rng)
        assert verify(small, st, proof, {"threshold": 30, "result": 0}) is False
        assert verify(small, st, proof, {"threshold": 29, "result": 1}) is False
        assert verify(small, st, proof, {}) is False

    def test_commitment_swap_rejected(self, small):
        rng = random.Random(23)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 40, 30, rng)
        other = ThresholdStatement(
            kind=st.kind, threshold=st.threshold, commitment=commit(small, 50, 99)
        )
        assert verify(small, other, proof, signals) is False

    def test_shape_violations_are_malformed(self, small):
        rng = random.Random(24)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 40, 30, rng)
        proof.challenge = proof.challenge[:-1]
        with pytest.raises(MalformedProof):
            verify(small, st, proof, signals)

    def test_cross_params_proof_is_malformed(self, small, prod):
        rng = random.Random(25)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 40, 30, rng)
        blob = serialize_proof(small, proof)
        with pytest.raises(MalformedProof):
            deserialize_proof(prod, blob)


class TestWireFormat:
    def test_round_trip(self, small):
        rng = random.Random(30)
        st, proof, signals, _ = make_proof(small, "MileageLT", 12, 40, rng)
        blob = serialize_proof(small, proof)
        assert len(blob) == proof_size(small)
        again = deserialize_proof(small, blob)
        assert verify(small, st, again, signals) is True

    def test_bad_magic(self, small):
        with pytest.raises(MalformedProof):
            deserialize_proof(small, b"NOPE" + b"\x00" * 40)

    def test_bad_version(self, small):
        rng = random.Random(31)
        _, proof, _, _ = make_proof(small, "MileageLT", 12, 40, rng)
        blob = bytearray(serialize_proof(small, proof))
        blob[4] = 9
        with pytest.raises(MalformedProof):
            deserialize_proof(small, bytes(blob))

    def test_lying_length_prefix(self, small):
        rng = random.Random(32)
        _, proof, _, _ = make_proof(small, "MileageLT", 12, 40, rng)
        blob = bytearray(serialize_proof(small, proof))
        blob[8] ^= 0x01
        with pytest.raises(MalformedProof):
            deserialize_proof(small, bytes(blob))

    def test_truncated(self, small):
        rng = random.Random(33)
        _, proof, _, _ = make_proof(small, "MileageLT", 12, 40, rng)
        blob = serialize_proof(small, proof)
        with pytest.raises(MalformedProof):
            deserialize_proof(small, blob[:-4])

    def test_zero_element_rejected(self, small):
        rng = random.Random(34)
        _, proof, _, _ = make_proof(small, "MileageLT", 12, 40, rng)
        blob = bytearray(serialize_proof(small, proof))
        esz = small.element_size
        blob[13 : 13 + esz] = b"\x00" * esz  # first bit commitment
        with pytest.raises(MalformedProof):
            deserialize_proof(small, bytes(blob))

    def test_overlarge_scalar_rejected(self, small):
        rng = random.Random(35)
        _, proof, _, _ = make_proof(small, "MileageLT", 12, 40, rng)
        blob = bytearray(serialize_proof(small, proof))
        # first scalar of the first bit proof sits after 6 bit commitments
        # and two first-message elements
        pos = 13 + 6 * small.element_size + 2 * small.element_size
        blob[pos : pos + small.scalar_size] = b"\xff" * small.scalar_size
        with pytest.raises(MalformedProof):
            deserialize_proof(small, bytes(blob))


class TestSmallDomainExhaustive:
    def test_battery_gt_full_enumeration(self, small):
        """Prove-iff-predicate over every (value, threshold) pair in the
        6-bit domain; the expected answer is the plain integer comparison."""
        rng = random.Random(40)
        q = small.group.q
        for value in range(64):
            for threshold in range(64):
                r = rng.randrange(q)
                st = ThresholdStatement(
                    kind="BatteryHealthGT",
                    threshold=threshold,
                    commitment=commit(small, value, r),
                )
                if value > threshold:
                    proof, signals = prove(small, st, value, r, rng=rng)
                    assert verify(small, st, proof, signals) is True
                else:
                    with pytest.raises(PredicateNotSatisfied):
                        prove(small, st, value, r, rng=rng)

    @pytest.mark.parametrize(
        "kind", ["MileageLT", "WarrantyExpiryGT", "AccessRequestCountLE", "ServiceLogCountGE"]
    )
    def test_other_kinds_boundary_band_and_sample(self, small, kind):
        """Dense band around the comparison boundary plus a random spread;
        the full five-kind enumeration runs in the acceptance suite."""
        rng = random.Random(41)
        compare = _PLAIN_COMPARE[kind]
        q = small.group.q
        pairs = {
            (v, t)
            for t in range(64)
            for v in range(max(0, t - 2), min(64, t + 3))
        }
        while len(pairs) < 500:
            pairs.add((rng.randrange(64), rng.randrange(64)))
        for value, threshold in sorted(pairs):
            r = rng.randrange(q)
            st = ThresholdStatement(
                kind=kind, threshold=threshold, commitment=commit(small, value, r)
            )
            if compare(value, threshold):
                proof, signals = prove(small, st, value, r, rng=rng)
                assert verify(small, st, proof, signals) is True
            else:
                with pytest.raises(PredicateNotSatisfied):
                    prove(small, st, value, r, rng=rng)


class TestSingleByteMutation:
    def test_every_position_rejects(self, small):
        """Exhaustively corrupt each byte of one serialized proof; the
        verifier may call it malformed or just false, never true."""
        rng = random.Random(50)
        st, proof, signals, _ = make_proof(small, "BatteryHealthGT", 45, 20, rng)
        blob = serialize_proof(small, proof)
        for pos in range(len(blob)):
            mutated = bytearray(blob)
            mutated[pos] ^= 0x5A
            try:
                candidate = deserialize_proof(small, bytes(mutated))
            except MalformedProof:
                continue
            assert verify(small, st, candidate, signals) is False, f"byte {pos} accepted"


class TestZeroKnowledgeSmoke:
    def test_transcripts_randomize_per_proof(self, small):
        rng = random.Random(60)
        r = rng.randrange(small.group.q)
        c = commit(small, 40, r)
        st = ThresholdStatement(kind="BatteryHealthGT", threshold=10, commitment=c)
        one, _ = prove(small, st, 40, r, rng=rng)
        two, _ = prove(small, st, 40, r, rng=rng)
        assert serialize_proof(small, one) != serialize_proof(small, two)

    def test_no_witness_bytes_in_serialized_proofs(self, small):
        rng = random.Random(61)
        value = 47
        needle32 = value.to_bytes(4, "big")
        for _ in range(64):
            st, proof, signals, _ = make_proof(small, "BatteryHealthGT", value, 3, rng)
            blob = serialize_proof(small, proof)
            assert needle32 not in blob

    def test_witness_does_not_shift_byte_moments(self, small):
        """First/second-moment comparison of serialized transcripts for two
        witnesses proving the same statement shape; means over uniform
        scalars concentrate, so a real leak would separate them."""
        rng = random.Random(62)
        n = 120

        def moments(value):
            means = []
            sqs = []
            for _ in range(n):
                _, proof, _, _ = make_proof(small, "BatteryHealthGT", value, 2, rng)
                blob = serialize_proof(small, proof)
                means.append(sum(blob) / len(blob))
                sqs.append(sum(b * b for b in blob) / len(blob))
            return sum(means) / n, sum(sqs) / n

        mean_low, sq_low = moments(5)
        mean_high, sq_high = moments(60)
        assert abs(mean_low - mean_high) < 2.0
        assert abs(sq_low - sq_high) < 450.0


class TestVerificationParams:
    def test_known_kind(self):
        doc = verification_params("ServiceLogCountGE")
        assert doc["comparator"] == "value >= threshold"
        assert doc["params"]["bits"] == 32
        assert doc["proofSize"] == proof_size(setup())

    def test_unknown_kind(self):
        with pytest.raises(NotFound):
            verification_params("TirePressureGT")

    def test_identical_across_calls(self):
        assert verification_params("MileageLT") == verification_params("MileageLT")

    def test_remote_verifier_needs_nothing_else(self, prod):
        """A verifier bootstrapped only from the published document checks a
        real production proof."""
        rng = random.Random(70)
        st, proof, signals, _ = make_proof(prod, "BatteryHealthGT", 90, 80, rng)
        blob = serialize_proof(prod, proof)
        remote = parse_params(verification_params("BatteryHealthGT")["params"])
        assert verify(remote, st, deserialize_proof(remote, blob), signals) is True

    def test_all_kinds_have_documents(self):
        for kind in KINDS:
            doc = verification_params(kind)
            assert doc["kind"] == kind

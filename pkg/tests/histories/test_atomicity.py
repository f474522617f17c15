import pytest

from src.quorumlab.core.values import Value
from src.quorumlab.exceptions import HistoryValidationError, OracleLimitError
from src.quorumlab.histories.atomicity import (
    CYCLE,
    READ_BEFORE_WRITE,
    UNKNOWN_VALUE,
    check_atomic,
    explain,
    verify_witness,
)
from src.quorumlab.histories.model import check_wellformed
from src.quorumlab.histories.oracle import brute_force_atomic, random_history
from tests.helpers import history, op

W0, W1, R0, R1 = 0, 1, 2, 3
A, B = Value(1, W0), Value(1, W1)


def concurrent_writes(*reads):
    return history(
        op(0, W0, "write", A, 0, 10),
        op(1, W1, "write", B, 2, 12),
        *reads,
    )


CORNERS = {
    "empty": history(),
    "initial read": history(op(0, R0, "read", Value.initial(), 0, 1)),
    "stale initial read": history(op(0, W0, "write", A, 0, 5), op(1, R0, "read", Value.initial(), 6, 8)),
    "either write after both (a)": concurrent_writes(op(2, R0, "read", A, 20, 25)),
    "either write after both (b)": concurrent_writes(op(2, R0, "read", B, 20, 25)),
    "new-old inversion": concurrent_writes(op(2, R0, "read", B, 20, 22), op(3, R1, "read", A, 23, 25)),
    "read of pending write": history(op(0, W0, "write", A, 0), op(1, R0, "read", A, 3, 5)),
    "pending read dropped": history(op(0, W0, "write", A, 0, 2), op(1, R0, "read", None, 3)),
    "unread pending write": history(op(0, W0, "write", A, 0), op(1, R0, "read", Value.initial(), 3, 5)),
    "read during write": history(op(0, W0, "write", A, 0, 10), op(1, R0, "read", A, 2, 4), op(2, R1, "read", Value.initial(), 5, 6)),
    "read before its write": history(op(0, R0, "read", A, 0, 1), op(1, W0, "write", A, 2, 3)),
    "unknown value": history(op(0, R0, "read", Value(9, W1), 0, 1)),
}


class TestCorners:
    @pytest.mark.parametrize(
        "name,atomic",
        [
            ("empty", True),
            ("initial read", True),
            ("stale initial read", False),
            ("either write after both (a)", True),
            ("either write after both (b)", True),
            ("new-old inversion", False),
            ("read of pending write", True),
            ("pending read dropped", True),
            ("unread pending write", True),
            ("read during write", False),
            ("read before its write", False),
            ("unknown value", False),
        ],
    )
    def test_verdict(self, name, atomic):
        h = CORNERS[name]
        verdict = check_atomic(h)
        assert verdict.atomic is atomic
        if atomic:
            assert verify_witness(h, verdict.witness)
        else:
            assert verdict.certificate is not None
            assert verdict.witness is None

    @pytest.mark.parametrize("name", sorted(CORNERS))
    def test_oracle_agrees(self, name):
        assert check_atomic(CORNERS[name]).atomic is brute_force_atomic(CORNERS[name]).atomic

    def test_certificate_kinds(self):
        assert check_atomic(CORNERS["unknown value"]).certificate.kind == UNKNOWN_VALUE
        assert check_atomic(CORNERS["read before its write"]).certificate.kind == READ_BEFORE_WRITE
        cert = check_atomic(CORNERS["new-old inversion"]).certificate
        assert cert.kind == CYCLE
        assert set(cert.ops) >= {2, 3}

    def test_witness_lists_write_before_its_reads(self):
        verdict = check_atomic(CORNERS["either write after both (a)"])
        assert verdict.witness == (1, 0, 2)

    def test_pending_write_that_was_read_is_placed(self):
        verdict = check_atomic(CORNERS["read of pending write"])
        assert verdict.witness == (0, 1)

    def test_explain(self):
        h = CORNERS["new-old inversion"]
        lines = explain(check_atomic(h), h)
        assert lines[0].startswith("violation (cycle)")
        assert explain(check_atomic(CORNERS["empty"]), CORNERS["empty"]) == ["atomic", "witness: "]


class TestVerifyWitness:
    def test_rejects_wrong_read_from(self):
        h = CORNERS["either write after both (a)"]
        assert not verify_witness(h, (0, 1, 2))

    def test_rejects_real_time_inversion(self):
        h = history(op(0, W0, "write", A, 0, 2), op(1, W1, "write", B, 5, 7))
        assert verify_witness(h, (0, 1))
        assert not verify_witness(h, (1, 0))

    def test_rejects_missing_or_pending_reads(self):
        h = CORNERS["pending read dropped"]
        assert verify_witness(h, (0,))
        assert not verify_witness(h, (0, 1))
        assert not verify_witness(h, ())


class TestValidation:
    def test_duplicate_written_values(self):
        h = history(op(0, W0, "write", A, 0, 1), op(1, W1, "write", A, 2, 3))
        with pytest.raises(HistoryValidationError):
            check_atomic(h)

    def test_client_overlaps_itself(self):
        h = history(op(0, W0, "write", A, 0, 5), op(1, W0, "write", Value(2, W0), 3, 8))
        assert not check_wellformed(h)
        with pytest.raises(HistoryValidationError):
            check_atomic(h)

    def test_inverted_interval(self):
        with pytest.raises(HistoryValidationError):
            check_atomic(history(op(0, W0, "write", A, 5, 5)))

    def test_write_of_initial_value(self):
        with pytest.raises(HistoryValidationError):
            check_atomic(history(op(0, W0, "write", Value.initial(), 0, 1)))

    def test_completed_read_without_value(self):
        with pytest.raises(HistoryValidationError):
            check_atomic(history(op(0, R0, "read", None, 0, 1)))


class TestOracleCrossValidation:
    def test_random_corpus(self):
        outcomes = set()
        for seed in range(400):
            h = random_history(seed, n_ops=7)
            assert check_wellformed(h)
            fast = check_atomic(h)
            slow = brute_force_atomic(h)
            assert fast.atomic is slow.atomic, seed
            if fast.atomic:
                assert verify_witness(h, fast.witness), seed
                assert verify_witness(h, slow.witness), seed
            outcomes.add(fast.atomic)
        assert outcomes == {True, False}

    def test_random_history_is_reproducible(self):
        assert random_history(5) == random_history(5)

    def test_limit(self):
        ops = [op(i, W0, "write", Value(i + 1, W0), 2 * i, 2 * i + 1) for i in range(9)]
        with pytest.raises(OracleLimitError):
            brute_force_atomic(history(*ops))

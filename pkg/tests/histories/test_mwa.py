from src.quorumlab.core.values import Value
from src.quorumlab.histories.mwa import PROPERTIES, check_mwa
from src.quorumlab.histories.oracle import random_history
from src.quorumlab.histories.atomicity import check_atomic
from tests.helpers import history, op

W0, W1, R0, R1 = 0, 1, 2, 3


def only(report, prop, count=1):
    expected = {p: 0 for p in PROPERTIES}
    expected[prop] = count
    return report.counts() == expected


class TestProperties:
    def test_clean_history(self):
        h = history(
            op(0, W0, "write", Value(1, W0), 0, 2),
            op(1, R0, "read", Value(1, W0), 3, 4),
            op(2, W1, "write", Value(2, W1), 5, 7),
            op(3, R1, "read", Value(2, W1), 8, 9),
        )
        report = check_mwa(h)
        assert report.clean
        assert report.to_dict()["counts"] == {p: 0 for p in PROPERTIES}

    def test_mwa0_writes_follow_real_time(self):
        h = history(op(0, W0, "write", Value(2, W0), 0, 1), op(1, W1, "write", Value(1, W1), 2, 3))
        assert only(check_mwa(h), "MWA0")

    def test_mwa1_unknown_value(self):
        h = history(op(0, R0, "read", Value(5, W1), 0, 1))
        report = check_mwa(h)
        assert only(report, "MWA1")
        assert report.of("MWA1")[0].ops == (0,)

    def test_mwa1_negative_timestamp(self):
        assert only(check_mwa(history(op(0, R0, "read", Value(-1, W0), 0, 1))), "MWA1")

    def test_mwa2_read_after_write(self):
        h = history(op(0, W0, "write", Value(1, W0), 0, 1), op(1, R0, "read", Value.initial(), 2, 3))
        assert only(check_mwa(h), "MWA2")

    def test_mwa3_read_before_write(self):
        h = history(op(0, R0, "read", Value(1, W0), 0, 1), op(1, W0, "write", Value(1, W0), 2, 3))
        assert only(check_mwa(h), "MWA3")

    def test_mwa4_reads_do_not_go_back(self):
        h = history(
            op(0, W0, "write", Value(1, W0), 0, 10),
            op(1, W1, "write", Value(2, W1), 0, 10),
            op(2, R0, "read", Value(2, W1), 1, 2),
            op(3, R1, "read", Value(1, W0), 3, 4),
        )
        report = check_mwa(h)
        assert only(report, "MWA4")
        assert report.of("MWA4")[0].ops == (2, 3)

    def test_pending_reads_are_ignored(self):
        h = history(op(0, W0, "write", Value(1, W0), 0, 1), op(1, R0, "read", None, 2))
        assert check_mwa(h).clean


class TestAgainstAtomicity:
    def test_timestamp_ordered_atomic_histories_are_clean(self):
        # random histories stamp writes with arbitrary timestamps, so only the
        # read-side properties are implied by atomicity here
        for seed in range(200):
            h = random_history(seed, n_ops=7)
            if check_atomic(h).atomic:
                counts = check_mwa(h).counts()
                assert counts["MWA1"] == counts["MWA3"] == 0, seed

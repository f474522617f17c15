import pytest

from src.quorumlab.core.config import SystemConfig, feasible_w2r1, feasible_w2r2
from src.quorumlab.exceptions import ConfigValidationError


class TestSystemConfig:
    def test_process_layout(self, cfg5):
        assert list(cfg5.writers) == [0, 1]
        assert list(cfg5.readers) == [2, 3]
        assert list(cfg5.servers) == [4, 5, 6, 7, 8]
        assert cfg5.quorum == 4

    def test_labels(self, cfg5):
        assert [cfg5.label(p) for p in (0, 1, 2, 3, 4, 8)] == ["w0", "w1", "r0", "r1", "s1", "s5"]
        for pid in range(9):
            assert cfg5.parse_label(cfg5.label(pid)) == pid

    def test_server_index_is_one_based(self, cfg5):
        assert cfg5.server(1) == 4
        assert cfg5.server_index(8) == 5
        with pytest.raises(ValueError):
            cfg5.server(0)
        with pytest.raises(ValueError):
            cfg5.server(6)

    @pytest.mark.parametrize("label", ["w2", "r2", "s0", "s6", "x1", "w"])
    def test_parse_label_rejects_unknown(self, cfg5, label):
        with pytest.raises(ValueError):
            cfg5.parse_label(label)

    @pytest.mark.parametrize(
        "S,W,R,t",
        [(1, 1, 1, 1), (5, 0, 1, 1), (5, 1, 0, 1), (5, 1, 1, 0), (3, 1, 1, 3)],
    )
    def test_invalid(self, S, W, R, t):
        with pytest.raises(ConfigValidationError):
            SystemConfig(S=S, W=W, R=R, t=t)

    def test_validation_error_is_a_value_error(self):
        with pytest.raises(ValueError):
            SystemConfig(S=4, W=1, R=1, t=4)


class TestFeasibility:
    @pytest.mark.parametrize(
        "S,t,R,expected",
        [
            (5, 1, 2, True),
            (5, 1, 3, False),
            (9, 2, 2, True),
            (8, 2, 2, False),
            (10, 3, 1, True),
            (7, 1, 4, True),
            (7, 1, 5, False),
        ],
    )
    def test_w2r1(self, S, t, R, expected):
        assert feasible_w2r1(SystemConfig(S=S, W=2, R=R, t=t)) is expected

    def test_w2r1_uses_real_division(self):
        # 10/3 - 2 = 4/3, so one reader fits; floor division would say 1 < 1
        assert feasible_w2r1(SystemConfig(S=10, W=2, R=1, t=3))

    @pytest.mark.parametrize("S,t,expected", [(5, 2, True), (4, 2, False), (3, 1, True), (2, 1, False)])
    def test_w2r2(self, S, t, expected):
        assert feasible_w2r2(SystemConfig(S=S, W=2, R=1, t=t)) is expected

    def test_feasible_fast_reads_leave_more_than_t_servers(self):
        for S in range(3, 13):
            for t in range(1, S):
                for R in range(1, 7):
                    cfg = SystemConfig(S=S, W=2, R=R, t=t)
                    if feasible_w2r1(cfg):
                        assert S - (R + 1) * t > t

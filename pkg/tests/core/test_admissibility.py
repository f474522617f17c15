import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from src.quorumlab.core.admissibility import (
    ReadAck,
    admissible,
    admissible_exhaustive,
    max_admissible,
    vector_from_wire,
    vector_to_wire,
)
from src.quorumlab.core.config import SystemConfig
from src.quorumlab.core.values import Value
from src.quorumlab.exceptions import ProtocolInvariantError

V = Value(1, 0)
INITIAL = Value.initial()
READER = 2


def acks(cfg, holders, updated, others=None, initial_updated=frozenset({READER})):
    """Acks from every server; the first ``holders`` servers hold V."""
    result = []
    for n, server in enumerate(cfg.servers):
        vector = {INITIAL: frozenset(initial_updated)}
        if n < holders:
            vector[V] = frozenset(updated)
        result.append(ReadAck(server, vector))
    return result


class TestAdmissible:
    def test_degree_one_with_four_holders(self, cfg5):
        witness = admissible(V, acks(cfg5, 4, {READER}), 1, cfg5)
        assert witness is not None
        assert len(witness.mu) == 4
        assert READER in witness.pi
        assert witness.verify(cfg5)

    def test_empty_msgs(self, cfg5):
        for a in range(1, cfg5.R + 2):
            assert admissible(V, [], a, cfg5) is None

    def test_two_holders_are_too_few_for_degree_two(self, cfg5):
        assert admissible(V, acks(cfg5, 2, {0, READER}), 2, cfg5) is None

    def test_degree_two_needs_two_common_clients(self, cfg5):
        assert admissible(V, acks(cfg5, 3, {0}), 2, cfg5) is None
        witness = admissible(V, acks(cfg5, 3, {0, READER}), 2, cfg5)
        assert witness is not None and witness.degree == 2 and len(witness.mu) == 3

    def test_intersection_must_be_common(self, cfg5):
        msgs = acks(cfg5, 0, set())
        for i, updated in enumerate(({0}, {1}, {2}, {3})):
            msgs[i] = ReadAck(msgs[i].server, {INITIAL: frozenset(), V: frozenset(updated)})
        assert admissible(V, msgs, 1, cfg5) is None

    @pytest.mark.parametrize("a", [0, 4])
    def test_degree_out_of_range(self, cfg5, a):
        with pytest.raises(ValueError):
            admissible(V, [], a, cfg5)

    def test_exhaustive_is_capped(self):
        cfg = SystemConfig(S=17, W=1, R=1, t=1)
        with pytest.raises(ValueError):
            admissible_exhaustive(V, [], 1, cfg)


class TestMaxAdmissible:
    def test_only_initial(self, cfg5):
        value, witness = max_admissible(acks(cfg5, 0, set())[:4], cfg5)
        assert value == INITIAL
        assert witness.degree == 1

    def test_completed_write_is_returned_at_degree_one(self, cfg5):
        top = Value(5, 1)
        msgs = [ReadAck(s, {INITIAL: frozenset({READER}), top: frozenset({1, READER})}) for s in list(cfg5.servers)[:4]]
        value, witness = max_admissible(msgs, cfg5)
        assert value == top
        assert witness.degree == 1

    def test_falls_back_to_second_largest(self, cfg5):
        msgs = acks(cfg5, 1, {0, READER})[:4]
        value, _ = max_admissible(msgs, cfg5)
        assert value == INITIAL

    def test_larger_value_wins_when_both_admissible(self, cfg5):
        msgs = acks(cfg5, 4, {0, READER})
        value, _ = max_admissible(msgs, cfg5)
        assert value == V

    def test_nothing_admissible(self, cfg5):
        msgs = acks(cfg5, 0, set(), initial_updated=frozenset())
        with pytest.raises(ProtocolInvariantError):
            max_admissible(msgs, cfg5)


class TestVectorWire:
    def test_sorted_entries(self):
        vector = {V: frozenset({3, 0}), INITIAL: frozenset()}
        assert vector_to_wire(vector) == [[[0, None], []], [[1, 0], [0, 3]]]
        assert vector_from_wire(vector_to_wire(vector)) == vector


POOL = [INITIAL, Value(1, 0), Value(1, 1), Value(2, 0)]


@st.composite
def ack_sets(draw):
    S = draw(st.integers(min_value=3, max_value=6))
    t = draw(st.integers(min_value=1, max_value=S - 1))
    cfg = SystemConfig(S=S, W=2, R=2, t=t)
    clients = list(cfg.clients)
    msgs = []
    for server in cfg.servers:
        held = draw(st.lists(st.sampled_from(POOL), unique=True, max_size=len(POOL)))
        vector = {v: frozenset(draw(st.sets(st.sampled_from(clients), max_size=len(clients)))) for v in held}
        msgs.append(ReadAck(server, vector))
    return cfg, msgs


class TestCrossValidation:
    @settings(max_examples=200, deadline=None)
    @given(ack_sets())
    def test_fixed_size_search_matches_enumeration(self, case):
        cfg, msgs = case
        for v in POOL:
            for a in range(1, cfg.R + 2):
                fast = admissible(v, msgs, a, cfg)
                slow = admissible_exhaustive(v, msgs, a, cfg)
                assert (fast is None) == (slow is None)
                for witness in (fast, slow):
                    if witness is not None:
                        assert witness.verify(cfg)

    @settings(max_examples=100, deadline=None)
    @given(ack_sets(), st.integers(min_value=0, max_value=6))
    def test_more_evidence_never_hurts(self, case, keep):
        cfg, msgs = case
        subset = msgs[:keep]
        for v in POOL:
            for a in range(1, cfg.R + 2):
                if admissible(v, subset, a, cfg) is not None:
                    assert admissible(v, msgs, a, cfg) is not None

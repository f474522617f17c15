from hypothesis import given
from hypothesis import strategies as st

from src.quorumlab.core.values import Ordering, Value, value_compare

values = st.builds(Value, st.integers(min_value=-3, max_value=6), st.one_of(st.none(), st.integers(0, 4)))


class TestValue:
    def test_initial_sorts_below_every_written_value(self):
        initial = Value.initial()
        assert initial.is_initial
        assert initial < Value(0, 0) < Value(1, None) < Value(1, 0) < Value(1, 1) < Value(2, 0)

    def test_compare(self):
        assert value_compare(Value(1, 0), Value(1, 1)) is Ordering.LESS
        assert value_compare(Value(2, 0), Value(1, 1)) is Ordering.GREATER
        assert value_compare(Value(3, 1), Value(3, 1)) is Ordering.EQUAL

    def test_str(self):
        assert str(Value(1, 0)) == "(1,w0)"
        assert str(Value.initial()) == "(0,⊥)"

    def test_wire(self):
        assert Value(4, 2).to_wire() == [4, 2]
        assert Value.from_wire([0, None]) == Value.initial()

    def test_max_picks_largest_writer_on_equal_timestamps(self):
        assert max([Value(2, 0), Value(2, 3), Value(1, 9)]) == Value(2, 3)


class TestTotalOrder:
    @given(values, values)
    def test_exactly_one_relation_holds(self, a, b):
        relations = [a < b, a == b, b < a]
        assert relations.count(True) == 1

    @given(values, values)
    def test_antisymmetric(self, a, b):
        assert value_compare(a, b).value == -value_compare(b, a).value

    @given(values, values, values)
    def test_transitive(self, a, b, c):
        if a <= b and b <= c:
            assert a <= c

    @given(st.lists(values, min_size=1, max_size=8))
    def test_sorting_agrees_with_compare(self, items):
        ordered = sorted(items)
        for left, right in zip(ordered, ordered[1:]):
            assert value_compare(left, right) is not Ordering.GREATER

import pytest
from hypothesis import given, settings, strategies as st

from advtree.config import Interval, RangeError
from advtree.layout import child_index, level_table, node_interval

divisor_sets = st.lists(st.integers(min_value=2, max_value=5), min_size=0, max_size=5)


def test_level_table_binary_two_levels():
    t = level_table([2, 2])
    assert t.delta == (1, 3, 7)
    assert t.sigma == (1, 2, 4)
    assert t.slots_per_node == (4, 2, 1)
    assert t.size == 7


def test_level_table_mixed():
    t = level_table([2, 3])
    assert t.delta == (1, 3, 9)
    assert t.sigma == (1, 2, 4)
    assert t.slots_per_node == (6, 3, 1)


def test_level_table_root_only():
    t = level_table([])
    assert t.delta == (1,)
    assert t.sigma == (1,)
    assert t.slots_per_node == (1,)


def test_child_index_examples():
    t = level_table([2, 2])
    assert [child_index(t, 2, 2, c) for c in (0, 1)] == [4, 5]
    t = level_table([2, 3])
    assert [child_index(t, 2, 3, c) for c in (0, 1, 2)] == [7, 8, 9]


@pytest.mark.parametrize("args", [(3, 4, 0), (2, 1, 0), (2, 2, 2), (0, 1, 0), (1, 1, -1)])
def test_child_index_out_of_range(args):
    with pytest.raises(RangeError):
        child_index(level_table([2, 2]), *args)


def test_node_interval_examples():
    t = level_table([2, 2])
    assert node_interval(t, 1, 1) == Interval(0, 4)
    assert node_interval(t, 2, 3) == Interval(2, 4)
    assert node_interval(t, 3, 5) == Interval(1, 2)
    with pytest.raises(RangeError):
        node_interval(t, 2, 4)


@given(divisor_sets)
def test_delta_matches_closed_form(xs):
    t = level_table(xs)
    for l in range(2, len(xs) + 2):
        total = 1
        for j in range(2, l + 1):
            prod = 1
            for i in range(1, j):
                prod *= xs[i - 1]
            total += prod
        assert t.delta[l - 1] == total
        assert t.sigma[l - 1] == t.delta[l - 2] + 1


@given(divisor_sets)
@settings(max_examples=60)
def test_children_partition_next_level(xs):
    t = level_table(xs)
    for l in range(1, t.levels):
        seen = []
        for node in range(t.sigma[l - 1], t.delta[l - 1] + 1):
            kids = [child_index(t, l, node, c) for c in range(xs[l - 1])]
            parent = node_interval(t, l, node)
            spans = [node_interval(t, l + 1, k) for k in kids]
            # Contiguous, disjoint, and exactly covering the parent.
            assert spans[0].start == parent.start and spans[-1].end == parent.end
            assert all(a.end == b.start for a, b in zip(spans, spans[1:]))
            seen.extend(kids)
        assert seen == list(range(t.sigma[l], t.delta[l] + 1))


@given(divisor_sets)
@settings(max_examples=60)
def test_levels_tile_universe_and_index_is_bijective(xs):
    t = level_table(xs)
    flat = []
    for l in range(1, t.levels + 1):
        spans = [node_interval(t, l, j) for j in range(t.sigma[l - 1], t.delta[l - 1] + 1)]
        assert spans[0].start == 0 and spans[-1].end == t.n
        assert all(a.end == b.start for a, b in zip(spans, spans[1:]))
        flat.extend((l, j) for j in range(t.sigma[l - 1], t.delta[l - 1] + 1))
    assert [j for _, j in flat] == list(range(1, t.size + 1))
    assert all(t.level_of(j) == l for l, j in flat)

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from MSL_Utils.Exceptions import DescriptorError, ZeroMeasureError
from Operator_Theory.Arc_Sets import ArcSet, refine_disjoint


def F(n, d=1):
    return Fraction(n, d)


# arcs with endpoints on a 1/64 lattice
lattice_arcs = st.lists(
    st.tuples(st.integers(0, 63), st.integers(1, 32)).map(lambda p: (F(p[0], 64), F(p[0] + p[1], 64))),
    min_size=1, max_size=4,
)
arc_sets = lattice_arcs.map(ArcSet.from_arcs)


def test_wrapping_arc_is_cut_at_zero():
    s = ArcSet.from_arcs([(F(3, 4), F(5, 4))])
    assert s.arcs == ((F(0), F(1, 4)), (F(3, 4), F(1)))
    assert s.measure == F(1, 2)
    assert s.contains(F(0)) and s.contains(F(7, 8)) and not s.contains(F(1, 2))


def test_touching_arcs_merge():
    s = ArcSet.from_arcs([(F(0), F(1, 4)), (F(1, 4), F(1, 2))])
    assert s.arcs == ((F(0), F(1, 2)),)


def test_full_turn_gives_circle():
    assert ArcSet.from_arcs([(F(1, 3), F(4, 3))]) == ArcSet.full()
    assert ArcSet.full().complement().is_empty()


def test_from_cells_and_to_mask_agree():
    mask = np.zeros(16, dtype=bool)
    mask[[1, 2, 3, 9]] = True
    s = ArcSet.from_cells(mask, 16)
    assert s.arcs == ((F(1, 16), F(4, 16)), (F(9, 16), F(10, 16)))
    np.testing.assert_array_equal(s.to_mask(16), mask)


def test_descriptor_round_trip_and_errors():
    s = ArcSet.from_arcs([(F(1, 8), F(3, 8))])
    assert ArcSet.from_descriptor(s.to_descriptor()) == s
    with pytest.raises(DescriptorError):
        ArcSet.from_descriptor({"arcs": []})
    with pytest.raises(DescriptorError):
        ArcSet.from_descriptor([[[1, 0], [1, 2]]])


@given(arc_sets, arc_sets)
def test_measure_of_union_is_inclusion_exclusion(a, b):
    assert (a | b).measure == a.measure + b.measure - (a & b).measure


@given(arc_sets)
def test_complement_partitions_circle(a):
    c = a.complement()
    assert a.isdisjoint(c)
    assert (a | c) == ArcSet.full()
    assert a.measure + c.measure == 1


@given(arc_sets, st.integers(1, 5))
def test_split_gives_disjoint_positive_pieces(a, k):
    pieces = a.split(k)
    assert len(pieces) == k
    assert all(p.measure > 0 for p in pieces)
    assert sum(p.measure for p in pieces) == a.measure
    for i in range(k):
        assert pieces[i].issubset(a)
        for j in range(i + 1, k):
            assert pieces[i].isdisjoint(pieces[j])


@settings(max_examples=1000, deadline=None)
@given(st.lists(arc_sets.filter(lambda s: s.measure > 0), min_size=1, max_size=5))
def test_refine_disjoint_properties(sets):
    sigma = refine_disjoint(sets)
    union_in = ArcSet.empty()
    union_out = ArcSet.empty()
    for tau, s in zip(sets, sigma):
        assert s.measure > 0
        assert s.issubset(tau)
        union_in = union_in | tau
        union_out = union_out | s
    assert union_in == union_out
    for i in range(len(sigma)):
        for j in range(i + 1, len(sigma)):
            assert sigma[i].isdisjoint(sigma[j])


def test_refine_keeps_disjoint_sets():
    sets = [
        ArcSet.from_arcs([(F(0), F(1, 8))]),
        ArcSet.from_arcs([(F(1, 4), F(1, 2))]),
        ArcSet.from_arcs([(F(5, 8), F(3, 4)), (F(7, 8), F(15, 16))]),
    ]
    assert refine_disjoint(sets) == sets
    assert refine_disjoint(sets[:2]) == sets[:2]


def test_refine_nested_pair_keeps_inner_set():
    inner = ArcSet.from_arcs([(F(1, 8), F(1, 4))])
    outer = ArcSet.from_arcs([(F(0), F(1, 2))])
    sigma = refine_disjoint([inner, outer])
    assert sigma[0] == inner
    assert sigma[1] == outer - inner
    assert sigma[1].arcs == ((F(0), F(1, 8)), (F(1, 4), F(1, 2)))


def test_refine_two_full_circles_splits_in_halves():
    sigma = refine_disjoint([ArcSet.full(), ArcSet.full()])
    assert [s.measure for s in sigma] == [F(1, 2), F(1, 2)]


def test_refine_rejects_null_set():
    with pytest.raises(ZeroMeasureError):
        refine_disjoint([ArcSet.full(), ArcSet.empty()])

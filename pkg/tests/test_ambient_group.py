from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alextopos import GroupDescriptor, ball, format_elem, parse_elem
from alextopos.ambient_group import ball_size, compose, free_reduce, inverse, is_reduced
from alextopos.errors import UsageError

from oracles import naive_reduce, reduced_words

F2 = GroupDescriptor.free(2)
Z1 = GroupDescriptor.int_vector(1)
Z2 = GroupDescriptor.int_vector(2)
ZC = GroupDescriptor.int_vector_times_cyclic(1, 3)


def e(group, text):
    return parse_elem(group, text)


def test_compose_examples():
    assert compose(e(F2, "x1"), e(F2, "x1^-1")).is_identity()
    assert compose(e(F2, "x1*x2"), e(F2, "x2^-1*x1")) == e(F2, "x1*x1")
    assert compose(e(Z1, "(3)"), e(Z1, "(-5)")) == e(Z1, "(-2)")


def test_inverse_examples():
    assert inverse(F2.identity()) == F2.identity()
    assert inverse(e(F2, "x1*x2")) == e(F2, "x2^-1*x1^-1")
    assert inverse(e(Z2, "(3,-1)")) == e(Z2, "(-3,1)")
    assert inverse(e(ZC, "(2);1")) == e(ZC, "(-2);2")


def test_ball_examples():
    assert {format_elem(g) for g in ball(F2, 1)} == {"e", "x1", "x1^-1", "x2", "x2^-1"}
    assert len(ball(F2, 2)) == 17
    assert sorted(g.data[0] for g in ball(Z1, 3)) == list(range(-3, 4))
    assert len(ball(ZC, 2)) == 15


def test_ball_size_matches_word_enumeration():
    for r in range(5):
        assert ball_size(F2, r) == len(reduced_words(2, r)) == len(ball(F2, r))


def test_free_reduce_against_naive_scan():
    w = (1, 2, -2, -1, 1, 1, -1, 2)
    assert free_reduce(w) == naive_reduce(w) == (1, 2)
    assert is_reduced((1, 2, 1)) and not is_reduced((1, -1))


def test_parse_rejects_garbage():
    with pytest.raises(UsageError):
        parse_elem(F2, "x3")
    with pytest.raises(UsageError):
        parse_elem(Z2, "(1)")


def test_mixed_groups_refused():
    with pytest.raises(UsageError):
        compose(e(Z1, "(1)"), e(Z2, "(1,1)"))


def test_descriptor_parse():
    assert GroupDescriptor.parse("free:2") == F2
    assert GroupDescriptor.parse("int:1xZ3") == ZC


# properties

letters = st.lists(st.sampled_from([1, -1, 2, -2]), max_size=8)
vec = st.tuples(st.integers(-9, 9), st.integers(-9, 9))


@st.composite
def free_elems(draw):
    return F2.elem(free_reduce(draw(letters)))


@st.composite
def cyc_elems(draw):
    return ZC.elem((draw(st.integers(-9, 9)),), draw(st.integers(0, 2)))


@given(free_elems(), free_elems(), free_elems())
def test_free_associativity(a, b, c):
    assert (a * b) * c == a * (b * c)


@given(vec, vec, vec)
def test_vector_associativity(a, b, c):
    a, b, c = Z2.elem(a), Z2.elem(b), Z2.elem(c)
    assert (a * b) * c == a * (b * c)


@given(cyc_elems(), cyc_elems())
def test_cyclic_factor_inverse(a, b):
    assert (a * b).inv() == b.inv() * a.inv()
    assert (a * a.inv()).is_identity()


@given(letters)
def test_reduction_idempotent_and_matches_oracle(w):
    r = free_reduce(w)
    assert free_reduce(r) == r == naive_reduce(w)


@given(free_elems())
def test_syntax_round_trip(g):
    assert parse_elem(F2, format_elem(g)) == g


@given(free_elems(), free_elems())
def test_norm_subadditive(a, b):
    assert (a * b).norm() <= a.norm() + b.norm()


@settings(max_examples=30)
@given(st.sampled_from([F2, Z2, ZC]), st.integers(0, 3))
def test_shortlex_total_order_on_balls(group, r):
    b = ball(group, r)
    keys = [g.sort_key() for g in b]
    assert len(set(keys)) == len(b)
    if group.is_free:
        assert min(b, key=lambda g: g.sort_key()).is_identity()
    assert set(b) <= set(ball(group, r + 1))

from __future__ import annotations

import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alextopos import GroupDescriptor, MSet, QuotientMonoid, SubmonoidSpec, ball, parse_elem, validate_mset
from alextopos.errors import UsageError, WindowError
from alextopos.monoid_core import (
    idempotent_classes,
    load_monoid_spec,
    dump_monoid_spec,
    related,
    saturate_congruence,
    stabilizing_margin,
    unit_group,
)

from oracles import rewriting_classes, sums_of

NAT = SubmonoidSpec.naturals()
Z = NAT.group
F2 = SubmonoidSpec.free_monoid(2)


def n(k):
    return Z.elem((k,))


def nat_quotient(pairs, radius=16, margin=3):
    return QuotientMonoid.build(NAT, [(n(a), n(b)) for a, b in pairs], radius=radius, margin=margin)


def int_classes(C, r):
    return sorted((tuple(sorted(x.data[0] for x in b)) for b in C.classes(r)), key=lambda b: b[0])


def test_contains_examples():
    assert F2.contains(parse_elem(F2.group, "x1*x2"))
    assert not F2.contains(parse_elem(F2.group, "x1*x2^-1"))
    assert not NAT.contains(n(-2))
    gen23 = SubmonoidSpec.generated_by(Z, [n(2), n(3)], depth=6)
    assert not gen23.contains(n(1)) and gen23.contains(n(5))


def test_generated_membership_matches_sums():
    gen23 = SubmonoidSpec.generated_by(Z, [n(2), n(3)], depth=6)
    reach = sums_of([2, 3], 12)
    assert {k for k in range(-12, 13) if gen23.contains(n(k))} == reach


def test_unit_group_examples():
    assert unit_group(F2, 4) == {F2.group.identity()}
    assert unit_group(NAT, 4) == {n(0)}
    spec = SubmonoidSpec.naturals(1, 2)
    brute = {g for g in ball(spec.group, 4) if spec.contains(g) and spec.contains(g.inv())}
    assert unit_group(spec, 4) == brute == {parse_elem(spec.group, "(0);0"), parse_elem(spec.group, "(0);1")}


def test_infinite_unit_group_does_not_close_in_a_window():
    spec = SubmonoidSpec.generated_by(Z, [n(1), n(-1)], depth=6)
    with pytest.raises(WindowError):
        unit_group(spec, 3)


def test_saturation_examples():
    assert int_classes(saturate_congruence([("(2)", "(5)")], NAT, 10, 3), 10) == [
        (0,), (1,), (2, 5, 8), (3, 6, 9), (4, 7, 10)]
    assert int_classes(saturate_congruence([("(1)", "(2)")], NAT, 10, 3), 10) == [(0,), tuple(range(1, 11))]
    assert int_classes(saturate_congruence([], NAT, 5, 1), 5) == [(k,) for k in range(6)]


def test_saturation_matches_rewriting_oracle():
    for pairs in ([(2, 5)], [(1, 2)], [(3, 7)], [(2, 4), (3, 3)], [(4, 6)]):
        C = saturate_congruence([(f"({a})", f"({b})") for a, b in pairs], NAT, 20, 4)
        assert C.stable
        assert int_classes(C, 20) == rewriting_classes(pairs, 20, slack=4)


def test_saturation_rejects_non_members_and_bad_margin():
    with pytest.raises(UsageError):
        saturate_congruence([("(-1)", "(2)")], NAT, 5, 1)
    with pytest.raises(UsageError):
        saturate_congruence([("(1)", "(2)")], NAT, 5, 0)


def test_related_examples():
    M = nat_quotient([(2, 5)])
    assert related(M, n(3), n(9))
    assert not related(M, n(0), n(3))
    assert related(nat_quotient([]), n(4), n(4))


def test_related_outside_core_refused():
    M = nat_quotient([(2, 5)], radius=6)
    with pytest.raises(WindowError):
        M.related(n(7), n(4))


def test_idempotent_examples():
    assert idempotent_classes(nat_quotient([])) == {n(0)}
    assert idempotent_classes(nat_quotient([(1, 2)])) == {n(0), n(1)}
    assert idempotent_classes(nat_quotient([(2, 5)])) == {n(0), n(3)}


def test_idempotents_of_trivial_congruence_are_idempotents_of_n():
    spec = SubmonoidSpec.naturals(1, 2)
    M = QuotientMonoid.build(spec, [], radius=8)
    brute = {x for x in spec.members(4) if x * x == x}
    assert idempotent_classes(M) == brute


def test_idempotents_warn_when_squares_escape():
    M = nat_quotient([], radius=6)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        idempotent_classes(M, radius=6)
    assert caught


def saturate_set():
    return MSet.from_function(NAT, ["0", "1"], lambda g, s: "1")


def rotate2():
    return MSet.from_function(NAT, ["0", "1"], lambda g, s: str(1 - int(s)))


def test_validate_examples():
    B = nat_quotient([(1, 2)])
    assert validate_mset(B, saturate_set()).ok
    bad = validate_mset(B, rotate2())
    assert not bad.ok and (n(1), n(2), "0") in bad.violations
    assert validate_mset(nat_quotient([]), rotate2()).ok


def test_validate_flags_non_functorial_tables():
    spec = SubmonoidSpec.naturals(2)
    g1, g2 = spec.generators
    # the two generators must commute on S, these do not
    S = MSet(spec, ["a", "b"], {g1: {"a": "b", "b": "b"}, g2: {"a": "a", "b": "a"}})
    rep = validate_mset(QuotientMonoid.build(spec, [], radius=4), S)
    assert rep.nset_violations and not rep.ok


def test_mset_table_checks():
    with pytest.raises(Exception):
        MSet(NAT, ["0"], {n(1): {"0": "7"}})


def test_spec_file_round_trip():
    spec, pairs = load_monoid_spec({"group": "int:1", "submonoid": "nonneg", "generators": ["(1)"],
                                    "congruence_pairs": [["(2)", "(5)"]]})
    assert spec == NAT and pairs == [(n(2), n(5))]
    again = load_monoid_spec(dump_monoid_spec(spec, pairs))
    assert again == (spec, pairs)


def test_units_form_a_group_and_permute_classes():
    spec = SubmonoidSpec.naturals(1, 2)
    M = QuotientMonoid.build(spec, [("(1);0", "(2);1")], radius=8)
    U = set(M.units)
    assert all(u * v in U and u.inv() in U for u in U for v in U)
    for block in M.congruence.classes(6):
        for u in U:
            moved = [u * x for x in block]
            assert all(M.related(moved[0], y) for y in moved)


# properties

small_pairs = st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=2)


@settings(max_examples=40, deadline=None)
@given(small_pairs)
def test_saturation_against_oracle(pairs):
    enc = [(f"({a})", f"({b})") for a, b in pairs]
    m = stabilizing_margin(enc, NAT, 14, max_margin=8)
    assert m is not None
    C = saturate_congruence(enc, NAT, 14, m)
    assert int_classes(C, 14) == rewriting_classes(pairs, 14, slack=8)


@settings(max_examples=40, deadline=None)
@given(small_pairs)
def test_related_is_a_congruence(pairs):
    M = nat_quotient(pairs, radius=12, margin=4)
    core = range(13)
    for a in core:
        for b in core:
            if M.related(n(a), n(b)):
                assert M.related(n(b), n(a))
                for c in range(13 - max(a, b)):
                    assert M.related(n(a + c), n(b + c))


@settings(max_examples=25, deadline=None)
@given(small_pairs, st.integers(1, 4))
def test_margin_monotone(pairs, m):
    enc = [(f"({a})", f"({b})") for a, b in pairs]
    lo = saturate_congruence(enc, NAT, 10, m)
    hi = saturate_congruence(enc, NAT, 10, m + 1)
    for b in lo.classes(10):
        assert all(hi.related(b[0], x) for x in b)
    if lo.stable:
        assert int_classes(lo, 10) == int_classes(hi, 10)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([1, 2]), st.sampled_from([1, 2])), min_size=1, max_size=3))
def test_free_monoid_congruence_is_compatible(letter_pairs):
    pairs = [(F2.group.elem((a,)), F2.group.elem((b, a))) for a, b in letter_pairs]
    C = saturate_congruence(pairs, F2, 4, 3)
    core = F2.members(2)
    rel = [(a, b) for a in core for b in core if C.related(a, b)]
    for a, b in rel:
        for c, d in rel:
            x, y = a * c, b * d
            if C.in_core(x) and C.in_core(y):
                assert C.related(x, y)

from __future__ import annotations

import pytest

from alextopos import SubmonoidSpec, WindowPoset
from alextopos.alex_groupoid import groupoid_axiom_check
from alextopos.converse import build_coset_poset
from alextopos.equivariant import (
    AmbientBall,
    FiniteGroup,
    GroupActionOnPoset,
    SiteCategory,
    build_action_groupoid,
    check_transitive_basis_action,
    endo_monoid,
    hom_set,
    permutation_action,
)
from alextopos.errors import UsageError, WindowError
from alextopos.poset_core import antichain, chain

NAT = SubmonoidSpec.naturals()
Z = NAT.group


def n(k):
    return Z.elem((k,))


def integer_line(r=10):
    """Z acting on the integer window [-r, r] by translation."""
    return build_coset_poset(NAT, r)


def swap_action():
    P = antichain("ab")
    return GroupActionOnPoset(P, FiniteGroup.cyclic(2), lambda x, g: x if g == 0 else {"a": "b", "b": "a"}[x])


def s3_on_points():
    P = WindowPoset([1, 2, 3], [])
    return permutation_action(P, FiniteGroup.symmetric(3))


def test_finite_groups():
    S3 = FiniteGroup.symmetric(3)
    assert len(S3.elements()) == 6
    for a in S3.elements():
        assert S3.mul(a, S3.inv(a)) == S3.identity
    assert sorted(FiniteGroup.cyclic(4).elements()) == [0, 1, 2, 3]
    gen = FiniteGroup.generated_by([(2, 1, 3), (2, 3, 1)], S3.mul, S3.identity)
    assert len(gen.elements()) == 6
    with pytest.raises(UsageError):
        FiniteGroup([0, 1], lambda a, b: a * b, 1)


def test_hom_on_the_integers():
    A = integer_line().action(5)
    assert {g.data[0] for g in hom_set(A, n(0), n(0))} == {0, 1, 2, 3, 4, 5}
    assert {g.data[0] for g in hom_set(A, n(0), n(3))} == {3, 4, 5}


def test_hom_trivial_and_swap():
    point = WindowPoset(["*"], [])
    A = GroupActionOnPoset(point, FiniteGroup.cyclic(1), lambda x, g: x)
    assert hom_set(A, "*", "*") == [0]
    assert hom_set(swap_action(), "a", "b") == [1]
    assert hom_set(swap_action(), "a", "a") == [0]


def test_site_composition_order():
    C = SiteCategory(s3_on_points())
    f = C.hom(1, 2)[0]
    g = C.hom(2, 3)[0]
    assert C.action.act(1, C.compose(f, g)) == 3


def test_endo_examples():
    assert {g.data[0] for g in endo_monoid(integer_line().action(6), n(0))} == set(range(7))
    stab = endo_monoid(s3_on_points(), 1)
    assert len(stab) == 2 and all(p[0] == 1 for p in stab)
    C2 = antichain("ab")
    trivial = GroupActionOnPoset(C2, FiniteGroup.cyclic(3), lambda x, g: x)
    assert sorted(endo_monoid(trivial, "a")) == [0, 1, 2]


def test_endo_refuses_an_unclosed_window():
    # in the window [0, 3], 2 + 2 falls outside
    P = build_coset_poset(NAT, window=[n(k) for k in range(4)])
    A = GroupActionOnPoset(P, AmbientBall(Z, 6), P.act)
    with pytest.raises(WindowError):
        endo_monoid(A, n(0))


def test_hom_equals_endo_and_is_closed():
    A = s3_on_points()
    C = SiteCategory(A)
    for p in (1, 2, 3):
        homs = C.hom(p, p)
        assert set(homs) == set(endo_monoid(A, p))
        assert all(C.compose(f, g) in homs for f in homs for g in homs)


def test_endo_conjugation():
    A = s3_on_points()
    G = A.group
    for g in G.elements():
        q = A.act(1, g)
        conj = {G.mul(G.mul(G.inv(g), f), g) for f in endo_monoid(A, 1)}
        assert conj == set(endo_monoid(A, q))


def test_transitivity_examples():
    assert check_transitive_basis_action(integer_line().action(2))
    two = WindowPoset([(c, k) for c in "LR" for k in range(-3, 4)],
                      [((c, a), (c, b)) for c in "LR" for a in range(-3, 4) for b in range(a, 4)])
    shift = GroupActionOnPoset(two, AmbientBall(Z, 6),
                               lambda x, g: (x[0], x[1] + g.data[0]) if abs(x[1] + g.data[0]) <= 3 else None)
    rep = check_transitive_basis_action(shift)
    assert not rep.transitive and rep.witness is not None
    frozen = GroupActionOnPoset(chain(2), FiniteGroup.cyclic(1), lambda x, g: x)
    assert not check_transitive_basis_action(frozen)


def test_action_groupoid_of_a_point_is_the_group():
    point = WindowPoset(["*"], [])
    G = build_action_groupoid(GroupActionOnPoset(point, FiniteGroup.cyclic(2), lambda x, g: x))
    assert G.arrows_between("*", "*") == [("*", 0), ("*", 1)]
    assert G.mu(("*", 1), ("*", 1)) == ("*", 0)
    assert G.iota(("*", 1)) == ("*", 1)
    assert groupoid_axiom_check(G).ok


def test_trivial_group_groupoid_is_discrete():
    G = build_action_groupoid(GroupActionOnPoset(chain(3), FiniteGroup.cyclic(1), lambda x, g: x))
    for x in range(3):
        assert G.arrows_between(x, x) == [G.unit(x)]
        assert G.arrows_between(x, (x + 1) % 3) == []
    assert groupoid_axiom_check(G).ok


def test_action_groupoids_satisfy_the_axioms():
    for A in (swap_action(), s3_on_points(), integer_line(6).action(4)):
        rep = groupoid_axiom_check(build_action_groupoid(A))
        assert rep.ok, rep.failures[:3]


def test_action_laws():
    assert not s3_on_points().check_laws()
    assert not integer_line(4).action(2).check_laws()
    bad = GroupActionOnPoset(chain(2), FiniteGroup.cyclic(2), lambda x, g: (x + g) % 2)
    assert any(w[0] == "monotone" for w in bad.check_laws())

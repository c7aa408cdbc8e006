from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from alextopos import MSet, QuotientMonoid, SubmonoidSpec, ball, corpus, validate_mset
from alextopos.alex_groupoid import (
    AlexGroupoid,
    alpha,
    basic_open,
    basic_open_pi,
    basic_open_u,
    build_groupoid,
    groupoid_axiom_check,
    in_pi,
    induced_action,
    iso_backward,
    iso_forward,
    pattern_grid,
    translation_failures,
    trivial_congruence_iso,
)
from alextopos.errors import UsageError, WindowError

from oracles import rewriting_classes

NAT = SubmonoidSpec.naturals()
Z = NAT.group


def n(k):
    return Z.elem((k,))


def nat_groupoid(pairs=(), r=6, depth=1):
    M = QuotientMonoid.build(NAT, [(n(a), n(b)) for a, b in pairs], radius=2 * r, margin=3)
    return build_groupoid(M, r, depth)


def test_trivial_congruence_orders():
    G = nat_groupoid()
    assert [x.data[0] for x in G.g0_nodes()] == list(range(-6, 7))
    assert G.leq1((n(0), n(0)), (n(2), n(2)))
    assert not G.leq1((n(0), n(0)), (n(2), n(3)))
    assert not G.leq1((n(2), n(2)), (n(0), n(0)))


def test_congruence_adds_arrows_to_the_order():
    G = nat_groupoid([(2, 5)])
    assert G.leq1((n(0), n(0)), (n(2), n(5)))
    assert G.leq1((n(1), n(0)), (n(4), n(6)))
    assert not G.leq1((n(0), n(0)), (n(2), n(4)))


def test_structure_maps_on_the_naturals():
    G = nat_groupoid()
    f, g = (n(1), n(3)), (n(3), n(-2))
    assert (G.s(f), G.t(f)) == (n(1), n(3))
    assert G.mu(f, g) == (n(1), n(-2))
    assert G.iota(f) == (n(3), n(1))
    with pytest.raises(UsageError):
        G.mu(f, f)


def test_trivial_monoid_is_discrete():
    spec = SubmonoidSpec.generated_by(Z, [n(0)], depth=1)
    G = build_groupoid(QuotientMonoid.build(spec, [], radius=8), 4)
    nodes = G.g0_nodes()
    assert all(G.leq0(x, y) == (x == y) for x in nodes for y in nodes)
    assert groupoid_axiom_check(G).ok


def test_units_are_folded_into_representatives():
    M = corpus.load_monoid("nat_z2.json", radius=12)
    G = build_groupoid(M, 6)
    one = M.group.identity()
    flip = M.units[1]
    assert G.canon0(flip) == one
    assert G.canon1(flip, flip) == (one, one)
    assert G.canon1(flip, one) != (one, one)


def test_refuses_small_or_unstable_windows():
    M = QuotientMonoid.build(NAT, [(n(2), n(5))], radius=8)
    with pytest.raises(WindowError):
        build_groupoid(M, 6)
    unstable = QuotientMonoid.build(NAT, [(n(2), n(5))], radius=12, margin=1, require_stable=False)
    if not unstable.congruence.stable:
        with pytest.raises(WindowError):
            build_groupoid(unstable, 6)


@pytest.mark.parametrize("name", ["nat.json", "nat_2eq5.json", "nat_1eq2.json", "free2.json", "nat_z2.json",
                                  "nat_23.json"])
def test_axioms_hold(name):
    M = corpus.load_monoid(name, radius=12)
    G = build_groupoid(M, 3 if M.group.is_free else 6, 2)
    rep = groupoid_axiom_check(G, budget=1500)
    assert rep.ok, rep.failures[:3]
    assert rep.counts["associativity"] > 0 and rep.counts["mono-mu"] > 0


class SwappedMu(AlexGroupoid):
    """One composite is replaced by another value."""

    def mu_raw(self, f, g):
        h = super().mu_raw(f, g)
        if f == (n(0), n(1)) and g[0] == n(1):
            return (h[0], h[1] * n(1))
        return h


def test_corrupted_mu_is_caught():
    M = QuotientMonoid.build(NAT, [], radius=12)
    rep = groupoid_axiom_check(SwappedMu(M, 6), budget=4000)
    assert not rep.ok
    assert rep.failed_checks() & {"right-unit", "inverse", "mu-ends", "associativity"}


def test_basic_opens():
    G = nat_groupoid()
    assert [x.data[0] for x in basic_open_u(G, n(0))] == list(range(0, 7))
    assert basic_open(G, "U", n(2)) == basic_open_u(G, n(2))
    G25 = nat_groupoid([(2, 5)])
    pi = basic_open_pi(G25, n(0), n(0))
    assert (n(2), n(5)) in pi and (n(5), n(2)) in pi and (n(2), n(4)) not in pi
    with pytest.raises(UsageError):
        basic_open(G, "V", n(0))


def test_basic_opens_are_translates():
    for pairs in ((), ((2, 5),), ((1, 2),)):
        G = nat_groupoid(pairs)
        anchors = [(x, y) for x in ball(Z, 2) for y in ball(Z, 2)]
        assert translation_failures(G, anchors) == []


def test_pi_membership_ignores_representatives():
    M = corpus.load_monoid("nat_z2.json", radius=12)
    G = build_groupoid(M, 4)
    one, flip = M.group.identity(), M.units[1]
    f = (M.group.elem((1,)), M.group.elem((1,)))
    assert in_pi(G, (one, one), f) and in_pi(G, (one, one), (flip * f[0], flip * f[1]))


def test_pattern_grids():
    delta = pattern_grid(QuotientMonoid.build(NAT, [], radius=12), 3)
    assert delta.dots() == {(0, 0), (1, 1), (2, 2)}
    g25 = pattern_grid(QuotientMonoid.build(NAT, [(n(2), n(5))], radius=12), 11)
    classes = {k: c for c in rewriting_classes([(2, 5)], 10, slack=6) for k in c}
    assert g25.dots() == {(a, b) for a in range(11) for b in range(11) if b in classes[a]}
    g12 = pattern_grid(QuotientMonoid.build(NAT, [(n(1), n(2))], radius=12), 11)
    assert g12.dots() == {(0, 0)} | {(a, b) for a in range(1, 11) for b in range(1, 11)}


def test_pattern_grid_window_and_usage_errors():
    with pytest.raises(WindowError):
        pattern_grid(QuotientMonoid.build(NAT, [(n(2), n(5))], radius=5), 11)
    free = corpus.load_monoid("free2.json", radius=4)
    with pytest.raises(UsageError):
        pattern_grid(free, 3)
    g = pattern_grid(free, 2, offsets=["e", "x1"])
    assert g.dots() == {(0, 0), (1, 1)}


def test_trivial_congruence_iso():
    for name in ("nat.json", "free2.json", "nat_z2.json"):
        M = corpus.load_monoid(name, radius=12)
        G = build_groupoid(M, 3 if M.group.is_free else 6)
        rep = trivial_congruence_iso(G, budget=1500)
        assert rep.ok, (name, rep.failures[:3])
    G = nat_groupoid()
    f = (n(2), n(-1))
    assert iso_forward(G, f) == (n(2), n(-3))
    assert iso_backward(G, iso_forward(G, f)) == f


class BentOrder(AlexGroupoid):
    """The order above one arrow is wrong."""

    def leq1(self, f, g):
        if f == (n(0), n(0)) and g == (n(1), n(1)):
            return False
        return super().leq1(f, g)


def test_corrupted_order_breaks_the_iso():
    M = QuotientMonoid.build(NAT, [], radius=12)
    rep = trivial_congruence_iso(BentOrder(M, 6), budget=4000)
    assert not rep.ok
    assert any(c.startswith("iso-order1") for c in rep.failed_checks())


def test_iso_needs_the_trivial_congruence():
    with pytest.raises(UsageError):
        trivial_congruence_iso(nat_groupoid([(2, 5)]))


def test_induced_action_examples():
    G = nat_groupoid([(1, 2)])
    sat = MSet.from_function(NAT, ["0", "1"], lambda g, s: "1")
    rot = MSet.from_function(NAT, ["0", "1"], lambda g, s: str(1 - int(s)))
    assert induced_action(G, sat).monotone
    bad = induced_action(G, rot)
    assert not bad.monotone and bad.witness is not None
    assert induced_action(nat_groupoid(), rot).monotone


def test_alpha_on_an_arrow():
    G = nat_groupoid()
    S = corpus.load_mset("mod3.json", NAT)
    # sigma(j) j^-1 i sigma(i)^-1 is trivial here, so the fibre label is carried along
    assert alpha(G, S, "1", (n(2), n(5))) == (n(5), "1")


@pytest.mark.parametrize("case", corpus.cases(), ids=lambda c: f"{c['monoid']}:{c['mset']}")
def test_verdicts_agree_on_the_corpus(case):
    M = corpus.load_monoid(case["monoid"], radius=12)
    S = corpus.load_mset(case["mset"], M.spec)
    G = build_groupoid(M, 3 if M.group.is_free else 6)
    assert induced_action(G, S, budget=300).monotone == validate_mset(M, S).ok == case["valid"]


@settings(max_examples=25, deadline=None)
@given(st.tuples(st.integers(0, 4), st.integers(0, 4)),
       st.lists(st.integers(0, 3), min_size=1, max_size=4))
def test_verdicts_agree_on_random_sets(pair, f):
    k = len(f)
    f = [x % k for x in f]
    M = QuotientMonoid.build(NAT, [(n(pair[0]), n(pair[1]))], radius=12, margin=4)
    S = MSet.from_function(NAT, range(k), lambda g, s: f[int(s)])
    G = build_groupoid(M, 6)
    assert induced_action(G, S, budget=200).monotone == validate_mset(M, S).ok

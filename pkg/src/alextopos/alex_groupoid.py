"""Alexandrov groupoids built from a monoid presentation ``(N, Z, ~)``.

Objects are unit orbits ``G0 = Z / R0`` with ``i' >= i`` iff ``i' i^-1`` is
in N.  Arrows are pairs ``G1 = (Z x Z) / R1`` where ``(ui, vj) ~ (i, j)`` for
related units ``u ~ v``, ordered by ``(ai, bj) >= (i, j)`` for ``a ~ b`` in N.
The structure maps are ``s(i,j) = i``, ``t(i,j) = j``, ``e(z) = (z,z)``,
``iota(i,j) = (j,i)`` and ``mu((i,j),(j,k)) = (i,k)``.

Everything is computed lazily on a window of radius ``r``; comparisons of
pairs need the congruence on ``N cap ball(2r)``.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field

from .ambient_group import GroupElem, ball, ball_size, parse_elem
from .converse import CosetPoset
from .equivariant import ActionGroupoid, ObjectPairSampling
from .errors import AlexToposError, ConfigurationError, ResourceError, UsageError, WindowError
from .monoid_core import MSet, QuotientMonoid
from .poset_core import node_key

MATERIALIZE_CAP = 20000


def _pair_key(f) -> tuple:
    return (f[0].sort_key(), f[1].sort_key())


class AlexGroupoid(ObjectPairSampling):
    def __init__(self, M: QuotientMonoid, radius: int, depth: int = 1):
        if depth < 1 or radius < depth:
            raise UsageError("need radius >= depth >= 1")
        if not M.congruence.stable:
            raise WindowError("congruence is not stable; refusing to build the groupoid")
        if M.radius < 2 * radius:
            raise WindowError(
                f"window too small: congruence core radius {M.radius} < 2 * groupoid radius {radius}")
        self.M = M
        self.spec = M.spec
        self.group = M.group
        self.radius = radius
        self.depth = depth
        self.coset = CosetPoset(M.spec, M.units, radius=radius, depth=depth)
        self.unit_pairs = tuple(sorted(M.unit_pairs, key=_pair_key))
        self._canon1_cache: dict = {}
        near = M.spec.members(depth)
        self.near_pairs = [(a, b) for a in near for b in near if M.related(a, b)]
        self.near_triples = [(a, b, c) for a, b in self.near_pairs for c in near if M.related(b, c)]

    # canonical representatives

    def canon0(self, i: GroupElem) -> GroupElem:
        return self.coset.rep(i)

    def canon1(self, i: GroupElem, j: GroupElem) -> tuple[GroupElem, GroupElem]:
        if len(self.unit_pairs) == 1:
            return (i, j)
        key = (i, j)
        out = self._canon1_cache.get(key)
        if out is None:
            out = self._canon1_cache[key] = min(((u * i, v * j) for u, v in self.unit_pairs), key=_pair_key)
        return out

    def in_g0(self, x) -> bool:
        return x in self.coset

    def in_g1(self, f) -> bool:
        return f[0].norm() <= self.radius and f[1].norm() <= self.radius and self.canon1(*f) == f

    # structure maps

    def s(self, f):
        return self.canon0(f[0])

    def t(self, f):
        return self.canon0(f[1])

    def unit(self, z):
        return self.canon1(z, z)

    def iota(self, f):
        return self.canon1(f[1], f[0])

    def composable(self, f, g) -> bool:
        return self.t(f) == self.s(g)

    def mu_raw(self, f, g):
        """Compose through the given representatives: realign g to start at f's j."""
        if not self.composable(f, g):
            raise UsageError(f"arrows {f} and {g} are not composable")
        u = g[0] * f[1].inv()
        return self.canon1(f[0], u.inv() * g[1])

    def mu(self, f, g):
        return self.mu_raw(f, g)

    # orders

    def leq0(self, x, y) -> bool:
        return self.spec.contains(y * x.inv())

    def leq1(self, f, g) -> bool:
        a = g[0] * f[0].inv()
        b = g[1] * f[1].inv()
        if not (self.spec.contains(a) and self.spec.contains(b)):
            return False
        return self.M.related(a, b)

    # window and neighbourhoods

    def is_interior0(self, x) -> bool:
        return self.coset.is_interior(x)

    def is_interior1(self, f) -> bool:
        return all(self.in_g1(self.canon1(a * f[0], b * f[1])) for a, b in self.near_pairs)

    def sample_objects(self, k: int, rng: random.Random) -> list:
        return self.coset.sample_interior(k, rng)

    def arrows_between(self, p, q) -> list:
        return sorted({self.canon1(p, u * q) for u in self.M.units}, key=_pair_key)

    def up_objects(self, x) -> list:
        return sorted(self.coset.up_near(x), key=node_key)

    def up_arrows(self, f) -> list:
        out = {self.canon1(a * f[0], b * f[1]) for a, b in self.near_pairs}
        return sorted((g for g in out if self.in_g1(g)), key=_pair_key)

    def up_composable(self, f, g) -> list:
        u = g[0] * f[1].inv()
        i, j, k = f[0], f[1], u.inv() * g[1]
        out = set()
        for a, b, c in self.near_triples:
            f2, g2 = self.canon1(a * i, b * j), self.canon1(b * j, c * k)
            if self.in_g1(f2) and self.in_g1(g2):
                out.add((f2, g2))
        return sorted(out, key=lambda fg: (_pair_key(fg[0]), _pair_key(fg[1])))

    # materialized windows (small groups only)

    def g0_nodes(self) -> tuple:
        return self.coset.nodes

    def g1_nodes(self) -> list:
        n = ball_size(self.group, self.radius)
        if n * n > MATERIALIZE_CAP * 10:
            raise ResourceError(f"arrow window with {n * n} pairs is too large to materialize")
        elems = ball(self.group, self.radius)
        return sorted({self.canon1(i, j) for i in elems for j in elems}, key=_pair_key)

    def __repr__(self):
        return f"AlexGroupoid({self.group}, radius={self.radius}, depth={self.depth})"


def build_groupoid(M: QuotientMonoid, r: int, depth: int = 1) -> AlexGroupoid:
    return AlexGroupoid(M, r, depth)


# checks


@dataclass
class GroupoidReport:
    failures: list = field(default_factory=list)
    counts: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def __bool__(self):
        return self.ok

    def fail(self, check: str, witness) -> None:
        self.failures.append((check, witness))

    def tick(self, check: str, n: int = 1) -> None:
        self.counts[check] = self.counts.get(check, 0) + n

    def failed_checks(self) -> set[str]:
        return {c for c, _ in self.failures}


AXIOMS = ("unit-ends", "left-unit", "right-unit", "associativity", "inverse", "iota-ends",
          "mu-ends", "mu-well-defined", "r2-bijection")
MONOTONE = ("mono-s", "mono-t", "mono-e", "mono-iota", "mono-mu", "order-consistent", "unit-embedding")


def groupoid_axiom_check(G, budget: int = 8000, seed: int = 0, max_failures: int = 20) -> GroupoidReport:
    """Check groupoid axioms and monotonicity of s, t, e, iota, mu on interior samples.

    ``G`` is an AlexGroupoid or an ActionGroupoid (anything with the same
    structure maps and sampling hooks).  Whenever a sample space has at most
    ``budget`` points it is enumerated in full.
    """
    rng = random.Random(seed)
    rep = GroupoidReport()

    def check(name, ok, witness):
        rep.tick(name)
        if not ok and len(rep.failures) < max_failures:
            rep.fail(name, witness)

    def attempt(name, thunk, witness):
        # a broken structure map can make a later composite ill-typed
        try:
            ok = thunk()
        except AlexToposError as exc:
            ok, witness = False, (witness, str(exc))
        check(name, ok, witness)

    objs = G.sample_objects(budget, rng)
    arrows = G.sample_arrows(budget, rng)
    pairs = G.sample_composable(budget, rng)
    triples = G.sample_triples(budget, rng)

    for x in objs:
        e = G.unit(x)
        check("unit-ends", G.s(e) == x and G.t(e) == x, x)
    for f in arrows:
        attempt("left-unit", lambda: G.mu(G.unit(G.s(f)), f) == f, f)
        attempt("right-unit", lambda: G.mu(f, G.unit(G.t(f))) == f, f)
        inv = G.iota(f)
        check("iota-ends", G.s(inv) == G.t(f) and G.t(inv) == G.s(f), f)
        attempt("inverse", lambda: G.mu(f, inv) == G.unit(G.s(f)) and G.mu(inv, f) == G.unit(G.t(f)), f)
    for f, g in pairs:
        h = G.mu(f, g)
        check("mu-ends", G.s(h) == G.s(f) and G.t(h) == G.t(g), (f, g))
    for f, g, h in triples:
        attempt("associativity", lambda: G.mu(G.mu(f, g), h) == G.mu(f, G.mu(g, h)), (f, g, h))

    if isinstance(G, AlexGroupoid):
        _check_representatives(G, pairs[:budget // 4], check)
        _check_r2(G, rng, budget // 4, objs, check)

    mono_budget = max(1, budget // 4)
    for x in _first(objs, mono_budget, rng):
        for y in G.up_objects(x):
            check("order-consistent", G.leq0(x, y) and (x == y or not G.leq0(y, x)), (x, y))
            check("mono-e", G.leq1(G.unit(x), G.unit(y)), (x, y))
    for x, y in _tuples_sample(objs, mono_budget, rng):
        check("unit-embedding", G.leq0(x, y) == G.leq1(G.unit(x), G.unit(y)), (x, y))
    for f in _first(arrows, mono_budget, rng):
        for f2 in G.up_arrows(f):
            check("order-consistent", G.leq1(f, f2) and (f == f2 or not G.leq1(f2, f)), (f, f2))
            check("mono-s", G.leq0(G.s(f), G.s(f2)), (f, f2))
            check("mono-t", G.leq0(G.t(f), G.t(f2)), (f, f2))
            check("mono-iota", G.leq1(G.iota(f), G.iota(f2)), (f, f2))
    for f, g in _first(pairs, mono_budget, rng):
        h = G.mu(f, g)
        for f2, g2 in G.up_composable(f, g):
            attempt("mono-mu", lambda: G.leq1(h, G.mu(f2, g2)), ((f, g), (f2, g2)))
    return rep


def _first(items: list, k: int, rng: random.Random) -> list:
    return items if len(items) <= k else rng.sample(items, k)


def _tuples_sample(objs: list, k: int, rng: random.Random) -> list:
    if len(objs) ** 2 <= k:
        return list(itertools.product(objs, repeat=2))
    return [(rng.choice(objs), rng.choice(objs)) for _ in range(k)]


def _check_representatives(G: AlexGroupoid, pairs, check) -> None:
    """mu must not depend on the representatives chosen for its arguments."""
    for f, g in pairs:
        want = G.mu(f, g)
        for (u, v), (u2, v2) in itertools.product(G.unit_pairs, repeat=2):
            f2 = (u * f[0], v * f[1])
            g2 = (u2 * g[0], v2 * g[1])
            got = G.mu_raw(f2, g2)
            if got != want:
                check("mu-well-defined", False, (f, g, f2, g2))
                return
        check("mu-well-defined", True, None)


def _check_r2(G: AlexGroupoid, rng: random.Random, k: int, objs, check) -> None:
    """Triples modulo related unit triples biject with composable pairs.

    (i,j,k) -> ((i,j),(j,k)) must be constant on R2-classes, hit every
    composable pair, and identify only R2-related triples.
    """
    units = G.M.units
    related = G.M.related
    for i, j, kk in [tuple(rng.choice(objs) for _ in range(3)) for _ in range(k)] if objs else []:
        image = (G.canon1(i, j), G.canon1(j, kk))
        ok = True
        for u, v, w in itertools.product(units, repeat=3):
            other = (G.canon1(u * i, v * j), G.canon1(v * j, w * kk))
            r2 = related(u, v) and related(v, w)
            if r2 != (other == image):
                ok = False
                break
        check("r2-bijection", ok, (i, j, kk))
        f, g = image
        u = g[0] * f[1].inv()
        check("r2-bijection", (G.canon1(f[0], f[1]), G.canon1(f[1], u.inv() * g[1])) == (f, g), (f, g))


# basic opens and pattern grids


def basic_open_u(G: AlexGroupoid, z: GroupElem) -> list:
    """``U_z = {i in G0 : i = n z for some n in N}`` inside the window."""
    return [x for x in G.g0_nodes() if G.spec.contains(x * z.inv())]


def in_pi(G, anchor, f) -> bool:
    """Is ``f = (i, j)`` in ``Pi_(x,y) = {(ax, by) : a ~ b in N}``?  Any representative will do."""
    return any(_pi_raw(G, anchor, (u * f[0], v * f[1])) for u, v in G.unit_pairs)


def _pi_raw(G, anchor, f) -> bool:
    a, b = f[0] * anchor[0].inv(), f[1] * anchor[1].inv()
    return G.spec.contains(a) and G.spec.contains(b) and G.M.related(a, b)


def basic_open_pi(G: AlexGroupoid, x: GroupElem, y: GroupElem) -> list:
    return [f for f in G.g1_nodes() if in_pi(G, (x, y), f)]


def basic_open(G: AlexGroupoid, which: str, *anchor) -> list:
    if which in ("U", "u"):
        return basic_open_u(G, *anchor)
    if which in ("Pi", "pi"):
        return basic_open_pi(G, *anchor)
    raise UsageError(f"unknown basic open {which!r}; use 'U' or 'Pi'")


def translation_failures(G: AlexGroupoid, anchors) -> list:
    """Check ``U_z = U_1 . z`` and ``Pi_(x,y) = Pi_(1,1) . (x,y)`` on the window.

    A window node ``w`` is compared only when its translate back,
    ``w z^-1``, is also in the window, so truncation at the edge is ignored.
    """
    one = G.group.identity()
    u1 = set(basic_open_u(G, one))
    pi1 = set(basic_open_pi(G, one, one))
    g0, g1 = G.g0_nodes(), G.g1_nodes()
    bad = []
    for x, y in anchors:
        ux = set(basic_open_u(G, x))
        for w in g0:
            back = G.canon0(w * x.inv())
            if G.in_g0(back) and (w in ux) != (back in u1):
                bad.append(("U", x, w))
                break
        pxy = set(basic_open_pi(G, x, y))
        for f in g1:
            back = G.canon1(f[0] * x.inv(), f[1] * y.inv())
            if G.in_g1(back) and (f in pxy) != (back in pi1):
                bad.append(("Pi", (x, y), f))
                break
    return bad


@dataclass(frozen=True)
class PatternGrid:
    """``cells[a][b]`` says whether ``(offset_a . x, offset_b . y)`` lies in ``Pi_(x,y)``."""

    anchor: tuple
    size: int
    cells: tuple

    def dots(self) -> set[tuple[int, int]]:
        return {(a, b) for a in range(self.size) for b in range(self.size) if self.cells[a][b]}


class _CongruenceView:
    """The bits of a groupoid that the Pi membership test needs."""

    def __init__(self, M: QuotientMonoid):
        self.M = M
        self.spec = M.spec
        self.unit_pairs = tuple(sorted(M.unit_pairs, key=_pair_key))


def pattern_grid(M: QuotientMonoid, size: int, anchor=None, offsets=None) -> PatternGrid:
    """Membership grid of ``Pi_(x,y)`` over offsets ``0..size-1`` (rank-one Z)."""
    if not M.congruence.stable:
        raise WindowError("pattern grids need a stable congruence")
    g = M.group
    if offsets is None:
        if g.is_free or g.rank != 1:
            raise UsageError("default offsets only exist for rank-one integer groups; pass offsets")
        offsets = [g.elem((n,)) for n in range(size)]
    else:
        offsets = [parse_elem(g, o) for o in offsets]
        if len(offsets) != size:
            raise UsageError("need exactly `size` offsets")
    x, y = anchor if anchor is not None else (g.identity(), g.identity())
    for o in offsets:
        if not M.congruence.in_core(o):
            raise WindowError(f"offset {o} exits the stable core of radius {M.radius}")
    view = _CongruenceView(M)
    cells = tuple(tuple(_pi_raw(view, (x, y), (a * x, b * y)) for b in offsets) for a in offsets)
    return PatternGrid((x, y), size, cells)


# the trivial congruence and P x| Z


def iso_forward(G: AlexGroupoid, f):
    """``(i, j) -> ([i], i^-1 j)``."""
    return (G.canon0(f[0]), f[0].inv() * f[1])


def iso_backward(G: AlexGroupoid, a):
    p, z = a
    return G.canon1(p, p * z)


def coset_action_groupoid(G: AlexGroupoid) -> ActionGroupoid:
    """``P x| Z`` on the same coset window, with Z cut to the ball of radius 2r."""
    return ActionGroupoid(G.coset.action(2 * G.radius))


def trivial_congruence_iso(G: AlexGroupoid, A: ActionGroupoid | None = None, budget: int = 4000,
                           seed: int = 0, max_failures: int = 20) -> GroupoidReport:
    """Verify ``(i,j) -> (i, i^-1 j)`` is an order isomorphism of groupoids onto ``P x| Z``."""
    if not G.M.congruence.is_trivial:
        raise UsageError("the isomorphism with P x| Z needs the trivial congruence")
    A = coset_action_groupoid(G) if A is None else A
    rng = random.Random(seed)
    rep = GroupoidReport()

    def check(name, ok, witness):
        rep.tick(name)
        if not ok and len(rep.failures) < max_failures:
            rep.fail(name, witness)

    phi = lambda f: iso_forward(G, f)  # noqa: E731
    objs = G.sample_objects(budget, rng)
    arrows = G.sample_arrows(budget, rng)
    pairs = G.sample_composable(budget, rng)
    for x in objs:
        check("iso-objects", x in A.poset and A.poset.is_interior(x), x)
        check("iso-unit", phi(G.unit(x)) == A.unit(x), x)
        for y in G.up_objects(x):
            check("iso-order0", G.leq0(x, y) == A.leq0(x, y), (x, y))
    for f in arrows:
        a = phi(f)
        check("iso-arrow", A.is_arrow(a), f)
        check("iso-roundtrip", iso_backward(G, a) == f, f)
        check("iso-ends", A.s(a) == G.s(f) and A.t(a) == G.t(f), f)
        check("iso-iota", phi(G.iota(f)) == A.iota(a), f)
        for f2 in G.up_arrows(f):
            check("iso-order1", A.leq1(a, phi(f2)), (f, f2))
        for a2 in A.up_arrows(a):
            check("iso-order1-back", G.leq1(f, iso_backward(G, a2)), (f, a2))
    for f, f2 in _tuples_sample(arrows, budget, rng):
        check("iso-order1-reflect", G.leq1(f, f2) == A.leq1(phi(f), phi(f2)), (f, f2))
    for f, g in pairs:
        check("iso-mu", phi(G.mu(f, g)) == A.mu(phi(f), phi(g)), (f, g))
    return rep


# induced action on S x G0


@dataclass
class InducedActionReport:
    table: dict
    monotone: bool
    witness: tuple | None
    pairs_checked: int
    depth: int

    def __bool__(self):
        return self.monotone


def alpha(G: AlexGroupoid, S: MSet, s: str, f) -> tuple:
    """``alpha(s, (i,j)) = ([j], sigma(j) j^-1 i sigma(i)^-1 . s)``."""
    i, j = f
    w = G.canon0(j) * j.inv() * i * G.canon0(i).inv()
    if not G.spec.contains(w):
        raise ConfigurationError(f"twist {w} is not in the submonoid")
    return (G.canon0(j), S.act(w, s))


def etale_leq(G: AlexGroupoid, S: MSet, x, y) -> bool:
    """Order on ``G0 x S``: ``(p,s) <= (q,s')`` iff ``q p^-1 = n`` in N and ``s' = n . s``."""
    n = y[0] * x[0].inv()
    return G.spec.contains(n) and S.act(n, x[1]) == y[1]


def induced_action(G: AlexGroupoid, S: MSet, depth: int | None = None, budget: int = 2000,
                   seed: int = 0) -> InducedActionReport:
    """Tabulate alpha on ``S x`` interior arrows and test it for monotonicity.

    The default ``depth`` covers every generating pair of the congruence, so a
    violation ``a.s != b.s`` always shows up among the compared pairs.
    """
    if S.spec != G.spec:
        raise UsageError("M-set and groupoid use different submonoids")
    gen_norm = max((max(a.norm(), b.norm()) for a, b in G.M.congruence.pairs), default=0)
    depth = max(G.depth, gen_norm) if depth is None else depth
    near = G.spec.members(depth)
    near_pairs = [(a, b) for a in near for b in near if G.M.related(a, b)]
    rng = random.Random(seed)
    arrows = G.sample_arrows(budget, rng)
    table = {}
    checked = 0
    witness = None
    for f in arrows:
        p = G.s(f)
        for s in S.elements:
            low = alpha(G, S, s, f)
            table[(s, f)] = low
            for a, b in near_pairs:
                f2 = G.canon1(a * f[0], b * f[1])
                if not G.in_g1(f2):
                    continue
                p2 = G.s(f2)
                n = p2 * p.inv()
                s2 = S.act(n, s)
                checked += 1
                high = alpha(G, S, s2, f2)
                if not etale_leq(G, S, low, high) and witness is None:
                    witness = ((p, s), f, (p2, s2), f2)
    return InducedActionReport(table, witness is None, witness, checked, depth)

"""Right group actions on window posets, the site category and P x| Z.

Conventions, fixed once here and used everywhere:

* the action is on the right, ``x . (gh) = (x . g) . h``;
* ``Hom(p, q) = {g : p.g >= q}``, composed as ``f then g = f*g`` (this is
  multiplication in the opposite group, read right to left);
* the endomorphism monoid of ``p`` is ``{g : p.g >= p}``, i.e. the elements
  with ``up(p).g`` inside ``up(p)``.  For Z acting on Z by addition this is N.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

from .ambient_group import GroupDescriptor, GroupElem, ball, ball_size, compose, inverse
from .errors import UsageError, WindowError
from .poset_core import WindowPoset, is_minimal_basis, node_key


class FiniteGroup:
    """An explicitly enumerated finite group."""

    def __init__(self, elements: Iterable[Hashable], mul: Callable, identity, name: str = ""):
        self._elements = list(elements)
        self._mul = mul
        self.identity = identity
        self.name = name
        self._inv = {}
        for a in self._elements:
            for b in self._elements:
                if mul(a, b) == identity:
                    self._inv[a] = b
                    break
            else:
                raise UsageError(f"{a} has no inverse; not a group")

    @classmethod
    def cyclic(cls, n: int) -> FiniteGroup:
        return cls(range(n), lambda a, b: (a + b) % n, 0, name=f"Z/{n}")

    @classmethod
    def symmetric(cls, n: int) -> FiniteGroup:
        """Permutations of 1..n as image tuples; ``p*q`` means p first, then q."""
        perms = list(itertools.permutations(range(1, n + 1)))
        return cls(perms, _perm_then, tuple(range(1, n + 1)), name=f"S{n}")

    @classmethod
    def generated_by(cls, gens, mul: Callable, identity, name: str = "") -> FiniteGroup:
        elems = {identity}
        frontier = [identity]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = mul(x, g)
                    if y not in elems:
                        elems.add(y)
                        nxt.append(y)
            frontier = nxt
        return cls(sorted(elems, key=node_key), mul, identity, name=name)

    def elements(self, r: int | None = None) -> list:
        return list(self._elements)

    def mul(self, a, b):
        return self._mul(a, b)

    def inv(self, a):
        return self._inv[a]

    def __contains__(self, a) -> bool:
        return a in self._inv

    def key(self, a):
        return node_key(a)


def _perm_then(p: tuple, q: tuple) -> tuple:
    return tuple(q[x - 1] for x in p)


class AmbientBall:
    """An ambient group seen through a ball of given radius."""

    def __init__(self, group: GroupDescriptor, radius: int):
        self.group = group
        self.radius = radius
        self.identity = group.identity()

    def elements(self, r: int | None = None) -> list[GroupElem]:
        return ball(self.group, self.radius if r is None else min(r, self.radius))

    def size(self) -> int:
        return ball_size(self.group, self.radius)

    def mul(self, a, b):
        return compose(a, b)

    def inv(self, a):
        return inverse(a)

    def __contains__(self, a) -> bool:
        return isinstance(a, GroupElem) and a.group == self.group and a.norm() <= self.radius

    def key(self, a):
        return a.sort_key()


class GroupActionOnPoset:
    """An order-preserving right action, partial at the window boundary.

    ``act(x, g)`` returns ``None`` when ``x.g`` leaves the window.  ``poset``
    needs ``leq``, ``__contains__`` and ``interior``; ``elements`` is only
    required by operations that enumerate nodes.
    """

    def __init__(self, poset, group, act: Callable):
        self.poset = poset
        self.group = group
        self._act = act

    def act(self, x, g):
        y = self._act(x, g)
        return y if y is not None and y in self.poset else None

    def orbit(self, x) -> set:
        return {y for g in self.group.elements() if (y := self.act(x, g)) is not None}

    def check_laws(self, nodes=None, elements=None) -> list[tuple]:
        """Identity, compatibility and monotonicity failures (empty if lawful)."""
        nodes = list(self.poset.elements if nodes is None else nodes)
        elements = list(self.group.elements() if elements is None else elements)
        e = self.group.identity
        bad = []
        for x in nodes:
            if self.act(x, e) != x:
                bad.append(("identity", x))
        for x, g, h in itertools.product(nodes, elements, elements):
            xg = self.act(x, g)
            if xg is None:
                continue
            xgh, x_gh = self.act(xg, h), self.act(x, self.group.mul(g, h))
            if xgh is not None and x_gh is not None and xgh != x_gh:
                bad.append(("compatibility", x, g, h))
        for x, y in itertools.product(nodes, nodes):
            if x != y and self.poset.leq(x, y):
                for g in elements:
                    xg, yg = self.act(x, g), self.act(y, g)
                    if xg is not None and yg is not None and not self.poset.leq(xg, yg):
                        bad.append(("monotone", x, y, g))
        return bad


def translation_action(P: WindowPoset, group: AmbientBall) -> GroupActionOnPoset:
    """Z^n acting on a poset of group elements by right multiplication."""
    return GroupActionOnPoset(P, group, lambda x, g: x * g)


def permutation_action(P: WindowPoset, group: FiniteGroup) -> GroupActionOnPoset:
    """Permutations of 1..n acting on nodes 1..n by ``x.p = p[x-1]``."""
    return GroupActionOnPoset(P, group, lambda x, p: p[x - 1])


class SiteCategory:
    """Objects are poset nodes, ``Hom(p, q) = {g : p.g >= q}``."""

    def __init__(self, action: GroupActionOnPoset):
        self.action = action

    def hom(self, p, q, r: int | None = None) -> list:
        A = self.action
        out = []
        for g in A.group.elements(r):
            pg = A.act(p, g)
            if pg is not None and A.poset.leq(q, pg):
                out.append(g)
        return out

    def compose(self, f, g):
        """Composite of ``f: p -> q`` and ``g: q -> r``."""
        return self.action.group.mul(f, g)


def hom_set(C, p, q, r: int | None = None) -> list:
    if isinstance(C, GroupActionOnPoset):
        C = SiteCategory(C)
    return C.hom(p, q, r)


def endo_monoid(A: GroupActionOnPoset, p, r: int | None = None) -> list:
    """``{g : p.g >= p}``; closure is verified on the half-radius ball."""
    M = SiteCategory(A).hom(p, p, r)
    members = set(M)
    if isinstance(A.group, AmbientBall):
        half = (A.group.radius if r is None else r) // 2
        small = [g for g in M if g.norm() <= half]
    else:
        small = M
    for g in small:
        for h in small:
            if A.group.mul(g, h) not in members:
                raise WindowError(f"endomorphisms of {p} not closed within window: {g}*{h}")
    return M


@dataclass
class TransitivityReport:
    transitive: bool
    minimal_basis: bool
    witness: tuple | None = None
    scope: str = "within window"

    def __bool__(self):
        return self.transitive and self.minimal_basis


def check_transitive_basis_action(A: GroupActionOnPoset) -> TransitivityReport:
    """Does the group act transitively on the interior basic opens ``up(x)``?

    ``up(x).g = up(x.g)`` for an order automorphism, so this is one orbit on
    interior nodes.  Minimality of ``{up(x)}`` is reported for completeness.
    """
    P = A.poset
    interior = sorted(P.interior, key=node_key)
    minimal = bool(is_minimal_basis(P, [P.up_set(x) for x in P.elements])) if isinstance(P, WindowPoset) else True
    if not interior:
        return TransitivityReport(True, minimal)
    x0 = interior[0]
    # close under repeated steps so a small group ball can still cross the window
    reached, frontier = {x0}, [x0]
    while frontier:
        nxt = [y for x in frontier for y in A.orbit(x) if y not in reached]
        reached.update(nxt)
        frontier = nxt
    for y in interior:
        if y not in reached:
            return TransitivityReport(False, minimal, (x0, y))
    return TransitivityReport(True, minimal)


class ObjectPairSampling:
    """Sampling of interior objects, arrows, composable pairs and triples.

    Subclasses supply ``sample_objects`` and ``arrows_between(p, q)``; arrows
    are drawn by picking their endpoints, which keeps sampling local even when
    the arrow window is far too large to list.
    """

    def sample_objects(self, k: int, rng: random.Random) -> list:
        raise NotImplementedError

    def arrows_between(self, p, q) -> list:
        raise NotImplementedError

    def sample_arrows(self, k: int, rng: random.Random) -> list:
        objs = self.sample_objects(k, rng)
        return _cap([f for p, q in _tuples(objs, 2, k, rng) for f in self.arrows_between(p, q)], k, rng)

    def sample_composable(self, k: int, rng: random.Random) -> list:
        objs = self.sample_objects(k, rng)
        out = []
        for p, q, r in _tuples(objs, 3, k, rng):
            out.extend(itertools.product(self.arrows_between(p, q), self.arrows_between(q, r)))
        return _cap(out, k, rng)

    def sample_triples(self, k: int, rng: random.Random) -> list:
        objs = self.sample_objects(k, rng)
        out = []
        for p, q, r, w in _tuples(objs, 4, k, rng):
            out.extend(itertools.product(self.arrows_between(p, q), self.arrows_between(q, r),
                                         self.arrows_between(r, w)))
        return _cap(out, k, rng)


def _cap(items: list, k: int, rng: random.Random) -> list:
    return items if len(items) <= k else rng.sample(items, k)


def _tuples(objs: list, n: int, k: int, rng: random.Random):
    if len(objs) ** n <= k:
        return list(itertools.product(objs, repeat=n))
    return [tuple(rng.choice(objs) for _ in range(n)) for _ in range(k)]


class ActionGroupoid(ObjectPairSampling):
    """``P x| Z``: objects P, arrows ``(p, z)`` with z in a ball of Z.

    s(p,z) = p, t(p,z) = p.z, mu((p,z),(p.z,z')) = (p, z z'),
    iota(p,z) = (p.z, z^-1), e(p) = (p, 1); (p,z) <= (p',z') iff p <= p'
    and z = z'.
    """

    def __init__(self, action: GroupActionOnPoset, radius: int | None = None):
        self.action = action
        self.poset = action.poset
        grp = action.group
        if radius is not None and isinstance(grp, AmbientBall):
            grp = AmbientBall(grp.group, radius)
        self.group = grp

    def s(self, f):
        return f[0]

    def t(self, f):
        return self.action.act(f[0], f[1])

    def unit(self, x):
        return (x, self.group.identity)

    def iota(self, f):
        return (self.t(f), self.group.inv(f[1]))

    def composable(self, f, g) -> bool:
        return self.t(f) == g[0]

    def mu(self, f, g):
        if not self.composable(f, g):
            raise UsageError(f"arrows {f} and {g} are not composable")
        return (f[0], self.group.mul(f[1], g[1]))

    def leq0(self, x, y) -> bool:
        return self.poset.leq(x, y)

    def leq1(self, f, g) -> bool:
        return f[1] == g[1] and self.poset.leq(f[0], g[0])

    def is_arrow(self, f) -> bool:
        return f[0] in self.poset and f[1] in self.group and self.t(f) is not None

    def sample_objects(self, k: int, rng: random.Random) -> list:
        return self.poset.sample_interior(k, rng)

    def arrows_between(self, p, q) -> list:
        units = getattr(self.poset, "units", None)
        if units is not None and isinstance(self.group, AmbientBall):
            # coset poset: p.z = q exactly for z = p^-1 u q
            zs = sorted({p.inv() * u * q for u in units}, key=GroupElem.sort_key)
        else:
            zs = [z for z in self.group.elements() if self.action.act(p, z) == q]
        return [(p, z) for z in zs if z in self.group]

    def up_objects(self, x) -> list:
        return sorted(self.poset.up_near(x), key=node_key)

    def up_arrows(self, f) -> list:
        return [(p, f[1]) for p in self.up_objects(f[0]) if self.t((p, f[1])) is not None]

    def up_composable(self, f, g) -> list:
        out = []
        for p in self.up_objects(f[0]):
            f2 = (p, f[1])
            tf2 = self.t(f2)
            if tf2 is not None and self.t((tf2, g[1])) is not None:
                out.append((f2, (tf2, g[1])))
        return out


def build_action_groupoid(A: GroupActionOnPoset, r: int | None = None) -> ActionGroupoid:
    return ActionGroupoid(A, r)

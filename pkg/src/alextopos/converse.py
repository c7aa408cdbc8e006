"""From monoids to posets with a group action, and back.

Given ``N`` inside ``Z`` with finite unit group, the coset poset is
``P = N^x \\ Z`` ordered by ``[g] >= [h]`` iff ``g h^-1`` lies in ``N``, with
``Z`` acting by right multiplication.  Every node ``p`` carries a chosen
representative ``sigma(p)``, the canonical minimum of its unit orbit, with
``sigma(1) = 1``.  An M-set ``S`` turns into the equivariant etale poset
``E = P x S``; the fibre over ``[1]`` recovers ``S``.
"""
from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from functools import cached_property

from .ambient_group import GroupElem, ball, ball_size, parse_elem, sample_ball
from .equivariant import GroupActionOnPoset
from .errors import NotAnArrow, ResourceError, UsageError, WindowError
from .monoid_core import MSet, QuotientMonoid, SubmonoidSpec, unit_group
from .poset_core import Check, MonotoneMap, WindowPoset, irreducible_closed_sets, is_etale, node_key

MATERIALIZE_CAP = 50000


class CosetPoset:
    """Unit orbits of a window of ``Z`` with the divisibility order.

    The window is either a ball of radius ``radius`` or an explicit list of
    group elements.  Nodes are represented by their ``sigma`` value, so a
    node *is* a group element.  ``depth`` sets the interior: a node is
    interior when ``n.p`` stays in the window for every ``n`` in
    ``N cap ball(depth)``.
    """

    def __init__(self, spec: SubmonoidSpec, units, radius: int | None = None, window=None, depth: int = 1):
        if (radius is None) == (window is None):
            raise UsageError("give exactly one of radius or window")
        if depth < 1:
            raise UsageError("depth must be >= 1")
        self.spec = spec
        self.group = spec.group
        self.units = tuple(sorted(units, key=GroupElem.sort_key))
        self._unit_set = frozenset(self.units)
        self._rep_cache: dict[GroupElem, GroupElem] = {}
        self.identity = self.group.identity()
        self.radius = radius
        self.depth = depth
        self._near = spec.members(depth)
        # norms are subadditive, so with norm-zero units every node of norm
        # <= radius - depth is interior without probing its neighbours
        self._flat_units = all(u.norm() == 0 for u in self.units)
        self._explicit = None
        if window is not None:
            self._explicit = frozenset(self.rep(parse_elem(self.group, g)) for g in window)

    def rep(self, g: GroupElem) -> GroupElem:
        """``sigma`` of the node containing ``g``."""
        if g in self._unit_set:
            return self.identity
        if len(self.units) == 1:
            return g
        r = self._rep_cache.get(g)
        if r is None:
            r = self._rep_cache[g] = min((u * g for u in self.units), key=GroupElem.sort_key)
        return r

    def orbit(self, g: GroupElem) -> frozenset[GroupElem]:
        return frozenset(u * g for u in self.units)

    def __contains__(self, p) -> bool:
        if not isinstance(p, GroupElem) or p.group != self.group:
            return False
        if self._explicit is not None:
            return p in self._explicit
        return p.norm() <= self.radius and self.rep(p) == p

    def leq(self, p: GroupElem, q: GroupElem) -> bool:
        return self.spec.contains(q * p.inv())

    def act(self, p: GroupElem, g: GroupElem):
        q = self.rep(p * g)
        return q if q in self else None

    def up_near(self, p: GroupElem) -> set[GroupElem]:
        """Nodes ``n.p`` for ``n`` in ``N cap ball(depth)`` that stay in the window."""
        return {q for n in self._near if (q := self.rep(n * p)) in self}

    def is_interior(self, p: GroupElem) -> bool:
        if self._explicit is None and self._flat_units and p.norm() + self.depth <= self.radius:
            return p in self
        return all(self.rep(n * p) in self for n in self._near)

    def _size_hint(self) -> int:
        return len(self._explicit) if self._explicit is not None else ball_size(self.group, self.radius)

    @cached_property
    def nodes(self) -> tuple[GroupElem, ...]:
        if self._explicit is not None:
            return tuple(sorted(self._explicit, key=GroupElem.sort_key))
        if self._size_hint() > MATERIALIZE_CAP:
            raise ResourceError(f"coset window of radius {self.radius} is too large to materialize")
        return tuple(sorted({self.rep(g) for g in ball(self.group, self.radius)}, key=GroupElem.sort_key))

    @property
    def elements(self) -> tuple[GroupElem, ...]:
        return self.nodes

    @cached_property
    def interior(self) -> frozenset[GroupElem]:
        return frozenset(p for p in self.nodes if self.is_interior(p))

    @cached_property
    def window(self) -> WindowPoset:
        nodes = self.nodes
        pairs = [(p, q) for p in nodes for q in nodes if self.leq(p, q)]
        return WindowPoset(nodes, pairs, interior=self.interior,
                           labels={p: str(p) for p in nodes}, check=False)

    def up_set(self, p) -> frozenset:
        return self.window.up_set(p)

    def sample_interior(self, k: int, rng: random.Random) -> list[GroupElem]:
        if self._size_hint() <= MATERIALIZE_CAP:
            pool = sorted(self.interior, key=GroupElem.sort_key)
            return pool if len(pool) <= k else sorted(rng.sample(pool, k), key=GroupElem.sort_key)
        # too large to list: elements of norm <= radius - depth are interior
        cand = sample_ball(self.group, self.radius - self.depth, k, rng)
        return sorted({p for g in cand if self.is_interior(p := self.rep(g))}, key=GroupElem.sort_key)

    def action(self, radius: int | None = None) -> GroupActionOnPoset:
        from .equivariant import AmbientBall

        r = radius if radius is not None else (self.radius if self.radius is not None else
                                               max(p.norm() for p in self.nodes))
        return GroupActionOnPoset(self, AmbientBall(self.group, r), self.act)

    def __repr__(self):
        where = f"radius {self.radius}" if self._explicit is None else f"{len(self._explicit)} explicit nodes"
        return f"CosetPoset({self.spec.group}, {where})"


def _spec_and_units(M, r: int):
    if isinstance(M, QuotientMonoid):
        return M.spec, M.units
    if isinstance(M, SubmonoidSpec):
        return M, unit_group(M, r)
    raise UsageError(f"expected a QuotientMonoid or SubmonoidSpec, got {type(M).__name__}")


def _window_norm(spec: SubmonoidSpec, window) -> int:
    return max(parse_elem(spec.group, g).norm() for g in window)


def build_coset_poset(M, r: int | None = None, window=None, depth: int = 1) -> CosetPoset:
    """Coset poset over a ball of radius ``r`` or over explicit ``window`` elements."""
    spec = M.spec if isinstance(M, QuotientMonoid) else M
    unit_radius = r if r is not None else _window_norm(spec, window)
    spec, units = _spec_and_units(M, unit_radius)
    return CosetPoset(spec, units, radius=r, window=window, depth=depth)


def integer_window(spec: SubmonoidSpec, lo: int, hi: int) -> list[GroupElem]:
    """Elements ``lo..hi`` of a rank-one integer group (all residues)."""
    g = spec.group
    if g.is_free or g.rank != 1:
        raise UsageError("integer windows need a rank-one integer group")
    residues = range(g.modulus) if g.modulus else (0,)
    return [g.elem((z,), s) for z in range(lo, hi + 1) for s in residues]


def alpha_factor(P: CosetPoset, p: GroupElem, g: GroupElem, q: GroupElem) -> GroupElem:
    """``sigma(p) g sigma(q)^-1``, which lies in N exactly when g is an arrow p -> q."""
    a = P.rep(p) * g * P.rep(q).inv()
    if not P.spec.contains(a):
        raise NotAnArrow(f"{g} is not an arrow {p} -> {q}: {a} is not in the submonoid")
    return a


def unit_twist(P: CosetPoset, p: GroupElem, g: GroupElem) -> GroupElem:
    """``u_g = sigma(p) g sigma(p.g)^-1``, always a unit."""
    return P.rep(p) * g * P.rep(p * g).inv()


class EquivariantEtalePoset:
    """``E = P x S`` with ``(p,s) <= (q,s')`` iff ``p <= q`` and ``s' = sigma(q)sigma(p)^-1 . s``.

    ``Z`` acts by ``(p,s).g = (p.g, u_g^-1 . s)``.
    """

    def __init__(self, coset: CosetPoset, mset: MSet):
        if mset.spec != coset.spec:
            raise UsageError("M-set and coset poset use different submonoids")
        self.coset = coset
        self.mset = mset
        base = coset.window
        nodes = [(p, s) for p in base.elements for s in mset.elements]
        pairs = []
        for p in base.elements:
            for q in base.up_set(p):
                t = q * p.inv()
                for s in mset.elements:
                    pairs.append(((p, s), (q, mset.act(t, s))))
        interior = [(p, s) for p in base.interior for s in mset.elements]
        labels = {(p, s): f"{p}|{s}" for p, s in nodes}
        self.total = WindowPoset(nodes, pairs, interior=interior, labels=labels, check=False)
        self.projection = MonotoneMap(self.total, base, {x: x[0] for x in nodes}, check=False)

    @property
    def base(self) -> WindowPoset:
        return self.coset.window

    def act(self, node, g: GroupElem):
        p, s = node
        q = self.coset.act(p, g)
        if q is None:
            return None
        u = unit_twist(self.coset, p, g)
        return (q, self.mset.act(u.inv(), s))

    def action(self, radius: int) -> GroupActionOnPoset:
        from .equivariant import AmbientBall

        return GroupActionOnPoset(self.total, AmbientBall(self.coset.group, radius), self.act)

    def fiber(self, p) -> list:
        return [(p, s) for s in self.mset.elements]

    def to_dict(self, samples=()) -> dict:
        d = self.total.to_dict(name=_node_name)
        d["fiber_labels"] = {_node_name(x): x[1] for x in self.total.elements}
        d["action_samples"] = [
            [_node_name(x), str(g), None if (y := self.act(x, g)) is None else _node_name(y)]
            for x, g in samples
        ]
        return d


def _node_name(x) -> str:
    return f"{x[0]}|{x[1]}"


def mset_to_etale(M, S: MSet, r: int | None = None, window=None, depth: int = 1) -> EquivariantEtalePoset:
    return EquivariantEtalePoset(build_coset_poset(M, r, window, depth), S)


def etale_to_mset(E: EquivariantEtalePoset) -> MSet:
    """Read back the M-set from the fibre over ``[1]``.

    For a generator ``n``: go up from ``(1, s)`` to the element over
    ``[n]`` and move it back to the fibre over ``[1]`` with ``n^-1``.
    Only the order and the group action of ``E`` are used.
    """
    P = E.coset
    one = P.identity
    if one not in P or one not in P.interior:
        raise WindowError("the identity node must be an interior node of the window")
    spec = E.mset.spec
    table = {}
    for n in spec.generators:
        target = P.rep(n)
        if target not in P:
            raise WindowError(f"node of generator {n} lies outside the window")
        row = {}
        for s in E.mset.elements:
            above = [y for y in E.total.up_set((one, s)) if y[0] == target]
            if len(above) != 1:
                raise WindowError(f"no unique element above ({one}, {s}) over {target}")
            back = E.act(above[0], n.inv())
            if back is None or back[0] != one:
                raise WindowError(f"transport of {above[0]} back to the identity fibre failed")
            row[s] = back[1]
        table[n] = row
    return MSet(spec, E.mset.elements, table, name=E.mset.name)


def check_etale(E: EquivariantEtalePoset) -> Check:
    return is_etale(E.projection)


def check_translation_identities(E: EquivariantEtalePoset, pairs) -> list[tuple]:
    """Failures of the translation and twist identities at ``(p, g)`` samples.

    With ``T = sigma(p)^-1 sigma(p.g)`` and ``theta_{p,u} = sigma(p)^-1 u sigma(p)``:
    ``(p,s).T = (p.g, s)`` and
    ``((p,s).theta_{p,u}).T = ((p,s).T).theta_{p.g,u}``.
    """
    P = E.coset
    bad = []
    for p, g in pairs:
        q = P.act(p, g)
        if q is None:
            continue
        T = P.rep(p).inv() * q
        for s in E.mset.elements:
            x = (p, s)
            xT = E.act(x, T)
            if xT != (q, s):
                bad.append(("translation", p, g, s))
                continue
            for u in P.units:
                th_p = P.rep(p).inv() * u * P.rep(p)
                th_q = q.inv() * u * q
                xth = E.act(x, th_p)
                if xth is None or xth != (p, E.mset.act(u.inv(), s)):
                    bad.append(("twist", p, u, s))
                    continue
                left = E.act(xth, T)
                right = E.act(xT, th_q)
                if left is not None and right is not None and left != right:
                    bad.append(("commute", p, g, u, s))
    return bad


def check_equivariance(E: EquivariantEtalePoset, elements, nodes=None) -> list[tuple]:
    """Projection compatibility, monotonicity and the action law on samples."""
    nodes = sorted(E.total.interior if nodes is None else nodes, key=node_key)
    bad = []
    for x in nodes:
        for g in elements:
            y = E.act(x, g)
            if y is None:
                continue
            if y[0] != E.coset.act(x[0], g):
                bad.append(("projection", x, g))
            for z in E.total.up_set(x):
                zg = E.act(z, g)
                if zg is not None and not E.total.leq(y, zg):
                    bad.append(("monotone", x, z, g))
            for h in elements:
                a, b = E.act(y, h), E.act(x, g * h)
                if a is not None and b is not None and a != b:
                    bad.append(("action", x, g, h))
    return bad


# points


def points_finite(P: WindowPoset, A: GroupActionOnPoset) -> list[frozenset]:
    """Orbits of irreducible closed sets under the group; one representative each.

    Representatives are the orbit members whose focus is smallest.
    """
    closed = {C: max(C, key=lambda x: len(P.down_set(x))) for C in irreducible_closed_sets(P)}
    seen: set[frozenset] = set()
    reps = []
    for C in sorted(closed, key=lambda C: node_key(closed[C])):
        if C in seen:
            continue
        orbit = set()
        for g in A.group.elements():
            image = frozenset(A.act(x, g) for x in C)
            if None in image:
                raise WindowError("points_finite needs an action defined on the whole poset")
            orbit.add(image)
        seen |= orbit
        reps.append(C)
    return reps


@dataclass(frozen=True)
class PointClass:
    kind: str
    tail: tuple[int, ...] = ()

    def __str__(self):
        if self.kind == "principal":
            return "principal"
        return "tail:(" + "*".join(f"x{a}" for a in self.tail) + ")^inf"


def _check_letters(k: int, word) -> tuple[int, ...]:
    word = tuple(int(a) for a in word)
    for a in word:
        if a == 0 or abs(a) > k:
            raise UsageError(f"letter {a} outside the free group on {k} generators")
    return word


def _primitive_root(w: tuple[int, ...]) -> tuple[int, ...]:
    n = len(w)
    for d in range(1, n + 1):
        if n % d == 0 and w[:d] * (n // d) == w:
            return w[:d]
    return w


def classify_points_free_monoid(k: int, prefix=(), period=None) -> PointClass:
    """Point of the free monoid on ``k`` letters described by a word.

    ``period=None`` means the finite reduced word ``prefix`` (a principal
    point; all of these form one orbit).  Otherwise the probe is the infinite
    word ``prefix . period . period ...`` with a positive, nonempty period.
    Two infinite probes give the same point iff their tails agree after
    truncation, i.e. the primitive roots of the periods are rotations of each
    other; the class is labelled by the least rotation.
    """
    if k < 1:
        raise UsageError("need at least one generator")
    prefix = _check_letters(k, prefix)
    if any(a == -b for a, b in zip(prefix, prefix[1:])):
        raise UsageError(f"probe prefix {prefix} is not reduced")
    if period is None:
        return PointClass("principal")
    period = _check_letters(k, period)
    if not period:
        raise UsageError("the period of an infinite probe must be nonempty")
    if any(a < 0 for a in period):
        raise UsageError("the periodic tail must use positive letters only")
    if prefix and prefix[-1] == -period[0]:
        raise UsageError("probe is not reduced at the junction of prefix and period")
    root = _primitive_root(period)
    best = min(root[i:] + root[:i] for i in range(len(root)))
    return PointClass("tail", best)


def point_classes_up_to(k: int, max_period: int) -> set[PointClass]:
    """All point classes whose tail has primitive period <= ``max_period``, plus the principal one."""
    out = {PointClass("principal")}
    for n in range(1, max_period + 1):
        for w in itertools.product(range(1, k + 1), repeat=n):
            out.add(classify_points_free_monoid(k, (), w))
    return out


def commutative_point_class(f) -> tuple[bool, ...]:
    """Points for N^n inside Z^n: maps to Z u {inf} up to Z^n shifts.

    Shifting leaves infinite coordinates infinite and can move finite ones
    anywhere, so the class is the pattern of infinite coordinates.
    """
    return tuple(x is None or (isinstance(x, float) and math.isinf(x)) for x in f)


def same_commutative_point(f, g) -> bool:
    if len(f) != len(g):
        raise UsageError("points of different rank")
    return commutative_point_class(f) == commutative_point_class(g)

"""Submonoids of ambient groups, congruences on them, quotient monoids and M-sets.

A monoid ``M`` is presented as ``N / ~`` where ``N`` is a submonoid of an
ambient group given by a membership oracle, and ``~`` is the congruence
generated by finitely many pairs.  Congruences are saturated inside a finite
window (radius plus margin); only the inner ball, the *stable core*, is ever
queried.
"""
from __future__ import annotations

import itertools
import json
import random
import warnings
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Callable, Hashable, Iterable

from .ambient_group import (
    DEFAULT_CAP,
    GroupDescriptor,
    GroupElem,
    ball,
    format_elem,
    parse_elem,
)
from .errors import ConfigurationError, ResourceError, UsageError, WindowError, WindowWarning

POSITIVE_LETTERS = "positive_letters"
NONNEG = "nonneg"
GENERATED = "generated"
ORACLES = (POSITIVE_LETTERS, NONNEG, GENERATED)


@dataclass(frozen=True)
class SubmonoidSpec:
    """A submonoid ``N`` of an ambient group, with a monoid generating set.

    ``positive_letters`` is the free monoid inside a free group,
    ``nonneg`` is N^n (times the whole cyclic factor, if any) and
    ``generated`` is the submonoid generated by ``generators``, known
    exactly only up to words of length ``depth``.
    """

    group: GroupDescriptor
    oracle: str
    generators: tuple[GroupElem, ...] = ()
    depth: int | None = None

    def __post_init__(self):
        if self.oracle not in ORACLES:
            raise UsageError(f"unknown submonoid oracle {self.oracle!r}")
        if self.oracle == POSITIVE_LETTERS and not self.group.is_free:
            raise UsageError("positive_letters needs a free ambient group")
        if self.oracle == NONNEG and self.group.is_free:
            raise UsageError("nonneg needs an integer ambient group")
        if self.oracle == GENERATED:
            if not self.generators:
                raise UsageError("generated submonoid needs generators")
            if self.depth is None or self.depth < 1:
                raise UsageError("generated submonoid needs a depth >= 1")
        gens = tuple(g for g in (self.generators or self.group.generators()) if not g.is_identity())
        for g in gens:
            if g.group != self.group:
                raise UsageError(f"generator {g} is not in {self.group}")
        object.__setattr__(self, "generators", gens)
        if self.oracle != GENERATED:
            for g in gens:
                if not self.contains(g):
                    raise UsageError(f"generator {g} is not a member of the submonoid")
            missing = [g for g in self.group.generators() if g not in gens]
            if missing:
                raise UsageError(f"standard generators missing: {', '.join(map(str, missing))}")

    @classmethod
    def free_monoid(cls, k: int) -> SubmonoidSpec:
        return cls(GroupDescriptor.free(k), POSITIVE_LETTERS)

    @classmethod
    def naturals(cls, n: int = 1, modulus: int = 0) -> SubmonoidSpec:
        g = GroupDescriptor.int_vector_times_cyclic(n, modulus) if modulus else GroupDescriptor.int_vector(n)
        return cls(g, NONNEG)

    @classmethod
    def generated_by(cls, group: GroupDescriptor, gens: Iterable[GroupElem], depth: int) -> SubmonoidSpec:
        return cls(group, GENERATED, tuple(gens), depth)

    def contains(self, g: GroupElem) -> bool:
        if g.group != self.group:
            raise UsageError(f"{g} is not an element of {self.group}")
        if self.oracle == POSITIVE_LETTERS:
            return all(a > 0 for a in g.data)
        if self.oracle == NONNEG:
            return all(x >= 0 for x in g.data)
        return g in self._generated

    __contains__ = contains

    @cached_property
    def _generated(self) -> dict[GroupElem, tuple[int, ...]]:
        # breadth-first, so every element maps to a shortest generator word
        words = {self.group.identity(): ()}
        frontier = [self.group.identity()]
        for _ in range(self.depth or 0):
            nxt = []
            for x in frontier:
                w = words[x]
                for i, g in enumerate(self.generators):
                    y = x * g
                    if y not in words:
                        words[y] = w + (i,)
                        nxt.append(y)
            frontier = nxt
        return words

    @cached_property
    def _gen_index(self) -> dict[GroupElem, int]:
        return {g: i for i, g in enumerate(self.generators)}

    def decompose(self, n: GroupElem) -> tuple[int, ...]:
        """A word in generator indices whose product is ``n``."""
        if not self.contains(n):
            raise ConfigurationError(f"{n} is not in the submonoid, so it has no generator word")
        if self.oracle == GENERATED:
            return self._generated[n]
        idx = self._gen_index
        std = self.group.generators()
        if self.oracle == POSITIVE_LETTERS:
            return tuple(idx[std[a - 1]] for a in n.data)
        word: list[int] = []
        for i, c in enumerate(n.data):
            word.extend([idx[std[i]]] * c)
        word.extend([idx[std[-1]]] * n.residue)
        return tuple(word)

    def evaluate(self, word: Iterable[int]) -> GroupElem:
        out = self.group.identity()
        for i in word:
            out = out * self.generators[i]
        return out

    def members(self, r: int, cap: int = DEFAULT_CAP) -> list[GroupElem]:
        """``N`` intersected with the ball of radius ``r``, in canonical order."""
        g = self.group
        if self.oracle == POSITIVE_LETTERS:
            count = sum(g.rank**n for n in range(r + 1))
            _cap(count, cap, f"N cap ball({r})")
            return [GroupElem(g, w) for n in range(r + 1) for w in itertools.product(range(1, g.rank + 1), repeat=n)]
        if self.oracle == NONNEG:
            count = (r + 1) ** g.rank * (g.modulus or 1)
            _cap(count, cap, f"N cap ball({r})")
            residues = range(g.modulus) if g.modulus else (0,)
            return [GroupElem(g, c, s) for c in itertools.product(range(r + 1), repeat=g.rank) for s in residues]
        return sorted((x for x in self._generated if x.norm() <= r), key=GroupElem.sort_key)

    def check_closure(self, r: int) -> list[tuple[GroupElem, GroupElem]]:
        """Products of members of ball(r) that the oracle rejects (should be empty)."""
        ms = self.members(r)
        return [(a, b) for a in ms for b in ms if not self.contains(a * b)]


def _cap(count: int, cap: int, what: str) -> None:
    if count > cap:
        raise ResourceError(f"{what} has {count} elements, over the cap of {cap}")


def contains(spec: SubmonoidSpec, g: GroupElem) -> bool:
    return spec.contains(g)


def unit_group(spec: SubmonoidSpec, r: int) -> frozenset[GroupElem]:
    """Units of ``N`` inside ball(r); raises if they are not closed there."""
    g = spec.group
    if spec.oracle == POSITIVE_LETTERS:
        units = {g.identity()}
    elif spec.oracle == NONNEG:
        units = {g.elem((0,) * g.rank, s) for s in range(g.modulus or 1)}
    else:
        units = {x for x in spec.members(r) if spec.contains(x.inv())}
    units = {u for u in units if u.norm() <= r}
    for u in units:
        if u.inv() not in units:
            raise WindowError(f"unit group not closed within window: inverse of {u} missing; use a larger radius")
        for v in units:
            if u * v not in units:
                raise WindowError(f"unit group not closed within window: {u}*{v} missing; use a larger radius")
    return frozenset(units)


def _closure(spec: SubmonoidSpec, pairs, radius: int) -> dict[GroupElem, GroupElem]:
    """Union-find saturation of ``pairs`` under two-sided generator translation.

    Only elements of norm <= radius take part; all untouched elements are
    singleton classes.  Returns a flattened element -> root map.
    """
    parent: dict[GroupElem, GroupElem] = {}

    def find(x):
        root = x
        while parent.get(root, root) != root:
            root = parent[root]
        while x != root:
            parent[x], x = root, parent[x]
        return root

    def union(a, b) -> bool:
        ra, rb = find(a), find(b)
        if ra == rb:
            return False
        if rb < ra:
            ra, rb = rb, ra
        parent.setdefault(ra, ra)
        parent[rb] = ra
        return True

    queue = deque()
    for a, b in pairs:
        if a.norm() <= radius and b.norm() <= radius and union(a, b):
            queue.append((a, b))
    gens = spec.generators
    while queue:
        a, b = queue.popleft()
        for g in gens:
            for x, y in ((g * a, g * b), (a * g, b * g)):
                if x.norm() <= radius and y.norm() <= radius and union(x, y):
                    queue.append((x, y))
    return {x: find(x) for x in list(parent)}


def _restricted_blocks(roots: dict[GroupElem, GroupElem], r: int) -> frozenset[frozenset[GroupElem]]:
    groups: dict[GroupElem, set] = defaultdict(set)
    for x, root in roots.items():
        if x.norm() <= r:
            groups[root].add(x)
    return frozenset(frozenset(b) for b in groups.values() if len(b) > 1)


class Congruence:
    """The congruence generated by ``pairs``, saturated on ball(radius + margin).

    Only elements of the stable core ``N cap ball(radius)`` may be queried.
    ``stable`` is True iff raising the margin from ``margin - 1`` to ``margin``
    left the core partition unchanged.
    """

    def __init__(self, spec: SubmonoidSpec, pairs, radius: int, margin: int,
                 roots: dict[GroupElem, GroupElem], stable: bool):
        self.spec = spec
        self.pairs = tuple(pairs)
        self.radius = radius
        self.margin = margin
        self.stable = stable
        self._root = roots
        members = defaultdict(list)
        for x, root in roots.items():
            if x.norm() <= radius:
                members[root].append(x)
        self._members = {k: tuple(sorted(v, key=GroupElem.sort_key)) for k, v in members.items()}

    @property
    def is_trivial(self) -> bool:
        return not self._root

    def in_core(self, a: GroupElem) -> bool:
        return a.norm() <= self.radius and self.spec.contains(a)

    def _check_core(self, a: GroupElem) -> None:
        if not self.spec.contains(a):
            raise UsageError(f"{a} is not in the submonoid")
        if a.norm() > self.radius:
            raise WindowError(f"window too small: {a} lies outside the stable core of radius {self.radius}")

    def related(self, a: GroupElem, b: GroupElem) -> bool:
        self._check_core(a)
        self._check_core(b)
        return a == b or self._root.get(a, a) == self._root.get(b, b)

    def block(self, a: GroupElem) -> tuple[GroupElem, ...]:
        """The class of ``a`` restricted to the stable core."""
        self._check_core(a)
        root = self._root.get(a)
        return (a,) if root is None else self._members[root]

    def class_id(self, a: GroupElem) -> GroupElem:
        return self.block(a)[0]

    def blocks(self) -> list[tuple[GroupElem, ...]]:
        """Nontrivial classes on the stable core."""
        return sorted((b for b in self._members.values() if len(b) > 1), key=lambda b: b[0].sort_key())

    def classes(self, r: int | None = None) -> list[tuple[GroupElem, ...]]:
        """Full partition of ``N cap ball(r)`` (default: the core)."""
        r = self.radius if r is None else r
        if r > self.radius:
            raise WindowError(f"radius {r} exceeds the stable core {self.radius}")
        seen: dict[GroupElem, list] = {}
        for x in self.spec.members(r):
            seen.setdefault(self.class_id(x), []).append(x)
        return sorted((tuple(v) for v in seen.values()), key=lambda b: b[0].sort_key())

    def related_pairs(self) -> Iterable[tuple[GroupElem, GroupElem]]:
        """All unordered pairs a < b that are related inside the core."""
        for b in self.blocks():
            yield from itertools.combinations(b, 2)


def saturate_congruence(pairs, spec: SubmonoidSpec, r: int, m: int) -> Congruence:
    pairs = [(parse_elem(spec.group, a), parse_elem(spec.group, b)) for a, b in pairs]
    for a, b in pairs:
        for x in (a, b):
            if not spec.contains(x):
                raise UsageError(f"congruence pair member {x} is not in the submonoid")
    if m < 1:
        raise UsageError("margin must be >= 1")
    roots = _closure(spec, pairs, r + m)
    previous = _closure(spec, pairs, r + m - 1)
    stable = _restricted_blocks(roots, r) == _restricted_blocks(previous, r)
    return Congruence(spec, pairs, r, m, roots, stable)


def stabilizing_margin(pairs, spec: SubmonoidSpec, r: int, max_margin: int = 10) -> int | None:
    """Smallest margin at which saturation reports a stable core."""
    for m in range(1, max_margin + 1):
        if saturate_congruence(pairs, spec, r, m).stable:
            return m
    return None


class QuotientMonoid:
    """``M = N / ~`` with its (finite) unit group and related unit pairs."""

    def __init__(self, spec: SubmonoidSpec, congruence: Congruence, units: frozenset[GroupElem]):
        self.spec = spec
        self.congruence = congruence
        self.units = tuple(sorted(units, key=GroupElem.sort_key))
        self.unit_pairs = frozenset(
            (u, v) for u in self.units for v in self.units if congruence.related(u, v)
        )

    @classmethod
    def build(cls, spec: SubmonoidSpec, pairs=(), radius: int = 12, margin: int = 3,
              require_stable: bool = True) -> QuotientMonoid:
        cong = saturate_congruence(pairs, spec, radius, margin)
        if require_stable and not cong.stable:
            raise WindowError(f"congruence not stable at radius {radius}, margin {margin}")
        return cls(spec, cong, unit_group(spec, radius))

    @property
    def group(self) -> GroupDescriptor:
        return self.spec.group

    @property
    def radius(self) -> int:
        return self.congruence.radius

    def related(self, a: GroupElem, b: GroupElem) -> bool:
        return self.congruence.related(a, b)

    def class_id(self, a: GroupElem) -> GroupElem:
        return self.congruence.class_id(a)

    def is_unit(self, u: GroupElem) -> bool:
        return u in self.units

    def with_radius(self, radius: int, margin: int | None = None) -> QuotientMonoid:
        return QuotientMonoid.build(self.spec, self.congruence.pairs, radius,
                                    self.congruence.margin if margin is None else margin)


def related(M: QuotientMonoid, a: GroupElem, b: GroupElem) -> bool:
    return M.related(a, b)


def idempotent_classes(M: QuotientMonoid, radius: int | None = None) -> frozenset[GroupElem]:
    """Class ids ``c`` with ``c*c ~ c``, over classes meeting N cap ball(radius).

    ``radius`` defaults to half the core so that squares stay inside it.
    Classes whose square escapes the core are skipped with a WindowWarning.
    """
    if not M.congruence.stable:
        raise WindowError("idempotents need a stable congruence")
    radius = M.radius // 2 if radius is None else radius
    found = set()
    escaped = []
    for cid in {M.class_id(x) for x in M.spec.members(radius)}:
        sq = cid * cid
        if not M.congruence.in_core(sq):
            escaped.append(cid)
        elif M.related(sq, cid):
            found.add(cid)
    if escaped:
        warnings.warn(f"partial result: squares of {len(escaped)} classes escape the window", WindowWarning)
    return frozenset(found)


class MSet:
    """A finite set with a left action of ``N``, given on the generators.

    Elements are strings.  General elements act through the generator word
    from ``SubmonoidSpec.decompose``; ``(g1 g2) . s = g1 . (g2 . s)``.
    """

    def __init__(self, spec: SubmonoidSpec, elements: Iterable[Hashable],
                 action: dict[GroupElem, dict], additive: bool = False, name: str = ""):
        self.spec = spec
        self.elements = tuple(str(s) for s in elements)
        if len(set(self.elements)) != len(self.elements):
            raise ConfigurationError("duplicate M-set elements")
        self.additive = additive
        self.name = name
        table = {}
        for g in spec.generators:
            if g not in action:
                raise ConfigurationError(f"no action given for generator {g}")
            row = {str(k): str(v) for k, v in action[g].items()}
            for s in self.elements:
                if row.get(s) not in self.elements:
                    raise ConfigurationError(f"action of {g} on {s!r} is missing or leaves the set")
            table[g] = row
        self._rows = [table[g] for g in spec.generators]
        self._cache: dict[GroupElem, tuple[int, ...]] = {}

    @classmethod
    def from_function(cls, spec: SubmonoidSpec, elements, fn: Callable, **kw) -> MSet:
        """Build the table from ``fn(generator, element) -> element``."""
        elements = list(elements)
        action = {g: {str(s): str(fn(g, s)) for s in elements} for g in spec.generators}
        return cls(spec, elements, action, **kw)

    @property
    def action(self) -> dict[GroupElem, dict[str, str]]:
        return {g: dict(row) for g, row in zip(self.spec.generators, self._rows)}

    def act_word(self, word: Iterable[int], s: str) -> str:
        for i in reversed(tuple(word)):
            s = self._rows[i][s]
        return s

    def act(self, n: GroupElem, s: str) -> str:
        word = self._cache.get(n)
        if word is None:
            word = self._cache[n] = self.spec.decompose(n)
        return self.act_word(word, s)

    def same_table(self, other: MSet) -> bool:
        return self.elements == other.elements and self.action == other.action

    def to_dict(self) -> dict:
        return {
            "elements": list(self.elements),
            "action": {format_elem(g): dict(row) for g, row in zip(self.spec.generators, self._rows)},
        }

    @classmethod
    def from_dict(cls, data: dict, spec: SubmonoidSpec) -> MSet:
        action = {parse_elem(spec.group, k): v for k, v in data["action"].items()}
        return cls(spec, data["elements"], action, additive=data.get("additive", False),
                   name=data.get("name", ""))

    @classmethod
    def load(cls, path, spec: SubmonoidSpec) -> MSet:
        return cls.from_dict(json.loads(Path(path).read_text()), spec)

    def __repr__(self):
        return f"MSet({self.name or '?'}, {len(self.elements)} elements)"


@dataclass
class MSetReport:
    """``nset_violations`` are (word, word, s) where two words for the same
    element of N act differently; ``violations`` are (a, b, s) with a ~ b but
    a.s != b.s."""

    nset_violations: list = field(default_factory=list)
    violations: list = field(default_factory=list)
    pairs_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.nset_violations and not self.violations

    def __bool__(self):
        return self.ok


def check_nset(S: MSet, depth: int = 4) -> list:
    """Words of length <= depth that evaluate equally must act equally."""
    spec = S.spec
    by_elem: dict[GroupElem, tuple[int, ...]] = {}
    bad = []
    for n in range(depth + 1):
        for w in itertools.product(range(len(spec.generators)), repeat=n):
            x = spec.evaluate(w)
            first = by_elem.setdefault(x, w)
            if first is w:
                continue
            for s in S.elements:
                if S.act_word(first, s) != S.act_word(w, s):
                    bad.append((first, w, s))
                    break
    return bad


def validate_mset(M: QuotientMonoid, S: MSet, word_depth: int = 4, pair_cap: int = 20000,
                  seed: int = 0) -> MSetReport:
    """Check that the N-set ``S`` factors through ``N / ~``.

    Every related pair of the stable core is checked unless there are more
    than ``pair_cap``, in which case a seeded sample is used.
    """
    if S.spec != M.spec:
        raise UsageError("M-set and quotient monoid use different submonoids")
    report = MSetReport(nset_violations=check_nset(S, word_depth))
    pairs = list(M.congruence.related_pairs())
    if len(pairs) > pair_cap:
        pairs = random.Random(seed).sample(pairs, pair_cap)
    report.pairs_checked = len(pairs)
    for a, b in pairs:
        for s in S.elements:
            if S.act(a, s) != S.act(b, s):
                report.violations.append((a, b, s))
    return report


def load_monoid_spec(source) -> tuple[SubmonoidSpec, list[tuple[GroupElem, GroupElem]]]:
    """Read the monoid spec-file format (a dict, a JSON path or JSON text)."""
    if isinstance(source, dict):
        data = source
    else:
        p = Path(source)
        data = json.loads(p.read_text() if p.exists() else source)
    try:
        group = GroupDescriptor.parse(data["group"])
        sub = data["submonoid"]
    except KeyError as exc:
        raise UsageError(f"monoid spec is missing {exc}") from None
    gens = tuple(parse_elem(group, g) for g in data.get("generators", ()))
    if isinstance(sub, dict):
        if "generated" not in sub:
            raise UsageError(f"unknown submonoid {sub!r}")
        gens = gens or tuple(parse_elem(group, g) for g in sub["generated"])
        spec = SubmonoidSpec(group, GENERATED, gens, int(sub.get("depth", 6)))
    else:
        spec = SubmonoidSpec(group, sub, gens)
    pairs = [(parse_elem(group, a), parse_elem(group, b)) for a, b in data.get("congruence_pairs", ())]
    return spec, pairs


def dump_monoid_spec(spec: SubmonoidSpec, pairs=()) -> dict:
    if spec.oracle == GENERATED:
        sub = {"generated": [format_elem(g) for g in spec.generators], "depth": spec.depth}
    else:
        sub = spec.oracle
    return {
        "group": str(spec.group),
        "submonoid": sub,
        "generators": [format_elem(g) for g in spec.generators],
        "congruence_pairs": [[format_elem(a), format_elem(b)] for a, b in pairs],
    }

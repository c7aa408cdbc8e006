"""Finite windows of Alexandrov spaces.

A ``WindowPoset`` is a finite partial order; in the Alexandrov topology its
open sets are the up-closed subsets and ``{up_set(x)}`` is the smallest basis.
Nodes may be any hashable values.
"""
from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable

from .ambient_group import GroupElem
from .errors import UsageError


def node_key(x) -> tuple:
    """Deterministic sort key for heterogeneous node ids."""
    if isinstance(x, GroupElem):
        return (0, x.sort_key())
    if isinstance(x, tuple):
        return (1, tuple(node_key(y) for y in x))
    if isinstance(x, (int, float)) and not isinstance(x, bool):
        return (2, x)
    return (3, str(x))


@dataclass(frozen=True)
class Check:
    """Verdict plus an optional witness; truthy iff ``ok``."""

    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


class WindowPoset:
    def __init__(self, elements: Iterable[Hashable], leq: Iterable[tuple], interior=None,
                 labels: dict | None = None, check: bool = True):
        self.elements = tuple(sorted(set(elements), key=node_key))
        elems = set(self.elements)
        up: dict = {x: {x} for x in self.elements}
        for a, b in leq:
            if a not in elems or b not in elems:
                raise UsageError(f"order pair ({a}, {b}) mentions a node outside the poset")
            up[a].add(b)
        self._up = {x: frozenset(v) for x, v in up.items()}
        self.interior = frozenset(self.elements if interior is None else interior)
        if not self.interior <= elems:
            raise UsageError("interior nodes must belong to the poset")
        self.labels = dict(labels or {})
        if check:
            self._check_order()

    @classmethod
    def from_function(cls, elements, leq_fn: Callable[[object, object], bool], **kw) -> WindowPoset:
        elements = list(elements)
        pairs = [(a, b) for a in elements for b in elements if leq_fn(a, b)]
        return cls(elements, pairs, **kw)

    def _check_order(self) -> None:
        for a in self.elements:
            for b in self._up[a]:
                if b != a and a in self._up[b]:
                    raise UsageError(f"not antisymmetric: {a} and {b}")
                if not self._up[b] <= self._up[a]:
                    raise UsageError(f"not transitive at {a} <= {b}")

    def __contains__(self, x) -> bool:
        return x in self._up

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def leq(self, a, b) -> bool:
        return b in self._up[a]

    def lt(self, a, b) -> bool:
        return a != b and b in self._up[a]

    def up_set(self, x) -> frozenset:
        return self._up[x]

    def up_near(self, x) -> frozenset:
        return self._up[x]

    def is_interior(self, x) -> bool:
        return x in self.interior

    def sample_interior(self, k: int, rng) -> list:
        pool = sorted(self.interior, key=node_key)
        return pool if len(pool) <= k else sorted(rng.sample(pool, k), key=node_key)

    def down_set(self, x) -> frozenset:
        return frozenset(y for y in self.elements if x in self._up[y])

    def pairs(self) -> list[tuple]:
        return [(a, b) for a in self.elements for b in sorted(self._up[a], key=node_key)]

    def covers(self) -> list[tuple]:
        """Pairs ``a < b`` with nothing strictly between them."""
        out = []
        for a in self.elements:
            above = self._up[a] - {a}
            for b in above:
                if not any(b in self._up[c] for c in above if c != b):
                    out.append((a, b))
        return sorted(out, key=lambda p: (node_key(p[0]), node_key(p[1])))

    def is_up_closed(self, subset) -> bool:
        subset = set(subset)
        return all(self._up[x] <= subset for x in subset)

    def is_down_closed(self, subset) -> bool:
        subset = set(subset)
        return all(y in subset for x in subset for y in self.down_set(x))

    def restrict(self, nodes) -> WindowPoset:
        nodes = set(nodes)
        return WindowPoset(nodes, [(a, b) for a in nodes for b in self._up[a] if b in nodes],
                           interior=self.interior & nodes,
                           labels={k: v for k, v in self.labels.items() if k in nodes}, check=False)

    def to_dict(self, name: Callable = str) -> dict:
        return {
            "nodes": [name(x) for x in self.elements],
            "leq": [[name(a), name(b)] for a, b in self.pairs() if a != b],
            "interior": [name(x) for x in self.elements if x in self.interior],
        }

    @classmethod
    def from_dict(cls, data: dict) -> WindowPoset:
        return cls(data["nodes"], [tuple(p) for p in data.get("leq", ())], interior=data.get("interior"))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    def __repr__(self):
        return f"WindowPoset({len(self.elements)} nodes)"


def chain(n: int) -> WindowPoset:
    return WindowPoset(range(n), [(i, j) for i in range(n) for j in range(i, n)])


def antichain(names) -> WindowPoset:
    return WindowPoset(names, [])


def up_set(P: WindowPoset, x) -> frozenset:
    return P.up_set(x)


def is_minimal_basis(P: WindowPoset, family) -> Check:
    """Is ``family`` a basis of the Alexandrov topology with no member a union of smaller members?

    The witness is ``(U, members strictly inside U whose union is U)`` or,
    when the family is not a basis, ``(up_set(x), None)`` for an uncovered x.
    Duplicate members are harmless.  A member that is not up-closed is a
    usage error.
    """
    members = {frozenset(U) for U in family}
    for U in members:
        if not U <= set(P.elements):
            raise UsageError(f"family member {sorted(U, key=node_key)} leaves the poset")
        if not P.is_up_closed(U):
            raise UsageError(f"family member {sorted(U, key=node_key)} is not open (not up-closed)")
    for U in sorted(members, key=lambda s: (len(s), sorted(map(node_key, s)))):
        smaller = [V for V in members if V < U]
        if smaller and frozenset().union(*smaller) == U:
            smaller.sort(key=lambda s: (len(s), sorted(map(node_key, s))))
            return Check(False, (U, smaller))
    for x in P.elements:
        if P.up_set(x) not in members:
            return Check(False, (P.up_set(x), None))
    return Check(True)


class MonotoneMap:
    def __init__(self, source: WindowPoset, target: WindowPoset, mapping, check: bool = True):
        self.source = source
        self.target = target
        self.mapping = dict(mapping)
        if check:
            for x in source.elements:
                if self.mapping.get(x) not in target:
                    raise UsageError(f"{x} is not mapped into the target")
            for a, b in source.pairs():
                if not target.leq(self.mapping[a], self.mapping[b]):
                    raise UsageError(f"map is not monotone on {a} <= {b}")

    def __call__(self, x):
        return self.mapping[x]

    def then(self, other: MonotoneMap) -> MonotoneMap:
        return MonotoneMap(self.source, other.target, {x: other(self(x)) for x in self.source.elements})


def restricts_to_iso(f: MonotoneMap, q) -> bool:
    """Does ``f`` map up_set(q) isomorphically onto up_set(f(q))?"""
    src = f.source.up_set(q)
    img = {f(x) for x in src}
    if len(img) != len(src) or img != f.target.up_set(f(q)):
        return False
    return all(f.target.leq(f(a), f(b)) == f.source.leq(a, b) for a in src for b in src)


def is_etale(f: MonotoneMap, nodes=None) -> Check:
    """Check the étale condition at every interior source node (or at ``nodes``)."""
    nodes = f.source.interior if nodes is None else nodes
    for q in sorted(nodes, key=node_key):
        if not restricts_to_iso(f, q):
            return Check(False, q)
    return Check(True)


def irreducible_closed_sets(P: WindowPoset) -> list[frozenset]:
    """Nonempty down-closed directed subsets; for finite P exactly the ``down_set(x)``."""
    return [P.down_set(x) for x in P.elements]


def irreducible_closed_sets_brute(P: WindowPoset) -> list[frozenset]:
    """Exhaustive subset enumeration, exponential; used as an oracle."""
    out = []
    elems = P.elements
    for n in range(1, len(elems) + 1):
        for sub in itertools.combinations(elems, n):
            s = frozenset(sub)
            if not P.is_down_closed(s):
                continue
            if all(any(P.leq(a, w) and P.leq(b, w) for w in s) for a in s for b in s):
                out.append(s)
    return out


def random_poset(n: int, rng, p: float = 0.3) -> WindowPoset:
    """Random partial order: transitive closure of a random DAG on range(n)."""
    up = {i: {i} for i in range(n)}
    for i in reversed(range(n)):
        for j in range(i + 1, n):
            if rng.random() < p:
                up[i] |= up[j]
    return WindowPoset(range(n), [(i, j) for i in range(n) for j in up[i]])

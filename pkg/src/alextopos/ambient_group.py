"""Ambient groups: free groups, Z^n and Z^n x Z/m.

Elements are immutable and always stored in canonical form, so ``==`` and
``hash`` are the group's equality.  Free-group words are tuples of nonzero
ints: ``i`` stands for ``x_i`` and ``-i`` for its inverse.
"""
from __future__ import annotations

import itertools
import random
import re
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import ResourceError, UsageError

DEFAULT_CAP = 10**6

FREE = "free"
INT = "int"
INT_CYCLIC = "int_cyclic"


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str
    rank: int
    modulus: int = 0

    def __post_init__(self):
        if self.kind not in (FREE, INT, INT_CYCLIC):
            raise UsageError(f"unknown group kind {self.kind!r}")
        if self.rank < 1:
            raise UsageError("group rank must be >= 1")
        if self.kind == INT_CYCLIC and self.modulus < 2:
            raise UsageError("cyclic factor needs modulus >= 2")
        if self.kind != INT_CYCLIC and self.modulus:
            raise UsageError("only int_cyclic groups carry a modulus")

    @classmethod
    def free(cls, k: int) -> GroupDescriptor:
        return cls(FREE, k)

    @classmethod
    def int_vector(cls, n: int) -> GroupDescriptor:
        return cls(INT, n)

    @classmethod
    def int_vector_times_cyclic(cls, n: int, m: int) -> GroupDescriptor:
        return cls(INT_CYCLIC, n, m)

    @classmethod
    def parse(cls, text: str) -> GroupDescriptor:
        """Parse ``free:2``, ``int:1`` or ``int:1xZ2``."""
        m = re.fullmatch(r"\s*(free|int):(\d+)(?:xZ(\d+))?\s*", text)
        if not m:
            raise UsageError(f"bad group descriptor {text!r}")
        kind, n, mod = m.group(1), int(m.group(2)), m.group(3)
        if kind == "free":
            if mod:
                raise UsageError(f"bad group descriptor {text!r}")
            return cls.free(n)
        if mod:
            return cls.int_vector_times_cyclic(n, int(mod))
        return cls.int_vector(n)

    def __str__(self):
        if self.kind == FREE:
            return f"free:{self.rank}"
        if self.kind == INT:
            return f"int:{self.rank}"
        return f"int:{self.rank}xZ{self.modulus}"

    @property
    def is_free(self) -> bool:
        return self.kind == FREE

    def identity(self) -> GroupElem:
        if self.is_free:
            return GroupElem(self, ())
        return GroupElem(self, (0,) * self.rank, 0)

    def generators(self) -> list[GroupElem]:
        """Standard generators: letters, unit vectors, then the cyclic generator."""
        if self.is_free:
            return [GroupElem(self, (i,)) for i in range(1, self.rank + 1)]
        gens = []
        for i in range(self.rank):
            v = [0] * self.rank
            v[i] = 1
            gens.append(GroupElem(self, tuple(v), 0))
        if self.kind == INT_CYCLIC:
            gens.append(GroupElem(self, (0,) * self.rank, 1))
        return gens

    def elem(self, data, residue: int = 0) -> GroupElem:
        """Build an element, reducing the payload into canonical form."""
        if self.is_free:
            if residue:
                raise UsageError("free group elements have no residue")
            letters = tuple(data)
            for a in letters:
                if a == 0 or abs(a) > self.rank:
                    raise UsageError(f"letter {a} outside free:{self.rank}")
            return GroupElem(self, free_reduce(letters))
        if isinstance(data, int):
            data = (data,)
        data = tuple(int(x) for x in data)
        if len(data) != self.rank:
            raise UsageError(f"expected {self.rank} coordinates, got {len(data)}")
        if self.kind == INT_CYCLIC:
            residue %= self.modulus
        elif residue:
            raise UsageError(f"{self} has no cyclic factor")
        return GroupElem(self, data, residue)


def free_reduce(letters: Iterable[int]) -> tuple[int, ...]:
    out: list[int] = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def is_reduced(letters: Iterable[int]) -> bool:
    letters = tuple(letters)
    return all(a != -b for a, b in zip(letters, letters[1:]))


@dataclass(frozen=True, eq=False)
class GroupElem:
    group: GroupDescriptor
    data: tuple[int, ...]
    residue: int = 0

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, GroupElem):
            return NotImplemented
        return (self.data == other.data and self.residue == other.residue
                and (self.group is other.group or self.group == other.group))

    def __hash__(self):
        h = self.__dict__.get("_hash")
        if h is None:
            h = hash((self.data, self.residue))
            object.__setattr__(self, "_hash", h)
        return h

    def __mul__(self, other: GroupElem) -> GroupElem:
        return compose(self, other)

    def inv(self) -> GroupElem:
        return inverse(self)

    def __pow__(self, n: int) -> GroupElem:
        base = self if n >= 0 else self.inv()
        out = self.group.identity()
        for _ in range(abs(n)):
            out = out * base
        return out

    def norm(self) -> int:
        """Word length (free case) or max-norm of the integer part."""
        if self.group.is_free:
            return len(self.data)
        return max((abs(x) for x in self.data), default=0)

    def is_identity(self) -> bool:
        return not any(self.data) and not self.residue

    def sort_key(self) -> tuple:
        key = self.__dict__.get("_key")
        if key is None:
            if self.group.kind == FREE:
                key = (len(self.data), tuple(2 * a - 2 if a > 0 else -2 * a - 1 for a in self.data))
            else:
                key = (self.data, self.residue)
            # elements are immutable, so the key can be memoized on the instance
            object.__setattr__(self, "_key", key)
        return key

    def __lt__(self, other: GroupElem) -> bool:
        return self.sort_key() < other.sort_key()

    def __str__(self):
        return format_elem(self)

    def __repr__(self):
        return f"GroupElem({format_elem(self)!r})"


def _letter_key(a: int) -> int:
    # x1 < x1^-1 < x2 < x2^-1 < ...
    return 2 * (abs(a) - 1) + (a < 0)


def _check_same(a: GroupElem, b: GroupElem) -> None:
    if a.group is not b.group and a.group != b.group:
        raise UsageError(f"cannot combine elements of {a.group} and {b.group}")


def _raw(g: GroupDescriptor, data: tuple, residue: int = 0) -> GroupElem:
    # skips the frozen-dataclass __init__; callers pass canonical data
    e = object.__new__(GroupElem)
    d = e.__dict__
    d["group"], d["data"], d["residue"] = g, data, residue
    return e


def compose(a: GroupElem, b: GroupElem) -> GroupElem:
    _check_same(a, b)
    g = a.group
    x, y = a.data, b.data
    if g.kind == FREE:
        # only the seam between a and b can cancel
        k = 0
        n = min(len(x), len(y))
        while k < n and x[-1 - k] == -y[k]:
            k += 1
        return _raw(g, x[: len(x) - k] + y[k:] if k else x + y)
    if len(x) == 1:
        data = (x[0] + y[0],)
    else:
        data = tuple(p + q for p, q in zip(x, y))
    m = g.modulus
    return _raw(g, data, (a.residue + b.residue) % m if m else 0)


def inverse(a: GroupElem) -> GroupElem:
    g = a.group
    if g.kind == FREE:
        return _raw(g, tuple(-x for x in reversed(a.data)))
    m = g.modulus
    return _raw(g, tuple(-x for x in a.data), (-a.residue) % m if m else 0)


def ball_size(group: GroupDescriptor, r: int) -> int:
    if r < 0:
        return 0
    if group.is_free:
        k = group.rank
        return 1 + sum(2 * k * (2 * k - 1) ** (length - 1) for length in range(1, r + 1))
    return (2 * r + 1) ** group.rank * (group.modulus or 1)


def sphere_size(group: GroupDescriptor, length: int) -> int:
    if group.is_free:
        k = group.rank
        return 1 if length == 0 else 2 * k * (2 * k - 1) ** (length - 1)
    return ball_size(group, length) - ball_size(group, length - 1)


def _check_cap(group: GroupDescriptor, r: int, cap: int) -> None:
    size = ball_size(group, r)
    if size > cap:
        raise ResourceError(f"ball of radius {r} in {group} has {size} elements, over the cap of {cap}")


def iter_reduced_words(k: int, length: int) -> Iterator[tuple[int, ...]]:
    letters = sorted([i for i in range(1, k + 1)] + [-i for i in range(1, k + 1)], key=_letter_key)
    if length == 0:
        yield ()
        return
    for w in iter_reduced_words(k, length - 1):
        for a in letters:
            if not w or w[-1] != -a:
                yield w + (a,)


def ball(group: GroupDescriptor, r: int, cap: int = DEFAULT_CAP) -> list[GroupElem]:
    """All elements of norm <= r, sorted by the canonical order."""
    if r < 0:
        raise UsageError("radius must be >= 0")
    _check_cap(group, r, cap)
    if group.is_free:
        # each length comes out lexicographically, so this is already shortlex
        return [GroupElem(group, w) for n in range(r + 1) for w in iter_reduced_words(group.rank, n)]
    coords = itertools.product(range(-r, r + 1), repeat=group.rank)
    residues = range(group.modulus) if group.modulus else (0,)
    return [GroupElem(group, c, s) for c in coords for s in residues]


def sample_ball(group: GroupDescriptor, r: int, k: int, rng: random.Random) -> list[GroupElem]:
    """Uniform sample of ``k`` distinct ball elements, or the whole ball if it is small."""
    size = ball_size(group, r)
    if size <= k:
        return ball(group, r)
    seen: set[GroupElem] = set()
    weights = [sphere_size(group, n) for n in range(r + 1)]
    while len(seen) < k:
        if group.is_free:
            n = rng.choices(range(r + 1), weights=weights)[0]
            seen.add(GroupElem(group, _random_reduced(group.rank, n, rng)))
        else:
            c = tuple(rng.randint(-r, r) for _ in range(group.rank))
            s = rng.randrange(group.modulus) if group.modulus else 0
            seen.add(GroupElem(group, c, s))
    return sorted(seen, key=GroupElem.sort_key)


def _random_reduced(k: int, n: int, rng: random.Random) -> tuple[int, ...]:
    w: list[int] = []
    for _ in range(n):
        while True:
            a = rng.choice((1, -1)) * rng.randint(1, k)
            if not w or w[-1] != -a:
                break
        w.append(a)
    return tuple(w)


_TOKEN = re.compile(r"x(\d+)(?:\^(-?\d+))?")


def parse_elem(group: GroupDescriptor, text) -> GroupElem:
    """Parse the textual element syntax.

    Free words look like ``x1*x2^-1*x1`` with ``e`` for the identity.
    Vectors look like ``(3,-1)``, with ``;r`` appended for the cyclic residue.
    Rank-one integer groups also accept a bare integer.
    """
    if isinstance(text, GroupElem):
        _check_same(text, group.identity())
        return text
    if isinstance(text, int) and not isinstance(text, bool):
        if group.is_free or group.rank != 1:
            raise UsageError(f"bare integer {text} is not an element of {group}")
        return group.elem((text,))
    if not isinstance(text, str):
        raise UsageError(f"cannot parse {text!r} as an element of {group}")
    s = text.replace(" ", "")
    if group.is_free:
        if s in ("e", "1", ""):
            return group.identity()
        letters: list[int] = []
        for tok in s.split("*"):
            m = _TOKEN.fullmatch(tok)
            if not m:
                raise UsageError(f"bad free-group token {tok!r} in {text!r}")
            i, p = int(m.group(1)), int(m.group(2) or 1)
            letters.extend([i if p > 0 else -i] * abs(p))
        return group.elem(letters)
    m = re.fullmatch(r"\(?(-?\d+(?:,-?\d+)*)\)?(?:;(-?\d+))?", s)
    if not m:
        raise UsageError(f"bad vector syntax {text!r}")
    coords = tuple(int(x) for x in m.group(1).split(","))
    if m.group(2) is not None and group.kind != INT_CYCLIC:
        raise UsageError(f"{group} has no cyclic factor: {text!r}")
    return group.elem(coords, int(m.group(2) or 0))


def format_elem(g: GroupElem) -> str:
    if g.group.is_free:
        if not g.data:
            return "e"
        return "*".join(f"x{a}" if a > 0 else f"x{-a}^-1" for a in g.data)
    body = "(" + ",".join(str(x) for x in g.data) + ")"
    if g.group.kind == INT_CYCLIC:
        body += f";{g.residue}"
    return body

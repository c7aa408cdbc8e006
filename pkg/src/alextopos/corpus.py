"""Access to the shipped example monoids, M-sets and golden files."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

from .errors import UsageError
from .monoid_core import MSet, QuotientMonoid, SubmonoidSpec, load_monoid_spec

CORPUS = resources.files("alextopos") / "corpus"


def corpus_file(name: str):
    """A corpus resource by file name (``nat.json``, ``golden/fig_mod2.dot``)."""
    p = CORPUS / name
    if not p.is_file():
        raise UsageError(f"no corpus file named {name!r}")
    return p


def resolve(path) -> Path | object:
    """A real path if it exists, otherwise the corpus file of that name."""
    p = Path(path)
    if p.exists():
        return p
    return corpus_file(str(path))


def read_text(path) -> str:
    return resolve(path).read_text()


def load_spec(path) -> tuple[SubmonoidSpec, list]:
    return load_monoid_spec(json.loads(read_text(path)))


def load_monoid(path, radius: int = 12, margin: int = 3, require_stable: bool = True) -> QuotientMonoid:
    spec, pairs = load_spec(path)
    return QuotientMonoid.build(spec, pairs, radius=radius, margin=margin, require_stable=require_stable)


def load_mset(path, spec: SubmonoidSpec) -> MSet:
    data = json.loads(read_text(path))
    data.setdefault("name", Path(str(path)).stem)
    return MSet.from_dict(data, spec)


def index() -> dict:
    return json.loads(corpus_file("index.json").read_text())


def cases() -> list[dict]:
    return index()["cases"]

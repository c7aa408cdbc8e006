"""Command line entry point: ``alextopos <command> ...``.

Exit status: 0 success, 1 a verification failed, 2 usage or input error,
3 the window was too small or a congruence did not stabilize.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
from dataclasses import dataclass
from pathlib import Path

from . import corpus
from .alex_groupoid import (
    build_groupoid,
    groupoid_axiom_check,
    induced_action,
    pattern_grid,
    trivial_congruence_iso,
)
from .ambient_group import format_elem
from .converse import build_coset_poset, classify_points_free_monoid, integer_window, mset_to_etale, points_finite
from .equivariant import FiniteGroup, GroupActionOnPoset
from .errors import AlexToposError, ResourceError, UsageError, WindowError
from .monoid_core import idempotent_classes, validate_mset
from .poset_core import WindowPoset
from .render import RenderConfig, render_grid, render_hasse
from .verify import Settings, run_checks

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_WINDOW = 0, 1, 2, 3


@dataclass
class RunConfig:
    command: str
    radius: int | None
    depth: int
    margin: int
    seed: int
    out: str | None

    def validate(self) -> None:
        if self.depth < 1:
            raise UsageError("--depth must be >= 1")
        if self.radius is not None and self.radius < self.depth:
            raise UsageError("--radius must be >= --depth")
        if self.margin < 1:
            raise UsageError("--margin must be >= 1")


def parse_window(text: str) -> tuple[int, int]:
    try:
        lo, hi = (int(x) for x in text.split(".."))
    except ValueError:
        raise UsageError(f"bad window {text!r}; expected A..B") from None
    if lo > hi:
        raise UsageError(f"empty window {text!r}")
    return lo, hi


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _monoid(args, radius: int | None = None):
    r = radius if radius is not None else (args.radius or 12)
    return corpus.load_monoid(args.monoid, radius=r, margin=args.margin)


def _window_kw(args, M) -> dict:
    if args.window:
        lo, hi = parse_window(args.window)
        return {"window": integer_window(M.spec, lo, hi)}
    return {"r": args.radius or 6}


def cmd_monoid_info(args) -> int:
    M = _monoid(args)
    C = M.congruence
    info = {
        "group": str(M.group),
        "submonoid": M.spec.oracle,
        "generators": [format_elem(g) for g in M.spec.generators],
        "radius": C.radius,
        "margin": C.margin,
        "stable": C.stable,
        "units": [format_elem(u) for u in M.units],
        "idempotents": sorted((format_elem(c) for c in idempotent_classes(M)), key=str),
        "classes": [[format_elem(x) for x in b] for b in C.blocks()],
    }
    if args.format == "json":
        _emit(args, json.dumps(info, indent=1) + "\n")
    else:
        lines = [f"{k}: {v}" for k, v in info.items()]
        _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_coset_poset(args) -> int:
    M = _monoid(args)
    kw = _window_kw(args, M)
    P = build_coset_poset(M, kw.get("r"), kw.get("window"), depth=args.depth)
    W = P.window
    if args.format == "json":
        _emit(args, json.dumps(W.to_dict(name=format_elem), indent=1) + "\n")
    else:
        fmt = args.format if args.format in ("dot", "ascii") else "dot"
        _emit(args, render_hasse(W, RenderConfig(format=fmt, name="P")))
    return EXIT_OK


def _etale(args):
    if not args.mset:
        raise UsageError("--mset is required")
    M = _monoid(args)
    S = corpus.load_mset(args.mset, M.spec)
    kw = _window_kw(args, M)
    return mset_to_etale(M, S, kw.get("r"), kw.get("window"), depth=args.depth)


def cmd_etale(args) -> int:
    E = _etale(args)
    fmt = args.format or ("json" if args.action == "build" else "dot")
    if fmt == "json":
        rng = random.Random(args.seed)
        nodes = sorted(E.total.interior, key=lambda x: (x[0].sort_key(), x[1]))
        gens = list(E.coset.spec.generators) + [g.inv() for g in E.coset.spec.generators]
        samples = [(x, g) for x in rng.sample(nodes, min(len(nodes), 8)) for g in gens] if nodes else []
        _emit(args, json.dumps(E.to_dict(samples), indent=1) + "\n")
    else:
        _emit(args, render_hasse(E.total, RenderConfig(format=fmt, label=args.label, name="E")))
    return EXIT_OK


def _report_lines(rep, module: str) -> tuple[str, bool]:
    failed = {}
    for check, witness in rep.failures:
        failed.setdefault(check, witness)
    lines = []
    for check in sorted(set(rep.counts) | set(failed)):
        if check in failed:
            lines.append(f"FAIL check={check} module={module} witness={failed[check]}")
        else:
            lines.append(f"PASS check={check} module={module} witness=-")
    return "\n".join(lines) + "\n", rep.ok


def cmd_groupoid(args) -> int:
    if args.action == "pattern":
        M = _monoid(args, radius=args.radius if args.radius is not None else max(12, args.size))
        _emit(args, render_grid(pattern_grid(M, args.size)) + "\n")
        return EXIT_OK
    r = args.radius or 8
    M = _monoid(args, radius=2 * r)
    G = build_groupoid(M, r, args.depth)
    if args.action == "build":
        rng = random.Random(args.seed)
        objs = G.sample_objects(50, rng)
        arrows = G.sample_arrows(50, rng)
        data = {
            "group": str(G.group),
            "radius": r,
            "depth": args.depth,
            "units": [format_elem(u) for u in M.units],
            "objects": [{"node": format_elem(x), "interior": G.is_interior0(x)} for x in objs],
            "arrows": [{"node": [format_elem(f[0]), format_elem(f[1])], "s": format_elem(G.s(f)),
                        "t": format_elem(G.t(f)), "iota": [format_elem(y) for y in G.iota(f)],
                        "interior": G.is_interior1(f),
                        "above": [[format_elem(y) for y in g] for g in G.up_arrows(f)]} for f in arrows],
        }
        _emit(args, json.dumps(data, indent=1) + "\n")
        return EXIT_OK
    if args.action == "check":
        text, ok = _report_lines(groupoid_axiom_check(G, budget=args.budget, seed=args.seed), "alex_groupoid")
    elif args.action == "iso":
        text, ok = _report_lines(trivial_congruence_iso(G, budget=args.budget, seed=args.seed), "alex_groupoid")
    else:  # induced
        if not args.mset:
            raise UsageError("--mset is required")
        S = corpus.load_mset(args.mset, M.spec)
        rep = induced_action(G, S, budget=args.budget, seed=args.seed)
        valid = validate_mset(M, S).ok
        agree = rep.monotone == valid
        text = (f"{'PASS' if agree else 'FAIL'} check=verdict-agreement module=alex_groupoid "
                f"witness=monotone={rep.monotone},valid={valid}\n")
        if rep.witness is not None:
            text += f"# non-monotone witness: {rep.witness}\n"
        ok = agree
    _emit(args, text)
    return EXIT_OK if ok else EXIT_FAIL


def _parse_perm(text: str, nodes: list) -> tuple:
    images = [x.strip() for x in text.split(",")]
    if sorted(images) != sorted(nodes):
        raise UsageError(f"permutation {text!r} is not a permutation of the nodes")
    index = {x: k for k, x in enumerate(nodes)}
    return tuple(index[x] for x in images)


def _letters(text: str | None):
    """Letters of a word as written (not reduced), so bad probes can be reported."""
    if text is None:
        return None
    text = text.replace(" ", "")
    if text in ("", "e"):
        return ()
    letters = []
    for tok in text.split("*"):
        base, _, power = tok.partition("^")
        if not base.startswith("x") or not base[1:].isdigit():
            raise UsageError(f"bad letter {tok!r}")
        i, p = int(base[1:]), int(power or 1)
        letters.extend([i if p > 0 else -i] * abs(p))
    return tuple(letters)


def cmd_points(args) -> int:
    if args.kind == "free":
        cls = classify_points_free_monoid(args.k, _letters(args.prefix) or (), _letters(args.period))
        _emit(args, f"{cls}\n")
        return EXIT_OK
    if not args.poset:
        raise UsageError("points finite needs --poset")
    P = WindowPoset.from_dict(json.loads(corpus.read_text(args.poset)))
    nodes = [str(x) for x in P.elements]
    perms = [_parse_perm(p, nodes) for p in args.perm or []]
    n = len(nodes)
    ident = tuple(range(n))
    grp = FiniteGroup.generated_by(perms or [ident], lambda a, b: tuple(b[i] for i in a), ident)
    A = GroupActionOnPoset(P, grp, lambda x, p: P.elements[p[P.elements.index(x)]])
    reps = points_finite(P, A)
    lines = [f"points: {len(reps)}"] + ["{" + ",".join(map(str, sorted(C, key=str))) + "}" for C in reps]
    _emit(args, "\n".join(lines) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    selected = None if args.all or not args.check else set(args.check)
    cfg = Settings(radius=args.radius or 8, depth=args.depth, seed=args.seed, budget=args.budget)
    results = run_checks(selected, cfg)
    if not results:
        raise UsageError("no checks selected")
    _emit(args, "".join(r.line() + "\n" for r in results))
    return EXIT_OK if all(r.ok for r in results) else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--radius", type=int, default=None, help="window radius r")
    common.add_argument("--window", default=None, help="integer window A..B (rank-one groups)")
    common.add_argument("--depth", type=int, default=1, help="interior depth d")
    common.add_argument("--margin", type=int, default=3, help="congruence saturation margin m")
    common.add_argument("--format", choices=("dot", "ascii", "json"), default=None)
    common.add_argument("--out", default=None, help="write output here instead of stdout")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=2000, help="sample budget for checks")

    p = argparse.ArgumentParser(prog="alextopos", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    m = sub.add_parser("monoid", parents=[common], help="inspect a monoid spec")
    m.add_argument("action", choices=("info",))
    m.add_argument("--monoid", required=True)
    m.set_defaults(func=cmd_monoid_info)

    c = sub.add_parser("coset-poset", parents=[common], help="build and export the coset poset")
    c.add_argument("--monoid", required=True)
    c.set_defaults(func=cmd_coset_poset)

    e = sub.add_parser("etale", parents=[common], help="M-set to equivariant etale poset")
    e.add_argument("action", choices=("build", "render"))
    e.add_argument("--monoid", required=True)
    e.add_argument("--mset", required=True)
    e.add_argument("--label", choices=("both", "fiber", "group"), default="both")
    e.set_defaults(func=cmd_etale)

    g = sub.add_parser("groupoid", parents=[common], help="Alexandrov groupoid pipeline")
    g.add_argument("action", choices=("build", "check", "pattern", "iso", "induced"))
    g.add_argument("--monoid", required=True)
    g.add_argument("--mset", default=None)
    g.add_argument("--size", type=int, default=11)
    g.set_defaults(func=cmd_groupoid)

    pt = sub.add_parser("points", parents=[common], help="topos points")
    pt.add_argument("kind", choices=("finite", "free"))
    pt.add_argument("--poset", default=None, help="poset exchange file (finite case)")
    pt.add_argument("--perm", action="append", help="generator permutation as node images, e.g. 2,1,3")
    pt.add_argument("--k", type=int, default=1, help="free monoid generator count")
    pt.add_argument("--prefix", default=None, help="finite word, e.g. x2*x1^-1")
    pt.add_argument("--period", default=None, help="positive periodic tail, e.g. x1*x2")
    pt.set_defaults(func=cmd_points)

    v = sub.add_parser("verify", parents=[common], help="run the invariant suite")
    v.add_argument("--all", action="store_true")
    v.add_argument("--check", action="append", help="check id, id prefix or module name (repeatable)")
    v.set_defaults(func=cmd_verify, depth=2)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        RunConfig(args.command, args.radius, args.depth, args.margin, args.seed, args.out).validate()
        return args.func(args)
    except (WindowError, ResourceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_WINDOW
    except (AlexToposError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Batch front door: instance generation, spanner builds, verification,
separator/diameter runs, stats emission.

Exit codes: 0 ok, 1 usage, 2 parse error, 3 invariant violation.
"""

from __future__ import annotations

import argparse
import math
import os
import random
import sys

from . import dg as dg_mod
from . import geom, oracle, proximity, separator, udg, yao
from .config import DEFAULT_STRETCH
from .errors import (
    DiskspanError,
    DisconnectedGraph,
    FormatError,
    InvalidEpsilon,
    NotSubgraph,
    NotUnitInstance,
    SeparatorInvariantViolation,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_INVARIANT = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _atomic_write(path: str, text: str) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="ascii") as fh:
        fh.write(text)
    os.replace(tmp, path)


# -- gen -----------------------------------------------------------------------


def _gen_points(n: int, dist: str, rng: random.Random) -> list:
    if dist == "grid":
        cols = math.ceil(math.sqrt(n))
        return [(float(i % cols), float(i // cols)) for i in range(n)]
    side = 1.5 * math.sqrt(n)
    pts = set()
    if dist == "uniform":
        while len(pts) < n:
            pts.add((rng.uniform(0.0, side), rng.uniform(0.0, side)))
    elif dist == "clustered":
        k = max(1, n // 50)
        centers = [(rng.uniform(0.0, side), rng.uniform(0.0, side)) for _ in range(k)]
        while len(pts) < n:
            cx, cy = centers[rng.randrange(k)]
            pts.add((rng.gauss(cx, 2.0), rng.gauss(cy, 2.0)))
    else:
        raise _UsageError(f"unknown distribution {dist!r}")
    return sorted(pts)


def _gen_radii(n: int, spec: str, rng: random.Random) -> list:
    if spec == "unit":
        return [1.0] * n
    if spec.startswith("loguniform:"):
        rmin = float(spec.split(":", 1)[1])
        if not 0.0 < rmin <= 1.0:
            raise _UsageError("loguniform minimum must be in (0, 1]")
        return [math.exp(rng.uniform(math.log(rmin), 0.0)) for _ in range(n)]
    raise _UsageError(f"unknown radii spec {spec!r}")


def _cmd_gen(args) -> int:
    if args.n < 1:
        raise _UsageError("--n must be at least 1")
    rng = random.Random(args.seed)
    pts = _gen_points(args.n, args.dist, rng)
    radii = _gen_radii(args.n, args.radii, rng)
    inst = geom.normalize_instance(geom.make_instance(pts, radii))
    _atomic_write(args.out, geom.format_instance(inst))
    return EXIT_OK


# -- build ----------------------------------------------------------------------


def _load_normalized(path):
    return geom.normalize_instance(geom.load_instance(path))


def _cmd_build(args) -> int:
    eps = geom.EpsilonParam.parse(args.eps)
    inst = _load_normalized(getattr(args, "in"))
    if args.algo == "yao":
        sp = yao.build_modified_yao(inst, eps)
    elif args.algo == "udg":
        sp = udg.build_udg_spanner(inst, eps)
    else:
        sp = dg_mod.build_dg_spanner(inst, eps)
    _atomic_write(args.out, udg.format_spanner(sp))
    return EXIT_OK


# -- verify -----------------------------------------------------------------------


def _cmd_verify(args) -> int:
    sp = udg.load_spanner(args.spanner)
    if args.graph:
        host = udg.load_spanner(args.graph)
    elif getattr(args, "in"):
        host = oracle.build_intersection_graph(_load_normalized(getattr(args, "in")))
    else:
        raise _UsageError("verify needs --graph or --in")
    ratio, witness, ok = oracle.verify_stretch(host, sp, args.bound)
    verdict = "PASS" if ok else "FAIL"
    print(f"maxRatio {ratio:.17g} {verdict}")
    if witness is not None and not ok:
        print(f"witness {witness[0]} {witness[1]}")
    return EXIT_OK if ok else EXIT_INVARIANT


# -- separate ----------------------------------------------------------------------


def _cmd_separate(args) -> int:
    eps = geom.EpsilonParam.parse(args.eps)
    sp = udg.load_spanner(args.spanner)
    inst = _load_normalized(getattr(args, "in"))
    tree = separator.build_separator_decomposition(sp, inst, eps)
    report = separator.verify_separator(tree, sp, eps)
    _atomic_write(args.out, separator.dump_separator_tree(tree))
    print(
        f"nodes {report.node_count} maxSep {report.max_sep} "
        f"maxSepScaled {report.max_sep_scaled:.17g} forcedLeaves {report.forced_leaves} "
        f"maxCrossers {report.max_crossers} crossingBudget {report.crossing_budget:.17g}"
    )
    return EXIT_OK


# -- diameter ----------------------------------------------------------------------


def _cmd_diameter(args) -> int:
    eps = geom.EpsilonParam.parse(args.eps)
    sp = udg.load_spanner(args.spanner)
    inst = _load_normalized(getattr(args, "in"))
    tree = separator.build_separator_decomposition(sp, inst, eps)
    dia = proximity.estimate_diameter(sp, tree, per_component=args.per_component)
    print(f"Dia {dia:.17g}")
    if args.exact:
        delta = proximity.spanner_diameter_oracle(sp)
        print(f"Delta {delta:.17g}")
        print(f"ratio {(dia / delta if delta else 1.0):.17g}")
    return EXIT_OK


# -- stats -------------------------------------------------------------------------


def _cmd_stats(args) -> int:
    sp = udg.load_spanner(args.spanner)
    inst = _load_normalized(getattr(args, "in"))
    eps_txt = ""
    if args.eps:
        eps_txt = f"{geom.EpsilonParam.parse(args.eps).eps:.17g}"
    deg = [0] * sp.n
    hist = {}
    for u, v, _, tag in sp.edges:
        deg[u] += 1
        deg[v] += 1
        hist[tag] = hist.get(tag, 0) + 1
    print("n,m,eps,rho,maxDegree,edgesPerN")
    print(
        f"{sp.n},{sp.m},{eps_txt},{inst.global_stretch:.17g},"
        f"{max(deg) if deg else 0},{sp.m / sp.n:.17g}"
    )
    print("depth,count")
    for tag in sorted(hist):
        print(f"{tag},{hist[tag]}")
    return EXIT_OK


def _build_parser() -> _Parser:
    p = _Parser(prog="diskspan", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--dist", choices=["uniform", "clustered", "grid"], default="uniform")
    g.add_argument("--radii", default="unit", help="unit or loguniform:MIN")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.set_defaults(func=_cmd_gen)

    b = sub.add_parser("build", help="build a spanner")
    b.add_argument("--algo", choices=["yao", "udg", "dg"], required=True)
    b.add_argument("--eps", required=True, help="epsilon as 1/2^m, e.g. 1/4")
    b.add_argument("--in", dest="in", required=True)
    b.add_argument("--out", required=True)
    b.set_defaults(func=_cmd_build)

    v = sub.add_parser("verify", help="verify spanner stretch against a host graph")
    v.add_argument("--graph", help="host graph file (spanner format)")
    v.add_argument("--in", dest="in", help="instance file; host graph built by oracle")
    v.add_argument("--spanner", required=True)
    v.add_argument("--bound", type=float, required=True)
    v.set_defaults(func=_cmd_verify)

    s = sub.add_parser("separate", help="separator decomposition of a spanner")
    s.add_argument("--spanner", required=True)
    s.add_argument("--in", dest="in", required=True)
    s.add_argument("--eps", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=_cmd_separate)

    d = sub.add_parser("diameter", help="3/2 diameter approximation")
    d.add_argument("--spanner", required=True)
    d.add_argument("--in", dest="in", required=True)
    d.add_argument("--eps", required=True)
    d.add_argument("--exact", action="store_true", help="also print the APSP diameter")
    d.add_argument("--per-component", action="store_true")
    d.set_defaults(func=_cmd_diameter)

    st = sub.add_parser("stats", help="CSV stats for a spanner")
    st.add_argument("--spanner", required=True)
    st.add_argument("--in", dest="in", required=True)
    st.add_argument("--eps", default="")
    st.set_defaults(func=_cmd_stats)
    return p


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (InvalidEpsilon, NotUnitInstance) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except (SeparatorInvariantViolation, NotSubgraph, DisconnectedGraph) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except DiskspanError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())

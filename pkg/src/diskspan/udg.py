"""Unit-disk-graph (1+eps)-spanner: close/far neighborhoods, cone
sparsification, bichromatic closest pairs.

The close machinery is shared with the disk-graph builder: `root_mode`
selects how the cascade is seeded ("grid" for the unit case, where all roots
are eps-cells at depth 0; "window" for radius-cut forests whose roots sit at
assorted depths).
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree

from .errors import EmptySet, FormatError, NotUnitInstance
from .geom import EpsilonParam, Instance, cone_index, dist2
from .quadforest import (
    CompressedForest,
    assign_representatives,
    build_compressed_forest,
)

SQRT2 = math.sqrt(2.0)


@dataclass
class SpannerGraph:
    """Weighted undirected edge list over point indices.

    Edges are (u, v, weight, depth_tag) with u < v, sorted lexicographically;
    depth_tag is the forest depth whose processing added the edge (-1 for far
    edges added at root level).
    """

    n: int
    edges: list = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self) -> list:
        adj = [[] for _ in range(self.n)]
        for u, v, w, _ in self.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        return adj

    def edge_pairs(self) -> set:
        return {(u, v) for u, v, _, _ in self.edges}


def edges_from_dict(n: int, acc: dict) -> SpannerGraph:
    edges = [(u, v, w, tag) for (u, v), (w, tag) in sorted(acc.items())]
    return SpannerGraph(n, edges)


def add_edge(acc: dict, u: int, v: int, w: float, tag: int) -> None:
    """Accumulate with dedup; a re-added edge keeps its smallest depth tag."""
    if u > v:
        u, v = v, u
    cur = acc.get((u, v))
    if cur is None or tag < cur[1]:
        acc[(u, v)] = (w, tag)


def save_spanner(sp: SpannerGraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_spanner(sp))


def format_spanner(sp: SpannerGraph) -> str:
    out = [f"{sp.n} {sp.m}"]
    for u, v, w, tag in sp.edges:
        out.append(f"{u} {v} {w:.17g} {tag}")
    return "\n".join(out) + "\n"


def load_spanner(path) -> SpannerGraph:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty spanner file", line=1)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("expected header 'n m'", line=1)
    n, m = int(head[0]), int(head[1])
    if len(lines) < m + 1:
        raise FormatError(f"expected {m} edge lines", line=len(lines))
    edges = []
    prev = (-1, -1)
    for i in range(m):
        fields = lines[i + 1].split()
        if len(fields) != 4:
            raise FormatError("expected 'u v weight depthTag'", line=i + 2)
        u, v, tag = int(fields[0]), int(fields[1]), int(fields[3])
        w = float(fields[2])
        if not (0 <= u < v < n):
            raise FormatError(f"bad endpoints {u} {v}", line=i + 2)
        if (u, v) <= prev:
            raise FormatError("edges not sorted/unique", line=i + 2)
        prev = (u, v)
        edges.append((u, v, w, tag))
    return SpannerGraph(n, edges)


@dataclass
class NeighborhoodSets:
    """Per-node close pseudo-neighborhoods and per-root far partner sets."""

    close_pseudo: list  # list[node id] -> sorted list of node ids
    far: dict = field(default_factory=dict)  # root id -> sorted partner root ids


# -- close pseudo-neighborhoods ----------------------------------------------


def _root_cell(forest: CompressedForest, rid: int) -> tuple:
    x, y = forest.inst.points[forest.nodes[rid].rep]
    inv = forest.eps.inv_eps
    return (math.floor(float(x) * inv), math.floor(float(y) * inv))


def _grid_root_members(forest: CompressedForest) -> dict:
    """Unit case: per root, all roots whose eps-cell centers lie within
    2 - sqrt(2)*eps (self included)."""
    eps = forest.eps.eps
    cells = {}
    for rid in forest.roots:
        cells[_root_cell(forest, rid)] = rid
    bound = 2.0 - SQRT2 * eps
    bound2 = bound * bound
    reach = int(bound / eps) + 1
    members = {}
    for rid in forest.roots:
        ix, iy = _root_cell(forest, rid)
        found = []
        for di in range(-reach, reach + 1):
            for dj in range(-reach, reach + 1):
                other = cells.get((ix + di, iy + dj))
                if other is None:
                    continue
                if (di * di + dj * dj) * eps * eps <= bound2:
                    found.append(other)
        members[rid] = sorted(found)
    return members


def close_pseudo_neighborhoods(forest: CompressedForest, root_mode: str = "grid") -> list:
    """Top-down cascade computing N'_C for every node (self excluded).

    A node `b` is descended into only while its chain ends above the target
    depth and its representative stays within (1 + sqrt(2)*eps)*2^-depth(b) of
    the target's representative; surviving terminals within that radius at the
    target depth form the pseudo-neighborhood.  The cascade for a child seeds
    from its parent's members plus the parent itself (that is how siblings are
    reached), plus any roots whose trees start between the two depths.
    """
    nodes = forest.nodes
    pts = forest.inst.points
    slack = 1.0 + SQRT2 * forest.eps.eps
    out = [None] * len(nodes)

    if root_mode == "grid":
        grid_members = _grid_root_members(forest)
    elif root_mode == "window":
        roots_by_depth = sorted(forest.roots, key=lambda r: (nodes[r].depth, r))
        root_depths = [nodes[r].depth for r in roots_by_depth]
    else:
        raise ValueError(f"unknown root_mode {root_mode!r}")

    def descend(sources, t):
        d_t = t.depth
        tx, ty = pts[t.rep]
        keep = slack * math.ldexp(1.0, -d_t)
        keep2 = keep * keep
        found = []
        stack = []
        for aid in sources:
            a = nodes[aid]
            lim = slack * math.ldexp(1.0, -a.depth)
            if a.depth <= d_t and dist2(pts[a.rep], (tx, ty)) <= lim * lim:
                stack.append(aid)
        while stack:
            b = nodes[stack.pop()]
            if b.crosses(d_t):
                if b.id != t.id and dist2(pts[b.rep], (tx, ty)) <= keep2:
                    found.append(b.id)
            else:
                for cid in b.children:
                    c = nodes[cid]
                    lim = slack * math.ldexp(1.0, -c.depth)
                    if c.depth <= d_t and dist2(pts[c.rep], (tx, ty)) <= lim * lim:
                        stack.append(cid)
        return sorted(found)

    def window_roots(d_lo, d_hi):
        # roots with depth in (d_lo, d_hi]
        i = bisect.bisect_right(root_depths, d_lo)
        j = bisect.bisect_right(root_depths, d_hi)
        return roots_by_depth[i:j]

    for node in nodes:  # preorder: parents precede children
        if node.parent is None:
            if root_mode == "grid":
                out[node.id] = [r for r in grid_members[node.id] if r != node.id]
            else:
                out[node.id] = descend(window_roots(-1, node.depth), node)
        else:
            sources = [node.parent] + list(out[node.parent])
            if root_mode == "window":
                sources += window_roots(nodes[node.parent].depth, node.depth)
            out[node.id] = descend(sources, node)
    return out


# -- bichromatic closest pair -------------------------------------------------


def brute_bcp_indices(a_idx, b_idx, points):
    best = None
    for a in a_idx:
        pa = points[a]
        for b in b_idx:
            d2 = dist2(pa, points[b])
            key = (d2, a, b)
            if best is None or key < best:
                best = key
    return best


def bichromatic_closest_pair(a_idx, b_idx, points) -> tuple:
    """Exact closest pair (a, b, distance) with a from the first set; ties
    resolved lexicographically on (a, b)."""
    a_idx = sorted(a_idx)
    b_idx = sorted(b_idx)
    if not a_idx or not b_idx:
        raise EmptySet("bichromatic closest pair needs both sides non-empty")
    if len(a_idx) * len(b_idx) <= 64:
        d2, a, b = brute_bcp_indices(a_idx, b_idx, points)
        return (a, b, math.sqrt(d2))

    if len(a_idx) <= len(b_idx):
        q_idx, t_idx, flip = a_idx, b_idx, False
    else:
        q_idx, t_idx, flip = b_idx, a_idx, True
    tree = cKDTree(points[t_idx])
    dists, _ = tree.query(points[q_idx])
    best = None
    for qi, q in enumerate(q_idx):
        pad = dists[qi] * (1.0 + 1e-9) + 1e-300
        for ti in tree.query_ball_point(points[q], pad):
            t = t_idx[ti]
            d2 = dist2(points[q], points[t])
            key = (d2, t, q) if flip else (d2, q, t)
            if best is None or key < best:
                best = key
    d2, a, b = best
    return (a, b, math.sqrt(d2))


# -- far neighborhoods (unit case) ---------------------------------------------


def far_root_pairs(forest: CompressedForest) -> list:
    """Unordered root pairs whose eps-cell centers lie in (2-sqrt2*eps, 2+sqrt2*eps]."""
    eps = forest.eps.eps
    cells = {}
    for rid in forest.roots:
        cells[_root_cell(forest, rid)] = rid
    lo = 2.0 - SQRT2 * eps
    hi = 2.0 + SQRT2 * eps
    lo2, hi2 = lo * lo, hi * hi
    reach = int(hi / eps) + 1
    pairs = []
    for cell in sorted(cells):
        rid = cells[cell]
        ix, iy = cell
        for di in range(-reach, reach + 1):
            for dj in range(-reach, reach + 1):
                other_cell = (ix + di, iy + dj)
                if other_cell <= cell:
                    continue
                other = cells.get(other_cell)
                if other is None:
                    continue
                d2 = (di * di + dj * dj) * eps * eps
                if lo2 < d2 <= hi2:
                    pairs.append((rid, other))
    return pairs


def far_neighborhood_edges(forest: CompressedForest) -> list:
    """Per annulus root pair, the bichromatic closest pair; kept when the unit
    disks intersect (distance <= 2).  Returns (u, v, weight, -1) tuples."""
    pts = forest.inst.points
    edges = []
    for rid, other in far_root_pairs(forest):
        t, s = forest.nodes[rid], forest.nodes[other]
        a, b, d = bichromatic_closest_pair(
            forest.points_of(t), forest.points_of(s), pts
        )
        if dist2(pts[a], pts[b]) <= 4.0:
            u, v = (a, b) if a < b else (b, a)
            edges.append((u, v, d, -1))
    return edges


# -- cone sparsification -------------------------------------------------------


def sparsify_by_cones(rep: int, candidates, eps: EpsilonParam, points) -> list:
    """Keep the closest candidate per cone around `rep`; ties by smaller index.

    candidates: iterable of (node_id, rep_point_index); returns at most 1/eps
    tuples (node_id, rep_point_index, dist2) ordered by cone index.
    """
    apex = points[rep]
    best = {}
    for node_id, cand in candidates:
        cone = cone_index(apex, points[cand], eps)
        d2 = dist2(apex, points[cand])
        key = (d2, cand)
        cur = best.get(cone)
        if cur is None or key < cur[0]:
            best[cone] = (key, node_id, cand)
    return [(nid, cand, key[0]) for cone, (key, nid, cand) in sorted(best.items())]


# -- spanner assembly ----------------------------------------------------------


def effective_cone_eps(eps: EpsilonParam) -> EpsilonParam:
    """Cone resolution used for close-edge sparsification: at least 8 cones.

    Cones of angle 2*pi*eps only admit the closest-per-cone path argument
    while the angle stays small; at 1/eps in {2, 4} (angle >= pi/2) the
    sparsified graph can disconnect components outright.  Clamping to angle
    <= pi/4 matches the regime where the stretch constant 4c_s/(1-2c_s*eps)
    is defined at all, and leaves the per-node budget at exactly 1/eps for
    every eps <= 1/8.
    """
    return eps if eps.inv_eps >= 8 else EpsilonParam.from_inverse(8)


def close_edges(forest: CompressedForest, neigh: list) -> list:
    """Cone-sparsified edges from every node's representative to the
    representatives of its close pseudo-neighborhood."""
    nodes = forest.nodes
    pts = forest.inst.points
    cone_eps = effective_cone_eps(forest.eps)
    out = []
    for node in nodes:
        cands = []
        for rid in neigh[node.id]:
            r = nodes[rid].rep
            if r != node.rep:
                cands.append((rid, r))
        for _, cand, d2 in sparsify_by_cones(node.rep, cands, cone_eps, pts):
            u, v = (node.rep, cand) if node.rep < cand else (cand, node.rep)
            out.append((u, v, math.sqrt(d2), node.depth))
    return out


def build_udg_spanner(inst: Instance, eps: EpsilonParam, forest: CompressedForest | None = None):
    """Unit-disk spanner: quad-dissection close edges (cone sparsified) plus
    bichromatic-closest-pair far edges over the root annulus."""
    if not np.all(inst.radii == 1.0):
        raise NotUnitInstance("unit-disk spanner requires all radii equal to 1")
    if forest is None:
        forest = build_compressed_forest(inst, eps)
        assign_representatives(forest, inst, "unit")
    neigh = close_pseudo_neighborhoods(forest, root_mode="grid")
    acc = {}
    for u, v, w, tag in close_edges(forest, neigh):
        add_edge(acc, u, v, w, tag)
    for u, v, w, tag in far_neighborhood_edges(forest):
        add_edge(acc, u, v, w, tag)
    return edges_from_dict(inst.n, acc)

"""Brute-force ground truth: full intersection graph, exact shortest paths,
stretch verification, naive recursive quadtree, quadratic closest pair.

Everything here is deliberately independent of the fast construction paths it
checks, sharing only the quantization front-end (which acceptance demands for
exact forest comparisons).
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra as _csgraph_dijkstra

from .config import DEFAULT_ORACLE, KEY_BITS, OracleConfig
from .errors import NotSubgraph, OracleTooLarge
from .geom import EpsilonParam, Instance
from .quadforest import CompressedForest, ForestNode
from .udg import SpannerGraph, brute_bcp_indices
from .zorder import morton_sort, pair_level_of_eps


def build_intersection_graph(inst: Instance, cfg: OracleConfig = DEFAULT_ORACLE) -> SpannerGraph:
    """All O(n^2) pairs tested with the closed intersection rule."""
    n = inst.n
    if n > cfg.max_n:
        raise OracleTooLarge(f"n={n} exceeds oracle cap {cfg.max_n}")
    pts = inst.points
    rad = inst.radii
    edges = []
    for i in range(n):
        dx = pts[i + 1 :, 0] - pts[i, 0]
        dy = pts[i + 1 :, 1] - pts[i, 1]
        d2 = dx * dx + dy * dy
        rsum = rad[i + 1 :] + rad[i]
        hit = np.nonzero(d2 <= rsum * rsum)[0]
        for k in hit:
            j = i + 1 + int(k)
            edges.append((i, j, math.sqrt(float(d2[k])), -1))
    return SpannerGraph(n, edges)


def _to_csr(graph: SpannerGraph) -> csr_matrix:
    n = graph.n
    if not graph.edges:
        return csr_matrix((n, n))
    us = [e[0] for e in graph.edges] + [e[1] for e in graph.edges]
    vs = [e[1] for e in graph.edges] + [e[0] for e in graph.edges]
    ws = [e[2] for e in graph.edges] * 2
    return csr_matrix((ws, (us, vs)), shape=(n, n))


def shortest_paths(graph: SpannerGraph, sources="all") -> np.ndarray:
    """Exact nonnegative shortest paths; rows are sources, inf if unreachable."""
    mat = _to_csr(graph)
    if sources == "all":
        return _csgraph_dijkstra(mat, directed=False)
    idx = sorted(sources)
    return _csgraph_dijkstra(mat, directed=False, indices=idx)


def verify_stretch(full: SpannerGraph, spanner: SpannerGraph, bound: float):
    """Max over host edges of d_spanner(u,v)/d(u,v) with its witness edge.

    Edge-wise verification implies the all-pairs bound by summing over the
    edges of a shortest path.  Raises NotSubgraph when the spanner has an edge
    the host graph lacks.
    """
    host_pairs = full.edge_pairs()
    for u, v, _, _ in spanner.edges:
        if (u, v) not in host_pairs:
            raise NotSubgraph(f"spanner edge ({u},{v}) absent from host graph", witness=(u, v))
    if not full.edges:
        return 1.0, None, True
    endpoints = sorted({e[0] for e in full.edges} | {e[1] for e in full.edges})
    pos = {u: i for i, u in enumerate(endpoints)}
    dist = shortest_paths(spanner, sources=endpoints)
    max_ratio = 0.0
    witness = None
    for u, v, w, _ in full.edges:
        ratio = dist[pos[u], v] / w
        if ratio > max_ratio:
            max_ratio = ratio
            witness = (u, v)
    return max_ratio, witness, max_ratio <= bound


def brute_bcp(a_idx, b_idx, points) -> tuple:
    """Quadratic closest-pair oracle; same tie rule as the fast path."""
    d2, a, b = brute_bcp_indices(sorted(a_idx), sorted(b_idx), points)
    return (a, b, math.sqrt(d2))


def naive_quadtree(inst: Instance, eps: EpsilonParam) -> CompressedForest:
    """Direct recursive 4-way subdivision of the eps-grid cells, path-compressed.

    Uses the shared quantization, then pure integer prefix arithmetic:
    quadrant of a point at pair level j is bit (B-1-j) of each quantized
    coordinate.  Output is structurally comparable to the stack construction.
    """
    order, quant = morton_sort(inst, eps)
    jeps = pair_level_of_eps(quant, eps)
    B = KEY_BITS
    qx, qy = quant.qx, quant.qy
    forest = CompressedForest([], [], order, eps, inst, quant)

    def cell_at(pos: int, j: int) -> tuple:
        p = order[pos]
        return (int(qx[p]) >> (B - j), int(qy[p]) >> (B - j))

    def build(lo: int, hi: int, top: int, parent) -> int:
        node = ForestNode(
            id=len(forest.nodes),
            depth=top - jeps,
            split=None,
            parent=parent,
            lo=lo,
            hi=hi,
            is_root=parent is None,
        )
        forest.nodes.append(node)
        if parent is None:
            forest.roots.append(node.id)
        if hi - lo == 1:
            node.rep = order[lo]
            return node.id
        j = top
        while True:
            first = cell_at(lo, j + 1)
            if any(cell_at(p, j + 1) != first for p in range(lo + 1, hi)):
                break
            j += 1
        node.split = j - jeps
        start = lo
        cur = cell_at(lo, j + 1)
        for p in range(lo + 1, hi):
            nxt = cell_at(p, j + 1)
            if nxt != cur:
                node.children.append(build(start, p, j + 1, node.id))
                start, cur = p, nxt
        node.children.append(build(start, hi, j + 1, node.id))
        node.rep = forest.nodes[node.children[0]].rep
        return node.id

    lo = 0
    n = inst.n
    while lo < n:
        cell = cell_at(lo, jeps)
        hi = lo + 1
        while hi < n and cell_at(hi, jeps) == cell:
            hi += 1
        build(lo, hi, jeps, None)
        lo = hi
    return forest


def forest_signature(forest: CompressedForest) -> list:
    """Canonical (depth, split, lo, hi, corner, side) serialization, preorder
    over roots sorted by Morton range; used for exact forest comparisons."""
    from .quadforest import node_square

    sig = []

    def visit(nid):
        node = forest.nodes[nid]
        sq = node_square(node, forest)
        sig.append(
            (node.depth, node.split, node.lo, node.hi, sq.corner[0], sq.corner[1], sq.side)
        )
        sig.append(len(node.children))
        for cid in node.children:
            visit(cid)

    for rid in sorted(forest.roots, key=lambda r: forest.nodes[r].lo):
        visit(rid)
    return sig

"""Separator-tree proximity machinery: boundary sets, distance-preserving
augmented graphs H(t), and the 3/2 diameter approximation.

Every estimate the algorithm produces is a realized shortest-path length in
some H(t), and H(t) preserves the host graph's distances (checked by tests),
so the output can never exceed the true diameter; the separator case analysis
guarantees it is at least two thirds of it.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field

from .errors import DisconnectedGraph, InductionOrderViolation
from .separator import SeparatorTree
from .udg import SpannerGraph

INF = math.inf


@dataclass
class AugmentedGraph:
    """V(t) with induced spanner edges plus a boundary clique whose weights
    are exact host distances."""

    vertices: tuple
    adj: dict  # v -> list of (u, w)
    boundary: tuple
    boundary_weights: dict  # (u, v) sorted pair -> exact host distance
    sep_sssp: dict = field(default_factory=dict)  # source -> {v: dist}


def boundary_sets(tree: SeparatorTree) -> list:
    """B(root) = empty; B(t) = (S(P(t)) | B(P(t))) & V(t)."""
    out = [()] * len(tree.nodes)
    for node in tree.nodes:
        if node.parent is None:
            out[node.id] = ()
            continue
        parent = tree.nodes[node.parent]
        pool = set(parent.separator) | set(out[parent.id])
        out[node.id] = tuple(sorted(pool & set(node.vertices)))
    return out


def sssp(graph, source):
    """Dijkstra. For a SpannerGraph returns a distance list indexed by vertex;
    for an AugmentedGraph (or adjacency dict) returns a dict over its vertices."""
    if isinstance(graph, SpannerGraph):
        adj = {v: [] for v in range(graph.n)}
        for u, v, w, _ in graph.edges:
            adj[u].append((v, w))
            adj[v].append((u, w))
        dist = _dijkstra(adj, source)
        return [dist.get(v, INF) for v in range(graph.n)]
    if isinstance(graph, AugmentedGraph):
        return _dijkstra(graph.adj, source)
    return _dijkstra(graph, source)


def _dijkstra(adj: dict, source) -> dict:
    dist = {source: 0.0}
    heap = [(0.0, source)]
    done = set()
    while heap:
        d, v = heapq.heappop(heap)
        if v in done:
            continue
        done.add(v)
        for u, w in adj[v]:
            nd = d + w
            if nd < dist.get(u, INF):
                dist[u] = nd
                heapq.heappush(heap, (nd, u))
    return dist


def build_augmented_graph(node, tree: SeparatorTree, spanner: SpannerGraph,
                          boundary: list, parent_aug: AugmentedGraph | None) -> AugmentedGraph:
    """H(t): induced edges plus the B(t) clique.  Boundary-pair weights come
    from the parent's clique when both endpoints were already boundary there,
    otherwise from the SSSP runs out of S(P(t)) on H(P(t))."""
    vset = set(node.vertices)
    adj = {v: [] for v in node.vertices}
    for u, v, w, _ in spanner.edges:
        if u in vset and v in vset:
            adj[u].append((v, w))
            adj[v].append((u, w))
    b = boundary[node.id]
    bw = {}
    if node.parent is None:
        if b:
            raise InductionOrderViolation("root must have an empty boundary")
        return AugmentedGraph(node.vertices, adj, b, bw)
    if parent_aug is None:
        raise InductionOrderViolation(f"parent of node {node.id} not built yet")
    parent = tree.nodes[node.parent]
    p_boundary = set(parent_aug.boundary)
    p_sep = set(parent.separator)
    for i, u in enumerate(b):
        for v in b[i + 1 :]:
            if u in p_boundary and v in p_boundary:
                w = parent_aug.boundary_weights.get((u, v))
                if w is None:
                    raise InductionOrderViolation(f"missing parent weight ({u},{v})")
            elif u in p_sep:
                w = parent_aug.sep_sssp[u].get(v, INF)
            elif v in p_sep:
                w = parent_aug.sep_sssp[v].get(u, INF)
            else:
                raise InductionOrderViolation(
                    f"boundary pair ({u},{v}) outside S(P) and B(P)"
                )
            bw[(u, v)] = w
            if w < INF:
                adj[u].append((v, w))
                adj[v].append((u, w))
    return AugmentedGraph(node.vertices, adj, b, bw)


def _run_separator_sssp(node, aug: AugmentedGraph) -> None:
    for s in node.separator:
        if s not in aug.sep_sssp:
            aug.sep_sssp[s] = _dijkstra(aug.adj, s)


def is_connected(spanner: SpannerGraph) -> bool:
    if spanner.n <= 1:
        return True
    adj = spanner.adjacency()
    seen = {0}
    stack = [0]
    while stack:
        v = stack.pop()
        for u, _ in adj[v]:
            if u not in seen:
                seen.add(u)
                stack.append(u)
    return len(seen) == spanner.n


def build_augmented_tree(spanner: SpannerGraph, tree: SeparatorTree) -> list:
    """H(t) for every node, top-down, with separator SSSP runs cached."""
    boundary = boundary_sets(tree)
    augs = [None] * len(tree.nodes)
    for node in tree.nodes:  # preorder: parents first
        parent_aug = augs[node.parent] if node.parent is not None else None
        if parent_aug is not None:
            _run_separator_sssp(tree.nodes[node.parent], parent_aug)
        augs[node.id] = build_augmented_graph(node, tree, spanner, boundary, parent_aug)
    return augs


def estimate_diameter(spanner: SpannerGraph, tree: SeparatorTree,
                      per_component: bool = False) -> float:
    """3/2 approximation of the spanner diameter via the separator tree.

    Per internal node: SSSP from every separator vertex (max1), then one SSSP
    from the vertex farthest from the separator into the opposite side (max2).
    Leaves are swept exactly.  Guarantee: (2/3) * diam <= Dia <= diam.
    """
    if not per_component and not is_connected(spanner):
        raise DisconnectedGraph("diameter of a disconnected graph; pass per_component")
    augs = build_augmented_tree(spanner, tree)
    best = 0.0
    for node in tree.nodes:
        aug = augs[node.id]
        if node.is_leaf:
            for v in node.vertices:
                dists = _dijkstra(aug.adj, v)
                for d in dists.values():
                    if d < INF and d > best:
                        best = d
            continue
        _run_separator_sssp(node, aug)
        sep = node.separator
        for s in sep:
            for d in aug.sep_sssp[s].values():
                if d < INF and d > best:
                    best = d
        t0 = tree.nodes[node.children[0]]
        t1 = tree.nodes[node.children[1]]
        sep_set = set(sep)
        clo_best = None  # (clo, u): farthest-from-separator vertex, ties by index
        for side in (t0.vertices, t1.vertices):
            for u in side:
                if u in sep_set:
                    continue
                clo = min((aug.sep_sssp[s].get(u, INF) for s in sep), default=INF)
                if clo == INF:
                    continue
                if clo_best is None or clo > clo_best[0] or (
                    clo == clo_best[0] and u < clo_best[1]
                ):
                    clo_best = (clo, u)
        if clo_best is None:
            continue
        z = clo_best[1]
        zdist = _dijkstra(aug.adj, z)
        other = t1.vertices if z in set(t0.vertices) - sep_set else t0.vertices
        for w in other:
            d = zdist.get(w, INF)
            if d < INF and d > best:
                best = d
    return best


def spanner_diameter_oracle(spanner: SpannerGraph) -> float:
    """Exact (per-component max) diameter of the spanner via APSP."""
    from .oracle import shortest_paths

    dist = shortest_paths(spanner, "all")
    finite = dist[dist < INF]
    return float(finite.max()) if finite.size else 0.0

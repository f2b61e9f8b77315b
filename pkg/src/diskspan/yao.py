"""Baseline modified Yao-graph spanner.

Per point and cone, a directed edge goes to the closest intersecting point of
radius at least the apex's; the undirected counterpart is the spanner.  The
brute-force O(n^2 / eps) scan is intentional: this is the cross-check
baseline, not the fast path.
"""

from __future__ import annotations

import math

from .geom import EpsilonParam, Instance, cone_index, dist2
from .udg import SpannerGraph, add_edge, edges_from_dict


def yao_out_edges(inst: Instance, eps: EpsilonParam) -> list:
    """Directed edges (p, q) of the modified Yao graph, at most 1/eps per p."""
    pts = inst.points
    rad = inst.radii
    n = inst.n
    out = []
    for p in range(n):
        best = {}
        rp = rad[p]
        apex = pts[p]
        for q in range(n):
            if q == p or rad[q] < rp:
                continue
            rsum = rp + rad[q]
            d2 = dist2(apex, pts[q])
            if d2 > rsum * rsum:
                continue
            cone = cone_index(apex, pts[q], eps)
            key = (d2, q)
            cur = best.get(cone)
            if cur is None or key < cur:
                best[cone] = key
        for cone in sorted(best):
            d2, q = best[cone]
            out.append((p, q, math.sqrt(d2)))
    return out


def build_modified_yao(inst: Instance, eps: EpsilonParam) -> SpannerGraph:
    acc = {}
    for p, q, w in yao_out_edges(inst, eps):
        add_edge(acc, p, q, w, -1)
    return edges_from_dict(inst.n, acc)

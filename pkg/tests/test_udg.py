import math
import random

import numpy as np
import pytest

from diskspan.config import DEFAULT_STRETCH
from diskspan.errors import EmptySet, NotUnitInstance
from diskspan.geom import EpsilonParam, dist2, make_instance, normalize_instance
from diskspan.oracle import brute_bcp, build_intersection_graph, verify_stretch
from diskspan.quadforest import build_compressed_forest, chain_square, node_square
from diskspan.udg import (
    bichromatic_closest_pair,
    build_udg_spanner,
    close_pseudo_neighborhoods,
    far_neighborhood_edges,
    load_spanner,
    save_spanner,
    sparsify_by_cones,
)
from tests.conftest import random_unit_instance

EPS4 = EpsilonParam.from_inverse(4)


# -- bichromatic closest pair ---------------------------------------------------


def test_bcp_trivial():
    pts = np.array([(0.0, 0.0), (3.0, 0.0), (1.0, 1.0)])
    a, b, d = bichromatic_closest_pair([0], [1, 2], pts)
    assert (a, b) == (0, 2)
    assert d == math.sqrt(2.0)


def test_bcp_singletons():
    pts = np.array([(0.0, 0.0), (5.0, 5.0)])
    assert bichromatic_closest_pair([0], [1], pts)[:2] == (0, 1)


def test_bcp_empty_side():
    pts = np.array([(0.0, 0.0)])
    with pytest.raises(EmptySet):
        bichromatic_closest_pair([], [0], pts)


def test_bcp_matches_brute_force():
    rng = random.Random(0)
    for trial in range(40):
        na, nb = rng.randint(1, 60), rng.randint(1, 60)
        pts = np.array(
            [(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(na + nb)]
        )
        a_idx = list(range(na))
        b_idx = list(range(na, na + nb))
        assert bichromatic_closest_pair(a_idx, b_idx, pts) == brute_bcp(a_idx, b_idx, pts)


def test_bcp_ties_lexicographic():
    # two candidates at identical distance: smallest (a, b) wins
    pts = np.array([(0.0, 0.0), (1.0, 0.0), (-1.0, 0.0), (0.0, 1.0)])
    a, b, d = bichromatic_closest_pair([0], [1, 2, 3], pts)
    assert (a, b, d) == (0, 1, 1.0)
    assert brute_bcp([0], [1, 2, 3], pts) == (0, 1, 1.0)


# -- close pseudo-neighborhoods ---------------------------------------------------


def test_isolated_root_empty_set():
    inst = normalize_instance(make_instance([(0, 0), (50, 50)], [1, 1]))
    forest = build_compressed_forest(inst, EPS4)
    neigh = close_pseudo_neighborhoods(forest)
    for rid in forest.roots:
        assert neigh[rid] == []


def test_siblings_contain_each_other():
    # two points in one eps-cell: the root's two leaf children see each other
    inst = normalize_instance(make_instance([(0.01, 0.01), (0.2, 0.2)], [1, 1]))
    forest = build_compressed_forest(inst, EPS4)
    neigh = close_pseudo_neighborhoods(forest)
    leaves = [n for n in forest.nodes if n.is_leaf]
    assert len(leaves) == 2
    a, b = leaves
    assert b.id in neigh[a.id]
    assert a.id in neigh[b.id]


def close_oracle(forest, t):
    """All chain-crossing nodes whose depth-d_t square centers lie within
    2^-d_t of t's square (the uncompressed N_C collapsed to its forest node)."""
    d = t.depth
    sq_t = node_square(t, forest)
    reach = math.ldexp(1.0, -d)
    out = []
    for b in forest.nodes:
        if b.id == t.id or not b.crosses(d):
            continue
        sq_b = chain_square(b, forest, d)
        if dist2((sq_b.cx, sq_b.cy), (sq_t.cx, sq_t.cy)) <= reach * reach:
            out.append(b.id)
    return sorted(out)


def test_pseudo_neighborhood_vs_brute_force():
    slack = 1.0 + math.sqrt(2.0) * EPS4.eps
    for seed in range(4):
        inst = random_unit_instance(150, seed=seed)
        forest = build_compressed_forest(inst, EPS4)
        neigh = close_pseudo_neighborhoods(forest)
        pts = forest.inst.points
        for node in forest.nodes:
            if node.parent is None:
                continue
            # completeness: every true close square is reachable
            assert set(close_oracle(forest, node)) <= set(neigh[node.id])
            # soundness: members cross the depth and pass the distance filter
            lim = slack * math.ldexp(1.0, -node.depth)
            for rid in neigh[node.id]:
                member = forest.nodes[rid]
                assert member.crosses(node.depth)
                assert dist2(pts[member.rep], pts[node.rep]) <= lim * lim * (1 + 1e-12)


# -- cone sparsification -----------------------------------------------------------


def test_sparsify_single_candidate():
    pts = np.array([(0.0, 0.0), (1.0, 0.0)])
    kept = sparsify_by_cones(0, [(7, 1)], EPS4, pts)
    assert [(nid, cand) for nid, cand, _ in kept] == [(7, 1)]


def test_sparsify_same_cone_keeps_closest():
    pts = np.array([(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)])
    kept = sparsify_by_cones(0, [(1, 1), (2, 2)], EPS4, pts)
    assert [(nid, cand) for nid, cand, _ in kept] == [(1, 1)]


def test_sparsify_random_matches_per_cone_minimum():
    from diskspan.geom import cone_index

    eps8 = EpsilonParam.from_inverse(8)
    rng = random.Random(5)
    pts = np.array([(0.0, 0.0)] + [(rng.uniform(-3, 3), rng.uniform(-3, 3)) for _ in range(50)])
    cands = [(i, i) for i in range(1, 51)]
    kept = sparsify_by_cones(0, cands, eps8, pts)
    assert len(kept) <= 8
    best = {}
    for _, c in cands:
        cone = cone_index(pts[0], pts[c], eps8)
        key = (dist2(pts[0], pts[c]), c)
        if cone not in best or key < best[cone]:
            best[cone] = key
    assert {cand: d2 for _, cand, d2 in kept} == {c: d2 for d2, c in best.values()}


# -- far neighborhood ---------------------------------------------------------------


def test_far_outside_annulus_no_edge():
    inst = normalize_instance(make_instance([(0, 0), (3, 0)], [1, 1]))
    forest = build_compressed_forest(inst, EPS4)
    assert far_neighborhood_edges(forest) == []


def test_far_tangency_edge():
    inst = normalize_instance(make_instance([(0, 0), (2, 0)], [1, 1]))
    forest = build_compressed_forest(inst, EPS4)
    edges = far_neighborhood_edges(forest)
    assert len(edges) == 1
    u, v, w, tag = edges[0]
    assert (u, v, w, tag) == (0, 1, 2.0, -1)


def test_far_matches_quadratic_filter():
    """Emitted far edges = per-annulus-pair closest intersecting pairs."""
    from diskspan.udg import far_root_pairs

    inst = random_unit_instance(250, seed=3)
    forest = build_compressed_forest(inst, EPS4)
    got = {(u, v) for u, v, _, _ in far_neighborhood_edges(forest)}
    expected = set()
    pts = inst.points
    for rid, sid in far_root_pairs(forest):
        t, s = forest.nodes[rid], forest.nodes[sid]
        best = None
        for a in forest.points_of(t):
            for b in forest.points_of(s):
                key = (dist2(pts[a], pts[b]), a, b)
                if best is None or key < best:
                    best = key
        d2, a, b = best
        if d2 <= 4.0:
            expected.add((min(a, b), max(a, b)))
    assert got == expected


# -- spanner construction -------------------------------------------------------------


def test_spanner_single_point():
    inst = normalize_instance(make_instance([(1, 1)], [1]))
    sp = build_udg_spanner(inst, EPS4)
    assert sp.n == 1 and sp.m == 0


def test_spanner_two_points():
    inst = normalize_instance(make_instance([(0, 0), (1.5, 0)], [1, 1]))
    sp = build_udg_spanner(inst, EPS4)
    assert sp.m == 1
    assert sp.edges[0][:3] == (0, 1, 1.5)


def test_spanner_rejects_mixed_radii():
    inst = normalize_instance(make_instance([(0, 0), (1, 0)], [1, 0.5]))
    with pytest.raises(NotUnitInstance):
        build_udg_spanner(inst, EPS4)


def test_spanner_is_subgraph_with_true_weights(unit_instance_200):
    sp = build_udg_spanner(unit_instance_200, EPS4)
    pts = unit_instance_200.points
    for u, v, w, tag in sp.edges:
        d2 = dist2(pts[u], pts[v])
        assert d2 <= 4.0  # unit disks intersect
        assert abs(w - math.sqrt(d2)) <= 1e-12 * w


def test_spanner_stretch_all_epsilons():
    inst = random_unit_instance(300, seed=13)
    G = build_intersection_graph(inst)
    for inv in (2, 4, 8):
        eps = EpsilonParam.from_inverse(inv)
        sp = build_udg_spanner(inst, eps)
        bound = DEFAULT_STRETCH.udg_bound(eps.eps)
        ratio, witness, ok = verify_stretch(G, sp, bound)
        assert ok, f"stretch {ratio} > {bound} at eps=1/{inv}, witness {witness}"


def test_close_edge_budget_per_node(unit_instance_200):
    """At most 1/eps close edges contributed per forest node."""
    from diskspan.udg import close_edges

    forest = build_compressed_forest(unit_instance_200, EPS4)
    neigh = close_pseudo_neighborhoods(forest)
    per_node = {}
    for u, v, w, tag in close_edges(forest, neigh):
        per_node[(u, v, tag)] = per_node.get((u, v, tag), 0)
    counts = {}
    for node in forest.nodes:
        cands = [
            (rid, forest.nodes[rid].rep)
            for rid in neigh[node.id]
            if forest.nodes[rid].rep != node.rep
        ]
        kept = sparsify_by_cones(node.rep, cands, EPS4, forest.inst.points)
        assert len(kept) <= EPS4.inv_eps
        counts[node.id] = len(kept)
    assert max(counts.values(), default=0) <= EPS4.inv_eps


def test_same_component_preservation(unit_instance_200):
    from diskspan.oracle import shortest_paths

    sp = build_udg_spanner(unit_instance_200, EPS4)
    G = build_intersection_graph(unit_instance_200)
    dg = shortest_paths(G, "all")
    ds = shortest_paths(sp, "all")
    assert np.array_equal(np.isinf(dg), np.isinf(ds))


def test_spanner_build_deterministic(unit_instance_200):
    a = build_udg_spanner(unit_instance_200, EPS4)
    b = build_udg_spanner(unit_instance_200, EPS4)
    assert a.edges == b.edges


def test_spanner_roundtrip(tmp_path, unit_instance_200):
    sp = build_udg_spanner(unit_instance_200, EPS4)
    path = tmp_path / "sp.txt"
    save_spanner(sp, path)
    back = load_spanner(path)
    assert back.n == sp.n and back.edges == sp.edges

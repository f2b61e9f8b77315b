import math
import random

import pytest

from diskspan.geom import EpsilonParam, make_instance, normalize_instance, square_contains
from diskspan.oracle import forest_signature, naive_quadtree
from diskspan.quadforest import (
    assign_representatives,
    build_compressed_forest,
    check_forest,
    dump_forest,
    node_square,
    point_roots,
    split_roots_by_radius,
)
from tests.conftest import random_disk_instance, random_unit_instance

EPS4 = EpsilonParam.from_inverse(4)


def test_single_point_forest():
    inst = normalize_instance(make_instance([(2, 3)], [1]))
    forest = build_compressed_forest(inst, EPS4)
    assert len(forest.nodes) == 1
    assert forest.nodes[0].is_root and forest.nodes[0].is_leaf
    assert forest.nodes[0].depth == 0


def test_two_cells_two_roots():
    # one eps-cell has side 1/4 after normalization; points 3 apart
    inst = normalize_instance(make_instance([(0, 0), (3, 0)], [1, 1]))
    forest = build_compressed_forest(inst, EPS4)
    assert len(forest.roots) == 2
    assert all(forest.nodes[r].is_leaf for r in forest.roots)


def test_forest_matches_naive_quadtree():
    for seed in range(8):
        n = random.Random(seed).choice([16, 64, 256])
        inst = random_unit_instance(n, seed=seed, side=4.0)
        for inv in (2, 4, 8):
            eps = EpsilonParam.from_inverse(inv)
            fast = build_compressed_forest(inst, eps)
            slow = naive_quadtree(inst, eps)
            assert forest_signature(fast) == forest_signature(slow)


def test_forest_invariants_random():
    for seed in range(5):
        inst = random_unit_instance(200, seed=seed)
        forest = build_compressed_forest(inst, EPS4)
        check_forest(forest)
        assert len(forest.nodes) <= 2 * inst.n


def test_node_square_examples():
    eps2 = EpsilonParam.from_inverse(2)
    inst = normalize_instance(make_instance([(0.3, 0.3), (10, 10)], [1, 1]))
    forest = build_compressed_forest(inst, eps2)
    root = forest.nodes[min(forest.roots, key=lambda r: forest.nodes[r].lo)]
    sq = node_square(root, forest)
    assert sq.corner == (0.0, 0.0)
    assert sq.side == 0.5


def test_node_square_side_by_depth():
    eps2 = EpsilonParam.from_inverse(2)
    # any node at depth d must have side eps * 2^-d
    inst = random_unit_instance(100, seed=1)
    forest = build_compressed_forest(inst, eps2)
    for node in forest.nodes:
        sq = node_square(node, forest)
        assert sq.side == math.ldexp(eps2.eps, -node.depth)


def test_containment_every_point(unit_instance_200):
    forest = build_compressed_forest(unit_instance_200, EPS4)
    for node in forest.nodes:
        sq = node_square(node, forest)
        for p in forest.points_of(node):
            assert square_contains(sq, tuple(forest.inst.points[p]))


def test_representatives_unit_and_by_radius():
    inst = random_disk_instance(80, seed=2)
    forest = build_compressed_forest(inst, EPS4)
    assign_representatives(forest, inst, "unit")
    for node in forest.nodes:
        assert node.rep in forest.points_of(node)
        if not node.is_leaf:
            assert node.rep == forest.nodes[node.children[0]].rep
    assign_representatives(forest, inst, "byRadius")
    for node in forest.nodes:
        pts = forest.points_of(node)
        best = min(pts, key=lambda p: (-inst.radii[p], p))
        assert node.rep == best


def test_split_roots_unit_no_cuts(unit_instance_200):
    forest = build_compressed_forest(unit_instance_200, EPS4)
    assign_representatives(forest, unit_instance_200, "byRadius")
    cut = split_roots_by_radius(forest, unit_instance_200)
    assert len(cut.roots) == len(forest.roots)
    assert all(cut.nodes[r].depth == 0 for r in cut.roots)
    assert forest_signature(cut) == forest_signature(forest)


def test_split_roots_lone_small_disk():
    from diskspan.dg import disk_level

    r_small = 1.5 * 2.0 ** -5
    inst = normalize_instance(make_instance([(0.01, 0.01), (40, 0.01)], [r_small, 1.0]))
    forest = build_compressed_forest(inst, EPS4)
    assign_representatives(forest, inst, "byRadius")
    cut = split_roots_by_radius(forest, inst)
    assert len(cut.roots) == 2
    depths = sorted(cut.nodes[r].depth for r in cut.roots)
    assert depths == [0, disk_level(r_small)]
    assert disk_level(r_small) == 5


def test_split_roots_masked_empty_rule():
    """Every cut root was masked-empty at the depth it would have hung."""
    from diskspan.dg import disk_level

    inst = random_disk_instance(150, seed=5)
    levels = [disk_level(float(r)) for r in inst.radii]
    forest = build_compressed_forest(inst, EPS4)
    assign_representatives(forest, inst, "byRadius")
    cut = split_roots_by_radius(forest, inst)
    for rid in cut.roots:
        node = cut.nodes[rid]
        pts = cut.points_of(node)
        # non-empty at its own depth
        assert any(levels[p] <= node.depth for p in pts)
        if node.cut_depth is not None:
            assert all(levels[p] > node.cut_depth for p in pts)
        # representative is the largest disk and fits the depth
        assert levels[node.rep] <= node.depth
    check_forest(cut)


def test_point_roots_partition():
    inst = random_disk_instance(120, seed=9)
    forest = build_compressed_forest(inst, EPS4)
    assign_representatives(forest, inst, "byRadius")
    cut = split_roots_by_radius(forest, inst)
    owner = point_roots(cut)
    assert all(o >= 0 for o in owner)
    for rid in cut.roots:
        node = cut.nodes[rid]
        inside = [p for p in range(inst.n) if owner[p] == rid]
        assert inside  # every root owns at least one point


def test_dump_format(unit_instance_200):
    forest = build_compressed_forest(unit_instance_200, EPS4)
    lines = dump_forest(forest).splitlines()
    assert len(lines) == len(forest.nodes)
    first = lines[0].split()
    assert len(first) == 9

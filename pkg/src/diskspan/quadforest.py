"""Compressed quad-dissection forest built from the Morton order.

Each node represents a maximal chain of grid squares sharing one point set:
`depth` is the chain's top square (where the set first appears; side
eps * 2^-depth) and `split` its bottom square (where the set breaks into
quadrants; None for single-point leaves, whose chain extends indefinitely).
Trees are rooted at non-empty eps-grid cells, so roots sit at depth 0 until
the disk-graph radius cut re-anchors them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import NotNormalized
from .geom import EpsilonParam, Instance, Square, square_contains
from .zorder import agree, morton_sort, pair_level_of_eps, round_to_grid, Quantization


@dataclass
class ForestNode:
    id: int
    depth: int  # chain top; node side is eps * 2^-depth
    split: int | None  # chain bottom; None for leaves
    children: list = field(default_factory=list)  # child node ids
    parent: int | None = None
    rep: int = -1  # representative point index
    lo: int = 0  # Morton-order range [lo, hi)
    hi: int = 0
    is_root: bool = False
    cut_depth: int | None = None  # natural depth before a radius cut re-anchored it

    @property
    def is_leaf(self) -> bool:
        return not self.children

    def crosses(self, d: int) -> bool:
        """Whether this node's square chain includes depth d."""
        return self.depth <= d and (self.split is None or d <= self.split)


@dataclass
class CompressedForest:
    nodes: list
    roots: list
    order: list  # Morton permutation of point indices
    eps: EpsilonParam
    inst: Instance
    quant: Quantization
    _sorted_keys: list | None = None

    def points_of(self, node: ForestNode) -> list:
        return self.order[node.lo : node.hi]

    def sorted_keys(self) -> list:
        if self._sorted_keys is None:
            self._sorted_keys = [self.quant.keys[i] for i in self.order]
        return self._sorted_keys

    def node_count(self) -> int:
        return len(self.nodes)


class _Tmp:
    __slots__ = ("lo", "hi", "merge", "children")

    def __init__(self, lo, hi, merge=None, children=None):
        self.lo = lo
        self.hi = hi
        self.merge = merge  # split level; None for leaves
        self.children = children or []


def _merge(left: _Tmp, right: _Tmp, level: int) -> _Tmp:
    if left.merge == level:
        # same split square: flatten into up to four quadrant children
        left.children.append(right)
        left.hi = right.hi
        return left
    return _Tmp(left.lo, right.hi, level, [left, right])


def _build_cell(lo: int, hi: int, agrees) -> _Tmp:
    """Stack scan over one eps-cell's Morton run; agrees[i] pairs i with i-1."""
    stack = [_Tmp(lo, lo + 1)]
    levels = []  # strictly increasing merge levels between stack neighbours
    for pos in range(lo + 1, hi):
        a = agrees[pos]
        while levels and levels[-1] >= a:
            m = levels.pop()
            r = stack.pop()
            l = stack.pop()
            stack.append(_merge(l, r, m))
        stack.append(_Tmp(pos, pos + 1))
        levels.append(a)
    while levels:
        m = levels.pop()
        r = stack.pop()
        l = stack.pop()
        stack.append(_merge(l, r, m))
    return stack[0]


def build_compressed_forest(inst: Instance, eps: EpsilonParam) -> CompressedForest:
    """Single left-to-right scan over the Morton order (stack construction)."""
    if not inst.is_normalized:
        raise NotNormalized("forest construction requires a normalized instance")
    order, quant = morton_sort(inst, eps)
    jeps = pair_level_of_eps(quant, eps)
    keys = [quant.keys[i] for i in order]
    n = inst.n

    # agree of consecutive sorted keys, relative to the eps-grid pair level
    agrees = [0] * n
    for i in range(1, n):
        agrees[i] = agree(keys[i], keys[i - 1], jeps)

    forest = CompressedForest([], [], order, eps, inst, quant)
    lo = 0
    while lo < n:
        hi = lo + 1
        while hi < n and agrees[hi] >= 0:
            hi += 1
        tmp = _build_cell(lo, hi, agrees)
        _materialize(forest, tmp, 0, None)
        lo = hi
    return forest


def _materialize(forest: CompressedForest, tmp: _Tmp, depth: int, parent) -> int:
    node = ForestNode(
        id=len(forest.nodes),
        depth=depth,
        split=tmp.merge,
        parent=parent,
        lo=tmp.lo,
        hi=tmp.hi,
        is_root=parent is None,
    )
    forest.nodes.append(node)
    if parent is None:
        forest.roots.append(node.id)
    if tmp.children:
        for child in tmp.children:
            cid = _materialize(forest, child, tmp.merge + 1, node.id)
            node.children.append(cid)
        node.rep = forest.nodes[node.children[0]].rep
    else:
        node.rep = forest.order[tmp.lo]
    return node.id


def node_square(node: ForestNode, forest: CompressedForest) -> Square:
    return chain_square(node, forest, node.depth)


def chain_square(node: ForestNode, forest: CompressedForest, d: int) -> Square:
    """The depth-d square of this node's chain (requires node.crosses(d))."""
    l = d + forest.eps.l_base
    rx, ry = forest.inst.points[node.rep]
    return Square.from_corner(
        round_to_grid(float(rx), l), round_to_grid(float(ry), l), math.ldexp(1.0, -l)
    )


def assign_representatives(forest: CompressedForest, inst: Instance, mode: str) -> CompressedForest:
    """Set R_t bottom-up: leaves take their point, internal nodes a child's rep.

    mode 'unit': first child in Morton order; mode 'byRadius': child rep with
    the largest radius, ties broken by smaller point index.
    """
    if mode not in ("unit", "byRadius"):
        raise ValueError(f"unknown representative mode {mode!r}")
    radii = inst.radii
    for node in reversed(forest.nodes):
        if node.is_leaf:
            node.rep = forest.order[node.lo]
        elif mode == "unit":
            node.rep = forest.nodes[node.children[0]].rep
        else:
            best = None
            for cid in node.children:
                r = forest.nodes[cid].rep
                key = (-radii[r], r)
                if best is None or key < best[0]:
                    best = (key, r)
            node.rep = best[1]
    return forest


def split_roots_by_radius(forest: CompressedForest, inst: Instance) -> CompressedForest:
    """Disk-graph root cut: detach a node from its parent when the largest
    radius below it is smaller than 2^-depth, re-anchoring the detached root
    at the level of its largest disk.

    Nodes whose chains cannot host their largest disk even at the split square
    dissolve, promoting their children to roots.  Raw Morton ranges are kept
    on every node; points of detached subtrees stay masked out of ancestors'
    effective sets because their levels exceed every ancestor chain depth.
    """
    from .dg import disk_level  # local import: dg builds on this module

    levels = [disk_level(float(r)) for r in inst.radii]
    order = forest.order

    lvlmax = [0] * len(forest.nodes)
    for node in reversed(forest.nodes):
        if node.is_leaf:
            lvlmax[node.id] = levels[order[node.lo]]
        else:
            lvlmax[node.id] = min(lvlmax[c] for c in node.children)

    new = CompressedForest([], [], order, forest.eps, inst, forest.quant)
    root_tmps = []

    def walk(nid: int, natural: int, promoted: list):
        node = forest.nodes[nid]
        if not node.is_leaf and lvlmax[nid] > node.split:
            # no chain square can host the largest disk: dissolve
            for cid in node.children:
                sub = walk(cid, node.split + 1, promoted)
                if sub is not None:
                    promoted.append(sub)
            return None
        depth = max(natural, lvlmax[nid])
        rec = {"src": nid, "depth": depth, "children": [],
               "cut": natural if depth > natural else None}
        for cid in node.children:
            child_nat = node.split + 1
            sub = walk(cid, child_nat, promoted)
            if sub is None:
                continue
            if sub["depth"] > child_nat:
                promoted.append(sub)  # radius cut: child detached
            else:
                rec["children"].append(sub)
        return rec

    for rid in forest.roots:
        promoted = []
        top = walk(rid, 0, promoted)
        if top is not None:
            root_tmps.append(top)
        root_tmps.extend(promoted)
    root_tmps.sort(key=lambda r: (forest.nodes[r["src"]].lo, r["depth"]))

    def emit(rec, parent):
        src = forest.nodes[rec["src"]]
        node = ForestNode(
            id=len(new.nodes),
            depth=rec["depth"],
            split=src.split,
            parent=parent,
            rep=src.rep,
            lo=src.lo,
            hi=src.hi,
            is_root=parent is None,
            cut_depth=rec["cut"],
        )
        new.nodes.append(node)
        if parent is None:
            new.roots.append(node.id)
        for sub in rec["children"]:
            node.children.append(emit(sub, node.id))
        return node.id

    for rec in root_tmps:
        emit(rec, None)
    return assign_representatives(new, inst, "byRadius")


def point_roots(forest: CompressedForest) -> list:
    """Map point index -> id of the root of the tree containing its leaf."""
    out = [-1] * forest.inst.n
    for rid in forest.roots:
        stack = [rid]
        while stack:
            node = forest.nodes[stack.pop()]
            if node.is_leaf:
                out[forest.order[node.lo]] = rid
            else:
                stack.extend(node.children)
    return out


def check_forest(forest: CompressedForest) -> None:
    """Structural invariants: contiguity, containment, depth monotonicity, 2n cap."""
    n = forest.inst.n
    assert len(forest.nodes) <= 2 * n, "more than 2n interesting nodes"
    plain = all(node.cut_depth is None for node in forest.nodes)
    if plain:
        pos = 0
        for rid in sorted(forest.roots, key=lambda r: forest.nodes[r].lo):
            node = forest.nodes[rid]
            assert node.lo == pos, "root ranges must tile the Morton order"
            pos = node.hi
        assert pos == n
    covered = [False] * n
    for node in forest.nodes:
        sq = node_square(node, forest)
        for p in forest.points_of(node):
            assert square_contains(sq, tuple(forest.inst.points[p])), (
                f"point {p} escapes square of node {node.id}"
            )
        assert node.rep in forest.points_of(node)
        if node.parent is not None:
            assert node.depth > forest.nodes[node.parent].depth
        if node.children:
            assert node.lo == forest.nodes[node.children[0]].lo
            assert node.hi == forest.nodes[node.children[-1]].hi
            for a, b in zip(node.children, node.children[1:]):
                assert forest.nodes[a].hi == forest.nodes[b].lo, "sibling ranges not adjacent"
        else:
            for p in forest.points_of(node):
                covered[p] = True
    assert all(covered), "some point not covered by a leaf"


def dump_forest(forest: CompressedForest) -> str:
    """One node per line: id depth corner_x corner_y side rep lo hi parent."""
    lines = []
    for node in forest.nodes:
        sq = node_square(node, forest)
        cx, cy = sq.corner
        parent = node.parent if node.parent is not None else -1
        lines.append(
            f"{node.id} {node.depth} {cx:.17g} {cy:.17g} {sq.side:.17g} "
            f"{node.rep} {node.lo} {node.hi} {parent}"
        )
    return "\n".join(lines) + "\n"

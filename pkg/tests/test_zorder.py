import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from diskspan.config import KEY_BITS
from diskspan.errors import EqualKeys, QuantizationCollision
from diskspan.geom import EpsilonParam, make_instance, normalize_instance
from diskspan.zorder import agree, morton_sort, round_to_grid, shuffle

B = KEY_BITS


def shuffle_oracle(x, y):
    out = 0
    for i in range(B):
        out |= ((x >> i) & 1) << (2 * i + 1)
        out |= ((y >> i) & 1) << (2 * i)
    return out


def agree_oracle(xk, yk, l_base):
    """Scan interleaved bit pairs from the top; first differing pair index."""
    for i in range(B):
        sh = 2 * (B - 1 - i)
        if (xk >> sh) & 3 != (yk >> sh) & 3:
            return i - l_base
    raise AssertionError("equal keys")


def test_shuffle_examples():
    assert shuffle(1, 0) == 2
    assert shuffle(1, 1) == 3
    assert shuffle(2, 1) == 9


@given(st.integers(0, 2**B - 1), st.integers(0, 2**B - 1))
def test_shuffle_matches_oracle(x, y):
    assert shuffle(x, y) == shuffle_oracle(x, y)


def test_agree_top_pair():
    # keys differing in the topmost bit pair separate at the root grid
    x = shuffle(1 << (B - 1), 0)
    y = shuffle(0, 0)
    assert agree(x, y, 0) == 0


def test_agree_second_pair():
    # B=2 example lifted to the fixed key width: first pair equal, second differs
    x = shuffle(0b10 << (B - 2), 0)
    y = shuffle(0b11 << (B - 2), 0)
    assert agree(x, y, 0) == 1


def test_agree_equal_keys_raises():
    with pytest.raises(EqualKeys):
        agree(5, 5, 0)


@given(st.integers(0, 2**B - 1), st.integers(0, 2**B - 1),
       st.integers(0, 2**B - 1), st.integers(0, 2**B - 1), st.integers(0, 8))
def test_agree_matches_prefix_scan(x1, y1, x2, y2, lb):
    k1, k2 = shuffle(x1, y1), shuffle(x2, y2)
    if k1 == k2:
        return
    assert agree(k1, k2, lb) == agree_oracle(k1, k2, lb)
    assert agree(k2, k1, lb) == agree(k1, k2, lb)


def coord_agree(u, v):
    """First differing-bit position from the top; B when equal."""
    if u == v:
        return B
    return B - (u ^ v).bit_length()


@given(st.integers(0, 2**B - 1), st.integers(0, 2**B - 1),
       st.integers(0, 2**B - 1), st.integers(0, 2**B - 1))
def test_order_equivalence(x, xp, y, yp):
    """shuffle(x,y) < shuffle(x',y') iff the agree/lexicographic rule holds."""
    lhs = shuffle(x, y) < shuffle(xp, yp)
    rule = (coord_agree(x, xp) <= coord_agree(y, yp) and x < xp) or (
        coord_agree(x, xp) > coord_agree(y, yp) and y < yp
    )
    assert lhs == rule


def test_round_to_grid():
    assert round_to_grid(0.8, 1) == 0.5
    assert round_to_grid(0.3, 0) == 0.0
    assert round_to_grid(0.625, 3) == 0.625


def test_morton_sort_small():
    inst = normalize_instance(
        make_instance([(0.1, 0.1), (0.9, 0.9), (0.1, 0.9)], [1, 1, 1])
    )
    order, _ = morton_sort(inst, EpsilonParam.from_inverse(2))
    assert order == [0, 2, 1]


def test_morton_sort_single_point():
    inst = normalize_instance(make_instance([(3, 4)], [1]))
    order, _ = morton_sort(inst, EpsilonParam.from_inverse(4))
    assert order == [0]


def test_morton_sort_idempotent_and_permutation():
    rng = random.Random(3)
    pts = [(rng.uniform(0, 20), rng.uniform(0, 20)) for _ in range(60)]
    inst = normalize_instance(make_instance(pts, [1.0] * 60))
    eps = EpsilonParam.from_inverse(4)
    order, q = morton_sort(inst, eps)
    assert sorted(order) == list(range(60))
    assert morton_sort(inst, eps)[0] == order
    keys = [q.keys[i] for i in order]
    assert keys == sorted(keys)

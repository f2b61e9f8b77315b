"""Shuffled (bit-interleaved) keys and prefix-agreement arithmetic.

Coordinates are quantized to KEY_BITS-bit fixed point over a power-of-two
domain [0, 2^g)^2 chosen just large enough to cover the instance.  Because
the domain side, the eps-grid and every deeper grid are all powers of two
anchored at the origin, quantization and the float round-to-grid operation
agree exactly: floor(x * 2^l) on doubles is exact for power-of-two scales.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import KEY_BITS
from .errors import EqualKeys, QuantizationCollision, ResolutionExceeded
from .geom import EpsilonParam, Instance

_B = KEY_BITS


def _spread(v: int) -> int:
    """Insert a zero bit above every bit of a 31-bit value."""
    v &= 0x7FFFFFFF
    v = (v | (v << 16)) & 0x0000FFFF0000FFFF
    v = (v | (v << 8)) & 0x00FF00FF00FF00FF
    v = (v | (v << 4)) & 0x0F0F0F0F0F0F0F0F
    v = (v | (v << 2)) & 0x3333333333333333
    v = (v | (v << 1)) & 0x5555555555555555
    return v


def shuffle(x: int, y: int) -> int:
    """Interleave x over y: bit i of x lands at 2i+1, bit i of y at 2i."""
    return (_spread(x) << 1) | _spread(y)


def agree(x_key: int, y_key: int, l_base: int) -> int:
    """Depth, relative to the grid l_base bit-pairs below the key domain, of the
    smallest quadtree square containing both keys.

    Equals (shared leading bit pairs) - l_base; negative when the keys part
    above the base grid.
    """
    if x_key == y_key:
        raise EqualKeys("agree() requires distinct keys")
    shared_pairs = (2 * _B - (x_key ^ y_key).bit_length()) // 2
    return shared_pairs - l_base


def round_to_grid(v: float, l: int) -> float:
    """Snap v down to a multiple of 2^-l (exact for power-of-two scales)."""
    scale = math.ldexp(1.0, l)
    return math.floor(v * scale) / scale


@dataclass(frozen=True)
class Quantization:
    """Fixed-point frame shared by the Morton sort and the quadtree oracle."""

    g: int  # domain side is 2^g in normalized units
    qx: np.ndarray  # (n,) int64
    qy: np.ndarray
    keys: list  # python ints, 2*B bits


def pair_level_of_eps(q: Quantization, eps: EpsilonParam) -> int:
    """Bit-pair index of the eps-grid within the quantized key domain."""
    return eps.l_base + q.g


def quantize(inst: Instance, eps: EpsilonParam) -> Quantization:
    """Quantize normalized coordinates over the smallest covering power-of-two
    domain no smaller than one eps-cell."""
    cmax = float(inst.points.max(initial=0.0))
    if cmax <= 0.0:
        g = -eps.l_base
    else:
        # smallest g with 2^g > cmax (frexp exponent gives exactly that)
        g = math.frexp(cmax)[1]
        g = max(g, -eps.l_base)
    if eps.l_base + g > _B:
        raise ResolutionExceeded(
            f"point spread 2^{g} too large for {_B}-bit keys at eps=1/{eps.inv_eps}"
        )
    scale = math.ldexp(1.0, _B - g)  # exact power-of-two factor
    qx = np.floor(inst.points[:, 0] * scale).astype(np.int64)
    qy = np.floor(inst.points[:, 1] * scale).astype(np.int64)
    keys = [shuffle(int(a), int(b)) for a, b in zip(qx, qy)]
    return Quantization(g=g, qx=qx, qy=qy, keys=keys)


def morton_sort(inst: Instance, eps: EpsilonParam) -> tuple[list, Quantization]:
    """Indices of inst ordered by increasing shuffled key.

    Raises QuantizationCollision when two points share a key (distinct points
    closer than the key resolution).
    """
    q = quantize(inst, eps)
    order = sorted(range(inst.n), key=lambda i: q.keys[i])
    for a, b in zip(order, order[1:]):
        if q.keys[a] == q.keys[b]:
            raise QuantizationCollision(f"points {a} and {b} share a Morton key")
    return order, q

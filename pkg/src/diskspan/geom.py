"""Core geometric types: instances of disks, epsilon parameters, grid squares.

Coordinates are plain doubles.  Instances are normalized so the largest
radius is 1 and the bounding box's lower-left corner sits at the origin;
every construction in the package assumes that frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateDirection,
    DuplicatePoint,
    FormatError,
    InvalidEpsilon,
    InvalidRadius,
)

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class EpsilonParam:
    """Epsilon with its reciprocal, which must be a power of two."""

    eps: float
    inv_eps: int

    def __post_init__(self):
        if self.inv_eps < 2 or (self.inv_eps & (self.inv_eps - 1)) != 0:
            raise InvalidEpsilon(f"1/eps must be a power of two >= 2, got {self.inv_eps}")
        if self.eps != 1.0 / self.inv_eps:
            raise InvalidEpsilon("eps and inv_eps disagree")

    @classmethod
    def from_inverse(cls, inv_eps: int) -> "EpsilonParam":
        return cls(1.0 / inv_eps, inv_eps)

    @classmethod
    def parse(cls, text: str) -> "EpsilonParam":
        """Parse the CLI form '1/2^m', written out as e.g. '1/8'."""
        parts = text.strip().split("/")
        if len(parts) != 2 or parts[0] != "1":
            raise InvalidEpsilon(f"epsilon must be written as 1/2^m, got {text!r}")
        try:
            inv = int(parts[1])
        except ValueError as exc:
            raise InvalidEpsilon(f"bad epsilon denominator in {text!r}") from exc
        return cls.from_inverse(inv)

    @property
    def l_base(self) -> int:
        """log2 of 1/eps: the pair level of the eps-grid below the unit square."""
        return self.inv_eps.bit_length() - 1


@dataclass(frozen=True)
class Square:
    """Axis-aligned square; membership is half-open on both axes."""

    cx: float
    cy: float
    side: float

    @property
    def corner(self) -> tuple[float, float]:
        return (self.cx - self.side / 2.0, self.cy - self.side / 2.0)

    @classmethod
    def from_corner(cls, x: float, y: float, side: float) -> "Square":
        return cls(x + side / 2.0, y + side / 2.0, side)


def square_contains(sq: Square, p: tuple[float, float]) -> bool:
    h = sq.side / 2.0
    return (sq.cx - h <= p[0] < sq.cx + h) and (sq.cy - h <= p[1] < sq.cy + h)


@dataclass(frozen=True)
class Instance:
    """n disk centers with aligned positive radii."""

    points: np.ndarray  # (n, 2) float64
    radii: np.ndarray  # (n,) float64

    @property
    def n(self) -> int:
        return len(self.radii)

    @property
    def global_stretch(self) -> float:
        """rho = 1 / min radius (meaningful after normalization)."""
        return 1.0 / float(np.min(self.radii))

    @property
    def is_normalized(self) -> bool:
        if self.n == 0:
            return False
        return (
            float(np.max(self.radii)) == 1.0
            and float(np.min(self.points[:, 0])) == 0.0
            and float(np.min(self.points[:, 1])) == 0.0
        )

    def validate(self) -> None:
        if self.n < 1:
            raise FormatError("instance must contain at least one point")
        if np.any(self.radii <= 0.0) or not np.all(np.isfinite(self.radii)):
            bad = int(np.argmin(self.radii))
            raise InvalidRadius(f"radius of point {bad} is not positive and finite")
        if not np.all(np.isfinite(self.points)):
            raise FormatError("non-finite coordinate")
        order = np.lexsort((self.points[:, 1], self.points[:, 0]))
        pts = self.points[order]
        same = np.all(pts[1:] == pts[:-1], axis=1)
        if np.any(same):
            i = int(np.argmax(same))
            raise DuplicatePoint(
                f"points {order[i]} and {order[i + 1]} coincide at {tuple(pts[i])}"
            )


def make_instance(points, radii) -> Instance:
    inst = Instance(
        np.ascontiguousarray(points, dtype=np.float64).reshape(-1, 2),
        np.ascontiguousarray(radii, dtype=np.float64).reshape(-1),
    )
    if len(inst.points) != len(inst.radii):
        raise FormatError("points and radii counts differ")
    inst.validate()
    return inst


def normalize_instance(raw: Instance) -> Instance:
    """Rescale so max radius is 1, translate bounding box corner to origin."""
    raw.validate()
    rmax = float(np.max(raw.radii))
    pts = raw.points / rmax
    rad = raw.radii / rmax
    pts = pts - pts.min(axis=0)
    return Instance(pts, rad)


def dist2(p, q) -> float:
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return dx * dx + dy * dy


def disks_intersect(i: int, j: int, inst: Instance) -> bool:
    """Closed test: tangent disks are adjacent."""
    rsum = inst.radii[i] + inst.radii[j]
    return dist2(inst.points[i], inst.points[j]) <= rsum * rsum


def cone_index(apex, target, eps: EpsilonParam) -> int:
    """Index of the half-open cone [i*2*pi*eps, (i+1)*2*pi*eps) holding target-apex."""
    dx = target[0] - apex[0]
    dy = target[1] - apex[1]
    if dx == 0.0 and dy == 0.0:
        raise DegenerateDirection("apex equals target")
    theta = math.atan2(dy, dx)
    if theta < 0.0:
        theta += TWO_PI
    idx = int(theta / (TWO_PI * eps.eps))
    return min(idx, eps.inv_eps - 1)


# -- instance text format ----------------------------------------------------
#
# line 1: "2 n"; then n lines "x y r", decimal, space separated.


def load_instance(path) -> Instance:
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise FormatError("empty instance file", line=1)
    head = lines[0].split()
    if len(head) != 2:
        raise FormatError("expected header 'k n'", line=1)
    try:
        k, n = int(head[0]), int(head[1])
    except ValueError as exc:
        raise FormatError(f"bad header {lines[0]!r}", line=1) from exc
    if k != 2:
        raise FormatError(f"only dimension k=2 is supported, got k={k}", line=1)
    if n < 1:
        raise FormatError("instance must contain at least one point", line=1)
    if len(lines) < n + 1:
        raise FormatError(f"expected {n} point lines, found {len(lines) - 1}", line=len(lines))
    pts = np.empty((n, 2), dtype=np.float64)
    rad = np.empty(n, dtype=np.float64)
    for i in range(n):
        fields = lines[i + 1].split()
        if len(fields) != 3:
            raise FormatError("expected 'x y r'", line=i + 2)
        try:
            pts[i, 0] = float(fields[0])
            pts[i, 1] = float(fields[1])
            rad[i] = float(fields[2])
        except ValueError as exc:
            raise FormatError(f"bad number in {lines[i + 1]!r}", line=i + 2) from exc
    inst = Instance(pts, rad)
    inst.validate()
    return inst


def format_instance(inst: Instance) -> str:
    out = [f"2 {inst.n}"]
    for i in range(inst.n):
        out.append(
            f"{inst.points[i, 0]:.17g} {inst.points[i, 1]:.17g} {inst.radii[i]:.17g}"
        )
    return "\n".join(out) + "\n"


def save_instance(inst: Instance, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(format_instance(inst))

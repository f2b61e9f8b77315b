import math
import random

import pytest

from diskspan.geom import make_instance, normalize_instance


def random_unit_instance(n, seed, side=None):
    """Uniform unit-disk instance with constant density (side ~ 1.5*sqrt(n))."""
    rng = random.Random(seed)
    if side is None:
        side = 1.5 * (n ** 0.5)
    pts = set()
    while len(pts) < n:
        pts.add((rng.uniform(0.0, side), rng.uniform(0.0, side)))
    pts = sorted(pts)
    return normalize_instance(make_instance(pts, [1.0] * n))


def random_disk_instance(n, seed, side=None, rmin=2.0 ** -8):
    """Log-uniform radii in [rmin, 1] over a square dense enough to connect."""
    rng = random.Random(seed)
    if side is None:
        side = 0.35 * (n ** 0.5)
    pts = set()
    while len(pts) < n:
        pts.add((rng.uniform(0.0, side), rng.uniform(0.0, side)))
    pts = sorted(pts)
    radii = [math.exp(rng.uniform(math.log(rmin), 0.0)) for _ in range(n)]
    return normalize_instance(make_instance(pts, radii))


@pytest.fixture
def unit_instance_200():
    return random_unit_instance(200, seed=7)

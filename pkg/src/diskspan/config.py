"""Configuration records: stretch-bound constants, oracle caps, separator knobs.

All verification bounds live here so tests and CLI share one source of truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

# Bits per coordinate in the fixed-point Morton quantization.  Keys use 2*B
# bits and fit comfortably in a Python int; 31 bits per axis keeps collisions
# astronomically unlikely at desk scale while leaving exact double arithmetic.
KEY_BITS = 31


@dataclass(frozen=True)
class StretchConstants:
    """Constants used to verify spanner stretch.

    c_s bounds the representative displacement inside a square relative to
    the separating distance; from it the unit-disk bound follows as
    c_u = 4*c_s / (1 - 2*c_s*eps), which is only meaningful while the
    denominator stays positive (eps < 1/(2*c_s) ~ 0.177).  For the coarse
    epsilons we build with (>= 1/8) the verification bound is clamped to
    max(1 + c_u*eps, 3); measured stretch is reported alongside and sits far
    below these ceilings in practice.
    """

    c_s: float = 2.0 * math.sqrt(2.0)

    def c_u(self, eps: float) -> float | None:
        denom = 1.0 - 2.0 * self.c_s * eps
        if denom <= 0.0:
            return None
        return 4.0 * self.c_s / denom

    def udg_bound(self, eps: float) -> float:
        cu = self.c_u(eps)
        if eps >= 1.0 / 8.0:
            base = 1.0 + cu * eps if cu is not None else float("-inf")
            return max(base, 3.0)
        if cu is None:
            return 3.0
        return 1.0 + cu * eps

    def dg_bound(self, eps: float) -> float:
        # Disk-graph bound chained from the far-bucket analysis:
        #   B_u = unit bound (above)
        #   B_2 = 1 + (1 + B_u) * c_s * eps   (detour through u' in the root)
        #   B_1 = B_2 * (1 + 2 * c_s * eps)   (probe square displacement)
        #   B_d = B_1 * B_u                   (final substitution)
        # so c_d = (B_d - 1)/eps.  Loose by design; the measured maximum is
        # reported next to it.
        b_u = self.udg_bound(eps)
        b_2 = 1.0 + (1.0 + b_u) * self.c_s * eps
        b_1 = b_2 * (1.0 + 2.0 * self.c_s * eps)
        return b_1 * b_u

    def c_d(self, eps: float) -> float:
        return (self.dg_bound(eps) - 1.0) / eps


@dataclass(frozen=True)
class OracleConfig:
    """Caps for the brute-force oracle; CI and deep local runs differ only here."""

    max_n: int = 5000


@dataclass(frozen=True)
class SeparatorConfig:
    leaf_max: int = 32
    # Crossing budget 8*sqrt(n)*eps^{-3/2} is logged per node, never asserted.
    crossing_budget_factor: float = 8.0


DEFAULT_STRETCH = StretchConstants()
DEFAULT_ORACLE = OracleConfig()
DEFAULT_SEPARATOR = SeparatorConfig()

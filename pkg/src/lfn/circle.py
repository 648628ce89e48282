"""Overlapping-interval approximation to the unit indicator.

A denominator set in [Q, 2Q] spawns one interval of half-width delta around
every reduced fraction d/q, and the normalized union

    I~ = (1/(2 delta L)) sum I_[d/q - delta, d/q + delta],   L = sum phi(q),

approximates the indicator of [0, 1] in L^2.  The distance is computed
EXACTLY: interval endpoints stay rational (delta converts to a binary
rational without rounding) until one global sort, after which the squared
difference of two step functions integrates segment by segment.  Intervals
near 0 and 1 are allowed to stick out; the integral runs over the whole
line, not the circle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

AUDIT_EPSILON = 0.1


def _totient(q: int) -> int:
    return sum(1 for a in range(1, q + 1) if math.gcd(a, q) == 1)


@dataclass(frozen=True)
class JutilaPartition:
    """Denominators, interval half-width, and the reduced-fraction centers."""

    denominators: tuple
    delta: float
    L: int
    intervals: tuple  # (center: Fraction, half_width: float)

    def __post_init__(self):
        if not self.denominators:
            raise ValueError("empty denominator set")
        Q = min(self.denominators)
        if max(self.denominators) > 2 * Q:
            raise ValueError("denominators must fit in [Q, 2Q]")
        if not (1.0 / Q ** 2 - 1e-12 <= self.delta <= 1.0 / Q + 1e-12):
            raise ValueError(
                f"delta = {self.delta} outside [{Q}^-2, {Q}^-1]")
        if self.L != sum(_totient(q) for q in self.denominators):
            raise ValueError("L does not match the totient sum")
        if len(self.intervals) != self.L:
            raise ValueError("interval count differs from L")


def build_denominator_set(Q: int, N: int = 1, a: int = 1, b: int = 1,
                          h: int = 1):
    """All q in [Q, 2Q] with N*a*b | q and gcd(h, q) = gcd(h, N*a*b).

    May legitimately come back empty; partition construction is where
    emptiness becomes an error.
    """
    if math.gcd(a, b) != 1:
        raise ValueError("a and b must be coprime")
    if min(Q, N, a, b, h) < 1:
        raise ValueError("all arguments must be positive")
    base = N * a * b
    target = math.gcd(h, base)
    return tuple(q for q in range(Q, 2 * Q + 1)
                 if q % base == 0 and math.gcd(h, q) == target)


def build_partition(denominators, delta: float) -> JutilaPartition:
    """Intervals of half-width delta around every reduced d/q, d in [1, q]."""
    denominators = tuple(sorted(int(q) for q in denominators))
    centers = []
    for q in denominators:
        for d in range(1, q + 1):
            if math.gcd(d, q) == 1:
                centers.append(Fraction(d, q))
    intervals = tuple((c, delta) for c in centers)
    return JutilaPartition(denominators=denominators, delta=float(delta),
                           L=len(centers), intervals=intervals)


def _breakpoint_sweep(partition: JutilaPartition):
    """Sorted breakpoints and the value of I~ on each open segment,
    everything exact."""
    d = Fraction(partition.delta)  # binary-rational: exact
    height = Fraction(1, 1) / (2 * d * partition.L)
    events = []
    for c, _ in partition.intervals:
        events.append((c - d, height))
        events.append((c + d, -height))
    events.append((Fraction(0), Fraction(0)))
    events.append((Fraction(1), Fraction(0)))
    events.sort(key=lambda e: e[0])
    return events


def l2_error_exact(partition: JutilaPartition) -> float:
    """integral over R of (I_[0,1] - I~)^2, with exact-rational breakpoints."""
    events = _breakpoint_sweep(partition)
    total = Fraction(0)
    level = Fraction(0)
    for (x0, jump), (x1, _) in zip(events, events[1:]):
        level += jump
        if x1 == x0:
            continue
        ind = 1 if (Fraction(0) <= x0 and x1 <= Fraction(1)) else 0
        diff = level - ind
        total += diff * diff * (x1 - x0)
    return float(total)


def tilde_mass(partition: JutilaPartition) -> float:
    """integral of I~ alone; 1 by construction, integrated anyway."""
    events = _breakpoint_sweep(partition)
    total = Fraction(0)
    level = Fraction(0)
    for (x0, jump), (x1, _) in zip(events, events[1:]):
        level += jump
        total += level * (x1 - x0)
    return float(total)


def jutila_bound_audit(Qs, delta_rule=None, constraints=((1, 1, 1, 1),)) -> dict:
    """sup of l2_error / (delta^{-1} L^{-2} Q^{2+eps}) over the grid.

    delta_rule maps Q to the half-width (default Q^{-3/2}); constraints are
    (N, a, b, h) tuples fed to the denominator-set builder.
    """
    if delta_rule is None:
        delta_rule = lambda Q: Q ** -1.5
    eps = AUDIT_EPSILON
    cells = []
    for Q in Qs:
        for (N, a, b, h) in constraints:
            dens = build_denominator_set(Q, N, a, b, h)
            if not dens:
                raise ValueError(
                    f"empty denominator set at Q={Q}, constraint {(N, a, b, h)}")
            delta = float(delta_rule(Q))
            part = build_partition(dens, delta)
            err = l2_error_exact(part)
            bound = (1.0 / delta) * part.L ** -2 * Q ** (2 + eps)
            cells.append({"Q": Q, "constraint": (N, a, b, h),
                          "delta": delta, "L": part.L,
                          "l2_error": err, "ratio": err / bound})
    return {"epsilon": eps, "cells": cells,
            "fitted_constant": max(c["ratio"] for c in cells)}


def jacobsthal_gap(q: int) -> int:
    """Largest cyclic gap between consecutive integers coprime to q."""
    if q < 1:
        raise ValueError("modulus must be positive")
    residues = [a for a in range(1, q + 1) if math.gcd(a, q) == 1]
    gaps = [b - a for a, b in zip(residues, residues[1:])]
    gaps.append(residues[0] + q - residues[-1])
    return max(gaps)


def tilde_values(partition: JutilaPartition, alphas) -> np.ndarray:
    """I~ sampled at points, vectorized; for Monte-Carlo cross-checks."""
    alphas = np.asarray(alphas, dtype=float)
    centers = np.sort(np.asarray([float(c) for c, _ in partition.intervals]))
    d = partition.delta
    hi = np.searchsorted(centers, alphas + d, side="left")
    lo = np.searchsorted(centers, alphas - d, side="right")
    return (hi - lo) / (2 * d * partition.L)

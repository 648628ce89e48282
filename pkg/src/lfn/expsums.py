"""Finite exponential sums over residue classes.

Kloosterman and twisted Kloosterman sums, Ramanujan sums, Gauss sums, and
Wilton-type coefficient sums, with exhaustive audits of the square-root
cancellation bound.  Single sums accumulate integer multiplicities per
residue class and touch floating point once, at the final dot against the
root-of-unity table; the all-pairs audits instead factor the sum matrix
through two DFT-style matrices, where the q-term accumulation error (under
1e-12 for every admissible q) is negligible against bounds of size sqrt(q).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .repdata import CoefficientStream, DirichletCharacter, characters_mod

_TWO_PI = 2.0 * math.pi

AUDIT_Q_LIMIT = 500
CHARACTER_AUDIT_Q_LIMIT = 50


@dataclass(frozen=True)
class ExpSumQuery:
    """One twisted-sum request: sum* chi(d) e_q(d*m + inv(d)*n)."""

    m: int
    n: int
    q: int
    character: DirichletCharacter | None = None

    def __post_init__(self):
        if self.q < 1:
            raise ValueError("modulus must be positive")
        if self.character is not None and self.q % self.character.modulus:
            raise ValueError(
                f"character modulus {self.character.modulus} does not divide q={self.q}")


@lru_cache(maxsize=256)
def _roots(q: int) -> np.ndarray:
    return np.exp(2j * math.pi * np.arange(q) / q)


@lru_cache(maxsize=256)
def _reduced_residues(q: int):
    ds = tuple(d for d in range(1, q + 1) if math.gcd(d, q) == 1)
    dbars = tuple(pow(d, -1, q) for d in ds)
    return ds, dbars


def kloosterman(m: int, n: int, q: int) -> complex:
    """S(m, n; q) = sum over d with gcd(d,q)=1 of e_q(d m + inv(d) n).

    Terms are tallied as integer counts per residue class of the exponent,
    so the only rounding is the final pairing with the q-th roots of unity.
    """
    if q < 1:
        raise ValueError("modulus must be positive")
    ds, dbars = _reduced_residues(q)
    counts = np.zeros(q, dtype=np.int64)
    for d, dbar in zip(ds, dbars):
        counts[(d * m + dbar * n) % q] += 1
    return complex(counts @ _roots(q))


def twisted_kloosterman(query: ExpSumQuery) -> complex:
    """sum* chi(d) e_q(d m + inv(d) n); chi evaluated mod its own modulus."""
    chi = query.character
    if chi is None or chi.is_principal and chi.modulus == 1:
        return kloosterman(query.m, query.n, query.q)
    q = query.q
    ds, dbars = _reduced_residues(q)
    weights = np.zeros(q, dtype=complex)
    for d, dbar in zip(ds, dbars):
        weights[(d * query.m + dbar * query.n) % q] += chi(d)
    return complex(weights @ _roots(q))


def ramanujan_sum(q: int, h: int) -> int:
    """c_q(h) = S(h, 0; q), an exact integer (sum of e_q(d h), d reduced)."""
    v = kloosterman(h, 0, q)
    r = round(v.real)
    if abs(v - r) > 1e-6:
        raise ArithmeticError(f"c_{q}({h}) = {v} did not round to an integer")
    return int(r)


def gauss_sum(chi: DirichletCharacter) -> complex:
    """sum over a mod q of chi(a) e_q(a)."""
    q = chi.modulus
    return complex(np.asarray([chi(a) for a in range(q)]) @ _roots(q))


def _sum_matrix(q: int, chi_values=None) -> np.ndarray:
    """S[m, n] for all residues m, n mod q at once, via
    S = A^T B with A[d, m] = w(d) e_q(d m), B[d, n] = e_q(inv(d) n)."""
    ds, dbars = _reduced_residues(q)
    grid = np.arange(q)
    A = np.exp(2j * math.pi / q * np.outer(ds, grid))
    B = np.exp(2j * math.pi / q * np.outer(dbars, grid))
    if chi_values is not None:
        A = A * np.asarray([chi_values[d % q] for d in ds])[:, None]
    return A.T @ B


def _divisor_count(q: int) -> int:
    return sum(1 for d in range(1, q + 1) if q % d == 0)


def weil_bound_audit(q_max: int, with_characters: bool = False) -> dict:
    """Exhaustive check of |S_chi(m,n;q)| <= gcd(m,n,q)^{1/2} q^{1/2} tau(q).

    Covers every modulus 2 <= q <= q_max and every residue pair; characters
    up to modulus 50 when requested.  The modulus-1 sum is excluded: it is
    identically 1 and saturates the bound exactly.  Returns the maximal
    ratio attained and its witness; a violation flips `passes` rather than
    raising, so a genuine counterexample would be reported, not hidden.
    """
    if q_max > AUDIT_Q_LIMIT:
        raise ValueError(f"audit is exhaustive; q_max capped at {AUDIT_Q_LIMIT}")
    best = {"ratio": 0.0, "q": None, "m": None, "n": None, "character": None}
    grid_cache = {}
    for q in range(2, q_max + 1):
        tau_q = _divisor_count(q)
        g = grid_cache.get(q)
        if g is None:
            r = np.arange(q)
            g = np.gcd(np.gcd.outer(r, r), q)
            grid_cache[q] = g
        bound = np.sqrt(g.astype(float)) * math.sqrt(q) * tau_q
        variants = [(None, None)]
        if with_characters and q <= CHARACTER_AUDIT_Q_LIMIT:
            variants += [(i, chi) for i, chi in enumerate(characters_mod(q))]
        for idx, chi in variants:
            vals = None if chi is None else chi.values
            ratios = np.abs(_sum_matrix(q, vals)) / bound
            k = int(np.argmax(ratios))
            if ratios.flat[k] > best["ratio"]:
                best = {"ratio": float(ratios.flat[k]), "q": q,
                        "m": k // q, "n": k % q, "character": idx}
    return {"q_max": q_max, "with_characters": with_characters,
            "max_ratio": best["ratio"],
            "witness": {k: best[k] for k in ("q", "m", "n", "character")},
            "passes": best["ratio"] <= 1.0}


def wilton_sum(stream: CoefficientStream, alpha: float, M: int) -> complex:
    """sum_{1 <= m <= M} lambda(m) e(alpha m), e(x) = exp(2 pi i x)."""
    if M < 1:
        raise ValueError("M must be positive")
    total = 0j
    for m in range(1, M + 1):
        total += stream.coefficient_at(m) * np.exp(2j * math.pi * alpha * m)
    return complex(total)


def wilton_bound_audit(stream: CoefficientStream, alphas, Ms) -> dict:
    """Empirical sup of |T(M, alpha)| / (N^{1/2} size^{2+eps} M^{1/2+eps}).

    eps = 0.1; N and the archimedean size come from the stream.  The fitted
    constant and the worst (alpha, M) witness are reported.
    """
    eps = 0.1
    alphas = [float(a) for a in alphas]
    Ms = sorted(int(M) for M in Ms)
    if not Ms or Ms[0] < 1:
        raise ValueError("need a nonempty grid of positive lengths")
    M_max = Ms[-1]
    coeffs = np.asarray([stream.coefficient_at(m) for m in range(1, M_max + 1)])
    scale = math.sqrt(stream.level) * stream.archimedean_size ** (2 + eps)
    best = {"ratio": 0.0, "alpha": None, "M": None}
    ms = np.arange(1, M_max + 1)
    for alpha in alphas:
        partial = np.cumsum(coeffs * np.exp(2j * math.pi * alpha * ms))
        for M in Ms:
            ratio = abs(partial[M - 1]) / (scale * M ** (0.5 + eps))
            if ratio > best["ratio"]:
                best = {"ratio": float(ratio), "alpha": float(alpha), "M": M}
    return {"fitted_constant": best["ratio"], "epsilon": eps,
            "witness": {"alpha": best["alpha"], "M": best["M"]},
            "lengths": Ms, "alpha_count": len(alphas)}

"""Gamma-factor data, Dirichlet characters, and coefficient streams.

Everything downstream works in the analytic normalization: functional
equation s <-> 1-s, archimedean factor prod_j pi^((mu_j - s)/2) *
Gamma((s - mu_j)/2), and coefficients lambda(n) with lambda(1) = 1.
The classes here hold that data and validate its structural invariants;
they do not evaluate anything analytic themselves.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from .cachefile import read_cache_file

RAMANUJAN_LIMIT_CAP = 10 ** 6

STREAM_KINDS = ("zeta", "dirichlet", "holomorphic_cusp", "maass_cusp")


# ---------------------------------------------------------------------------
# gamma-factor data


@dataclass(frozen=True)
class GammaFactorData:
    """Archimedean parameters (mu_1..mu_{m*d}), conductor, and root number.

    kappa=None marks a stream whose root number is unknown; consumers that
    need a functional equation must reject such data explicitly.
    """

    m: int
    d: int
    mu: tuple
    conductor: int
    kappa: complex | None = None

    def __post_init__(self):
        if self.m < 1 or self.d < 1:
            raise ValueError("m and d must be positive integers")
        mu = tuple(complex(z) for z in self.mu)
        object.__setattr__(self, "mu", mu)
        if len(mu) != self.m * self.d:
            raise ValueError(
                f"expected {self.m * self.d} archimedean parameters, got {len(mu)}")
        if not (isinstance(self.conductor, int) and self.conductor >= 1):
            raise ValueError("conductor must be a positive integer")
        if self.kappa is not None:
            kappa = complex(self.kappa)
            if abs(abs(kappa) - 1.0) > 1e-12:
                raise ValueError(f"|kappa| = {abs(kappa)} is not 1")
            object.__setattr__(self, "kappa", kappa)

    @property
    def degree(self) -> int:
        return self.m * self.d

    def dual(self) -> "GammaFactorData":
        kappa = None if self.kappa is None else self.kappa.conjugate()
        return GammaFactorData(self.m, self.d,
                               tuple(z.conjugate() for z in self.mu),
                               self.conductor, kappa)


def analytic_conductor(gamma: GammaFactorData, s: complex) -> float:
    prod = 1.0
    for mu in gamma.mu:
        prod *= abs(s - mu)
    return gamma.conductor / (2.0 * math.pi) ** gamma.degree * prod


def eta_min(gamma: GammaFactorData) -> float:
    """Distance from the central point to the nearest archimedean pole line."""
    return min(abs(0.5 - mu) for mu in gamma.mu)


def validate_langlands_window(gamma: GammaFactorData) -> dict:
    bound = 0.5 - 1.0 / (gamma.m ** 2 + 1)
    violators = [(j, mu) for j, mu in enumerate(gamma.mu)
                 if mu.real > bound + 1e-12]
    return {"passes": not violators, "bound": bound, "violators": violators}


def archimedean_size_of(gamma: GammaFactorData) -> float:
    """max_j |1/2 - mu_j|, floored at 1.

    For a spectral-parameter-r Maass form this is |1/2 + ir|; the floor keeps
    the size meaningful for degree-1 data where the raw max is 1/2.
    """
    return max(1.0, max(abs(0.5 - mu) for mu in gamma.mu))


# ---------------------------------------------------------------------------
# Dirichlet characters


def _factorize(q: int) -> list:
    out = []
    n = q
    p = 2
    while p * p <= n:
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out.append((p, e))
        p += 1
    if n > 1:
        out.append((n, 1))
    return out


def _primitive_root(pe: int, p: int) -> int:
    phi = pe - pe // p
    # factor phi once, then test candidates
    fac = [f for f, _ in _factorize(phi)]
    for g in range(2, pe):
        if math.gcd(g, pe) != 1:
            continue
        if all(pow(g, phi // f, pe) != 1 for f in fac):
            return g
    raise RuntimeError(f"no primitive root mod {pe}")  # unreachable for p odd


@lru_cache(maxsize=256)
def _unit_group(q: int):
    """Generators, their orders, and discrete logs for (Z/q)^*.

    Returns (orders, dlog) where dlog maps each residue coprime to q to its
    exponent tuple relative to the CRT generators.
    """
    if q == 1:
        return (), {0: ()}
    gens = []      # (modulus_component, generator, order)
    for p, e in _factorize(q):
        pe = p ** e
        if p == 2:
            if e == 1:
                continue
            if e == 2:
                gens.append((pe, 3, 2))
            else:
                gens.append((pe, pe - 1, 2))
                gens.append((pe, 5, 2 ** (e - 2)))
        else:
            gens.append((pe, _primitive_root(pe, p), pe - pe // p))
    # discrete log per component, by stepping the generator
    comp_logs = []
    for pe, g, order in gens:
        table = {}
        x = 1
        for k in range(order):
            # 2^e with e >= 3 needs the sign generator handled jointly below
            table.setdefault(x, k)
            x = x * g % pe
        comp_logs.append((pe, g, order, table))
    orders = tuple(order for _, _, order in gens)
    dlog = {}
    for r in range(1, q + 1):
        if math.gcd(r, q) != 1:
            continue
        expo = []
        idx = 0
        for p, e in _factorize(q):
            pe = p ** e
            rp = r % pe
            if p == 2 and e >= 3:
                # joint table over <-1> x <5>
                found = None
                y = 1
                for a in range(2):
                    z = y
                    for b in range(2 ** (e - 2)):
                        if z == rp:
                            found = (a, b)
                            break
                        z = z * 5 % pe
                    if found:
                        break
                    y = y * (pe - 1) % pe
                expo.extend(found)
                idx += 2
            elif p == 2 and e <= 2:
                if e == 2:
                    expo.append(comp_logs[idx][3][rp])
                    idx += 1
            else:
                expo.append(comp_logs[idx][3][rp])
                idx += 1
        dlog[r % q] = tuple(expo)
    return orders, dlog


@dataclass(frozen=True)
class DirichletCharacter:
    """Character mod q, stored as its full value table on 0..q-1."""

    modulus: int
    values: tuple
    primitive_flag: bool
    parity: int  # chi(-1)

    def __post_init__(self):
        if self.modulus < 1:
            raise ValueError("modulus must be >= 1")
        if len(self.values) != self.modulus:
            raise ValueError("value table length must equal the modulus")
        if self.parity not in (1, -1):
            raise ValueError("parity must be +1 or -1")

    def __call__(self, n: int) -> complex:
        return self.values[n % self.modulus]

    @property
    def is_principal(self) -> bool:
        return all(v == 0 or abs(v - 1.0) < 1e-12 for v in self.values)

    def conjugate(self) -> "DirichletCharacter":
        return DirichletCharacter(self.modulus,
                                  tuple(v.conjugate() for v in self.values),
                                  self.primitive_flag, self.parity)

    def gauss_sum(self) -> complex:
        q = self.modulus
        return sum(self.values[r] * cmath.exp(2j * cmath.pi * r / q)
                   for r in range(q))


def _char_values(q: int, exponents: tuple) -> tuple:
    orders, dlog = _unit_group(q)
    values = [0j] * q
    if q == 1:
        return (1.0 + 0j,)
    for r, expo in dlog.items():
        angle = sum(c * k / o for c, k, o in zip(exponents, expo, orders))
        v = cmath.exp(2j * cmath.pi * angle)
        # quarter-turn values come out exact; matters for mod-4 style tables
        if abs(v.real - round(v.real)) < 1e-12 and abs(v.imag - round(v.imag)) < 1e-12:
            v = complex(round(v.real), round(v.imag))
        values[r] = v
    return tuple(values)


def _is_primitive(q: int, values: tuple) -> bool:
    """A character mod q is primitive iff it is nontrivial on every
    subgroup {a = 1 mod q/p : gcd(a, q) = 1}, p prime dividing q.
    Checked by direct enumeration; fine for q up to 10^4.
    """
    if q == 1:
        return True
    for p, _ in _factorize(q):
        d = q // p
        induced_ok = True
        for a in range(1, q, d if d > 0 else 1):
            if a % d == 1 % d and math.gcd(a, q) == 1 and abs(values[a % q] - 1.0) > 1e-9:
                induced_ok = False
                break
        if induced_ok:
            return False
    return True


def characters_mod(q: int) -> list:
    """All phi(q) Dirichlet characters mod q."""
    if q < 1:
        raise ValueError("modulus must be >= 1")
    orders, _ = _unit_group(q)
    chars = []
    # iterate exponent tuples in odometer order
    total = 1
    for o in orders:
        total *= o
    for index in range(total):
        expo = []
        rem = index
        for o in orders:
            expo.append(rem % o)
            rem //= o
        values = _char_values(q, tuple(expo))
        parity = 1
        if q > 2:
            v = values[q - 1]
            parity = 1 if abs(v - 1.0) < 1e-9 else -1
        chars.append(DirichletCharacter(q, values, _is_primitive(q, values), parity))
    return chars


def principal_character(q: int) -> DirichletCharacter:
    values = tuple(1.0 + 0j if math.gcd(r if r else q, q) == 1 else 0j
                   for r in range(q))
    if q == 1:
        values = (1.0 + 0j,)
    return DirichletCharacter(q, values, q == 1, 1)


# ---------------------------------------------------------------------------
# coefficient streams


@dataclass
class CoefficientStream:
    """Arithmetic coefficients lambda(n) plus the metadata the analytic
    machinery needs: level, nebentypus, archimedean size, and the stream kind.

    Coefficients come either from a closed-form rule or from a finite table;
    asking past the table raises rather than guessing.
    """

    label: str
    kind: str
    level: int
    archimedean_size: float
    gamma: GammaFactorData | None = None
    nebentypus: DirichletCharacter | None = None
    rule: object = None          # callable n -> complex, or None
    table: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in STREAM_KINDS:
            raise ValueError(f"unknown stream kind {self.kind!r}")
        if self.level < 1:
            raise ValueError("level must be >= 1")
        if self.kind != "maass_cusp":
            one = self.coefficient_at(1)
            if abs(one - 1.0) > 1e-9:
                raise ValueError(f"lambda(1) = {one}, expected 1")

    def coefficient_at(self, n: int) -> complex:
        if n == 0:
            raise ValueError("coefficients are indexed by nonzero integers")
        if n < 0 and self.kind != "maass_cusp":
            raise ValueError(f"{self.kind} streams have no negative-index coefficients")
        if self.rule is not None:
            return complex(self.rule(n))
        try:
            return complex(self.table[n])
        except KeyError:
            raise ValueError(
                f"stream {self.label!r} has no coefficient at n={n}; "
                f"table covers {len(self.table)} entries") from None


def zeta_stream() -> CoefficientStream:
    gamma = GammaFactorData(1, 1, (0.0,), 1, 1.0)
    return CoefficientStream(label="zeta", kind="zeta", level=1,
                             archimedean_size=archimedean_size_of(gamma),
                             gamma=gamma, rule=lambda n: 1.0)


def dirichlet_stream(chi: DirichletCharacter, odd_shift: float = -1.0) -> CoefficientStream:
    """Stream of chi(n) with the gamma data of its completed L-function.

    Only a primitive chi carries usable gamma data: kappa is the normalized
    Gauss sum tau(chi)/(i^a sqrt(q)), a = 0 for even and 1 for odd chi, and
    the archimedean parameter is 0 (even) or odd_shift (odd).  Non-primitive
    characters still give a stream (raw sums are fine) but gamma is None.
    """
    q = chi.modulus
    if q == 1:
        return zeta_stream()
    gamma = None
    if chi.primitive_flag:
        if chi.parity == 1:
            mu, a = 0.0, 0
        else:
            mu, a = odd_shift, 1
        kappa = chi.gauss_sum() / (1j ** a * math.sqrt(q))
        if abs(abs(kappa) - 1.0) > 1e-9:
            raise RuntimeError(f"Gauss sum of claimed-primitive character "
                               f"mod {q} has |tau| != sqrt(q)")
        kappa /= abs(kappa)
        gamma = GammaFactorData(1, 1, (mu,), q, kappa)
    size = max(1.0, abs(0.5 - (odd_shift if chi.parity == -1 else 0.0)))
    return CoefficientStream(label=f"dirichlet q={q}", kind="dirichlet",
                             level=q, archimedean_size=size, gamma=gamma,
                             nebentypus=chi, rule=chi)


@lru_cache(maxsize=8)
def _tau_table(limit: int) -> tuple:
    """Exact tau(n) for 1 <= n <= limit.

    Delta = q prod (1-q^n)^24 = q * J^8 with J = sum_k (-1)^k (2k+1)
    q^{k(k+1)/2} (Jacobi).  J is sparse (~sqrt(2*limit) terms), so J^8 is
    seven convolutions against a sparse array; exact integers throughout.
    """
    terms = []
    k = 0
    while k * (k + 1) // 2 < limit:
        terms.append((k * (k + 1) // 2, (-1) ** k * (2 * k + 1)))
        k += 1
    acc = np.zeros(limit, dtype=object)
    for off, c in terms:
        acc[off] = c
    for _ in range(7):
        nxt = np.zeros(limit, dtype=object)
        for off, c in terms:
            if off >= limit:
                break
            nxt[off:] += c * acc[:limit - off]
        acc = nxt
    # Delta = q * J^8: tau(n) is the coefficient of q^{n-1} in J^8
    return tuple(int(x) for x in acc)


def ramanujan_tau(n: int, limit: int = 1000) -> int:
    if not 1 <= n <= limit:
        raise ValueError(f"n={n} outside computed range 1..{limit}")
    return _tau_table(limit)[n - 1]


def ramanujan_tau_stream(limit: int = 1000) -> CoefficientStream:
    """Weight-12 level-1 cusp form, lambda(n) = tau(n)/n^{11/2}."""
    if not 1 <= limit <= RAMANUJAN_LIMIT_CAP:
        raise ValueError(f"limit must be in 1..{RAMANUJAN_LIMIT_CAP}")
    table = _tau_table(limit)
    coeffs = {n: table[n - 1] / n ** 5.5 for n in range(1, limit + 1)}
    gamma = GammaFactorData(2, 1, (-5.5, -6.5), 1, 1.0)
    return CoefficientStream(label="ramanujan tau", kind="holomorphic_cusp",
                             level=1, archimedean_size=archimedean_size_of(gamma),
                             gamma=gamma, table=coeffs)


def maass_load(path) -> CoefficientStream:
    """Load a coefficient stream from a cache file (see cachefile module).

    For kind=maass the weight_or_eigenvalue header is the Laplace eigenvalue
    1/4 + r^2; the archimedean parameters become +-ir.  lambda(1) far from 1
    is reported as a warning, not an error: some sources ship arithmetically
    unnormalized data.
    """
    cache = read_cache_file(path)
    kind = cache.header["kind"]
    if kind not in STREAM_KINDS:
        raise ValueError(f"cache has unknown stream kind {kind!r}")
    level = int(cache.header["level"])
    value = float(cache.header["weight_or_eigenvalue"])
    table = {n: complex(re, im) for n, re, im in cache.rows}
    if kind == "maass_cusp":
        if value < 0.25:
            raise ValueError(f"Laplace eigenvalue {value} below 1/4 "
                             "(complementary series not supported)")
        r = math.sqrt(value - 0.25)
        gamma = GammaFactorData(2, 1, (1j * r, -1j * r), level, None)
    elif kind == "holomorphic_cusp":
        k = int(value)
        gamma = GammaFactorData(2, 1, (-(k - 1) / 2, -(k + 1) / 2), level, None)
    else:
        raise ValueError(f"cache loading is for cusp forms, not {kind!r}")
    if 1 in table and abs(table[1] - 1.0) > 1e-9:
        warnings.warn(f"cache {cache.header.get('form', '?')}: lambda(1) = "
                      f"{table[1]}, not 1; downstream identities assume "
                      "lambda(1) = 1", stacklevel=2)
    return CoefficientStream(label=str(cache.header.get("form", "cached form")),
                             kind=kind, level=level,
                             archimedean_size=archimedean_size_of(gamma),
                             gamma=gamma, table=table)


def twist(gamma: GammaFactorData, stream: CoefficientStream, t: float):
    """Twist by n^{-it}: shifts every mu_j by -it, scales kappa by N^{-it},
    and multiplies lambda(n) by n^{-it}.  Conductor is unchanged.
    """
    t = float(t)
    mu = tuple(z - 1j * t for z in gamma.mu)
    kappa = None
    if gamma.kappa is not None:
        kappa = gamma.kappa * cmath.exp(-1j * t * math.log(gamma.conductor))
    new_gamma = GammaFactorData(gamma.m, gamma.d, mu, gamma.conductor, kappa)

    if stream.rule is not None:
        base = stream.rule
        new_rule, new_table = (lambda n: complex(base(n)) * n ** (-1j * t)), {}
    else:
        # negative indices keep |n|^{-it}; only positive-index streams get
        # twisted by the identities we test, so the branch cut never bites
        new_rule = None
        new_table = {n: v * abs(n) ** (-1j * t) for n, v in stream.table.items()}
    size = archimedean_size_of(new_gamma)
    twisted = replace(stream, label=f"{stream.label} * n^(-{t}i)",
                      gamma=new_gamma, archimedean_size=size)
    twisted.rule = new_rule
    twisted.table = new_table
    return new_gamma, twisted


# ---------------------------------------------------------------------------
# audits


def validate_coefficient_growth(stream: CoefficientStream, conductor: float,
                                xs, epsilon: float = 0.1) -> dict:
    """sup over x of sum_{n<=x}|lambda(n)| / (x^{1+eps} C^{eps})."""
    if epsilon <= 0:
        raise ValueError("epsilon must be positive")
    if conductor <= 0:
        raise ValueError("conductor must be positive")
    cond = float(conductor)
    sup, witness = -math.inf, None
    for x in xs:
        x = float(x)
        if x < 1:
            raise ValueError("x grid must start at 1 or later")
        total = sum(abs(stream.coefficient_at(n)) for n in range(1, int(x) + 1))
        ratio = total / (x ** (1 + epsilon) * cond ** epsilon)
        if ratio > sup:
            sup, witness = ratio, x
    if witness is None:
        raise ValueError("empty x grid")
    return {"sup_ratio": sup, "witness_x": witness, "epsilon": epsilon}


def mean_square_audit(stream: CoefficientStream, xs) -> dict:
    """sup over x of sum_{1<=|n|<=x}|lambda(n)|^2 / (x + N*|mu|)."""
    denom_shift = stream.level * stream.archimedean_size
    sup, witness = -math.inf, None
    for x in xs:
        x = float(x)
        total = 0.0
        for n in range(1, int(x) + 1):
            total += abs(stream.coefficient_at(n)) ** 2
            if stream.kind == "maass_cusp":
                try:
                    total += abs(stream.coefficient_at(-n)) ** 2
                except ValueError:
                    pass  # table may be one-sided
        ratio = total / (x + denom_shift)
        if ratio > sup:
            sup, witness = ratio, x
    if witness is None:
        raise ValueError("empty x grid")
    return {"sup_ratio": sup, "witness_x": witness}

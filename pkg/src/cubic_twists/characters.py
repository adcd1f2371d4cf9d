"""Primitive cubic Dirichlet characters.

A character is stored as a table of exponents: ``table[r]`` is ``e`` when
``chi(r) = w**e`` and ``-1`` when ``chi(r) = 0``.  Complex values are produced
only on request, so identities between characters are checked exactly.

Two independent constructions are provided:

* :func:`from_eisenstein` builds ``m -> (m/n)_3`` from a primary, squarefree
  Eisenstein integer without rational prime divisors;
* :func:`brute_force_cubic_characters` builds every order-3 character mod q
  from discrete logarithms on the cyclic factors of ``(Z/qZ)*``.
"""
from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from itertools import product

import numpy as np

from . import eisenstein as eis
from .eisenstein import AdmissibleModulus, EisensteinInt
from .errors import NotAdmissible, NotCoprime

ZERO_FLAG = -1
_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


@dataclass(frozen=True, eq=False)
class CubicCharacter:
    """Dirichlet character of order dividing 3, as an exponent table mod ``modulus``."""

    modulus: int
    table: np.ndarray = field(repr=False)
    source: object = None

    def __post_init__(self):
        t = np.asarray(self.table, dtype=np.int8)
        t.setflags(write=False)
        object.__setattr__(self, "table", t)
        if t.shape != (self.modulus,):
            raise ValueError("table length must equal the modulus")

    # -- evaluation -------------------------------------------------------
    def exponent(self, m):
        return self.table[np.asarray(m) % self.modulus]

    def __call__(self, m):
        e = self.exponent(m)
        out = np.where(e >= 0, _ROOTS[np.maximum(e, 0)], 0)
        return out if np.ndim(out) else complex(out)

    def values(self) -> np.ndarray:
        return self(np.arange(self.modulus))

    # -- structure --------------------------------------------------------
    @cached_property
    def order(self) -> int:
        nz = self.table[self.table >= 0]
        return 3 if np.any(nz != 0) else 1

    @cached_property
    def conductor(self) -> int:
        return conductor_of_table(self.table)

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def conj(self) -> "CubicCharacter":
        t = np.where(self.table >= 0, (-self.table.astype(np.int16)) % 3, ZERO_FLAG)
        src = self.source
        if isinstance(src, AdmissibleModulus):
            src = eis.admissible_from_generator(src.generator.conj())
        return CubicCharacter(self.modulus, t, src)

    def key(self) -> tuple[int, bytes]:
        return self.modulus, self.table.tobytes()

    def __eq__(self, other):
        return isinstance(other, CubicCharacter) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    @property
    def label(self) -> str:
        if isinstance(self.source, AdmissibleModulus):
            g = self.source.generator
            return f"q{self.modulus}:n({g.a},{g.b})"
        return f"q{self.modulus}:{zlib.crc32(self.table.tobytes()):08x}"


def principal(q: int = 1) -> CubicCharacter:
    r = np.arange(q)
    t = np.where(np.gcd(r, q) == 1, 0, ZERO_FLAG)
    return CubicCharacter(q, t, "principal")


def _divisors(q: int) -> list[int]:
    ds = [1]
    for p, e in eis.rational_factor(q):
        ds = [d * p**k for d in ds for k in range(e + 1)]
    return sorted(ds)


def conductor_of_table(table: np.ndarray) -> int:
    """Smallest d | q such that chi(r) = 1 for all units r = 1 mod d."""
    q = len(table)
    for d in _divisors(q):
        if np.all(table[1::d] <= 0):  # exponent 0, or not a unit
            return d
    return q  # pragma: no cover


# ---------------------------------------------------------------------------
# Eisenstein parametrization


@lru_cache(maxsize=4096)
def _prime_symbol_table(pi: EisensteinInt) -> np.ndarray:
    """Exponent table of r -> (r/pi)_3 on residues mod N(pi), pi a split prime."""
    p = pi.norm()
    g = eis.primitive_root(p)
    eg = eis.cubic_symbol(g, pi)
    tab = np.full(p, ZERO_FLAG, dtype=np.int8)
    ks = np.arange(p - 1, dtype=np.int64)
    pw = np.empty(p - 1, dtype=np.int64)
    acc = 1
    for k in range(p - 1):
        pw[k] = acc
        acc = acc * g % p
    tab[pw] = (ks * eg) % 3
    tab.setflags(write=False)
    return tab


def from_eisenstein(n: AdmissibleModulus | EisensteinInt) -> CubicCharacter:
    """The character ``m -> (m/n)_3`` modulo ``N(n)``."""
    if not isinstance(n, AdmissibleModulus):
        try:
            n = eis.admissible_from_generator(n)
        except Exception as exc:
            raise NotAdmissible(str(exc)) from exc
    if not (n.squarefree and n.no_rational_prime_divisor) or n.norm % 3 == 0:
        raise NotAdmissible(f"{n.generator} is not squarefree without rational prime divisors")
    q = n.norm
    if q == 1:
        return CubicCharacter(1, np.zeros(1, dtype=np.int8), n)
    primes = n.primes or tuple(p for p, _ in eis.factor(n.generator)[0])
    r = np.arange(q)
    total = np.zeros(q, dtype=np.int16)
    zero = np.zeros(q, dtype=bool)
    for pi in primes:
        tab = _prime_symbol_table(pi)
        e = tab[r % pi.norm()]
        zero |= e < 0
        total += e
    table = np.where(zero, ZERO_FLAG, total % 3)
    return CubicCharacter(q, table, n)


def enumerate_family(X: int) -> list[CubicCharacter]:
    """All primitive cubic characters of conductor <= X coprime to 3."""
    out = []
    for n in eis.enumerate_admissible(X):
        if n.norm > 1:
            out.append(from_eisenstein(n))
    return out


# ---------------------------------------------------------------------------
# group-theoretic oracle


def _dlog_table(p: int, k: int) -> tuple[np.ndarray, int]:
    """Discrete logs on (Z/p^k)* for odd p; -1 on non-units.  Returns (table, group order)."""
    pk = p**k
    phi = pk // p * (p - 1)
    g = eis.primitive_root(p)
    if k > 1 and pow(g, p - 1, p * p) == 1:
        g += p
    tab = np.full(pk, -1, dtype=np.int64)
    acc = 1
    for j in range(phi):
        tab[acc] = j
        acc = acc * g % pk
    return tab, phi


def brute_force_cubic_characters(q: int) -> list[CubicCharacter]:
    """Every character mod q of exact order 3, via CRT and discrete logarithms."""
    comps = []
    for p, k in eis.rational_factor(q):
        if p == 2:
            continue  # (Z/2^k)* has no element of order 3
        tab, phi = _dlog_table(p, k)
        if phi % 3 == 0:
            comps.append((p**k, tab))
    if not comps:
        return []
    r = np.arange(q)
    unit = np.gcd(r, q) == 1
    logs = [tab[r % pk] for pk, tab in comps]
    out = []
    for ts in product(range(3), repeat=len(comps)):
        if not any(ts):
            continue
        total = np.zeros(q, dtype=np.int64)
        for t, lg in zip(ts, logs):
            total += t * lg
        table = np.where(unit, total % 3, ZERO_FLAG)
        out.append(CubicCharacter(q, table, ("brute", ts)))
    return out


# ---------------------------------------------------------------------------
# Gauss sums and products


@dataclass(frozen=True)
class GaussSum:
    value: complex
    modulus: int


def gauss_sum(chi: CubicCharacter) -> GaussSum:
    """tau(chi) = sum_{r mod q} chi(r) e(r/q)."""
    q = chi.modulus
    r = np.arange(q, dtype=np.int64)
    e = chi.table.astype(np.int64)
    mask = e >= 0
    # phase of w^e e(r/q) is (q e + 3 r) / (3 q); reduce exactly before scaling
    num = (q * e[mask] + 3 * r[mask]) % (3 * q)
    value = np.exp(2j * np.pi * num / (3 * q)).sum()
    return GaussSum(complex(value), q)


def product_character(chi1: CubicCharacter, chi2: CubicCharacter) -> CubicCharacter:
    q1, q2 = chi1.modulus, chi2.modulus
    if math.gcd(q1, q2) != 1:
        raise NotCoprime(f"moduli {q1} and {q2} are not coprime")
    if q1 == 1:
        return chi2
    if q2 == 1:
        return chi1
    r = np.arange(q1 * q2)
    e1 = chi1.table[r % q1].astype(np.int16)
    e2 = chi2.table[r % q2].astype(np.int16)
    table = np.where((e1 < 0) | (e2 < 0), ZERO_FLAG, (e1 + e2) % 3)
    return CubicCharacter(q1 * q2, table, ("product", chi1.label, chi2.label))


def primitive_cubic_characters_mod_prime(p: int) -> list[CubicCharacter]:
    """The two primitive cubic characters modulo a prime p = 1 mod 3."""
    pi = eis.prime_above(p)
    return [from_eisenstein(pi), from_eisenstein(pi.conj())]

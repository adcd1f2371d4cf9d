"""Exact arithmetic in the Eisenstein integers Z[w], w = exp(2 pi i / 3).

Elements are pairs ``(a, b)`` standing for ``a + b*w``; since ``w**2 = -1 - w``
every product stays in this form.  All routines work on Python integers, so
results are exact.

Conventions
-----------
* An element is *primary* when it is congruent to 1 modulo 3, i.e.
  ``a = 1 (mod 3)`` and ``b = 0 (mod 3)``.  Every element of norm prime to 3
  has exactly one primary associate.
* The ramified prime is ``1 - w`` (norm 3).
* Cubic residue symbols are returned as an exponent ``e`` in ``{0, 1, 2}``
  meaning ``w**e``, or ``None`` when the symbol vanishes.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable

import numpy as np

from .errors import NotCoprimeToThree, NotPrimary, RamifiedModulus

OMEGA = complex(-0.5, math.sqrt(3) / 2)


@dataclass(frozen=True, order=True)
class EisensteinInt:
    a: int
    b: int = 0

    @classmethod
    def coerce(cls, z: "EisensteinInt | int") -> "EisensteinInt":
        if isinstance(z, EisensteinInt):
            return z
        return cls(int(z), 0)

    def __add__(self, other):
        o = EisensteinInt.coerce(other)
        return EisensteinInt(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = EisensteinInt.coerce(other)
        return EisensteinInt(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return EisensteinInt.coerce(other) - self

    def __neg__(self):
        return EisensteinInt(-self.a, -self.b)

    def __mul__(self, other):
        o = EisensteinInt.coerce(other)
        a, b, c, d = self.a, self.b, o.a, o.b
        # (a + bw)(c + dw) = ac + (ad + bc)w + bd w^2,  w^2 = -1 - w
        return EisensteinInt(a * c - b * d, a * d + b * c - b * d)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not defined in Z[w]")
        result, base = ONE, self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def conj(self) -> "EisensteinInt":
        return EisensteinInt(self.a - self.b, -self.b)

    def norm(self) -> int:
        return self.a * self.a - self.a * self.b + self.b * self.b

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_unit(self) -> bool:
        return self.norm() == 1

    def __complex__(self) -> complex:
        return self.a + self.b * OMEGA

    def divides(self, other) -> bool:
        o = EisensteinInt.coerce(other)
        n = self.norm()
        if n == 0:
            return o.is_zero()
        num = o * self.conj()
        return num.a % n == 0 and num.b % n == 0

    def exact_div(self, other) -> "EisensteinInt":
        """Return ``self / other``; raises ``ArithmeticError`` if inexact."""
        o = EisensteinInt.coerce(other)
        n = o.norm()
        num = self * o.conj()
        if n == 0 or num.a % n or num.b % n:
            raise ArithmeticError(f"{o} does not divide {self}")
        return EisensteinInt(num.a // n, num.b // n)

    def __mod__(self, other) -> "EisensteinInt":
        """Remainder of nearest-point division; its norm is at most N(other)/3."""
        o = EisensteinInt.coerce(other)
        n = o.norm()
        num = self * o.conj()
        q = EisensteinInt(_round_div(num.a, n), _round_div(num.b, n))
        r = self - q * o
        # nearest lattice point under the hexagonal metric: try neighbours
        best = r
        for u in UNITS:
            cand = r - u * o
            if cand.norm() < best.norm():
                best = cand
        return best

    def __repr__(self) -> str:
        return f"EisensteinInt({self.a}, {self.b})"


def _round_div(x: int, n: int) -> int:
    return (2 * x + n) // (2 * n)


ONE = EisensteinInt(1, 0)
ZERO = EisensteinInt(0, 0)
W = EisensteinInt(0, 1)
W2 = EisensteinInt(-1, -1)
LAMBDA = EisensteinInt(1, -1)  # 1 - w, the ramified prime above 3
UNITS = (ONE, W, W2, -ONE, -W, -W2)


def norm(z: EisensteinInt | int) -> int:
    return EisensteinInt.coerce(z).norm()


def conj(z: EisensteinInt | int) -> EisensteinInt:
    return EisensteinInt.coerce(z).conj()


def is_primary(z: EisensteinInt | int) -> bool:
    z = EisensteinInt.coerce(z)
    return (z.a - 1) % 3 == 0 and z.b % 3 == 0


def primary_associate(z: EisensteinInt | int) -> tuple[EisensteinInt, EisensteinInt]:
    """Return ``(unit, primary)`` with ``primary = unit * z`` and ``primary = 1 mod 3``."""
    z = EisensteinInt.coerce(z)
    if z.norm() % 3 == 0:
        raise NotCoprimeToThree(f"{z} has norm divisible by 3")
    for u in UNITS:
        p = u * z
        if is_primary(p):
            return u, p
    raise AssertionError("no primary associate found")  # pragma: no cover


def egcd(x: EisensteinInt, y: EisensteinInt) -> EisensteinInt:
    """A greatest common divisor (defined up to units)."""
    x, y = EisensteinInt.coerce(x), EisensteinInt.coerce(y)
    while not y.is_zero():
        x, y = y, x % y
    return x


# ---------------------------------------------------------------------------
# rational helpers


@lru_cache(maxsize=None)
def _rational_factor(n: int) -> tuple[tuple[int, int], ...]:
    n = abs(n)
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def rational_factor(n: int) -> list[tuple[int, int]]:
    """Trial-division factorization of a positive integer."""
    return list(_rational_factor(int(n)))


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    sieve[4::2] = False
    for p in range(3, math.isqrt(n) + 1, 2):
        if sieve[p]:
            sieve[p * p :: 2 * p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def primitive_root(p: int) -> int:
    if p == 2:
        return 1
    fs = [q for q, _ in rational_factor(p - 1)]
    for g in range(2, p):
        if all(pow(g, (p - 1) // q, p) != 1 for q in fs):
            return g
    raise ValueError(f"{p} is not prime")  # pragma: no cover


@lru_cache(maxsize=None)
def prime_above(p: int) -> EisensteinInt:
    """The primary prime of norm ``p`` for a rational prime ``p = 1 mod 3``.

    Of the conjugate pair the one with smaller ``(a, b)`` is returned.
    """
    if p % 3 != 1:
        raise ValueError(f"{p} does not split in Z[w]")
    g = 2
    while pow(g, (p - 1) // 3, p) == 1:
        g += 1
    x = pow(g, (p - 1) // 3, p)  # a primitive cube root of unity mod p
    pi = egcd(EisensteinInt(p), EisensteinInt(-x, 1))
    _, pi = primary_associate(pi)
    if pi.norm() != p:  # pragma: no cover
        raise AssertionError("gcd did not isolate a prime")
    return min(pi, pi.conj())


# ---------------------------------------------------------------------------
# factorization


def factor(z: EisensteinInt | int) -> tuple[list[tuple[EisensteinInt, int]], EisensteinInt]:
    """Factor ``z`` into primes.

    Returns ``(factors, unit)`` where ``z = unit * prod(p**e)``.  Primes are
    primary except the ramified prime, which is ``1 - w``.  Factors are sorted
    by ``(norm, a, b)``.
    """
    z = EisensteinInt.coerce(z)
    if z.is_zero():
        raise ValueError("cannot factor 0")
    rest = z
    found: list[tuple[EisensteinInt, int]] = []
    for p, e in rational_factor(z.norm()):
        if p == 3:
            k = 0
            while LAMBDA.divides(rest):
                rest = rest.exact_div(LAMBDA)
                k += 1
            found.append((LAMBDA, k))
        elif p % 3 == 2:
            prime = EisensteinInt(-p)
            rest = rest.exact_div(EisensteinInt(p) ** (e // 2))
            found.append((prime, e // 2))
        else:
            pi = prime_above(p)
            for cand in (pi, pi.conj()):
                k = 0
                while cand.divides(rest):
                    rest = rest.exact_div(cand)
                    k += 1
                if k:
                    found.append((cand, k))
    # the prime -p stands for p; fix the sign through the unit
    for prime, k in found:
        if prime.b == 0 and prime.a < 0 and k % 2:
            rest = -rest
    if not rest.is_unit():  # pragma: no cover
        raise AssertionError(f"factorization of {z} left cofactor {rest}")
    found.sort(key=lambda f: (f[0].norm(), f[0].a, f[0].b))
    return found, rest


def reassemble(factors: Iterable[tuple[EisensteinInt, int]], unit: EisensteinInt) -> EisensteinInt:
    out = unit
    for p, e in factors:
        out = out * p**e
    return out


def mobius_eis(n: EisensteinInt | int) -> int:
    facs, _ = factor(n)
    if any(e > 1 for _, e in facs):
        return 0
    return -1 if len(facs) % 2 else 1


# ---------------------------------------------------------------------------
# cubic residue symbol


def _exp_of_root(value: EisensteinInt, pi: EisensteinInt) -> int:
    for e, root in enumerate((ONE, W, W2)):
        if pi.divides(value - root):
            return e
    raise AssertionError("power residue is not a cube root of unity")  # pragma: no cover


def power_residue_oracle(m: EisensteinInt | int, pi: EisensteinInt) -> int | None:
    """Cubic symbol at a prime by raising ``m`` to ``(N(pi) - 1)/3`` in Z[w]/(pi)."""
    m = EisensteinInt.coerce(m)
    n = pi.norm()
    r = m % pi
    if r.is_zero():
        return None
    acc, base, k = ONE, r, (n - 1) // 3
    while k:
        if k & 1:
            acc = (acc * base) % pi
        base = (base * base) % pi
        k >>= 1
    return _exp_of_root(acc, pi)


@lru_cache(maxsize=None)
def _omega_mod(pi: EisensteinInt) -> int:
    """Integer congruent to w modulo a split prime pi (so that Z[w]/pi = F_p)."""
    p = pi.norm()
    return (-pi.a * pow(pi.b, -1, p)) % p


def _symbol_at_prime(m: EisensteinInt, pi: EisensteinInt) -> int | None:
    p = pi.norm()
    if pi.b != 0:  # split prime: work in F_p
        x = _omega_mod(pi)
        v = (m.a + m.b * x) % p
        if v == 0:
            return None
        t = pow(v, (p - 1) // 3, p)
        return 0 if t == 1 else (1 if t == x else 2)
    q = abs(pi.a)  # inert prime: F_q[w]
    c, d = m.a % q, m.b % q
    if c == 0 and d == 0:
        return None
    acc = (1, 0)
    base = (c, d)
    k = (q * q - 1) // 3
    while k:
        if k & 1:
            acc = _mul_mod(acc, base, q)
        base = _mul_mod(base, base, q)
        k >>= 1
    return {(1, 0): 0, (0, 1): 1, ((q - 1) % q, (q - 1) % q): 2}[acc]


def _mul_mod(x, y, q):
    a, b = x
    c, d = y
    return ((a * c - b * d) % q, (a * d + b * c - b * d) % q)


def _check_modulus(n: EisensteinInt) -> None:
    if n.norm() % 3 == 0:
        raise RamifiedModulus(f"{n} is divisible by 1 - w")
    if not is_primary(n):
        raise NotPrimary(f"{n} is not congruent to 1 mod 3")


def cubic_symbol(m: EisensteinInt | int, n: EisensteinInt) -> int | None:
    """Cubic residue symbol ``(m/n)_3`` as an exponent of w, or ``None`` for 0.

    ``n`` must be primary.  Computed by factoring ``n`` and using the power
    residue criterion at each prime.
    """
    m = EisensteinInt.coerce(m)
    n = EisensteinInt.coerce(n)
    _check_modulus(n)
    total = 0
    for pi, e in factor(n)[0]:
        v = _symbol_at_prime(m, pi)
        if v is None:
            return None
        total += e * v
    return total % 3


def symbol_value(e: int | None) -> complex:
    if e is None:
        return 0j
    return cmath.exp(2j * math.pi * e / 3)


def omega_supplement(n: EisensteinInt) -> int:
    """Exponent of ``(w/n)_3`` for primary ``n``."""
    return ((n.norm() - 1) // 3) % 3


def lambda_supplement(n: EisensteinInt) -> int:
    """Exponent of ``((1 - w)/n)_3`` for primary ``n``."""
    return (2 * ((1 - n.a) // 3)) % 3


def cubic_symbol_reciprocity(m: EisensteinInt | int, n: EisensteinInt) -> int | None:
    """Same value as :func:`cubic_symbol`, computed by a Euclid-style descent
    using cubic reciprocity and the supplementary laws.  No factoring needed."""
    m = EisensteinInt.coerce(m)
    n = EisensteinInt.coerce(n)
    _check_modulus(n)
    total = 0
    while n != ONE:
        r = m % n
        if r.is_zero():
            return None
        k = 0
        while (r.a + r.b) % 3 == 0:  # divisible by 1 - w
            r = r.exact_div(LAMBDA)
            k += 1
        unit, r = primary_associate(r)
        # m = unit^-1 * lambda^k * r ; (-1/n) = 1 so only the w-part of the unit counts
        inv = {ONE: 0, -ONE: 0, W: 2, -W: 2, W2: 1, -W2: 1}[unit]
        total += inv * omega_supplement(n) + k * lambda_supplement(n)
        if r == ONE:
            return total % 3
        m, n = n, r
    return total % 3


def primary_primes(max_norm: int) -> list[EisensteinInt]:
    """All primary primes of norm at most ``max_norm``, sorted by (norm, a, b)."""
    out = []
    for p in primes_up_to(max_norm):
        p = int(p)
        if p % 3 == 1:
            pi = prime_above(p)
            out.extend([pi, pi.conj()])
        elif p % 3 == 2 and p * p <= max_norm:
            out.append(EisensteinInt(-p))
    out.sort(key=lambda z: (z.norm(), z.a, z.b))
    return out


# ---------------------------------------------------------------------------
# admissible moduli


@dataclass(frozen=True)
class AdmissibleModulus:
    generator: EisensteinInt
    norm: int
    squarefree: bool = True
    no_rational_prime_divisor: bool = True
    primes: tuple[EisensteinInt, ...] = ()

    def __post_init__(self):
        if not is_primary(self.generator):
            raise NotPrimary(f"{self.generator} is not primary")


def admissible_from_generator(n: EisensteinInt) -> AdmissibleModulus:
    """Classify a primary generator; flags are computed, not assumed."""
    n = EisensteinInt.coerce(n)
    _check_modulus(n)
    facs, _ = factor(n)
    squarefree = all(e == 1 for _, e in facs)
    no_rational = all(p.b != 0 for p, _ in facs) and not any(
        p.conj() == q for p, _ in facs for q, _ in facs
    )
    return AdmissibleModulus(n, n.norm(), squarefree, no_rational, tuple(p for p, _ in facs))


def _is_admissible_norm(q: int) -> bool:
    return all(e == 1 and p % 3 == 1 for p, e in rational_factor(q))


def enumerate_admissible(X: int) -> list[AdmissibleModulus]:
    """All primary, squarefree n with no rational prime divisor and N(n) <= X.

    Such n are exactly products of one prime from each of several distinct
    conjugate pairs above primes p = 1 mod 3, so the norm is squarefree and
    built from those p; both members of a conjugate pair are listed.
    """
    out = []
    for q in range(1, int(X) + 1):
        if q > 1 and not _is_admissible_norm(q):
            continue
        gens = [(ONE, ())]
        for p, _ in rational_factor(q):
            pi = prime_above(p)
            gens = [(g * c, ps + (c,)) for g, ps in gens for c in (pi, pi.conj())]
        for g, ps in gens:
            out.append(AdmissibleModulus(g, q, True, True, tuple(sorted(ps, key=lambda z: (z.norm(), z.a, z.b)))))
    out.sort(key=lambda m: (m.norm, m.generator.a, m.generator.b))
    return out


def lattice_primary(max_norm: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Arrays ``(a, b, norm)`` of all primary elements with norm <= max_norm.

    Primary elements are ``(3i + 1) + 3j w``; rows are generated per ``j``.
    """
    jmax = int(math.sqrt(4 * max_norm / 27.0)) + 2
    a_parts, b_parts = [], []
    for j in range(-jmax, jmax + 1):
        b = 3 * j
        # a^2 - a b + b^2 <= X  <=>  |a - b/2| <= sqrt(X - 3 b^2 / 4)
        rad = max_norm - 0.75 * b * b
        if rad < 0:
            continue
        r = math.sqrt(rad)
        lo = math.ceil((b / 2 - r - 1) / 3)
        hi = math.floor((b / 2 + r - 1) / 3)
        if hi < lo:
            continue
        a = 3 * np.arange(lo, hi + 1, dtype=np.int64) + 1
        a_parts.append(a)
        b_parts.append(np.full(a.shape, b, dtype=np.int64))
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    nrm = a * a - a * b + b * b
    keep = nrm <= max_norm
    return a[keep], b[keep], nrm[keep]

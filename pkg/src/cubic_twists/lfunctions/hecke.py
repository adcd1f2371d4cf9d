"""Hecke L-functions of the cubic characters psi_m over Q(w).

psi_m sends an ideal coprime to 3 to (m / n)_3, n its primary generator,
and vanishes on ideals sharing a prime with m.  Only the cube-free part of m
matters away from those zeros.  For p != 3 reciprocity gives
(p / n)_3 = (n / p)_3 (split p: the product over the two primes above p),
and (3 / n)_3 = (w / n)_3^2 (lambda / n)_3^2 from 3 = -w^2 lambda^2.

Two evaluators are provided:

* ``smoothed_sum``: sum psi(n) N(n)^-s F1(N(n)/X) over the primary lattice,
  with the polar term subtracted in the principal case;
* ``afe``: the approximate functional equation of the primitive character
  psi* inducing psi_m, a degree 2 L-function with Gamma factor
  Gamma_R(s) Gamma_R(s + 1) and conductor 3 N(f).  Its root number is fitted
  from two splittings at an auxiliary point and must have modulus 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .. import eisenstein as eis
from ..characters import _prime_symbol_table
from ..eisenstein import EisensteinInt
from ..errors import ConvergenceError, NotACube
from ..kernels import ArchimedeanData, KernelChoice
from .afe import AFE_KERNEL, AfeConfig, SLocalData, afe_parts
from .hurwitz import dirichlet_L_oracle, hurwitz_zeta
from .lvalue import LValue

C_OMEGA = math.pi / (3.0 * math.sqrt(3.0))  # class number formula: 2 pi h / (w sqrt|d|)
HECKE_ARCH = ArchimedeanData((0.0, 1.0))  # Gamma_C(s) = Gamma_R(s) Gamma_R(s + 1)
_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)
_TRIVIAL_LOCAL = SLocalData((), (1,), {1: 1.0 + 0j}, {1: 1.0 + 0j})


# ---------------------------------------------------------------------------
# evaluating psi_m on primary elements


@lru_cache(maxsize=256)
def _prime_table(p: int) -> np.ndarray:
    """Exponent of (p / n)_3 indexed by (a mod p, b mod p) for primary n = a + b w, p != 3."""
    a, b = np.meshgrid(np.arange(p), np.arange(p), indexing="ij")
    if p % 3 == 1:
        out = np.zeros((p, p), dtype=np.int64)
        zero = np.zeros((p, p), dtype=bool)
        for pi in (eis.prime_above(p), eis.prime_above(p).conj()):
            x = eis._omega_mod(pi)
            e = _prime_symbol_table(pi)[(a + b * x) % p].astype(np.int64)
            zero |= e < 0
            out += e
        tab = np.where(zero, -1, out % 3)
    else:
        q = EisensteinInt(-p, 0)
        tab = np.empty((p, p), dtype=np.int64)
        for i in range(p):
            for j in range(p):
                e = eis._symbol_at_prime(EisensteinInt(i, j), q)
                tab[i, j] = -1 if e is None else e
    tab.setflags(write=False)
    return tab


def _three_exponent(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exponent of (3 / n)_3 for primary n = a + b w."""
    nrm = a * a - a * b + b * b
    w_sup = ((nrm - 1) // 3) % 3
    l_sup = (2 * ((1 - a) // 3)) % 3
    return (2 * w_sup + 2 * l_sup) % 3


def to_primary(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Primary associates of elements coprime to 3 (vectorized over arrays)."""
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out_a, out_b = a.copy(), b.copy()
    done = np.zeros(a.shape, dtype=bool)
    ua, ub = a, b
    for _ in range(6):
        ok = ~done & ((ua - 1) % 3 == 0) & (ub % 3 == 0)
        out_a[ok], out_b[ok] = ua[ok], ub[ok]
        done |= ok
        ua, ub = ua - ub, ua  # multiply by 1 + w = -w^2, a unit of order 6
    if not done.all():
        raise ValueError("element not coprime to 3 has no primary associate")
    return out_a, out_b


def cube_free_part(m: int) -> int:
    out = 1
    for p, e in eis.rational_factor(abs(int(m))):
        out *= p ** (e % 3)
    return out


@dataclass(frozen=True)
class HeckeCharacter:
    """psi_m together with the data of the primitive character inducing it."""

    m: int
    reduced: int  # cube-free part of |m|
    primes: tuple[int, ...]  # rational primes dividing m
    lambda_exponent: int  # exponent of lambda in the conductor
    conductor_norm: int

    @property
    def principal(self) -> bool:
        return self.reduced == 1

    @property
    def analytic_conductor(self) -> int:
        return 3 * self.conductor_norm

    def exponent(self, a, b, mask_primes: tuple[int, ...] | None = None) -> np.ndarray:
        """Exponent of psi on primary a + b w; -1 where it vanishes.

        ``mask_primes`` are the rational primes whose divisors get value 0
        (default: all primes of m).
        """
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        total = np.zeros(a.shape, dtype=np.int64)
        zero = np.zeros(a.shape, dtype=bool)
        mask_primes = self.primes if mask_primes is None else mask_primes
        for p in mask_primes:
            if p == 3:
                continue  # primary elements are prime to 3
            tab = _prime_table(p)
            zero |= tab[a % p, b % p] < 0
        for p, e in eis.rational_factor(self.reduced):
            if p == 3:
                total += e * _three_exponent(a, b)
            else:
                total += e * np.maximum(_prime_table(p)[a % p, b % p], 0)
        return np.where(zero, -1, total % 3)

    def value_primitive(self, gen: EisensteinInt) -> int | None:
        """Exponent of psi* at the prime ideal (gen), for gen not dividing the conductor."""
        if gen.norm() % 3 == 0:
            if self.lambda_exponent > 0:
                return None
            r = self._tame_radical()
            alt = EisensteinInt(1, -1) + EisensteinInt(r, 0)  # lambda + r, = lambda mod f
            a, b = to_primary(np.array([alt.a]), np.array([alt.b]))
        else:
            a, b = to_primary(np.array([gen.a]), np.array([gen.b]))
        e = int(self.exponent(a, b, self._tame_primes())[0])
        return None if e < 0 else e

    def _tame_primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in eis.rational_factor(self.reduced) if p != 3)

    def _tame_radical(self) -> int:
        return math.prod(self._tame_primes())


@lru_cache(maxsize=1024)
def hecke_character(m: int) -> HeckeCharacter:
    if m == 0:
        raise ValueError("psi_m needs m != 0")
    mm = abs(int(m))
    reduced = cube_free_part(mm)
    primes = tuple(p for p, _ in eis.rational_factor(mm))
    tame = tuple(p for p, _ in eis.rational_factor(reduced) if p != 3)
    r = math.prod(tame)
    provisional = HeckeCharacter(mm, reduced, primes, 0, 1)
    e_lam = _lambda_conductor_exponent(provisional, r) if reduced > 1 else 0
    return HeckeCharacter(mm, reduced, primes, e_lam, r * r * 3**e_lam)


def _lambda_conductor_exponent(chi: HeckeCharacter, r: int) -> int:
    """Smallest e with psi trivial on every alpha = 1 mod r lambda^e prime to 3."""
    x, y = np.meshgrid(np.arange(27), np.arange(27), indexing="ij")
    x, y = x.ravel(), y.ravel()
    lam_e = EisensteinInt(1, 0)
    for e in range(0, 8):
        # alpha = 1 + r lambda^e (x + y w)
        c = EisensteinInt(r, 0) * lam_e
        al_a = 1 + c.a * x - c.b * y
        al_b = c.a * y + c.b * x - c.b * y
        unit = (al_a * al_a - al_a * al_b + al_b * al_b) % 3 != 0
        pa, pb = to_primary(al_a[unit], al_b[unit])
        if np.all(chi.exponent(pa, pb, chi._tame_primes()) == 0):
            return e
        lam_e = lam_e * eis.LAMBDA
    raise AssertionError("conductor exponent at lambda exceeds 7")  # pragma: no cover


# ---------------------------------------------------------------------------
# Dirichlet coefficients


def _bincount_complex(idx: np.ndarray, vals: np.ndarray, size: int) -> np.ndarray:
    re = np.bincount(idx, weights=vals.real, minlength=size)
    im = np.bincount(idx, weights=vals.imag, minlength=size)
    return re[:size] + 1j * im[:size]


def primitive_coefficients(chi: HeckeCharacter, N: int) -> np.ndarray:
    """a(n) = sum_{N(a) = n} psi*(a) for n <= N (index 0 unused)."""
    a, b, nrm = eis.lattice_primary(N)
    e = chi.exponent(a, b, chi._tame_primes())
    keep = e >= 0
    vals = _ROOTS[e[keep]]
    coeff = _bincount_complex(nrm[keep], vals, N + 1)
    lam = chi.value_primitive(eis.LAMBDA)
    if lam is not None:
        # ideals lambda^k n: convolve with the geometric series in psi*(lambda)
        out = coeff.copy()
        z, k = _ROOTS[lam], 1
        while 3**k <= N:
            idx = np.arange(3**k, N + 1, 3**k)
            out[idx] += z**k * coeff[idx // 3**k]
            k += 1
        coeff = out
    coeff[0] = 0
    return coeff


def _euler_correction(chi: HeckeCharacter, s: complex) -> complex:
    """prod over primes p | 3m, p not in the conductor, of (1 - psi*(p) N(p)^-s)."""
    out = 1.0 + 0j
    for p in sorted(set(chi.primes) | {3}):
        if p == 3:
            gens = [eis.LAMBDA]
        elif p % 3 == 1:
            pi = eis.prime_above(p)
            gens = [pi, pi.conj()]
        else:
            gens = [EisensteinInt(-p, 0)]
        for g in gens:
            if p in chi._tame_primes():
                continue  # ramified: psi* vanishes there
            e = chi.value_primitive(g)
            if e is not None:
                out *= 1.0 - _ROOTS[e] * g.norm() ** (-complex(s))
    return complex(out)


# ---------------------------------------------------------------------------
# smoothed sums


def _smoothed_partial(chi: HeckeCharacter, s: complex, X: float, kernel: KernelChoice, tol: float = 1e-16):
    """sum over primary n of psi_m(n) N(n)^-s F1(N(n)/X), and its term count."""
    from .afe import _F1_cutoff

    Nmax = X * _F1_cutoff(kernel, tol)
    a, b, nrm = eis.lattice_primary(Nmax)
    e = chi.exponent(a, b)
    keep = e >= 0
    n = nrm[keep].astype(float)
    vals = _ROOTS[e[keep]] * np.exp(-complex(s) * np.log(n)) * kernel.F1_exact(n / X)
    return complex(vals.sum()), int(keep.sum())


def partial_residue(m: int) -> float:
    """Residue at s = 1 of sum over primary n coprime to m of N(n)^-s, for a cube m."""
    return float(residue_of_partial_hecke(1, 1, m).real)


def hecke_smoothed(s: complex, m: int, X: float | None = None, kernel: KernelChoice = AFE_KERNEL,
                   rtol: float = 1e-9) -> LValue:
    """Smoothed-sum evaluation of L(s, psi_m) with a two-scale consistency check."""
    s = complex(s)
    chi = hecke_character(m)
    if X is None:
        # the principal case has a tiny conductor, so a longer sum is cheap and
        # keeps the polar subtraction accurate left of Re s = 1
        X = (2000.0 if chi.principal else 200.0) * chi.analytic_conductor * (1 + abs(s.imag))
    results = []
    for scale in (1.0, 2.0):
        Xs = X * scale
        val, terms = _smoothed_partial(chi, s, Xs, kernel)
        if chi.principal:
            if s == 1:
                raise ConvergenceError("the principal Hecke L-function has a pole at s = 1", m)
            res = partial_residue(m)
            val -= complex(kernel.k(1 - s)) * Xs ** (1 - s) * res / (1 - s)
        results.append((val, terms))
    (v1, t1), (v2, t2) = results
    diff = abs(v1 - v2)
    if diff > rtol * max(abs(v2), 1e-300) and diff > 1e-13:
        raise ConvergenceError(f"smoothed sums at X and 2X differ by {diff:.3g}", m)
    return LValue(v2, diff, t1 + t2, "smoothed_sum", {"X": 2 * X, "conductor": chi.analytic_conductor})


# ---------------------------------------------------------------------------
# approximate functional equation


_W_CACHE: dict = {}
_W_POINT = 0.75 + 0.3j


def _afe_pieces(chi: HeckeCharacter, s: complex, cfg: AfeConfig):
    Q = float(chi.analytic_conductor)
    state = {}

    def bound(N):
        state["a"] = primitive_coefficients(chi, N)

    parts = afe_parts(s, HECKE_ARCH, Q, lambda n: state["a"][n], lambda n: np.conj(state["a"][n]),
                      _TRIVIAL_LOCAL, cfg, bound)
    return parts, Q


def hecke_root_number(m: int, cfg: AfeConfig = AfeConfig()) -> complex:
    """W(psi*) fitted from two splittings of the AFE at an auxiliary point."""
    chi = hecke_character(m)
    key = (chi.reduced, cfg.kernel, cfg.tol)
    if key in _W_CACHE:
        return _W_CACHE[key]
    p1, Q = _afe_pieces(chi, _W_POINT, AfeConfig(kernel=cfg.kernel, tol=cfg.tol, balance=1.0))
    p2, _ = _afe_pieces(chi, _W_POINT, AfeConfig(kernel=cfg.kernel, tol=cfg.tol, balance=5.0))
    scale = Q ** (0.5 - _W_POINT)
    W = (p1.first - p2.first) / (scale * (p2.dual - p1.dual))
    if abs(abs(W) - 1.0) > 1e-7:
        raise ConvergenceError(f"fitted root number has modulus {abs(W):.10f}", m)
    _W_CACHE[key] = W
    return W


def hecke_afe(s: complex, m: int, cfg: AfeConfig = AfeConfig(), rtol: float = 1e-8) -> LValue:
    s = complex(s)
    chi = hecke_character(m)
    if chi.principal:
        raise ValueError("use the smoothed sum for principal psi_m")
    W = hecke_root_number(m, cfg)
    vals = []
    terms = 0
    est = 0.0
    for bal in (1.0, 2.0):
        parts, Q = _afe_pieces(chi, s, AfeConfig(kernel=cfg.kernel, tol=cfg.tol, balance=bal))
        eps = W * Q ** (0.5 - s)
        vals.append(parts.first + eps * parts.dual)
        terms += parts.terms
        est = max(est, parts.error_estimate(abs(eps), cfg.tol))
    corr = _euler_correction(chi, s)
    v1, v2 = (v * corr for v in vals)
    diff = abs(v1 - v2)
    if diff > rtol * max(abs(v1), 1e-12) and diff > 1e-12:
        raise ConvergenceError(f"AFE splittings disagree by {diff:.3g}", m)
    return LValue(v1, max(est, diff) * max(1.0, abs(corr)), terms, "afe",
                  {"root_number": W, "conductor": chi.analytic_conductor, "euler_correction": corr})


def hecke_L(s: complex, m: int, method: str = "auto") -> LValue:
    """L(s, psi_m) = sum over primary n of (m / n)_3 N(n)^-s.

    ``auto`` picks the smoothed sum for principal psi_m and the AFE otherwise.
    """
    if method == "auto":
        method = "smoothed_sum" if hecke_character(m).principal else "afe"
    if method == "smoothed_sum":
        return hecke_smoothed(s, m)
    if method == "afe":
        return hecke_afe(s, m)
    raise ValueError(f"unknown method {method!r}")


# ---------------------------------------------------------------------------
# Dedekind zeta and residues


def dedekind_zeta_Qomega(s: complex, method: str = "smoothed_sum") -> LValue:
    """zeta_K(s) for K = Q(w).

    ``smoothed_sum``: the lattice sum over primary elements, divided by
    (1 - 3^-s) to restore the prime above 3.  ``oracle``: zeta(s) L(s, chi_-3)
    from the Hurwitz oracle (chi_-3 is evaluated as the real character with
    values 1, -1 on residues 1, 2 mod 3).
    """
    s = complex(s)
    if method == "smoothed_sum":
        v = hecke_smoothed(s, 1)
        f = 1.0 - 3.0 ** (-s)
        return LValue(v.value / f, v.abs_error_estimate / abs(f), v.terms_used, "smoothed_sum", v.details)
    if method == "oracle":
        from ..characters import principal

        z = dirichlet_L_oracle(s, principal(1))
        hz, err = hurwitz_zeta(s, np.array([1 / 3, 2 / 3]))
        L = 3.0 ** (-s) * (hz[0] - hz[1])
        value = z.value * L
        est = abs(L) * z.abs_error_estimate + abs(z.value) * abs(3.0 ** (-s)) * float(err.sum())
        return LValue(complex(value), est, z.terms_used + 40, "hurwitz_oracle")
    raise ValueError(f"unknown method {method!r}")


def residue_c_omega(X: float = 1e8) -> float:
    """Residue of zeta_K at s = 1, as the limit #{ideals of norm <= X} / X.

    Counts pairs (a, b) != 0 with a^2 - ab + b^2 <= X, six per ideal.
    """
    bmax = int(math.sqrt(4 * X / 3))
    b = np.arange(-bmax, bmax + 1, dtype=np.float64)
    rad = X - 0.75 * b * b
    ok = rad >= 0
    r = np.sqrt(rad[ok])
    lo = np.ceil(b[ok] / 2 - r)
    hi = np.floor(b[ok] / 2 + r)
    count = float(np.sum(hi - lo + 1)) - 1.0  # drop (0, 0)
    return count / 6.0 / X


def _prime_ideal_norms(n: int) -> list[int]:
    out = []
    for p, _ in eis.rational_factor(abs(n)):
        if p == 3:
            out.append(3)
        elif p % 3 == 1:
            out += [p, p]
        else:
            out.append(p * p)
    return out


def residue_of_partial_hecke(d: int, q1: int, m: int) -> complex:
    """c_w prod_{p | 3 d q1 m} (1 - N(p)^-1), the residue of the partial Dedekind zeta.

    Requires m to be a perfect cube (otherwise psi_m is nonprincipal and there is no pole).
    """
    if m == 0 or cube_free_part(m) != 1:
        raise NotACube(f"{m} is not a cube; the residue vanishes")
    out = C_OMEGA
    for nrm in _prime_ideal_norms(3 * d * q1 * m):
        out *= 1.0 - 1.0 / nrm
    return complex(out)

"""Approximate functional equation for L^S(s, pi x chi).

For a primitive character chi mod q and a provider of degree n with level 1,

    L^S(s) = sum_{(m,S)=1} a(m) chi(m) m^-s F1(m/Y)
             + eps(s) sum_{m1 in I_S} b(m1) m1^-s sum_m a~(m) chibar(m) m^(s-1) F2(m/(X m1))

with X Y = q^n and eps(s) = W(pi) tau(chi)^n q^(-n s).  Here
L^S = L * prod_{p in S} L_p^{-1}, the finite Dirichlet polynomial
sum_{m1} b(m1) m1^-s being that product of inverse local factors.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, replace
from functools import lru_cache
from itertools import product

import numpy as np

from ..characters import CubicCharacter, gauss_sum
from ..eisenstein import rational_factor
from ..errors import MissingLocalData, NotPrimitive, NumericalError, TruncationError
from ..kernels import (
    TABLE_STEP, ArchimedeanData, F2, KernelChoice, LogTable, _bump_tail, tabulate_F2,
)
from .lvalue import LValue
from .providers import CoefficientProvider

_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)

# A narrower Gaussian than the kernel-module default: F1 then falls below
# 1e-12 by x ~ 9 instead of x ~ 145, which shortens the first sum 15-fold.
AFE_KERNEL = KernelChoice("gaussian_mellin", (0.05,))


# ---------------------------------------------------------------------------
# S-local data


@dataclass(frozen=True)
class SLocalData:
    S: tuple[int, ...]
    I_S: tuple[int, ...]
    c: dict
    b: dict

    def dirichlet_polynomial(self, s: complex) -> complex:
        """sum_{m1} b(m1) m1^-s = prod_{p in S} L_p(s, pi x chi)^-1."""
        return complex(sum(self.b[m] * m ** (-complex(s)) for m in self.I_S))


def _check_S(S) -> tuple[int, ...]:
    out = tuple(sorted({int(p) for p in S}))
    for p in out:
        if p < 2 or rational_factor(p) != [(p, 1)]:
            raise MissingLocalData(f"{p} is not a prime, so there is no local factor to remove")
    return out


def s_local_data(provider: CoefficientProvider, chi: CubicCharacter | None, S) -> SLocalData:
    """I_S, c(m1) = prod_p (-1)^k e_k(Satake at p), and b(m1) = c(m1) chi(m1).

    Exponents run up to the degree, the length of each inverse local factor.
    """
    S = _check_S(S)
    n = provider.degree
    per_prime = []
    for p in S:
        e = np.asarray(provider.local_e(np.array([p]))[0], dtype=complex)
        if e.shape != (n,) or not np.all(np.isfinite(e)):
            raise MissingLocalData(f"no Satake data for {provider.provider_id} at p = {p}")
        coeffs = [1.0 + 0j] + [(-1) ** k * e[k - 1] for k in range(1, n + 1)]
        per_prime.append([(p**k, coeffs[k]) for k in range(n + 1)])
    c = {}
    for combo in product(*per_prime):
        m1 = math.prod(pk for pk, _ in combo)
        c[m1] = complex(math.prod(v for _, v in combo))
    I_S = tuple(sorted(c))
    b = {m: c[m] * (chi(m) if chi is not None else 1.0) for m in I_S}
    return SLocalData(S, I_S, c, b)


# ---------------------------------------------------------------------------
# configuration and kernel tables


@dataclass(frozen=True)
class AfeConfig:
    """Y: first-sum length (None = balanced); X = q^n / Y.

    ``balance`` rescales the balanced Y (X by its inverse); ``tol`` is the
    relative kernel level below which terms are dropped.
    """

    S: tuple[int, ...] = ()
    Y: float | None = None
    balance: float = 1.0
    kernel: KernelChoice = AFE_KERNEL
    tol: float = 1e-12
    max_terms: int = 20_000_000

    def __post_init__(self):
        object.__setattr__(self, "S", tuple(sorted({int(p) for p in self.S})))
        if self.Y is not None and not self.Y > 0:
            raise ValueError("Y must be positive")
        if not self.balance > 0:
            raise ValueError("balance must be positive")
        if not 0 < self.tol < 1:
            raise ValueError("tol must lie in (0, 1)")


class _TableCache:
    """F2 tables keyed by (s, mu, kernel), widened on demand."""

    def __init__(self):
        self._lock = threading.Lock()
        self._tables: dict = {}

    def get(self, arch: ArchimedeanData, s: complex, kernel: KernelChoice, u_min: float) -> LogTable:
        key = (complex(s), arch.mu, kernel)
        with self._lock:
            tab = self._tables.get(key)
            if tab is not None and tab.u0 + 2 * tab.h <= u_min:
                return tab
        lo = math.floor(u_min) - 1.0
        if tab is not None:
            lo = min(lo, tab.u0 - 4.0)
        tab = tabulate_F2(arch, s, kernel, lo, _f2_u_max(arch, s, kernel))
        tab.interp_error = _interp_error(tab, lambda x: F2(x, arch, s, kernel))
        with self._lock:
            self._tables[key] = tab
        return tab

    def clear(self):
        with self._lock:
            self._tables.clear()


F2_TABLES = _TableCache()


def _f2_u_max(arch: ArchimedeanData, s: complex, kernel: KernelChoice) -> float:
    # k(-w) G(s - w) x^-w decays past log x ~ 2 sqrt(c) * 6 plus the archimedean conductor
    arch_log = sum(math.log1p(abs(complex(s) + m) / (2 * math.pi)) for m in arch.mu)
    if kernel.name == "gaussian_mellin":
        return 12.0 * math.sqrt(kernel.c) + arch_log + 4.0
    return arch_log + 8.0


def _interp_error(tab: LogTable, exact, samples: int = 24) -> float:
    """Largest deviation of the interpolant from the exact function at midpoints."""
    idx = np.linspace(3, len(tab.values) - 5, samples).astype(int)
    x = np.exp(tab.u0 + tab.h * (idx + 0.5))
    return float(np.max(np.abs(tab(x) - np.atleast_1d(exact(x)))))


@lru_cache(maxsize=1)
def _bump_F1_table() -> LogTable:
    u = np.arange(-0.05, math.log(2) + 0.05 + TABLE_STEP, TABLE_STEP)
    tab = LogTable(-0.05, TABLE_STEP, _bump_tail(np.exp(u)), left=1.0)
    tab.interp_error = _interp_error(tab, _bump_tail)
    return tab


def _F1_evaluator(kernel: KernelChoice):
    """(callable, interpolation error) for F1."""
    if kernel.name == "gaussian_mellin":
        return kernel.F1_exact, 0.0
    tab = _bump_F1_table()
    return tab, tab.interp_error


def _F1_cutoff(kernel: KernelChoice, tol: float) -> float:
    if kernel.name == "gaussian_mellin":
        from scipy.special import erfcinv

        return math.exp(2 * math.sqrt(kernel.c) * float(erfcinv(2 * tol)))
    return 2.0


# ---------------------------------------------------------------------------
# epsilon factor


def epsilon_factor(s: complex, provider: CoefficientProvider, chi: CubicCharacter) -> complex:
    """W(pi) tau(chi)^n q^(-n s), after checking |tau(chi)|^2 = q."""
    q = chi.modulus
    tau = gauss_sum(chi).value
    if abs(abs(tau) ** 2 - q) > 1e-9 * q:
        raise NumericalError(f"|tau(chi)|^2 = {abs(tau) ** 2} differs from q = {q}")
    n = provider.degree
    return complex(provider.root_number * tau**n * np.exp(-n * complex(s) * math.log(q)))


# ---------------------------------------------------------------------------
# the evaluator


def _char_values(chi: CubicCharacter, m: np.ndarray, conj: bool = False) -> np.ndarray:
    e = chi.table[m % chi.modulus].astype(np.int64)
    if conj:
        e = np.where(e >= 0, (-e) % 3, -1)
    return np.where(e >= 0, _ROOTS[np.maximum(e, 0)], 0)


def _coprime_mask(m: np.ndarray, S) -> np.ndarray:
    mask = np.ones(m.shape, dtype=bool)
    for p in S:
        mask &= m % p != 0
    return mask


def _weighted_cutoff(tab: LogTable, beta: float, u_lo: float, tol: float) -> tuple[float, float]:
    """(max weight, x cut) for the dual sum, whose terms scale like |F2(x)| x^(beta-1).

    The cut is the point past which the weighted kernel stays below tol times
    its maximum over the range actually summed.
    """
    u = tab.u0 + tab.h * np.arange(len(tab.values))
    keep = u >= u_lo - tab.h
    mag = np.abs(tab.values[keep]) * np.exp((beta - 1.0) * (u[keep] - u_lo))
    big = np.flatnonzero(mag > tol * mag.max())
    last = big[-1] if big.size else 0
    f2max = float(np.max(np.abs(tab.values[keep])))
    return f2max, math.exp(u[keep][last] + tab.h)


def balanced_Y(s: complex, arch: ArchimedeanData, conductor: float, I_S, cfg: AfeConfig) -> float:
    """Y equalizing the work in the two sums.

    The first sum has about Y * cut1 terms, the dual one X * cut2 per m1 with
    X = conductor / Y; cut2 grows with the archimedean parameters, so the
    optimum leans towards a longer first sum for higher degree.
    """
    cut1 = _F1_cutoff(cfg.kernel, cfg.tol)
    u_lo = math.log(1.0 / (math.sqrt(conductor) * max(I_S)))
    tab = F2_TABLES.get(arch, complex(s), cfg.kernel, u_lo - 2.0)
    _, cut2 = _weighted_cutoff(tab, complex(s).real, u_lo, cfg.tol)
    return math.sqrt(conductor * sum(I_S) * cut2 / cut1)


@dataclass
class AfeParts:
    """The two halves of an AFE evaluation, before the epsilon factor is applied.

    value = first + eps * dual.
    """

    first: complex
    dual: complex
    mag_first: float
    mag_dual: float
    f2max: float
    interp_first: float
    interp_dual: float
    terms: int
    X: float
    Y: float
    M1: int
    M2: int

    def error_estimate(self, eps_abs: float, tol: float) -> float:
        big = self.mag_first + eps_abs * self.f2max * self.mag_dual
        tail = tol * big
        interp = self.interp_first * self.mag_first + eps_abs * self.interp_dual * self.mag_dual
        return tail + interp + 1e-15 * big


def afe_parts(s: complex, arch: ArchimedeanData, conductor: float, coeffs, dual_coeffs, local: SLocalData,
              cfg: AfeConfig, coeff_bound=None) -> AfeParts:
    """Evaluate both AFE sums for Dirichlet coefficients ``coeffs(m)`` (m an index array).

    ``dual_coeffs(m)`` gives the dual series; ``coeff_bound(N)`` is called once
    with the largest index so the caller can prepare arrays.
    """
    s = complex(s)
    beta = s.real
    Y = (cfg.Y if cfg.Y is not None else balanced_Y(s, arch, conductor, local.I_S, cfg)) * cfg.balance
    X = conductor / Y
    F1f, F1_interp = _F1_evaluator(cfg.kernel)
    M1 = int(Y * _F1_cutoff(cfg.kernel, cfg.tol)) + 1
    m1_max = max(local.I_S)
    u_lo = math.log(1.0 / (X * m1_max))
    tab = F2_TABLES.get(arch, s, cfg.kernel, u_lo)
    f2max, x_cut = _weighted_cutoff(tab, beta, u_lo, cfg.tol)
    M2 = int(X * m1_max * x_cut) + 1
    if M1 + M2 * len(local.I_S) > cfg.max_terms:
        raise TruncationError(f"AFE needs {M1} + {len(local.I_S)} x {M2} terms, above max_terms = {cfg.max_terms}")
    if coeff_bound is not None:
        coeff_bound(max(M1, M2))

    m = np.arange(1, M1 + 1)
    m = m[_coprime_mask(m, local.S)]
    base1 = coeffs(m) * np.exp(-s * np.log(m))
    first = complex(np.dot(base1, F1f(m / Y)))
    mag1 = float(np.abs(base1).sum())

    dual = 0j
    mag2 = 0.0
    used = m.size
    for m1 in local.I_S:
        bm = local.b[m1]
        if bm == 0:
            continue
        mm = np.arange(1, int(X * m1 * x_cut) + 2)
        base2 = dual_coeffs(mm) * np.exp((s - 1) * np.log(mm))
        w2 = tab(mm / (X * m1))
        if np.any(~np.isfinite(w2)):
            raise NumericalError("F2 table does not cover the requested range")
        coef = bm * m1 ** (-s)
        dual += coef * complex(np.dot(base2, w2))
        mag2 += abs(coef) * float(np.abs(base2).sum())
        used += mm.size
    return AfeParts(first, dual, mag1, mag2, f2max, F1_interp, tab.interp_error, int(used), X, Y, M1, M2)


def L_afe(s: complex, provider: CoefficientProvider, chi: CubicCharacter, cfg: AfeConfig = AfeConfig()) -> LValue:
    s = complex(s)
    if not chi.is_primitive:
        raise NotPrimitive(f"character mod {chi.modulus} has conductor {chi.conductor}")
    q, n = chi.modulus, provider.degree
    local = s_local_data(provider, chi, cfg.S)
    eps = epsilon_factor(s, provider, chi)
    state = {}

    def bound(N):
        state["a"] = provider.coefficients(N)
        state["ad"] = provider.dual_coefficients(N)

    parts = afe_parts(
        s, provider.arch, float(q) ** n,
        lambda m: state["a"][m] * _char_values(chi, m),
        lambda m: state["ad"][m] * _char_values(chi, m, conj=True),
        local, cfg, bound,
    )
    value = parts.first + eps * parts.dual
    pole = 0j
    if provider.provider_id == "zeta" and q == 1:
        # residue of k(w) L^S(s + w) Y^w / w at w = 1 - s
        if s == 1:
            raise NumericalError("L_afe does not evaluate zeta at its pole")
        P1 = math.prod(1.0 - 1.0 / p for p in local.S)
        pole = complex(cfg.kernel.k(1 - s)) * parts.Y ** (1 - s) * P1 / (1 - s)
        value -= pole
    details = {"X": parts.X, "Y": parts.Y, "M1": parts.M1, "M2": parts.M2, "epsilon": eps, "I_S": local.I_S,
               "pole_term": pole, "kernel": cfg.kernel}
    return LValue(complex(value), parts.error_estimate(abs(eps), cfg.tol), parts.terms, "afe", details)


def partial_LS(s: complex, provider: CoefficientProvider, chi: CubicCharacter, S, method: str = "afe",
               cfg: AfeConfig = AfeConfig()) -> LValue:
    """L^S(s, pi x chi) = L(s, pi x chi) prod_{p in S} L_p(s)^-1.

    ``afe`` evaluates the full L-value and multiplies by the finite Dirichlet
    polynomial of inverse local factors; ``afe_S`` puts S inside the AFE (the
    dual sum then runs once per m1); ``oracle`` uses the Hurwitz oracle
    (degree 1 only).
    """
    local = s_local_data(provider, chi, S)
    P = local.dirichlet_polynomial(s)
    if method == "afe_S":
        return L_afe(s, provider, chi, replace(cfg, S=local.S))
    if method == "afe":
        full = L_afe(s, provider, chi, replace(cfg, S=()))
    elif method == "oracle":
        if provider.degree != 1:
            raise ValueError("the Hurwitz oracle covers degree 1 only")
        from .hurwitz import dirichlet_L_oracle

        full = dirichlet_L_oracle(s, chi)
    else:
        raise ValueError(f"unknown method {method!r}")
    details = dict(full.details, S=local.S, I_S=local.I_S, local_polynomial=P)
    return LValue(full.value * P, full.abs_error_estimate * abs(P), full.terms_used, full.method, details)

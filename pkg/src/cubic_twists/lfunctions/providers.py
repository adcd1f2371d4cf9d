"""Coefficient providers: explicit automorphic test data of degree 1, 2 and 3.

``zeta`` is the trivial representation, ``gl2_delta`` the weight 12 cusp form
Delta with a(p) = tau(p) / p^(11/2), and ``sym2_delta`` its symmetric square.
Dirichlet coefficients are produced as dense arrays by a multiplicative sieve
from the local Satake data.
"""
from __future__ import annotations

import csv
import math
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from ..eisenstein import primes_up_to
from ..kernels import ArchimedeanData

CACHE_ENV = "CUBIC_TWISTS_CACHE"
CACHE_VERSION = "cubic_twists-coefficients-v1"
CACHE_COLUMNS = ("p", "value_re", "value_im", "provider_id", "normalization_tag")

# ---------------------------------------------------------------------------
# Ramanujan tau, exactly, by modular power-series recursion + CRT

_TAU_PRIMES = (2147483629, 2147483587, 2147483579, 2147483563, 2147483549)


@njit(cache=True)
def _eta24_mod(n_max, pent_idx, pent_sgn, P):
    """Coefficients of prod (1 - q^k)^24 mod P up to q^n_max.

    With f = prod(1 - q^k) known (pentagonal numbers), g = f^24 satisfies
    n g_n = sum_{j>=1} (25 j - n) f_j g_{n-j}.
    """
    g = np.zeros(n_max + 1, dtype=np.int64)
    inv = np.ones(n_max + 1, dtype=np.int64)
    for n in range(2, n_max + 1):
        inv[n] = (P - (P // n) * inv[P % n] % P) % P
    g[0] = 1
    npent = pent_idx.shape[0]
    for n in range(1, n_max + 1):
        # |(25 j - n) g| < 2^57, so 32 unreduced terms cannot overflow
        acc = 0
        for t in range(npent):
            j = pent_idx[t]
            if j > n:
                break
            acc += pent_sgn[t] * (25 * j - n) * g[n - j]
            if t & 31 == 31:
                acc %= P
        g[n] = (acc % P) * inv[n] % P
    return g


def _pentagonal(n_max: int):
    idx, sgn = [], []
    k = 1
    while True:
        a, b = k * (3 * k - 1) // 2, k * (3 * k + 1) // 2
        if a > n_max:
            break
        s = -1 if k % 2 else 1
        idx.append(a)
        sgn.append(s)
        if b <= n_max:
            idx.append(b)
            sgn.append(s)
        k += 1
    order = np.argsort(idx)
    return np.asarray(idx, dtype=np.int64)[order], np.asarray(sgn, dtype=np.int64)[order]


def tau_exact(n_max: int) -> list[int]:
    """[tau(0) = 0, tau(1), ..., tau(n_max)] as Python integers.

    Five 31-bit moduli cover |tau(n)| <= d(n) n^(11/2) for n well past 10^6;
    the recursion itself is valid while 25 n < 2^26.
    """
    if n_max < 1:
        return [0] * (n_max + 1)
    if 25 * n_max >= 2**26:
        raise ValueError("tau_exact supports n_max < 2.6e6")
    idx, sgn = _pentagonal(n_max)
    residues = [_eta24_mod(n_max - 1, idx, sgn, P) for P in _TAU_PRIMES]
    M = math.prod(_TAU_PRIMES)
    coeffs = []
    for P in _TAU_PRIMES:
        Mi = M // P
        coeffs.append(Mi * pow(Mi, -1, P))
    out = [0]
    for n in range(n_max):
        x = sum(int(r[n]) * c for r, c in zip(residues, coeffs)) % M
        out.append(x - M if x > M // 2 else x)
    return out


def tau_primes(p_max: int) -> tuple[np.ndarray, np.ndarray]:
    """(primes, tau(p) / p^(11/2)) for p <= p_max."""
    ps = primes_up_to(p_max)
    tau = tau_exact(p_max)
    vals = np.array([tau[int(p)] / float(p) ** 5.5 for p in ps])
    return ps, vals


# ---------------------------------------------------------------------------
# coefficient cache on disk


def default_cache_dir() -> Path | None:
    d = os.environ.get(CACHE_ENV)
    return Path(d) if d else None


def write_cache(path: Path, provider_id: str, tag: str, primes, values) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp")
    with open(tmp, "w", newline="") as fh:
        fh.write(f"# {CACHE_VERSION}\n")
        w = csv.writer(fh)
        w.writerow(CACHE_COLUMNS)
        for p, v in zip(primes, values):
            v = complex(v)
            w.writerow([int(p), repr(v.real), repr(v.imag), provider_id, tag])
    os.replace(tmp, path)


def read_cache(path: Path, provider_id: str, tag: str):
    """(primes, values) from a cache file, or None if absent or mismatched."""
    try:
        with open(path, newline="") as fh:
            if fh.readline().strip() != f"# {CACHE_VERSION}":
                return None
            rows = list(csv.reader(fh))
    except FileNotFoundError:
        return None
    if not rows or tuple(rows[0]) != CACHE_COLUMNS:
        return None
    ps, vals = [], []
    for r in rows[1:]:
        if r[3] != provider_id or r[4] != tag:
            return None
        ps.append(int(r[0]))
        vals.append(complex(float(r[1]), float(r[2])))
    return np.array(ps, dtype=np.int64), np.array(vals)


# ---------------------------------------------------------------------------
# multiplicative sieve


def complete_homogeneous(e: np.ndarray, kmax: int) -> np.ndarray:
    """h_0..h_kmax from elementary symmetric e (shape (P, n)) of the Satake parameters.

    These are the coefficients of prod_j (1 - alpha_j X)^-1.
    """
    P, n = e.shape
    h = np.zeros((P, kmax + 1), dtype=e.dtype)
    h[:, 0] = 1
    for k in range(1, kmax + 1):
        for j in range(1, min(k, n) + 1):
            h[:, k] += (-1) ** (j - 1) * e[:, j - 1] * h[:, k - j]
    return h


def multiplicative_array(N: int, prime_local, dtype=complex) -> np.ndarray:
    """a[0..N] of the multiplicative function with a(p^k) = prime_local(primes, kmax)[:, k].

    ``prime_local(ps, kmax)`` returns an array of shape (len(ps), kmax + 1).
    a[0] is set to 0.
    """
    a = np.ones(N + 1, dtype=dtype)
    a[0] = 0
    if N < 2:
        return a
    ps = primes_up_to(N)
    r = math.isqrt(N)
    small = ps[ps <= r]
    rest = np.arange(N + 1, dtype=np.int64)
    kmax = max(1, int(math.log(N) / math.log(2)) + 1)
    local_small = prime_local(small, kmax) if small.size else None
    for i, p in enumerate(small):
        p = int(p)
        idx = np.arange(p, N + 1, p)
        v = np.zeros(idx.size, dtype=np.int64)
        pk = p
        while pk <= N:
            v[(idx % pk) == 0] += 1
            pk *= p
        a[idx] *= local_small[i, v]
        rest[idx] //= p ** v
    big = ps[ps > r]
    lookup = np.ones(N + 1, dtype=dtype)
    if big.size:
        lookup[big] = prime_local(big, 1)[:, 1]
    a *= lookup[rest]
    return a


# ---------------------------------------------------------------------------
# providers


@dataclass(eq=False)
class CoefficientProvider:
    """Explicit test representation with Dirichlet coefficients a(m).

    ``local_e(ps)`` returns the elementary symmetric functions of the Satake
    parameters at the primes ``ps`` (shape (len(ps), degree)).
    """

    provider_id: str
    degree: int
    arch: ArchimedeanData
    root_number: complex
    tempered: bool
    normalization_tag: str
    self_dual: bool = True
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)
    _arrays: dict = field(default_factory=dict, repr=False)

    # subclasses / instances provide these
    def prime_values(self, p_max: int) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def local_e(self, ps: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def satake(self, p: int) -> np.ndarray:
        e = self.local_e(np.array([p]))[0]
        # roots of X^n - e1 X^(n-1) + e2 X^(n-2) - ...
        poly = [1.0] + [(-1) ** (j + 1) * e[j] for j in range(self.degree)]
        return np.sort_complex(np.roots(poly).astype(complex))

    def local_coefficients(self, ps, kmax: int) -> np.ndarray:
        ps = np.atleast_1d(np.asarray(ps, dtype=np.int64))
        return complete_homogeneous(self.local_e(ps), kmax)

    def coefficients(self, N: int) -> np.ndarray:
        """Array a[0..N] (a[0] = 0) of Dirichlet coefficients."""
        N = int(N)
        with self._lock:
            for n, arr in self._arrays.items():
                if n >= N:
                    return arr[: N + 1]
        arr = multiplicative_array(N, self.local_coefficients, dtype=self.dtype)
        arr.setflags(write=False)
        with self._lock:
            self._arrays = {n: v for n, v in self._arrays.items() if n > N}
            self._arrays[N] = arr
        return arr

    def dual_coefficients(self, N: int) -> np.ndarray:
        a = self.coefficients(N)
        return a if self.dtype is float else np.conj(a)

    def coeff(self, m: int) -> complex:
        return complex(self.coefficients(int(m))[int(m)])

    def dual_coeff(self, m: int) -> complex:
        return complex(self.dual_coefficients(int(m))[int(m)])

    dtype = float


class _Zeta(CoefficientProvider):
    def local_e(self, ps):
        return np.ones((len(ps), 1))

    def prime_values(self, p_max):
        ps = primes_up_to(p_max)
        return ps, np.ones(ps.size)


class _TauBacked(CoefficientProvider):
    """Providers whose local data derive from lambda(p) = tau(p) / p^(11/2)."""

    cache_dir: Path | None = None

    def _lambda(self, p_max: int) -> np.ndarray:
        """lambda(p) indexed by p (non-primes hold NaN), p <= p_max."""
        with _TAU_LOCK:
            if _TAU_STATE["table"] is not None and _TAU_STATE["table"].size > p_max:
                return _TAU_STATE["table"]
            ps, vals = _load_or_compute_tau(max(p_max, 2 * _TAU_STATE["size"], 1000), self.cache_dir)
            table = np.full(int(ps[-1]) + 1, np.nan)
            table[ps] = vals
            table.setflags(write=False)
            _TAU_STATE["table"] = table
            _TAU_STATE["size"] = table.size
            return table

    def lam(self, ps) -> np.ndarray:
        ps = np.asarray(ps, dtype=np.int64)
        if ps.size == 0:
            return np.zeros(0)
        return self._lambda(int(ps.max()))[ps]


class _GL2(_TauBacked):
    def local_e(self, ps):
        lam = self.lam(ps)
        return np.stack([lam, np.ones_like(lam)], axis=1)

    def prime_values(self, p_max):
        ps = primes_up_to(p_max)
        return ps, self.lam(ps)


class _Sym2(_TauBacked):
    def local_e(self, ps):
        a = self.lam(ps) ** 2 - 1.0
        return np.stack([a, a, np.ones_like(a)], axis=1)

    def prime_values(self, p_max):
        ps = primes_up_to(p_max)
        return ps, self.lam(ps) ** 2 - 1.0


_TAU_LOCK = threading.Lock()
_TAU_STATE: dict = {"table": None, "size": 0}
_GL2_TAG = "tau(p)/p^(11/2)"


def _load_or_compute_tau(p_max: int, cache_dir: Path | None):
    cache_dir = cache_dir or default_cache_dir()
    path = cache_dir / "gl2_delta.csv" if cache_dir else None
    if path is not None:
        got = read_cache(path, "gl2_delta", _GL2_TAG)
        # cached primes form an initial segment, so comparing counts is exact
        if got is not None and got[0].size >= primes_up_to(p_max).size:
            return got[0], got[1].real
    ps, vals = tau_primes(p_max)
    if path is not None:
        write_cache(path, "gl2_delta", _GL2_TAG, ps, vals)
    return ps, vals


def set_cache_dir(path: str | os.PathLike | None) -> None:
    """Directory for the tau(p) cache used by the Delta-based providers."""
    _TauBacked.cache_dir = Path(path) if path else None


def active_cache_dir() -> Path | None:
    """The directory in use: set_cache_dir() if called, else the environment variable."""
    return _TauBacked.cache_dir or default_cache_dir()


def build_cache(p_max: int) -> Path:
    """Make sure the cache file covers p <= p_max, whatever is already in memory."""
    d = active_cache_dir()
    if d is None:
        raise ValueError(f"no cache directory: call set_cache_dir() or set {CACHE_ENV}")
    _load_or_compute_tau(p_max, d)
    return d / "gl2_delta.csv"


def provider_zeta() -> CoefficientProvider:
    return _Zeta("zeta", 1, ArchimedeanData((0.0,)), 1.0 + 0j, True, "a(m)=1")


def provider_gl2_delta() -> CoefficientProvider:
    # Gamma_C(s + 11/2) = Gamma_R(s + 11/2) Gamma_R(s + 13/2)
    return _GL2("gl2_delta", 2, ArchimedeanData((5.5, 6.5)), 1.0 + 0j, True, _GL2_TAG)


def provider_sym2_delta() -> CoefficientProvider:
    # L_inf = Gamma_R(s + 1) Gamma_C(s + 11) = Gamma_R(s+1) Gamma_R(s+11) Gamma_R(s+12)
    return _Sym2("sym2_delta", 3, ArchimedeanData((1.0, 11.0, 12.0)), 1.0 + 0j, True, "(tau(p)/p^(11/2))^2-1")


PROVIDERS = {
    "zeta": provider_zeta,
    "gl2_delta": provider_gl2_delta,
    "sym2_delta": provider_sym2_delta,
}


def get_provider(name: str) -> CoefficientProvider:
    try:
        return PROVIDERS[name]()
    except KeyError:
        raise ValueError(f"unknown provider {name!r}; choose from {sorted(PROVIDERS)}") from None

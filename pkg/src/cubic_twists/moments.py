"""First moment of twisted L-values over cubic families, its predicted main term,
and a non-vanishing census.

The direct moment sums partial L-values L^S(s, pi x chi) over the family with a
smooth weight W; the main term comes from the cube terms m = k^3, where the
family average of chi(m) does not cancel.  With rho(k) the density of
admissible n coprime to k,

    M_00 = Q^r2 * W^ * rho(1) * prod_{p not in S} [1 + h_p sum_{j>=1} a(p^3j) p^-3js]

where h_p = (1 + 2/p)^-1 for p = 1 mod 3 and 1 otherwise, and
rho(1) = c_w * (2/3) * prod_{p=1 (3)} (1 - 3/p^2 + 2/p^3) * prod_{p=2 (3)} (1 - p^-2)
is the residue at s = 1 of prod_{p=1 (3)} (1 + 2 p^-s).
"""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache

import numpy as np

from . import eisenstein as eis
from .characters import (
    enumerate_family, from_eisenstein, primitive_cubic_characters_mod_prime, product_character,
)
from .errors import CubicTwistError, ThresholdTooSmall, TruncationError, ValidationError
from .kernels import W_INTEGRAL, weight_W
from .lfunctions.afe import AfeConfig, partial_LS
from .lfunctions.hecke import C_OMEGA
from .lfunctions.providers import CoefficientProvider, get_provider

log = logging.getLogger(__name__)

MODES = ("factorized_n3", "plain_gln")
LADDER_CSV_COLUMNS = ("Q", "direct_re", "direct_im", "main_re", "main_im", "residual_abs", "census_total",
                      "census_nonvanishing", "slope")
_ROOTS = np.exp(2j * np.pi * np.arange(3) / 3)


@dataclass(frozen=True)
class MomentConfig:
    """Parameters of one first-moment run.

    ``Y`` rescales the splitting point of every member AFE relative to its
    cost-balanced default; the moment should not depend on it.
    """

    s: complex = 0.9
    provider_id: str = "zeta"
    r1: float = 0.0
    r2: float = 1.0
    Q: int = 100
    S: tuple[int, ...] = (3,)
    Y: float = 1.0
    mode: str = "plain_gln"
    lvalue_method: str = "afe"

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        object.__setattr__(self, "S", tuple(sorted(set(int(p) for p in self.S))))
        if self.mode not in MODES:
            raise ValidationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if not (0 <= self.r1 <= 1 and 0 <= self.r2 <= 1):
            raise ValidationError("r1 and r2 must lie in [0, 1]")
        if abs(self.r1 + self.r2 - 1) > 1e-12:
            raise ValidationError(f"r1 + r2 must equal 1, got {self.r1 + self.r2}")
        if self.mode == "plain_gln" and (self.r1, self.r2) != (0.0, 1.0):
            raise ValidationError("plain_gln mode requires (r1, r2) = (0, 1)")
        if self.mode == "factorized_n3" and not self.r2 < self.r1:
            raise ValidationError(f"factorized_n3 mode requires r2 < r1, got r1={self.r1}, r2={self.r2}")
        if int(self.Q) < 1 or self.Y <= 0:
            raise ValidationError("Q must be >= 1 and Y > 0")
        if any(not eis.primes_up_to(p).size or eis.primes_up_to(p)[-1] != p for p in self.S):
            raise ValidationError(f"S must contain primes only, got {self.S}")

    @property
    def beta(self) -> float:
        return self.s.real

    def to_dict(self) -> dict:
        d = asdict(self)
        d["s"] = [self.s.real, self.s.imag]
        d["S"] = list(self.S)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "MomentConfig":
        d = dict(d)
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValidationError(f"unknown config fields {sorted(extra)}")
        if "s" in d:
            s = d["s"]
            d["s"] = complex(*s) if isinstance(s, (list, tuple)) else complex(s)
        return cls(**d)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "MomentConfig":
        return cls.from_dict(json.loads(text))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()[:16]


@dataclass(frozen=True)
class MomentReport:
    direct: complex
    main_term: complex
    residual: complex
    census_total: int
    census_nonvanishing: int
    Q: int
    config_hash: str
    details: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.census_nonvanishing > self.census_total:
            raise ValidationError("census_nonvanishing exceeds census_total")


# ---------------------------------------------------------------------------
# the family


def admissible_in_support(X: float) -> list[eis.AdmissibleModulus]:
    """Admissible n != 1 with W(N(n)/X) possibly nonzero, i.e. X/2 < N(n) < 5X/2."""
    return [n for n in eis.enumerate_admissible(int(math.floor(2.5 * X))) if n.norm > 1 and n.norm > X / 2]


def primes_1mod3(lo: float, hi: float) -> list[int]:
    ps = eis.primes_up_to(int(math.floor(hi)))
    return [int(p) for p in ps if p >= lo and p % 3 == 1]


def family_members(cfg: MomentConfig):
    """Yield (label, weight, character) for every term of the direct moment."""
    if cfg.mode == "plain_gln":
        for n in admissible_in_support(cfg.Q):
            w = float(weight_W(n.norm / cfg.Q))
            if w > 0:
                yield (str(n.generator),), w, from_eisenstein(n)
        return
    X2 = cfg.Q ** cfg.r2
    ns = [(n, float(weight_W(n.norm / X2))) for n in admissible_in_support(X2)]
    for q1 in primes_1mod3(cfg.Q ** cfg.r1, 2 * cfg.Q ** cfg.r1):
        for chi1 in primitive_cubic_characters_mod_prime(q1):
            for n, w in ns:
                if w > 0 and math.gcd(q1, n.norm) == 1:
                    yield (q1, str(chi1.label), str(n.generator)), w, product_character(chi1, from_eisenstein(n))


def _provider(cfg_or_id) -> CoefficientProvider:
    if isinstance(cfg_or_id, CoefficientProvider):
        return cfg_or_id
    return get_provider(cfg_or_id)


# ---------------------------------------------------------------------------
# direct moment


@dataclass(frozen=True)
class DirectMoment:
    value: complex
    error_estimate: float  # weighted sum of member truncation estimates
    members: int
    nonvanishing: int  # members with |L| > 10 x own error estimate
    terms_used: int


def first_moment_terms(cfg: MomentConfig, provider: CoefficientProvider | None = None):
    """Member-by-member data: list of (label, weight, LValue)."""
    pi = provider or _provider(cfg.provider_id)
    if cfg.mode == "factorized_n3" and pi.degree == 3 and not pi.tempered:
        raise ValidationError("factorized_n3 in degree 3 needs a tempered provider")
    afe_cfg = AfeConfig(balance=cfg.Y)
    out = []
    for label, w, chi in family_members(cfg):
        try:
            v = partial_LS(cfg.s, pi, chi, cfg.S, cfg.lvalue_method, afe_cfg)
        except CubicTwistError as exc:
            raise type(exc)(f"{exc} (member {label})") from exc
        out.append((label, w, v))
    return out


def first_moment_detail(cfg: MomentConfig, provider: CoefficientProvider | None = None) -> DirectMoment:
    terms = first_moment_terms(cfg, provider)
    if not terms:
        return DirectMoment(0j, 0.0, 0, 0, 0)
    vals = np.array([w * v.value for _, w, v in terms], dtype=complex)
    errs = np.array([w * v.abs_error_estimate for _, w, v in terms])
    # fixed order, numpy's pairwise summation
    nonvan = sum(abs(v.value) > 10 * v.abs_error_estimate for _, _, v in terms)
    return DirectMoment(complex(vals.sum()), float(errs.sum()), len(terms), int(nonvan),
                        sum(v.terms_used for _, _, v in terms))


def first_moment_direct(cfg: MomentConfig, provider: CoefficientProvider | None = None) -> complex:
    """Weighted sum of L^S(s, pi x chi) over the family of ``cfg``."""
    return first_moment_detail(cfg, provider).value


# ---------------------------------------------------------------------------
# main term


def cube_series(provider: CoefficientProvider, p: int, s: complex) -> complex:
    """sum_{j>=0} a(p^3j) p^-3js, from the Satake parameters.

    Only the cube powers survive averaging the local factor prod (1 - a_i x)^-1
    over x -> zeta x with zeta^3 = 1.
    """
    alpha = np.asarray(provider.satake(p), dtype=complex)
    x = p ** (-complex(s))
    vals = [np.prod(1.0 / (1.0 - alpha * z * x)) for z in _ROOTS]
    return complex(sum(vals) / 3)


def h_p(p: int) -> float:
    return 1.0 / (1.0 + 2.0 / p) if p % 3 == 1 else 1.0


@lru_cache(maxsize=4)
def rho_one(prime_cutoff: int = 10_000_000) -> tuple[float, float]:
    """Density of admissible moduli, with a bound on the relative tail."""
    ps = eis.primes_up_to(prime_cutoff).astype(float)
    ps = ps[ps != 3]
    one = ps[ps % 3 == 1]
    two = ps[ps % 3 == 2]
    log_prod = np.sum(np.log1p(-3 / one**2 + 2 / one**3)) + np.sum(np.log1p(-(two**-2)))
    return C_OMEGA * (2.0 / 3.0) * math.exp(log_prod), 3.0 / prime_cutoff


@dataclass(frozen=True)
class MainTerm:
    value: complex
    tail_estimate: float  # absolute
    euler_product: complex
    rho: float
    prime_count: int
    factors: dict


def _euler_factors(provider: CoefficientProvider, s: complex, S, prime_cutoff: int):
    ps = [int(p) for p in eis.primes_up_to(prime_cutoff) if p not in S]
    return ps, np.array([1.0 + h_p(p) * (cube_series(provider, p, s) - 1.0) for p in ps])


def main_term_detail(cfg: MomentConfig, prime_cutoff: int = 100_000, tol: float = 1e-6,
                     provider: CoefficientProvider | None = None) -> MainTerm:
    if prime_cutoff < 1000:
        raise ValidationError("prime_cutoff must be at least 1000")
    beta = cfg.beta
    if beta <= 0.5:
        raise ValidationError("the main term needs Re s > 1/2")
    pi = provider or _provider(cfg.provider_id)
    ps, fac = _euler_factors(pi, cfg.s, cfg.S, prime_cutoff)
    E = complex(np.exp(np.sum(np.log(fac))))
    # tempered: |a(p^3)| <= C(n + 2, 3); past the cutoff the factors are 1 + O(p^-3 beta)
    c = math.comb(pi.degree + 2, 3) if pi.tempered else math.comb(pi.degree + 2, 3) * prime_cutoff ** 1.5
    t = c * prime_cutoff ** (1 - 3 * beta) / (3 * beta - 1)
    rho, rho_tail = rho_one()
    rel_tail = math.expm1(t) + rho_tail
    if cfg.mode == "plain_gln":
        count = 1
        family = float(cfg.Q) ** cfg.r2 * W_INTEGRAL
        value = family * rho * E
    else:
        q1s = primes_1mod3(cfg.Q ** cfg.r1, 2 * cfg.Q ** cfg.r1)
        count = len(q1s)
        index = {p: i for i, p in enumerate(ps)}
        local = 0j
        for q1 in q1s:
            f = fac[index[q1]] if q1 in index else 1.0
            local += h_p(q1) / f
        family = 2 * float(cfg.Q) ** cfg.r2 * W_INTEGRAL
        value = family * rho * E * local
    value = complex(value)
    tail = abs(value) * rel_tail
    factors = {"c_omega": C_OMEGA, "rho(1)": rho, "W_integral": W_INTEGRAL, "Q^r2": float(cfg.Q) ** cfg.r2,
               "q1_count": count, "euler_product": E, "relative_tail": rel_tail}
    log.info("main term breakdown: %s", factors)
    if rel_tail > tol:
        raise TruncationError(f"main-term tail estimate {rel_tail:.3g} exceeds tolerance {tol:.3g}; "
                              f"raise prime_cutoff above {prime_cutoff}")
    return MainTerm(value, tail, E, rho, count, factors)


def main_term(cfg: MomentConfig, prime_cutoff: int = 100_000, tol: float = 1e-6) -> complex:
    """Predicted main term as an explicit Euler product truncated at ``prime_cutoff``."""
    return main_term_detail(cfg, prime_cutoff, tol).value


def choose_S(provider: CoefficientProvider, s: complex, floor: float = 0.5, check_up_to: int = 1000,
             base=(3,)) -> tuple[int, ...]:
    """{3} plus every prime p <= check_up_to whose main-term local factor has modulus below ``floor``."""
    S = set(base)
    for p in eis.primes_up_to(check_up_to):
        p = int(p)
        if p in S:
            continue
        if abs(1.0 + h_p(p) * (cube_series(provider, p, s) - 1.0)) < floor:
            S.add(p)
    return tuple(sorted(S))


# ---------------------------------------------------------------------------
# ladders


@dataclass(frozen=True)
class Ladder:
    reports: tuple[MomentReport, ...]
    slope: float

    def __iter__(self):
        return iter(self.reports)

    def __len__(self):
        return len(self.reports)

    def __getitem__(self, i):
        return self.reports[i]


def fit_loglog_slope(xs, ys) -> float:
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        return float("nan")
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


def moment_report(cfg: MomentConfig, prime_cutoff: int = 100_000) -> MomentReport:
    d = first_moment_detail(cfg)
    mt = main_term_detail(cfg, prime_cutoff)
    return MomentReport(d.value, mt.value, d.value - mt.value, d.members, d.nonvanishing, int(cfg.Q),
                        cfg.config_hash, {"direct_error": d.error_estimate, "main_tail": mt.tail_estimate,
                                          "terms_used": d.terms_used, **mt.factors})


def residual_ladder(cfg_base: MomentConfig, Q_list, prime_cutoff: int = 100_000) -> Ladder:
    Q_list = [int(Q) for Q in Q_list]
    if any(b <= a for a, b in zip(Q_list, Q_list[1:])):
        raise ValidationError("Q_list must be strictly increasing")
    reports = []
    for Q in Q_list:
        rep = moment_report(replace(cfg_base, Q=Q), prime_cutoff)
        log.info("Q=%d direct=%s main=%s", Q, rep.direct, rep.main_term)
        reports.append(rep)
    slope = fit_loglog_slope(Q_list, [abs(r.residual) for r in reports])
    return Ladder(tuple(reports), slope)


def write_ladder_csv(ladder: Ladder, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(LADDER_CSV_COLUMNS)
    for r in ladder:
        w.writerow([r.Q, repr(r.direct.real), repr(r.direct.imag), repr(r.main_term.real), repr(r.main_term.imag),
                    repr(abs(r.residual)), r.census_total, r.census_nonvanishing, repr(ladder.slope)])


# ---------------------------------------------------------------------------
# census


@dataclass(frozen=True)
class CensusResult:
    total: int
    nonvanishing: int
    witnesses: tuple  # (conductor, label, |L|, error estimate), five largest |L|
    threshold: float
    max_error: float

    def __iter__(self):
        return iter((self.total, self.nonvanishing, list(self.witnesses)))


def census(s: complex, provider, Q: int, threshold: float | None = None, S=None,
           cfg: AfeConfig = AfeConfig()) -> CensusResult:
    """Count chi in the cubic family with conductor <= Q and |L^S(s, pi x chi)| > threshold.

    The default threshold is 10x the largest member error estimate; an explicit
    threshold at or below that estimate raises ThresholdTooSmall.
    """
    pi = _provider(provider)
    s = complex(s)
    S = (3,) if S is None else tuple(S)
    if threshold is not None and threshold <= 0:
        raise ThresholdTooSmall("threshold must be positive")
    rows = []
    for chi in enumerate_family(int(Q)):
        v = partial_LS(s, pi, chi, S, "afe", cfg)
        rows.append((chi.modulus, str(chi.label), abs(v.value),
                     v.abs_error_estimate))
    max_err = max((r[3] for r in rows), default=0.0)
    if threshold is None:
        threshold = max(10 * max_err, 1e-300)
    elif threshold <= max_err:
        raise ThresholdTooSmall(f"threshold {threshold:.3g} does not exceed the error estimate {max_err:.3g}")
    nonvan = sum(r[2] > threshold for r in rows)
    witnesses = tuple(sorted(rows, key=lambda r: -r[2])[:5])
    return CensusResult(len(rows), int(nonvan), witnesses, float(threshold), float(max_err))

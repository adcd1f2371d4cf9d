"""Numerical stress tests of the cubic large sieve and the Hecke second moment.

The large sieve quantity is ||A a||^2 for the matrix A[n, m] = chi_n(m) whose
rows run over admissible n with N(n) in [Q, 2Q]; its dual is ||A^* b||^2.
Ratios are normalized by (M + Q^(5/3)) times the squared coefficient norm.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from dataclasses import asdict, dataclass, field
from functools import lru_cache

import numpy as np

from . import eisenstein as eis
from .characters import from_eisenstein
from .errors import ValidationError

SAMPLERS = ("pm_one", "complex_unit", "gaussian")
WINDOWS = ("dyadic", "initial")
SIEVE_CSV_COLUMNS = ("experiment_id", "M", "Q", "trials", "seed", "sampler", "max_ratio", "mean_ratio", "rhs_scale")


@dataclass(frozen=True)
class SieveExperiment:
    """``window``: coefficients on [M, 2M) (dyadic) or on [1, M] (initial)."""

    M: int
    Q: int
    trials: int = 100
    seed: int = 0
    sampler: str = "pm_one"
    window: str = "dyadic"

    def __post_init__(self):
        for name in ("M", "Q", "trials"):
            if int(getattr(self, name)) < 1:
                raise ValidationError(f"{name} must be >= 1")
        if self.sampler not in SAMPLERS:
            raise ValidationError(f"sampler must be one of {SAMPLERS}")
        if self.window not in WINDOWS:
            raise ValidationError(f"window must be one of {WINDOWS}")

    @property
    def experiment_id(self) -> str:
        blob = json.dumps(asdict(self), sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:12]

    def m_range(self) -> np.ndarray:
        if self.window == "dyadic":
            return np.arange(self.M, 2 * self.M)
        return np.arange(1, self.M + 1)

    @property
    def rhs_scale(self) -> float:
        return self.M + self.Q ** (5.0 / 3.0)


@dataclass(frozen=True)
class SieveReport:
    experiment: SieveExperiment
    max_ratio: float
    mean_ratio: float
    per_trial: tuple[float, ...] = field(repr=False)
    rhs_scale: float
    moduli: int
    cross_check: float = 0.0  # largest relative gap between the two LHS evaluations
    norm_ratio: float = 0.0  # ||A||^2 / rhs_scale, the sharp constant; equal in both directions

    def row(self) -> dict:
        e = self.experiment
        return {"experiment_id": e.experiment_id, "M": e.M, "Q": e.Q, "trials": e.trials, "seed": e.seed,
                "sampler": e.sampler, "max_ratio": repr(self.max_ratio), "mean_ratio": repr(self.mean_ratio),
                "rhs_scale": repr(self.rhs_scale)}


# ---------------------------------------------------------------------------
# the character matrix


def admissible_in_window(Q: int) -> list[eis.AdmissibleModulus]:
    """Admissible n (norm > 1) with Q <= N(n) <= 2Q."""
    return [n for n in eis.enumerate_admissible(2 * Q) if n.norm >= Q and n.norm > 1]


@lru_cache(maxsize=64)
def _character_matrix(Q: int, m_lo: int, m_hi: int) -> np.ndarray:
    m = np.arange(m_lo, m_hi)
    rows = [from_eisenstein(n)(m) for n in admissible_in_window(Q)]
    A = np.array(rows, dtype=complex).reshape(len(rows), m.size)
    A.setflags(write=False)
    return A


def character_matrix(exp: SieveExperiment) -> np.ndarray:
    m = exp.m_range()
    return _character_matrix(int(exp.Q), int(m[0]), int(m[-1]) + 1)


def draw(rng: np.random.Generator, sampler: str, size: int) -> np.ndarray:
    if sampler == "pm_one":
        return rng.choice(np.array([-1.0, 1.0]), size=size).astype(complex)
    if sampler == "complex_unit":
        return np.exp(2j * np.pi * rng.random(size))
    return (rng.standard_normal(size) + 1j * rng.standard_normal(size)) / math.sqrt(2)


def _trial_rngs(exp: SieveExperiment, salt: int) -> list[np.random.Generator]:
    """One independent stream per trial, so results never depend on evaluation order."""
    seqs = np.random.SeedSequence([int(exp.seed), salt]).spawn(exp.trials)
    return [np.random.Generator(np.random.PCG64(s)) for s in seqs]


def lhs_direct(A: np.ndarray, a: np.ndarray) -> float:
    """sum over rows of |sum_m A[n, m] a(m)|^2, one row at a time."""
    total = 0.0
    for row in A:
        total += abs(np.dot(row, a)) ** 2
    return total


def lhs_gram(A: np.ndarray, a: np.ndarray) -> float:
    """a^* (A^* A) a, through the Gram matrix."""
    G = A.conj().T @ A
    return float(np.real(np.vdot(a, G @ a)))


def _run(exp: SieveExperiment, A: np.ndarray, salt: int, coeffs) -> SieveReport:
    """Shared trial loop: ``coeffs`` is 'columns' for a(m) or 'rows' for b(n)."""
    mat = A if coeffs == "columns" else A.conj().T
    ratios, gaps = [], []
    for rng in _trial_rngs(exp, salt):
        v = draw(rng, exp.sampler, mat.shape[1])
        norm2 = float(np.sum(np.abs(v) ** 2))
        lhs = lhs_direct(mat, v) if mat.shape[0] else 0.0
        if mat.shape[0] and norm2 > 0:
            g = lhs_gram(mat, v)
            gaps.append(abs(g - lhs) / max(lhs, 1e-300))
        ratios.append(lhs / (exp.rhs_scale * norm2) if norm2 > 0 else 0.0)
    per = tuple(float(r) for r in ratios)
    norm = float(np.linalg.norm(mat, 2)) ** 2 / exp.rhs_scale if mat.size else 0.0
    return SieveReport(exp, max(per), float(np.mean(per)), per, exp.rhs_scale, A.shape[0],
                       max(gaps) if gaps else 0.0, norm)


def large_sieve_ratio(exp: SieveExperiment) -> SieveReport:
    """Direct form: random a(m) on the m window, sum over admissible n with N(n) in [Q, 2Q]."""
    return _run(exp, character_matrix(exp), 1, "columns")


def dual_large_sieve_ratio(exp: SieveExperiment) -> SieveReport:
    """Dual form: random b(n) on the moduli, inner sums over the m window."""
    return _run(exp, character_matrix(exp), 2, "rows")


def ratio_for(exp: SieveExperiment, a: np.ndarray, dual: bool = False) -> float:
    """Ratio for explicit coefficients (a(m) on the window, or b(n) on moduli if ``dual``)."""
    A = character_matrix(exp)
    mat = A.conj().T if dual else A
    a = np.asarray(a, dtype=complex)
    if a.shape != (mat.shape[1],):
        raise ValidationError(f"expected {mat.shape[1]} coefficients, got {a.shape}")
    norm2 = float(np.sum(np.abs(a) ** 2))
    if norm2 == 0 or mat.shape[0] == 0:
        return 0.0
    return lhs_direct(mat, a) / (exp.rhs_scale * norm2)


def grid_scan(Ms, Qs, trials: int = 100, seed: int = 1, sampler: str = "pm_one") -> list[tuple[SieveReport, SieveReport]]:
    out = []
    for M in Ms:
        for Q in Qs:
            exp = SieveExperiment(M, Q, trials, seed, sampler)
            out.append((large_sieve_ratio(exp), dual_large_sieve_ratio(exp)))
    return out


def write_sieve_csv(reports, fh: io.TextIOBase) -> None:
    w = csv.DictWriter(fh, fieldnames=SIEVE_CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in reports:
        w.writerow(r.row())


# ---------------------------------------------------------------------------
# second moment of Hecke L-values


@dataclass(frozen=True)
class SecondMomentRow:
    M: int
    total: float  # sum over non-cube m <= M
    principal_total: float  # sum over cubes m <= M, reported separately
    count: int
    max_error: float


@dataclass(frozen=True)
class SecondMomentTable:
    rows: tuple[SecondMomentRow, ...]
    slope: float
    t: float


def fit_slope(xs, ys) -> float:
    """Least-squares slope of log y against log x (nan with fewer than two usable points)."""
    pts = [(math.log(x), math.log(y)) for x, y in zip(xs, ys) if x > 0 and y > 0]
    if len(pts) < 2:
        return float("nan")
    lx, ly = np.array(pts).T
    return float(np.polyfit(lx, ly, 1)[0])


def second_moment_scan(M_list, t: float = 0.0, method: str = "auto") -> SecondMomentTable:
    from .lfunctions.hecke import cube_free_part, hecke_L

    M_list = sorted(int(M) for M in M_list)
    s = complex(0.5, t)
    cache: dict[int, tuple[float, float]] = {}
    rows = []
    for M in M_list:
        total = principal = 0.0
        count = 0
        err = 0.0
        for m in range(1, M + 1):
            if m not in cache:
                v = hecke_L(s, m, method)
                cache[m] = (abs(v.value) ** 2, v.abs_error_estimate)
            sq, e = cache[m]
            if cube_free_part(m) == 1:
                principal += sq
            else:
                total += sq
                count += 1
                err = max(err, e)
        rows.append(SecondMomentRow(M, total, principal, count, err))
    slope = fit_slope([r.M for r in rows], [r.total for r in rows])
    return SecondMomentTable(tuple(rows), slope, float(t))


def write_second_moment_csv(table: SecondMomentTable, fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["M", "t", "sum_nonprincipal", "sum_principal", "count", "max_error", "slope"])
    for r in table.rows:
        w.writerow([r.M, repr(table.t), repr(r.total), repr(r.principal_total), r.count, repr(r.max_error),
                    repr(table.slope)])

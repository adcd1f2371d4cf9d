"""Smoothing kernels for the approximate functional equation.

The kernel ``k(w)`` is the Mellin transform of a test function ``f`` with
``int f(x) dx/x = 1``.  From it we build the cutoff functions

    F1(x) = 1/(2 pi i) int_(sigma) k(w) x^-w dw/w
    F2(x) = 1/(2 pi i) int_(sigma) k(-w) G(s - w) x^-w dw/w

where ``G(w) = L_inf(1 - w, dual) / L_inf(w)`` is the ratio of archimedean
factors.  Vertical-line integrals use the trapezoidal rule, which converges
geometrically for integrands analytic in a strip around the line; the error is
estimated by comparing against the rule with every other node dropped.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import ContourError, PoleAtArgument, QuadratureFailure

GAUSSIAN_DEFAULT_C = 0.25


@dataclass(frozen=True)
class KernelChoice:
    """``gaussian_mellin``: k(w) = exp(c w^2) with ``parameters = (c,)``.
    ``compact_bump``: f is a normalized exp(-1/((y-1)(2-y))) bump on [1, 2]."""

    name: str = "gaussian_mellin"
    parameters: tuple[float, ...] = ()

    def __post_init__(self):
        if self.name not in ("gaussian_mellin", "compact_bump"):
            raise ValueError(f"unknown kernel {self.name!r}")
        if self.name == "gaussian_mellin" and self.c <= 0:
            raise ValueError("gaussian_mellin needs c > 0")

    @property
    def c(self) -> float:
        return float(self.parameters[0]) if self.parameters else GAUSSIAN_DEFAULT_C

    def k(self, w):
        w = np.asarray(w, dtype=complex)
        if self.name == "gaussian_mellin":
            return np.exp(self.c * w * w)
        return _bump_mellin(w)

    def height(self, sigma: float, extra_decay: float = 0.0) -> float:
        """Truncation height T for the vertical line Re w = sigma."""
        if self.name == "gaussian_mellin":
            return math.sqrt(sigma * sigma + (50.0 + extra_decay) / self.c)
        return 600.0 + 10.0 * extra_decay

    def F1_exact(self, x):
        """Closed form of F1 computed without contour integration.

        gaussian: 1/2 erfc(log x / (2 sqrt c)); compact bump: int_x^inf f(y) dy/y.
        """
        x = np.asarray(x, dtype=float)
        if self.name == "gaussian_mellin":
            return 0.5 * special.erfc(np.log(x) / (2.0 * math.sqrt(self.c)))
        return _bump_tail(x)


DEFAULT_KERNEL = KernelChoice()


def kernel_k(w, choice: KernelChoice = DEFAULT_KERNEL):
    """k(w) = int_0^inf f(y) y^w dy/y."""
    out = choice.k(w)
    return out if np.ndim(out) else complex(out)


# ---------------------------------------------------------------------------
# the compact bump


def _bump_raw(y):
    y = np.asarray(y, dtype=float)
    out = np.zeros_like(y)
    inside = (y > 1) & (y < 2)
    t = y[inside]
    out[inside] = np.exp(-1.0 / ((t - 1.0) * (2.0 - t)))
    return out


@lru_cache(maxsize=1)
def _bump_nodes(n: int = 800):
    x, wts = np.polynomial.legendre.leggauss(n)
    y = 1.5 + 0.5 * x
    wts = 0.5 * wts
    fy = _bump_raw(y)
    mass = np.sum(wts * fy / y)
    return y, wts * fy / mass


def _bump_mellin(w):
    y, wf = _bump_nodes()
    w = np.asarray(w, dtype=complex)
    flat = w.ravel()
    out = np.empty(flat.shape, dtype=complex)
    logy = np.log(y)
    for i in range(0, flat.size, 256):
        chunk = flat[i : i + 256]
        out[i : i + 256] = np.exp(np.outer(chunk - 1.0, logy)) @ wf
    return out.reshape(w.shape)


def _bump_tail(x):
    y, wf = _bump_nodes()
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.shape)
    for i, xv in enumerate(flat):
        if xv <= 1:
            out[i] = 1.0
        elif xv >= 2:
            out[i] = 0.0
        else:
            # int_x^2 f(y) dy/y with its own Gauss-Legendre rule
            g, gw = np.polynomial.legendre.leggauss(200)
            yy = 0.5 * (2 - xv) * g + 0.5 * (2 + xv)
            out[i] = 0.5 * (2 - xv) * np.sum(gw * _bump_raw(yy) / yy) / _bump_mass()
    return out.reshape(x.shape)


@lru_cache(maxsize=1)
def _bump_mass() -> float:
    g, gw = np.polynomial.legendre.leggauss(800)
    y = 1.5 + 0.5 * g
    return float(0.5 * np.sum(gw * _bump_raw(y) / y))


# ---------------------------------------------------------------------------
# archimedean data


@dataclass(frozen=True)
class ArchimedeanData:
    """Local parameters mu_j: L_inf(s) = prod_j Gamma_R(s + mu_j)."""

    mu: tuple[complex, ...]
    degree: int = field(default=0)

    def __post_init__(self):
        mu = tuple(complex(m) for m in self.mu)
        object.__setattr__(self, "mu", mu)
        if self.degree == 0:
            object.__setattr__(self, "degree", len(mu))
        if self.degree != len(mu):
            raise ValueError("degree must equal the number of mu parameters")

    @property
    def beta0(self) -> float:
        return max(m.real for m in self.mu)

    @property
    def dual_mu(self) -> tuple[complex, ...]:
        return tuple(m.conjugate() for m in self.mu)

    def log_gamma_factor(self, s):
        s = np.asarray(s, dtype=complex)
        return sum(_log_gamma_r(s + m) for m in self.mu)


def _log_gamma_r(s):
    return -0.5 * s * math.log(math.pi) + special.loggamma(0.5 * s)


def _near_nonpositive_even(z, tol=1e-10):
    z = np.asarray(z, dtype=complex)
    k = np.round(-z.real / 2.0)
    return (k >= 0) & (np.abs(z + 2 * k) < tol)


def gamma_ratio_G(w, arch: ArchimedeanData):
    """G(w) = L_inf(1 - w, dual) / L_inf(w)."""
    scalar = np.ndim(w) == 0
    w = np.atleast_1d(np.asarray(w, dtype=complex))
    for m in arch.dual_mu:
        if np.any(_near_nonpositive_even(1 - w + m)):
            raise PoleAtArgument(f"G has a pole at w = {w[_near_nonpositive_even(1 - w + m)][0]} (mu = {m})")
    # at poles of the denominator G vanishes (1/Gamma is entire)
    den_pole = np.zeros(w.shape, dtype=bool)
    for m in arch.mu:
        den_pole |= _near_nonpositive_even(w + m)
    wo = w[~den_pole]
    out = np.zeros(w.shape, dtype=complex)
    out[~den_pole] = np.exp(sum(_log_gamma_r(1 - wo + m) for m in arch.dual_mu)
                            - sum(_log_gamma_r(wo + m) for m in arch.mu))
    return complex(out[0]) if scalar else out


def g_poles_real_parts(s: complex, arch: ArchimedeanData) -> list[float]:
    """Real parts of the rightmost poles of w -> G(s - w)."""
    return [s.real - 1 - m.real for m in arch.dual_mu]


# ---------------------------------------------------------------------------
# vertical line quadrature


def _trapezoid_line(integrand, sigma: float, T: float, h: float):
    """(1/2 pi i) int_{sigma - iT}^{sigma + iT} g(w) dw for g vectorized in w.

    ``integrand(w)`` returns an array of shape (len(w), ...).  Returns the
    estimate with step h and with step 2h.
    """
    n = int(math.ceil(T / h))
    t = h * np.arange(-n, n + 1)
    g = integrand(sigma + 1j * t)
    fine = h * g.sum(axis=0) / (2 * math.pi)
    coarse = 2 * h * g[::2].sum(axis=0) / (2 * math.pi) if n % 2 == 0 else 2 * h * g[1::2].sum(axis=0) / (2 * math.pi)
    return fine, coarse


QUAD_STEP = {"gaussian_mellin": 0.025, "compact_bump": 0.04}


def F1(x, choice: KernelChoice = DEFAULT_KERNEL, sigma: float | None = None, h: float | None = None, tol: float = 1e-9):
    """F1(x) by contour integration on Re w = sigma (> 0).

    The default line is Re w = 2 for x >= 1 and Re w = 1/2 below 1, which
    keeps the size of x^-w, hence round-off, moderate.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(x <= 0):
        raise ValueError("F1 needs x > 0")
    h = h or QUAD_STEP[choice.name]
    out = np.empty(x.shape)
    groups = [(x >= 1, 2.0), (x < 1, 0.5)] if sigma is None else [(np.ones(x.shape, bool), sigma)]
    for mask, sg in groups:
        if not mask.any():
            continue
        if sg <= 0:
            raise ContourError("the F1 contour must lie in Re w > 0")
        logx = np.log(x[mask])
        T = choice.height(sg)

        def integrand(w):
            kw = choice.k(w) / w
            return kw[:, None] * np.exp(-np.outer(w, logx))

        fine, coarse = _chunked_line(integrand, sg, T, h, logx.size)
        err = np.max(np.abs(fine - coarse))
        if err > tol * max(1.0, np.max(np.abs(fine))):
            raise QuadratureFailure("F1 quadrature did not converge", err)
        out[mask] = fine.real
    return out if out.size > 1 else float(out[0])


def _chunked_line(integrand, sigma, T, h, width, budget=4_000_000):
    """Trapezoid along the line, splitting the target axis to bound memory."""
    n = int(math.ceil(T / h))
    rows = 2 * n + 1
    step = max(1, budget // rows)
    fines, coarses = [], []
    for lo in range(0, width, step):
        def sub(w, lo=lo):
            return integrand(w)[:, lo : lo + step]
        f, c = _trapezoid_line(sub, sigma, T, h)
        fines.append(f)
        coarses.append(c)
    return np.concatenate(fines), np.concatenate(coarses)


def F2(x, arch: ArchimedeanData, s: complex, choice: KernelChoice = DEFAULT_KERNEL, sigma: float | None = None,
       h: float | None = None, tol: float = 1e-9):
    """F2(x) for evaluation point ``s`` (its real part is the beta of the cutoff).

    By default points x >= 1 use the line Re w = max(2, p + 1) and points below
    1 the line Re w = max(1/4, p + 1/2), p the rightmost pole of G(s - w); the
    smaller abscissa keeps x^-w, hence round-off, small.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    s = complex(s)
    poles = g_poles_real_parts(s, arch)
    p = max(poles)
    if sigma is None:
        groups = [(x >= 1, max(2.0, p + 1.0)), (x < 1, max(0.25, p + 0.5))]
    else:
        groups = [(np.ones(x.shape, bool), sigma)]
    h = h or QUAD_STEP[choice.name]
    out = np.empty(x.shape, dtype=complex)
    for mask, sg in groups:
        if not mask.any():
            continue
        if sg <= 0:
            raise ContourError("the F2 contour must lie in Re w > 0")
        for r in poles:
            if abs(sg - r) < 1e-6:
                raise ContourError(f"contour Re w = {sg} runs through a pole of G(s - w)")
            if sg < r:
                raise ContourError(f"contour Re w = {sg} lies left of a pole of G(s - w) at Re w = {r}")
        logx = np.log(x[mask])
        growth = arch.degree * max(0.0, 0.5 - s.real + sg) * 3.0
        T = choice.height(sg, growth)

        def integrand(w, sg=sg, logx=logx):
            kw = choice.k(-w) * gamma_ratio_G(s - w, arch) / w
            return kw[:, None] * np.exp(-np.outer(w, logx))

        fine, coarse = _chunked_line(integrand, sg, T, h, logx.size)
        err = np.max(np.abs(fine - coarse))
        if err > tol * max(1.0, np.max(np.abs(fine))):
            raise QuadratureFailure("F2 quadrature did not converge", err)
        out[mask] = fine
    return out if out.size > 1 else complex(out[0])


# ---------------------------------------------------------------------------
# tabulation in log x


class LogTable:
    """A function of x tabulated on a uniform grid in u = log x.

    Interpolation is 6-point Lagrange; values left of the grid are taken from
    ``left`` (a constant) and right of it are zero.
    """

    ORDER = 6

    def __init__(self, u0: float, h: float, values: np.ndarray, left=None):
        self.u0, self.h = u0, h
        self.values = np.asarray(values)
        self.left = self.values[0] if left is None else left

    @property
    def u1(self) -> float:
        return self.u0 + self.h * (len(self.values) - 1)

    def __call__(self, x):
        u = np.log(np.asarray(x, dtype=float))
        pos = (u - self.u0) / self.h
        n = len(self.values)
        out = np.zeros(u.shape, dtype=self.values.dtype)
        inside = (pos >= 2) & (pos <= n - 4)
        out[pos < 2] = self.left
        p = pos[inside]
        base = np.floor(p).astype(np.int64) - 2
        t = p - base
        acc = np.zeros(p.shape, dtype=self.values.dtype)
        for j in range(self.ORDER):
            lj = np.ones(p.shape)
            for k in range(self.ORDER):
                if k != j:
                    lj *= (t - k) / (j - k)
            acc += lj * self.values[base + j]
        out[inside] = acc
        return out

    def cutoff(self, rel_tol: float) -> float:
        """Smallest x beyond which |value| stays below rel_tol * max |value|."""
        mag = np.abs(self.values)
        big = np.flatnonzero(mag > rel_tol * mag.max())
        last = big[-1] if big.size else 0
        return math.exp(self.u0 + self.h * (last + 1))

    def magnitude_at(self, x: float) -> float:
        return float(abs(self(np.array([x]))[0]))


TABLE_STEP = 2.0**-7


def tabulate_F1(choice: KernelChoice, u_min: float = -12.0, u_max: float | None = None) -> LogTable:
    if u_max is None:
        u_max = 14.0 if choice.name == "gaussian_mellin" else 1.0
    u = np.arange(u_min, u_max + TABLE_STEP, TABLE_STEP)
    vals = F1(np.exp(u), choice)
    return LogTable(u_min, TABLE_STEP, np.atleast_1d(vals), left=1.0)


def tabulate_F2(arch: ArchimedeanData, s: complex, choice: KernelChoice, u_min: float, u_max: float = 30.0,
                step: float = TABLE_STEP) -> LogTable:
    u = np.arange(u_min, u_max + step, step)
    vals = np.atleast_1d(F2(np.exp(u), arch, s, choice))
    return LogTable(u_min, step, vals, left=np.nan)


# ---------------------------------------------------------------------------
# the weight W and the transform f~


def _smooth_step(t):
    """0 for t <= 0, 1 for t >= 1, C-infinity in between."""
    t = np.asarray(t, dtype=float)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def weight_W(x):
    """Smooth bump: 1 on [1, 2], 0 outside [1/2, 5/2]."""
    x = np.asarray(x, dtype=float)
    out = np.where(x < 1.5, _smooth_step(2.0 * (x - 0.5)), _smooth_step(2.0 * (2.5 - x)))
    return out if out.ndim else float(out)


W_INTEGRAL = 1.5  # int W(x) dx: each transition contributes exactly 1/4


@lru_cache(maxsize=32)
def _w_nodes(n: int = 160):
    g, gw = np.polynomial.legendre.leggauss(n)
    xs, ws = [], []
    for lo, hi in ((0.5, 1.0), (1.0, 2.0), (2.0, 2.5)):
        xs.append(0.5 * (hi - lo) * g + 0.5 * (hi + lo))
        ws.append(0.5 * (hi - lo) * gw)
    x = np.concatenate(xs)
    return x, np.concatenate(ws) * weight_W(x)


def f_tilde(z, m: float, Y: float, degree: int = 3, choice: KernelChoice = DEFAULT_KERNEL, nodes: int | None = None):
    """int F1((m/Y) x^-degree) W(x) x^(z-1) dx over the support of W."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    # x^(z-1) oscillates about |Im z| * 0.7 radians across the widest panel
    n = 160 + 40 * int(math.ceil(np.max(np.abs(z.imag)) / 80.0)) if nodes is None else nodes
    x, w = _w_nodes(n)
    f1 = np.asarray(choice.F1_exact((m / Y) * x ** (-degree)), dtype=float)
    vals = np.exp(np.outer(z - 1.0, np.log(x))) @ (w * f1)
    return vals if vals.size > 1 else complex(vals[0])


def ftilde_decay_profile(j: int, m: float = 1.0, Y: float = 1.0, t_max: float = 3000.0, points: int = 80,
                         degree: int = 3, choice: KernelChoice = DEFAULT_KERNEL):
    """Return (t, |f~(1/2 + it)| (1 + |z|)^j (1 + m/Y)^j) on a log grid of t."""
    t = np.geomspace(1.0, t_max, points)
    z = 0.5 + 1j * t
    vals = np.abs(f_tilde(z, m, Y, degree, choice))
    return t, vals * (1 + np.abs(z)) ** j * (1 + m / Y) ** j

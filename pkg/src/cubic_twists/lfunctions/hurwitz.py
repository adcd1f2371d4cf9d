"""Hurwitz zeta by Euler-Maclaurin, and Dirichlet L-values built from it.

zeta(s, a) = sum_{k<N} (k+a)^-s + (N+a)^(1-s)/(s-1) + (N+a)^-s / 2
             + sum_{j=1}^{J} B_2j/(2j)! s(s+1)...(s+2j-2) (N+a)^(-s-2j+1) + R

with N = 20 and J = 12.  At s = 1 the pole term is replaced by -log(N+a),
which is zeta(s, a) - 1/(s-1) in the limit; the pole cancels in any
combination with zero coefficient sum, such as a nonprincipal character.
"""
from __future__ import annotations

import math

import numpy as np
from scipy.special import bernoulli

from ..characters import CubicCharacter
from ..errors import PoleAtOne
from .lvalue import LValue

SHIFT = 20
TERMS = 12
_MAX_TERMS = 40
_B = bernoulli(2 * _MAX_TERMS + 2)
_COEF = np.array([_B[2 * j] / math.factorial(2 * j) for j in range(1, _MAX_TERMS + 2)])


def hurwitz_zeta(s: complex, a, shift: int = SHIFT, terms: int = TERMS, regularized: bool = False):
    """(values, error estimates) of zeta(s, a) for an array of a in (0, 1].

    ``regularized`` drops the 1/(s-1) singularity at s = 1 (see module doc).
    The error estimate is the size of the first omitted correction term.
    """
    s = complex(s)
    if terms > _MAX_TERMS:
        raise ValueError(f"at most {_MAX_TERMS} correction terms")
    a = np.atleast_1d(np.asarray(a, dtype=float))
    if np.any(a <= 0):
        raise ValueError("hurwitz_zeta needs a > 0")
    k = np.arange(shift)[:, None]
    head = np.exp(-s * np.log(k + a[None, :])).sum(axis=0)
    Na = shift + a
    logNa = np.log(Na)
    if s == 1:
        if not regularized:
            raise PoleAtOne("zeta(s, a) has a pole at s = 1")
        pole = -logNa
    else:
        pole = np.exp((1 - s) * logNa) / (s - 1)
    tail = 0.5 * np.exp(-s * logNa)
    rising = s  # s (s+1) ... (s + 2j - 2)
    corr = np.zeros_like(head)
    err = np.zeros(a.shape)
    for j in range(1, terms + 2):
        term = _COEF[j - 1] * rising * np.exp((-s - 2 * j + 1) * logNa)
        if j <= terms:
            corr += term
            rising *= (s + 2 * j - 1) * (s + 2 * j)
        else:
            err = np.abs(term)
    vals = head + pole + tail + corr
    roundoff = 4e-16 * (np.abs(head) + np.abs(pole) + 1.0)
    return vals, err + roundoff


def dirichlet_L_oracle(s: complex, chi: CubicCharacter, shift: int = SHIFT, terms: int = TERMS) -> LValue:
    """L(s, chi) = q^-s sum_a chi(a) zeta(s, a/q), valid for every s."""
    s = complex(s)
    q = chi.modulus
    r = np.flatnonzero(chi.table >= 0)
    r = np.where(r == 0, q, r)  # residue 0 is a unit only when q = 1
    principal = chi.order == 1
    if s == 1 and principal:
        raise PoleAtOne("L(s, chi0) has a pole at s = 1")
    vals, errs = hurwitz_zeta(s, r / q, shift, terms, regularized=(s == 1))
    weights = chi(r)
    scale = np.exp(-s * math.log(q))
    value = scale * np.dot(weights, vals)
    est = abs(scale) * float(np.sum(errs))
    return LValue(complex(value), est, int(r.size) * shift, "hurwitz_oracle", {"shift": shift, "terms": terms})

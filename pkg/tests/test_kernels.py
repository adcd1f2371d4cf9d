import math

import mpmath as mp
import numpy as np
import pytest

from cubic_twists.errors import ContourError, PoleAtArgument
from cubic_twists.kernels import (
    DEFAULT_KERNEL, ArchimedeanData, F1, F2, KernelChoice, W_INTEGRAL, f_tilde, ftilde_decay_profile, gamma_ratio_G,
    kernel_k, weight_W,
)

GAUSS = DEFAULT_KERNEL
BUMP = KernelChoice("compact_bump")
KERNELS = [GAUSS, BUMP]
ZETA = ArchimedeanData((0.0,))


@pytest.mark.parametrize("choice", KERNELS, ids=lambda c: c.name)
def test_k_normalized(choice):
    assert abs(kernel_k(0, choice) - 1) <= 1e-8


def test_gaussian_vertical_decay():
    sig = np.linspace(-2, 2, 9)
    t = np.linspace(40, 200, 50)
    w = sig[:, None] + 1j * t[None, :]
    assert np.max(np.abs(kernel_k(w, GAUSS))) <= 1e-8


@pytest.mark.parametrize("j", range(1, 5))
def test_bump_decay_faster_than_polynomial(j):
    # t^j |k| peaks and then falls; for the [1, 2] bump the turnover sits below |Im w| = 50
    t = np.geomspace(1.0, 200.0, 40)
    vals = np.abs(kernel_k(0.5 + 1j * t, BUMP)) * t**j
    assert t[np.argmax(vals)] < 50
    assert vals[-1] < 0.1 * vals.max()


@pytest.mark.parametrize("choice", KERNELS, ids=lambda c: c.name)
def test_F1_limits(choice):
    assert abs(F1(1e-3, choice) - 1) <= 1e-6
    assert abs(F1(1e3, choice)) <= 1e-6
    x = np.geomspace(1e-4, 1e4, 80)
    v = F1(x, choice)
    assert np.all(v >= -1e-9) and np.all(v <= 1 + 1e-6)
    tail = v[x > 10]
    assert np.all(np.diff(tail) <= 1e-12)


@pytest.mark.parametrize("choice", KERNELS, ids=lambda c: c.name)
def test_F1_matches_closed_form(choice):
    x = np.geomspace(0.2, 5.0, 25)
    assert np.max(np.abs(F1(x, choice) - choice.F1_exact(x))) <= 1e-9


def test_F1_at_one():
    v1, v2 = F1(1.0, GAUSS), F1(1.0, GAUSS, h=0.0125)
    assert 0 < v1 < 1 and abs(v1 - v2) <= 1e-8
    # the bump lives on [1, 2], so F1 is still 1 at x = 1; x = 1.5 is the interior point
    b = F1(1.5, BUMP)
    assert 0 < b < 1 and abs(b - F1(1.5, BUMP, h=0.02)) <= 1e-8


@pytest.mark.parametrize("choice", KERNELS, ids=lambda c: c.name)
def test_F1_contour_independence(choice):
    x = np.array([0.3, 1.2, 4.0])
    assert np.max(np.abs(F1(x, choice, sigma=1.0) - F1(x, choice, sigma=3.0))) <= 1e-8


def test_F1_rejects_bad_contour():
    with pytest.raises(ContourError):
        F1(2.0, GAUSS, sigma=-0.5)


def test_G_matches_zeta_functional_equation():
    w = mp.mpc(0.5, 1)
    want = mp.zeta(1 - w) / mp.zeta(w)
    # G(w) = L_inf(1 - w) / L_inf(w) and zeta_inf zeta is symmetric, so G = zeta(w) / zeta(1 - w) inverted
    assert complex(gamma_ratio_G(complex(w), ZETA)) == pytest.approx(complex(1 / want), rel=1e-12)


def test_G_self_dual_reflection_and_growth():
    arch = ArchimedeanData((1.0, 11.0, 12.0))
    for w in [0.3 + 2j, 0.7 - 5j, 1.1 + 17j]:
        assert gamma_ratio_G(w.conjugate(), arch) == pytest.approx(np.conj(gamma_ratio_G(w, arch)), rel=1e-12)
    t = np.linspace(-20, 20, 81)
    vals = np.abs(gamma_ratio_G(0.6 + 1j * t, arch))
    assert np.all(np.isfinite(vals))
    # polynomial growth of order |t|^(degree (1/2 - beta)) at most
    assert np.max(vals) <= 10 * (1 + 20.0) ** (3 * 0.5) * np.max(vals[np.abs(t) < 1])


def test_G_pole():
    with pytest.raises(PoleAtArgument):
        gamma_ratio_G(1.0, ZETA)  # Gamma_R(1 - w) has a pole at w = 1


def test_F2_decay_and_contours():
    s = 0.8 + 0.5j
    assert abs(F2(1e3, ZETA, s)) <= 1e-6
    x = np.array([0.5, 2.0, 6.0])
    a = F2(x, ZETA, s, sigma=1.0)
    b = F2(x, ZETA, s, sigma=2.5)
    assert np.max(np.abs(a - b)) <= 1e-8


def test_F2_small_x_growth():
    s = 0.9
    x = np.geomspace(1e-4, 1e-1, 8)
    v = np.abs(F2(x, ZETA, s))
    eps = 0.05
    # the implied constant: F2 tends to G(s) k(0) as x -> 0
    C = 2 * max(1.0, abs(gamma_ratio_G(s, ZETA)))
    assert np.all(v <= C * (1 + x ** (1 - ZETA.beta0 - s - eps)))


def test_F2_contour_through_pole():
    s = 0.8
    with pytest.raises(ContourError):
        F2(2.0, ZETA, s, sigma=s - 1 - 0.5)  # left of the pole at Re w = s - 1, and negative


def test_weight_W():
    assert weight_W(1.5) == 1.0
    assert weight_W(3.0) == 0.0
    assert weight_W(0.4) == 0.0 and weight_W(1.0) == 1.0 and weight_W(2.0) == 1.0
    x = np.linspace(0.5, 2.5, 200001)
    assert np.trapezoid(weight_W(x), x) == pytest.approx(W_INTEGRAL, abs=1e-8)


def test_f_tilde_quadrature_convergence():
    z = 0.5 + 1j * np.array([0.0, 3.0, 30.0, 300.0])
    a = f_tilde(z, 2.0, 1.0)
    b = f_tilde(z, 2.0, 1.0, nodes=4000)
    assert np.max(np.abs(a - b)) <= 1e-8


def test_f_tilde_decays_at_30():
    r = abs(f_tilde(0.5 + 30j, 1.0, 1.0)) / abs(f_tilde(0.5, 1.0, 1.0))
    # W is pinned to a plateau on [1, 2] with support in [1/2, 5/2]; its upper transition is only
    # log(5/4) wide, so at height 30 the transform has dropped by about 1/40, not 10^-4
    assert r < 0.05


@pytest.mark.parametrize("j", range(5))
@pytest.mark.parametrize("mY", [(1.0, 1.0), (10.0, 1.0), (1.0, 10.0)])
def test_f_tilde_decay_profile(j, mY):
    t, prof = ftilde_decay_profile(j, *mY)
    peak = int(np.argmax(prof))
    assert peak < 0.75 * len(t)
    assert prof[-len(t) // 5 :].max() <= 0.05 * prof.max()

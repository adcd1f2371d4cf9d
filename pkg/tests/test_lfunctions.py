import math

import mpmath as mp
import numpy as np
import pytest

from cubic_twists import characters as ch
from cubic_twists.errors import ConvergenceError, MissingLocalData, NotACube, NotPrimitive, PoleAtOne
from cubic_twists.lfunctions import (
    C_OMEGA, AfeConfig, L_afe, LValue, dedekind_zeta_Qomega, dirichlet_L_oracle, epsilon_factor, get_provider,
    hecke_character, hecke_L, hurwitz_zeta, partial_LS, residue_of_partial_hecke, s_local_data, tau_exact,
)
from cubic_twists.lfunctions import providers as prov
from cubic_twists.lfunctions.hecke import cube_free_part

ZETA = get_provider("zeta")
GL2 = get_provider("gl2_delta")
SYM2 = get_provider("sym2_delta")
CHI7 = ch.enumerate_family(7)[0]
FAM = ch.enumerate_family(200)


def rel(a, b):
    return abs(a - b) / abs(b)


# -- providers ---------------------------------------------------------------


def test_tau_small_values():
    # Delta = q prod (1 - q^n)^24
    assert tau_exact(10)[1:] == [1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]


def test_tau_matches_series_oracle():
    N = 60
    series = np.zeros(N + 1, dtype=object)
    series[0] = 1
    for n in range(1, N + 1):
        for _ in range(24):
            series[n:] = series[n:] - series[: N + 1 - n]
    assert [int(v) for v in series[:N]] == tau_exact(N)[1:]


def test_provider_basics():
    assert np.all(ZETA.coefficients(100)[1:] == 1)
    a = GL2.coefficients(1000)
    t = tau_exact(1000)
    n = np.arange(1, 1001)
    assert np.allclose(a[1:], np.array(t[1:], dtype=float) / n**5.5, rtol=1e-12, atol=1e-15)
    for pr in (ZETA, GL2, SYM2):
        assert pr.coeff(1) == 1
        assert abs(pr.root_number) == pytest.approx(1)


def test_sym2_at_primes():
    lam = GL2.coefficients(500)
    b = SYM2.coefficients(500)
    for p in (2, 3, 5, 7, 11, 499):
        assert b[p] == pytest.approx(lam[p] ** 2 - 1, abs=1e-13)


def test_multiplicativity_audit():
    rng = np.random.default_rng(7)
    for pr in (GL2, SYM2):
        a = pr.coefficients(20000)
        done = 0
        while done < 1000:
            m1, m2 = rng.integers(1, 141, size=2)
            if math.gcd(m1, m2) != 1:
                continue
            assert a[m1 * m2] == pytest.approx(a[m1] * a[m2], abs=1e-12)
            done += 1


def test_temperedness_audit():
    ps = prov.primes_up_to(10_000)
    assert np.max(np.abs(SYM2.coefficients(10_000)[ps])) <= 3
    assert np.max(np.abs(GL2.coefficients(10_000)[ps])) <= 2
    for p in (2, 3, 101, 9973):
        assert np.allclose(np.abs(SYM2.satake(p)), 1, atol=1e-9)


def test_dual_coefficients():
    for pr in (ZETA, GL2, SYM2):
        assert np.allclose(pr.dual_coefficients(200), np.conj(pr.coefficients(200)))


def test_cache_round_trip(tmp_path):
    ps, vals = prov.tau_primes(500)
    path = tmp_path / "gl2_delta.csv"
    prov.write_cache(path, "gl2_delta", "tag", ps, vals)
    first = path.read_text()
    assert first.startswith("# " + prov.CACHE_VERSION)
    got = prov.read_cache(path, "gl2_delta", "tag")
    assert np.array_equal(got[0], ps) and np.array_equal(got[1].real, vals)
    assert prov.read_cache(path, "gl2_delta", "other") is None


# -- Hurwitz oracle ----------------------------------------------------------


@pytest.mark.parametrize("s,a", [(2.0, 0.3), (0.5 + 3j, 0.7), (-1.5 + 2j, 0.25), (1.2, 1.0)])
def test_hurwitz_against_mpmath(s, a):
    v, err = hurwitz_zeta(s, np.array([a]))
    want = complex(mp.zeta(s, a))
    assert abs(v[0] - want) <= 1e-11 * max(1, abs(want))
    assert err[0] <= 1e-10


def test_oracle_examples():
    z2 = dirichlet_L_oracle(2, ch.principal(1))
    assert z2.value == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert z2.method == "hurwitz_oracle" and z2.abs_error_estimate <= 1e-10
    with pytest.raises(PoleAtOne):
        dirichlet_L_oracle(1, ch.principal(1))
    v1 = dirichlet_L_oracle(1, CHI7)
    v2 = dirichlet_L_oracle(1, CHI7, shift=40, terms=24)
    assert abs(v1.value) > 0.1 and abs(v1.value - v2.value) <= 1e-10
    s = 0.7 + 2j
    assert dirichlet_L_oracle(s.conjugate(), CHI7.conj()).value == pytest.approx(
        np.conj(dirichlet_L_oracle(s, CHI7).value), abs=1e-12)


def test_lvalue_invariants():
    with pytest.raises(ValueError):
        LValue(1.0, -1.0, 1, "afe")
    with pytest.raises(ValueError):
        LValue(1.0, 0.0, 1, "guess")


# -- AFE -----------------------------------------------------------------------


@pytest.mark.parametrize("chi", FAM[::6], ids=lambda c: c.label)
def test_afe_matches_oracle(chi):
    s = 0.9 + 0.3j
    a = L_afe(s, ZETA, chi)
    b = dirichlet_L_oracle(s, chi)
    assert rel(a.value, b.value) <= 1e-6
    assert a.method == "afe" and a.terms_used > 0


def test_afe_zeta_q1():
    for s in (2.0, 1.5, 0.5 + 1j):
        v = L_afe(s, ZETA, ch.principal(1)).value
        assert rel(v, complex(mp.zeta(s))) <= 1e-10


def test_epsilon_magnitude():
    for chi in FAM[:20]:
        for pr in (ZETA, GL2, SYM2):
            s = 0.8 + 0.4j
            eps = epsilon_factor(s, pr, chi)
            assert abs(eps) == pytest.approx(chi.modulus ** (pr.degree * (0.5 - s.real)), rel=1e-9)


@pytest.mark.parametrize("pr", [ZETA, GL2, SYM2], ids=lambda p: p.provider_id)
def test_split_invariance(pr):
    chi = [c for c in FAM if c.modulus == 13][0]
    s = 0.75 + 0.2j
    base = L_afe(s, pr, chi).value
    for bal in (0.25, 4.0):
        assert rel(L_afe(s, pr, chi, AfeConfig(balance=bal)).value, base) <= 1e-6


def test_afe_rejects_imprimitive():
    lifted = ch.product_character(CHI7, ch.principal(4))
    with pytest.raises(NotPrimitive):
        L_afe(1.2, ZETA, lifted)


def test_s_local_data_examples():
    loc = s_local_data(ZETA, CHI7, [3])
    assert loc.I_S == (1, 3) and loc.c[1] == 1 and loc.c[3] == -1
    assert loc.b[3] == pytest.approx(-CHI7(3))
    assert s_local_data(ZETA, CHI7, []).I_S == (1,)
    assert s_local_data(SYM2, CHI7, [2]).I_S == (1, 2, 4, 8)
    with pytest.raises(MissingLocalData):
        s_local_data(ZETA, CHI7, [4])


def test_b_equals_c_times_chi():
    other = FAM[5]
    for pr in (GL2, SYM2):
        l1, l2 = s_local_data(pr, CHI7, [2, 5]), s_local_data(pr, other, [2, 5])
        assert l1.c == l2.c
        for m in l1.I_S:
            assert l1.b[m] == pytest.approx(l1.c[m] * CHI7(m))
            assert l2.b[m] == pytest.approx(l2.c[m] * other(m))
            for p in (2, 5):
                assert m % p ** (pr.degree + 1) != 0


@pytest.mark.parametrize("pr", [ZETA, GL2, SYM2], ids=lambda p: p.provider_id)
def test_partial_LS_methods_agree(pr):
    chi = FAM[3]
    s = 0.9 + 0.1j
    a = partial_LS(s, pr, chi, [2, 3])
    b = partial_LS(s, pr, chi, [2, 3], method="afe_S")
    assert rel(a.value, b.value) <= 1e-9


def test_partial_LS_degree1_local_factor():
    s = 1.3
    full = dirichlet_L_oracle(s, CHI7).value
    part = partial_LS(s, ZETA, CHI7, [3]).value
    assert part == pytest.approx(full * (1 - CHI7(3) * 3**-s), rel=1e-10)
    assert partial_LS(s, ZETA, CHI7, []).value == pytest.approx(full, rel=1e-10)


# -- Hecke -------------------------------------------------------------------------


def test_hecke_principal_identity():
    # primary elements avoid the ramified prime, so 27 removes nothing new; 2 is inert of norm 4
    for m in (1, 8, 27):
        for s in (1.5, 2.0):
            v = hecke_L(s, m).value
            want = complex(mp.zeta(s) * (mp.zeta(s, 1 / 3.0) - mp.zeta(s, 2 / 3.0)) * 3**-s)
            want *= 1 - 3**-s
            if m == 8:
                want *= 1 - 4**-s
            assert rel(v, want) <= 1e-8, (m, s)


def test_dedekind_zeta_identity():
    for s in (1.5, 2.0):
        a = dedekind_zeta_Qomega(s).value
        b = dedekind_zeta_Qomega(s, method="oracle").value
        assert rel(a, b) <= 1e-8


def test_hecke_afe_matches_smoothed():
    from cubic_twists.lfunctions.hecke import hecke_smoothed

    for m in (2, 5):
        s = 0.9 + 0.5j
        a = hecke_L(s, m, "afe").value
        b = hecke_smoothed(s, m).value
        assert rel(a, b) <= 1e-8


def test_hecke_character_values_match_symbol():
    from cubic_twists import eisenstein as eis

    chi = hecke_character(2)
    for pi in eis.primary_primes(300):
        e = chi.exponent(np.array([pi.a]), np.array([pi.b]))[0]
        want = eis.cubic_symbol(2, pi)
        assert (e < 0) == (want is None)
        if want is not None:
            assert e == want


def test_cube_free_part():
    assert cube_free_part(8) == 1 and cube_free_part(24) == 3 and cube_free_part(2) == 2


def test_residue_examples():
    assert residue_of_partial_hecke(1, 1, 1) == pytest.approx(C_OMEGA * 2 / 3)
    want = C_OMEGA * (1 - 1 / 3) * (1 - 1 / 4) * (1 - 1 / 7) ** 2
    assert residue_of_partial_hecke(1, 7, 8) == pytest.approx(want)
    with pytest.raises(NotACube):
        residue_of_partial_hecke(1, 1, 2)
    assert C_OMEGA == pytest.approx(math.pi / (3 * math.sqrt(3)))


def test_hecke_two_scale_failure_is_reported():
    from cubic_twists.lfunctions.hecke import hecke_smoothed

    with pytest.raises(ConvergenceError):
        hecke_smoothed(0.5 + 0j, 5, X=5.0)

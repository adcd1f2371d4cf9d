"""
Twisted L-values
================

L(s, pi x chi) for the three bundled coefficient providers, through the
approximate functional equation, checked against the Hurwitz oracle.
"""
import numpy as np

from cubic_twists import characters as ch
from cubic_twists.lfunctions import (
    AfeConfig, L_afe, dirichlet_L_oracle, get_provider, hecke_L, partial_LS,
)

fam = ch.enumerate_family(60)
chi = fam[0]
zeta = get_provider("zeta")

# degree one: the AFE against the Hurwitz-zeta oracle
for s in (0.9, 1.2, 0.8 + 0.5j):
    a = L_afe(s, zeta, chi)
    b = dirichlet_L_oracle(s, chi)
    print(s, a.value, abs(a.value - b.value) / abs(b.value), a.abs_error_estimate)

# moving the split point leaves the value alone
base = L_afe(0.7, zeta, chi).value
print([abs(L_afe(0.7, zeta, chi, AfeConfig(balance=b)).value - base) for b in (0.25, 4.0)])

# degree two and three twists, with the prime above 3 removed
for pid in ("gl2_delta", "sym2_delta"):
    pi = get_provider(pid)
    v = partial_LS(0.9, pi, chi, [3])
    print(pid, chi.label, v.value, v.abs_error_estimate)

# Hecke L-functions of the cubic symbol; m = 1 and 8 are cubes, so psi_m is principal there
for m in (1, 2, 5, 8):
    print(m, hecke_L(0.5, m).value)

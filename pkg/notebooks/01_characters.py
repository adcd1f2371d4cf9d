"""
Cubic characters from Eisenstein integers
=========================================

Every primitive cubic Dirichlet character of conductor prime to 3 comes from
a primary element of Z[w] built from one prime out of distinct split pairs.
"""
from collections import Counter

import numpy as np

from cubic_twists import characters as ch
from cubic_twists import eisenstein as eis
from cubic_twists.eisenstein import EisensteinInt as E

# 7 = (-2 - 3w)(-2 - 3w^2); the first factor is primary
n = E(-2, -3)
print("norm", eis.norm(n), "primary", eis.is_primary(n))

# the symbol (m / n)_3 as an exponent of w, None when n divides m
print([eis.cubic_symbol(m, n) for m in range(1, 15)])

# the character it defines, and its conjugate from the conjugate generator
chi = ch.from_eisenstein(n)
vals = chi(np.arange(7))
print(np.round(vals, 3))
print(np.allclose(ch.from_eisenstein(n.conj())(np.arange(7)), np.conj(vals)))

# the family up to 300 agrees with brute force over (Z/q)^*
fam = ch.enumerate_family(300)
counts = Counter(c.modulus for c in fam)
print(len(fam), "characters;", sorted(counts.items())[:8])
for q in (7, 13, 91):
    brute = {c.key() for c in ch.brute_force_cubic_characters(q) if c.is_primitive}
    print(q, brute == {c.key() for c in fam if c.modulus == q})

# Gauss sums all sit on the circle of radius sqrt(q)
g = np.array([abs(ch.gauss_sum(c).value) ** 2 / c.modulus for c in fam])
print("|tau|^2 / q in", g.min(), g.max())

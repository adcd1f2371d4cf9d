"""
First moment over the cubic family
==================================

The weighted sum of L^S(s, chi) over admissible moduli of norm about Q, next to
the main term coming from the cube coefficients.
"""
from cubic_twists import moments as mo

cfg = mo.MomentConfig(s=0.9, provider_id="zeta", Q=100)
print(cfg.to_json())

lad = mo.residual_ladder(cfg, [100, 200, 400])
for r in lad:
    print(r.Q, r.census_total, abs(r.direct), abs(r.main_term), abs(r.direct / r.main_term - 1))
print("residual slope", lad.slope)

# the main term, factor by factor
mt = mo.main_term_detail(cfg)
for k, v in mt.factors.items():
    print(f"  {k}: {v}")

# the factorized family: a prime conductor q1 ~ Q^r1 times an admissible part
fac = mo.MomentConfig(s=0.9, r1=0.55, r2=0.45, Q=400, mode="factorized_n3")
d = mo.first_moment_detail(fac)
print(d.members, "members", d.value, mo.main_term(fac))

# non-vanishing at a point right of the centre, for the symmetric square of Delta
res = mo.census(0.9, "sym2_delta", 100)
print(res.nonvanishing, "of", res.total, "threshold", res.threshold)
for w in res.witnesses:
    print("  ", w)

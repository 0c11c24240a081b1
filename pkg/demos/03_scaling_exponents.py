"""
Measuring blowup exponents
==========================

Near T the solution concentrates: its peak grows like (T-t)^c_omega, the
width of the bulk shrinks like (T-t)^c_l and, in the two-scale cases, the
bulk sits at a distance (T-t)^c_s from the blowup point.  The exponents are
fitted from closed-form snapshots, then the rescaled solution is compared
with its limiting profile.
"""

import numpy as np

from clmlab import PRESETS, blowup_snapshots, evaluate, extract_params, measure_scales, predict_blowup
from clmlab.asymptotics import default_taus, profile_error_table

for pid in ("I", "III", "V"):
    d = PRESETS[pid].datum()
    T = predict_blowup(d).T
    snaps = blowup_snapshots(d, T, default_taus())
    rep = measure_scales(snaps, T, evaluator=lambda x, t, d=d: evaluate(d, np.asarray(x, dtype=float), t)[0])
    cs = "same as c_l" if rep.cs_degenerate else f"{rep.c_s:.4f}"
    print(f"{pid:3s} c_omega={rep.c_omega:.4f}  c_l={rep.c_l:.4f}  c_s={cs}  "
          f"c_omega+c_l-c_s+1={rep.power_relation_defect:+.1e}")

# How fast does the rescaled solution approach the limiting profile?
taus = default_taus(1e-5, 1e-2, 13)
for pid, n in (("I", 0), ("II", 0), ("III", 1), ("V", 2)):
    d = PRESETS[pid].datum()
    p = extract_params(d, n)
    tab = profile_error_table(d, p, taus)
    print(f"{pid:3s} n={n}  a={p.a:.6g} c={p.c:.6g}" + ("" if p.b is None else f" b={p.b:.6g}")
          + f"   error at T-t=1e-5: {tab.err_omega[-1]:.2e}, log-log slope {tab.slope_omega:.3f}")

"""
Closed-form solutions and when they blow up
===========================================

Every built-in datum is the boundary trace of a rational function that is
holomorphic in the upper half-plane, so omega_0 and H(omega_0) are known in
closed form and the solution can be written down at any time before T.
"""

import numpy as np

from clmlab import PRESETS, conserved_quantity, evaluate, predict_blowup
from clmlab.errors import EmptyS

# Blowup time and location straight from the zeros of omega_0
for pid, preset in PRESETS.items():
    try:
        pred = predict_blowup(preset.datum())
        pts = ", ".join(f"{x:+.6f}" for x in pred.points)
        print(f"{pid:8s} T = {pred.T:.12g}   points: {pts}")
    except EmptyS:
        print(f"{pid:8s} no blowup (omega_0 has no zero with H(omega_0) > 0)")

# The first datum is exactly self-similar: omega(x, t) = omega_0(x/(1-t)) / (1-t)
d = PRESETS["I"].datum()
xs = np.linspace(-4, 4, 9)
for t in (0.0, 0.5, 0.9):
    om, _ = evaluate(d, xs, t)
    s = 1 - t
    ref = -2 * (xs / s) / (1 + (xs / s) ** 2) / s
    print(f"t={t:3.1f}  max|omega|={np.max(np.abs(om)):8.4f}  self-similarity defect {np.max(np.abs(om - ref)):.1e}")

# (T - t) H(omega)(0, t) stays equal to 2 all the way to the singularity
d5 = PRESETS["V"].datum()
T5 = predict_blowup(d5).T
for frac in (0.0, 0.9, 0.999, 0.999999):
    print(f"t = {frac:>8} T:  (T-t) H(omega)(0,t) = {conserved_quantity(d5, frac * T5, T5):.15f}")

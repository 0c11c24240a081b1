"""
Poles of eta moving toward the real axis
========================================

zeta = 1/eta evolves by zeta(z, t) = zeta_0(z) + i t / 2, so its zeros (the
poles of eta) can be followed either by re-rooting a polynomial at each
time or by integrating Z' = -i / (2 zeta_0'(Z)).  Blowup happens when the
first zero reaches the real axis.
"""

import numpy as np

from clmlab import PRESETS, first_touch, integrate_trajectory, local_exponents, track_zeros
from clmlab.errors import DerivativeVanishes, NoTouch
from clmlab.pole_dynamics import trajectory_near_touch

for pid in ("I", "II", "III", "IV", "V", "VI"):
    z0 = PRESETS[pid].zeta0
    try:
        T, pts = first_touch(z0)
        where = ", ".join(f"{x:+.6f}" for x in pts)
        print(f"{pid:3s} first touch at t = {T:.12g}, x = {where}")
    except NoTouch:
        print(f"{pid:3s} no zero reaches the real axis (the pole travels parallel to it)")

# Two zeros of the second datum collide at -i/2 before one of them rises
trs = track_zeros(PRESETS["II"].zeta0, 0.0, 1.0)
for tr in trs:
    evs = ", ".join(f"{e.kind} at t={e.t:.10g}" for e in tr.events)
    print(f"branch {tr.branch_id}: {len(tr.samples)} samples; {evs}")

# The ODE follows a single zero but cannot pass through the collision
try:
    integrate_trajectory(PRESETS["II"].zeta0, 0.5 - 1j, 0.0, 1.0)
except DerivativeVanishes as exc:
    t_last, z_last = exc.trajectory.samples[-1]
    print(f"ODE stopped at t={t_last:.12f}, Z={z_last:.6f}: zeta_0' vanishes at the merge")

# Near the touch, X and Y follow different power laws when zeros collide
taus = np.geomspace(1e-6, 1e-2, 30)
for pid, T in (("II", 1.0), ("III", 1.0), ("V", 16 / 3)):
    le = local_exponents(trajectory_near_touch(PRESETS[pid].zeta0, T, 0.0, taus), T)
    print(f"{pid:3s} |X| ~ (T-t)^{le.alpha_x:.3f}, |Y| ~ (T-t)^{le.alpha_y:.3f}  -> {le.classification}"
          + (f"({le.n})" if le.classification == "two_scale" else ""))

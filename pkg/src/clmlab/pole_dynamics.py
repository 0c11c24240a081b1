"""Zeros of zeta(z, t) = zeta_0(z) + i t / 2, i.e. poles of eta = omega + i H(omega).

A blowup happens when the first such zero reaches the real axis.  Zeros are
followed two ways: algebraically, as roots of ``N + (i t/2) D`` for
``zeta_0 = N/D``, and by integrating ``Z' = -i / (2 zeta_0'(Z))`` with a
Newton correction back onto the root set after every step.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np
from scipy import optimize
from scipy.optimize import linear_sum_assignment

from .errors import DerivativeVanishes, NoTouch, UnclassifiableTrajectory
from .rational_core import Polynomial, RationalFunction, derivative, roots

#: a zero with Im Z >= -AXIS_TOL has touched the real axis
AXIS_TOL = 1e-10
#: relative size of zeta_0' below which the motion is singular
_DERIV_RTOL = 1e-12


@dataclass(frozen=True)
class ZetaState:
    """zeta(., t) = zeta_0 + i t/2 at one time."""

    zeta0: RationalFunction
    t: float

    def polynomial(self) -> Polynomial:
        """Numerator ``N + (i t/2) D`` whose roots are the zeros of zeta(., t)."""
        return self.zeta0.num + self.zeta0.den * (0.5j * self.t)

    def __call__(self, z):
        return self.zeta0(z) + 0.5j * self.t


def zeros_at_time(state: ZetaState) -> list[tuple[complex, int]]:
    """Zeros of zeta(., t) with multiplicities.

    Roots shared with the denominator of zeta_0 are cancellations, not zeros,
    and are dropped.
    """
    P = state.polynomial()
    if P.degree < 1:
        return []
    D = state.zeta0.den
    out = []
    for z, m in roots(P):
        if D.degree >= 1 and abs(D(z)) <= 1e-10 * D.magnitude(z):
            continue
        out.append((z, m))
    return out


def critical_events(zeta0: RationalFunction, t_min: float = 0.0, t_max: float = np.inf) -> list[tuple[float, complex]]:
    """Times and places where zeros of zeta(., t) collide or split.

    A multiple zero at time t_c sits at a critical point z_c of zeta_0 with
    t_c = 2 i zeta_0(z_c) real.
    """
    dz = derivative(zeta0)
    if dz.num.degree < 1:
        return []
    events = []
    for zc, _ in roots(dz.num):
        if zeta0.den.degree >= 1 and abs(zeta0.den(zc)) <= 1e-10 * zeta0.den.magnitude(zc):
            continue
        tc = 2j * zeta0(zc)
        if abs(tc.imag) <= 1e-9 * (1 + abs(tc)) and t_min - 1e-12 <= tc.real <= t_max:
            events.append((max(float(tc.real), 0.0), complex(zc)))
    return sorted(events, key=lambda e: e[0])


# ---------------------------------------------------------------------------
# trajectories
# ---------------------------------------------------------------------------


class Event(NamedTuple):
    kind: str  # "branch" | "merge" | "real_axis_touch"
    t: float
    z: complex


@dataclass
class PoleTrajectory:
    """Time-stamped positions of one tracked zero."""

    samples: list[tuple[float, complex]] = field(default_factory=list)
    events: list[Event] = field(default_factory=list)
    source: str = "algebraic"
    branch_id: int = 0

    @property
    def t(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def Z(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples], dtype=complex)

    def to_csv(self) -> str:
        ev = {}
        for e in self.events:
            ev.setdefault(e.t, []).append(e.kind)
        buf = io.StringIO()
        buf.write("t,re_Z,im_Z,branch_id,event\n")
        for t, z in self.samples:
            kinds = "|".join(ev.get(t, []))
            buf.write("%.17g,%.17g,%.17g,%d,%s\n" % (t, z.real, z.imag, self.branch_id, kinds))
        return buf.getvalue()


def _rhs(dz: RationalFunction, z: complex) -> complex:
    d = dz(z)
    scale = dz.num.magnitude(z) / max(abs(dz.den(z)), 1e-300)
    if abs(d) <= _DERIV_RTOL * max(scale, 1.0):
        raise DerivativeVanishes(f"zeta_0'(Z) vanishes at Z={z}")
    return -0.5j / d


def _newton_root(P: Polynomial, dP: Polynomial, z: complex, iters: int = 6) -> complex:
    r = abs(P(z))
    for _ in range(iters):
        d = dP(z)
        if d == 0:
            break
        zn = z - P(z) / d
        rn = abs(P(zn))
        if not rn < r:
            break
        z, r = zn, rn
    return z


def _nearest_other(P: Polynomial, z: complex) -> float:
    if P.degree < 2:
        return np.inf
    rs = np.array([r for r, m in roots(P) for _ in range(m)])
    d = np.sort(np.abs(rs - z))
    return float(d[1]) if len(d) > 1 else np.inf


def integrate_trajectory(
    zeta0: RationalFunction,
    Z0: complex,
    t0: float,
    t1: float,
    dt: float = 1e-2,
    max_steps: int = 200000,
) -> PoleTrajectory:
    """Follow one zero with RK4 on Z' = -i/(2 zeta_0'(Z)) plus Newton polish.

    The step is shortened so that the zero never moves more than a tenth of
    its distance to the nearest other zero, which lets the integration run
    into collisions.  Integration stops when Im Z >= -AXIS_TOL (a
    ``real_axis_touch`` event, time refined by bisection) or at ``t1``.

    Raises
    ------
    DerivativeVanishes
        When the zero runs into a collision away from the real axis (the
        step collapses below 1e-14).  The partial trajectory is attached as
        the ``trajectory`` attribute.
    """
    dz = derivative(zeta0)
    traj = PoleTrajectory([(float(t0), complex(Z0))], [], "ode")
    t, z = float(t0), complex(Z0)
    if abs(ZetaState(zeta0, t).polynomial()(z)) > 1e-8 * ZetaState(zeta0, t).polynomial().magnitude(z):
        raise ValueError("Z0 is not a zero of zeta(., t0)")
    for _ in range(max_steps):
        if t >= t1 - 1e-13 * max(1.0, abs(t1)):
            break
        try:
            v = _rhs(dz, z)
        except DerivativeVanishes as exc:
            exc.trajectory = traj
            raise
        P_now = ZetaState(zeta0, t).polynomial()
        gap = _nearest_other(P_now, z)
        h_gap = 0.1 * gap / abs(v)
        h = min(dt, t1 - t, h_gap)
        if h_gap < 1e-14:
            exc = DerivativeVanishes(f"zeros collide near Z={z} at t={t:.15g}")
            exc.trajectory = traj
            raise exc
        try:
            k1 = v
            k2 = _rhs(dz, z + 0.5 * h * k1)
            k3 = _rhs(dz, z + 0.5 * h * k2)
            k4 = _rhs(dz, z + h * k3)
            zp = z + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
        except DerivativeVanishes:
            zp = z + h * v
        tn = t + h
        P = ZetaState(zeta0, tn).polynomial()
        zn = _newton_root(P, P.derivative(), zp)
        if zn.imag >= -AXIS_TOL:
            tt, zt = _refine_touch(zeta0, t, z, tn)
            traj.samples.append((tt, zt))
            traj.events.append(Event("real_axis_touch", tt, zt))
            return traj
        t, z = tn, zn
        traj.samples.append((t, z))
    return traj


def _nearest_root(zeta0, t, z_ref):
    rs = [r for r, _ in zeros_at_time(ZetaState(zeta0, t))]
    return min(rs, key=lambda r: abs(r - z_ref))


def _refine_touch(zeta0, t_lo, z_lo, t_hi, tol=1e-13):
    """Bisect for the time at which the followed zero reaches Im = -AXIS_TOL."""
    z_ref = z_lo
    z_hi = _nearest_root(zeta0, t_hi, z_ref)
    while t_hi - t_lo > tol:
        tm = 0.5 * (t_lo + t_hi)
        zm = _nearest_root(zeta0, tm, z_ref)
        if zm.imag >= -AXIS_TOL:
            t_hi, z_hi = tm, zm
        else:
            t_lo, z_ref = tm, zm
    return t_hi, z_hi


def track_zeros(
    zeta0: RationalFunction,
    t0: float,
    t1: float,
    n_steps: int = 400,
    stop_at_touch: bool = True,
) -> list[PoleTrajectory]:
    """Follow every zero of zeta(., t) over [t0, t1] by re-rooting.

    Roots at consecutive times are matched by minimum-cost assignment, with
    the step subdivided until every zero moves less than half the smallest
    separation.  Collision times (see :func:`critical_events`) are inserted
    into the time grid; branch labels restart there, and the ending and
    starting branches carry ``merge`` and ``branch`` events.  With
    ``stop_at_touch`` the sweep ends at the first real-axis touch.
    """
    t_end = t1
    touch = None
    if stop_at_touch:
        try:
            touch = first_touch(zeta0, t_max=t1)
            t_end = min(t1, touch[0])
        except NoTouch:
            pass
    ev = [(tc, zc) for tc, zc in critical_events(zeta0, t0, t_end)]
    grid = np.union1d(np.linspace(t0, t_end, n_steps + 1), [tc for tc, _ in ev])
    ev_times = {tc for tc, _ in ev}

    def points(t):
        zs = zeros_at_time(ZetaState(zeta0, t))
        return np.array([z for z, m in zs for _ in range(m)]), zs

    next_id = 0
    finished: list[PoleTrajectory] = []
    active: list[PoleTrajectory] = []

    def start(t, zs, kind=None, z_ev=None):
        nonlocal next_id
        out = []
        for z in zs:
            tr = PoleTrajectory([(t, complex(z))], [], "algebraic", next_id)
            if kind:
                tr.events.append(Event(kind, t, z_ev))
            next_id += 1
            out.append(tr)
        return out

    pts, _ = points(grid[0])
    at_event = any(abs(grid[0] - te) <= 1e-14 for te in ev_times)
    if at_event:
        # a multiple zero at the start: represent it once, split afterwards
        _, zs = points(grid[0])
        active = start(grid[0], [z for z, _ in zs])
    else:
        active = start(grid[0], pts)

    def advance(ta, tb, depth=0):
        """Move active branches from ta to tb (both free of collisions)."""
        nonlocal active
        new, _ = points(tb)
        old = np.array([tr.samples[-1][1] for tr in active])
        if len(new) != len(old):
            raise RuntimeError("zero count changed without a collision event")
        cost = np.abs(old[:, None] - new[None, :])
        r, c = linear_sum_assignment(cost)
        moves = cost[r, c]
        sep = min(_min_sep(old), _min_sep(new))
        if depth < 30 and np.max(moves) > 0.5 * sep:
            tm = 0.5 * (ta + tb)
            advance(ta, tm, depth + 1)
            advance(tm, tb, depth + 1)
            return
        for i, j in zip(r, c):
            active[i].samples.append((tb, complex(new[j])))

    for k in range(1, len(grid)):
        ta, tb = grid[k - 1], grid[k]
        is_event = tb in ev_times
        prev_was_event = ta in ev_times
        if prev_was_event:
            # split the multiple zeros left at ta into simple branches
            _, zs_a = points(ta)
            new_pts, _ = points(tb)
            multi = [(z, m) for z, m in zs_a if m > 1]
            if multi:
                # branches ending at the multiple zero terminate, new ones start
                keep, ended = [], []
                for tr in active:
                    if any(abs(tr.samples[-1][1] - z) < 1e-6 for z, _ in multi):
                        ended.append(tr)
                    else:
                        keep.append(tr)
                finished.extend(ended)
                # match the simple survivors first, then spawn from the remainder
                old = np.array([tr.samples[-1][1] for tr in keep])
                remaining = list(new_pts)
                if len(old):
                    cost = np.abs(old[:, None] - np.array(remaining)[None, :])
                    r, c = linear_sum_assignment(cost)
                    for i, j in zip(r, c):
                        keep[i].samples.append((tb, complex(remaining[j])))
                    remaining = [z for j, z in enumerate(remaining) if j not in set(c)]
                spawned = []
                for zm, _ in multi:
                    near = sorted(remaining, key=lambda z: abs(z - zm))
                    cnt = [m for z, m in multi if z == zm][0]
                    for z in near[:cnt]:
                        tr = PoleTrajectory([(ta, complex(zm)), (tb, complex(z))], [], "algebraic", next_id)
                        tr.events.append(Event("branch", ta, complex(zm)))
                        next_id += 1
                        spawned.append(tr)
                        remaining.remove(z)
                active = keep + spawned
                continue
        if is_event:
            _, zs_b = points(tb)
            multi = [(z, m) for z, m in zs_b if m > 1]
            if not multi:
                # the collision was not resolved as a multiple root; use the prediction
                zc = [zc for tc, zc in ev if tc == tb][0]
                multi = [(zc, 2)]
            # move every branch to tb by nearest root (with multiplicity)
            flat = np.array([z for z, m in zs_b for _ in range(m)])
            old = np.array([tr.samples[-1][1] for tr in active])
            if len(flat) == len(old):
                cost = np.abs(old[:, None] - flat[None, :])
                r, c = linear_sum_assignment(cost)
                for i, j in zip(r, c):
                    active[i].samples.append((tb, complex(flat[j])))
            for tr in active:
                for zm, _ in multi:
                    if abs(tr.samples[-1][1] - zm) < 1e-6:
                        tr.events.append(Event("merge", tb, complex(zm)))
            continue
        advance(ta, tb)

    if touch is not None and abs(grid[-1] - touch[0]) <= 1e-12:
        for tr in active:
            z = tr.samples[-1][1]
            if z.imag >= -1e-7:
                tr.events.append(Event("real_axis_touch", tr.samples[-1][0], z))
    # a multiple zero at t0 leaves a one-sample placeholder that never moved
    return [tr for tr in finished + active if len(tr.samples) > 1]


def _min_sep(pts: np.ndarray) -> float:
    if len(pts) < 2:
        return np.inf
    d = np.abs(pts[:, None] - pts[None, :])
    d[np.diag_indices(len(pts))] = np.inf
    return float(d.min())


# ---------------------------------------------------------------------------
# first touch and local exponents
# ---------------------------------------------------------------------------


def _max_im(zeta0, t) -> float:
    zs = zeros_at_time(ZetaState(zeta0, t))
    return max(z.imag for z, _ in zs) if zs else -np.inf


def _polish_touch(zeta0: RationalFunction, x0: float) -> tuple[float, float]:
    """Refine a touch point.  A zero at real x needs Re zeta_0(x) = 0, i.e. x is
    a real root of Re(N(x) conj(D(x))); the touch time is then 2 i zeta_0(x)."""
    num = np.convolve(zeta0.num.coeffs, np.conj(zeta0.den.coeffs)).real
    scale = float(np.max(np.abs(num)))
    num = np.where(np.abs(num) <= 64 * np.finfo(float).eps * scale, 0.0, num)
    cands = [z.real for z, _ in roots(Polynomial(num)) if abs(z.imag) <= 1e-6 * max(1.0, abs(z))]
    if not cands:
        return x0, float(np.real(2j * zeta0(x0)))
    x = min(cands, key=lambda r: abs(r - x0))
    if abs(x - x0) > 1e-2 * max(1.0, abs(x0)):
        x = x0
    return float(x), float(np.real(2j * zeta0(x)))


def first_touch(zeta0: RationalFunction, t_max: float = 100.0, n_scan: int = 4000) -> tuple[float, list[float]]:
    """First time a zero of zeta(., t) reaches the real axis, and where.

    A uniform scan of max Im Z brackets the crossing, which is bisected to
    1e-10.  Zeros then within 1e-6 of the axis are grouped (colliding pairs
    form one group) and each group is polished on the real axis, where a
    zero at x requires Re zeta_0(x) = 0 and occurs at t = 2 i zeta_0(x).

    Raises
    ------
    NoTouch
        If max Im Z stays negative up to ``t_max``.
    """
    if _max_im(zeta0, 0.0) >= 0:
        raise ValueError("zeta_0 has a zero in the closed upper half-plane")
    ts = np.linspace(0.0, t_max, n_scan + 1)
    prev = 0.0
    for t in ts[1:]:
        if _max_im(zeta0, t) < 0:
            prev = t
            continue
        lo, hi = prev, t
        while hi - lo > 1e-10 * max(1.0, hi):
            mid = 0.5 * (lo + hi)
            if _max_im(zeta0, mid) >= 0:
                hi = mid
            else:
                lo = mid
        zs = sorted((z for z, _ in zeros_at_time(ZetaState(zeta0, hi)) if z.imag >= -1e-6), key=lambda z: z.real)
        groups: list[list[complex]] = []
        for z in zs:
            if groups and abs(z.real - groups[-1][-1].real) <= 1e-3 * max(1.0, abs(z.real)):
                groups[-1].append(z)
            else:
                groups.append([z])
        touches = [_polish_touch(zeta0, float(np.mean([z.real for z in g]))) for g in groups]
        T = min(tt for _, tt in touches)
        points = sorted(x for x, tt in touches if abs(tt - T) <= 1e-10 * max(1.0, T))
        return T, points
    raise NoTouch(f"no zero reaches the real axis before t={t_max}")


def trajectory_near_touch(
    zeta0: RationalFunction,
    T: float,
    x_star: float,
    taus: Sequence[float],
    side: int = +1,
) -> PoleTrajectory:
    """Zero approaching (x_star, 0) from the ``side`` half (Re Z - x_star has that sign, or 0).

    Among the candidates the one with the largest Im Z is taken, sampled at
    t = T - tau for each tau (returned in increasing time).
    """
    samples = []
    for tau in sorted(taus, reverse=True):
        t = T - tau
        zs = [z for z, _ in zeros_at_time(ZetaState(zeta0, t))]
        cand = [z for z in zs if side * (z.real - x_star) >= -1e-12 * max(1.0, abs(z))]
        if not cand:
            cand = zs
        # the touching zero is the highest; break ties by distance to x_star
        z = max(cand, key=lambda w: (round(w.imag, 12), -abs(w - x_star)))
        samples.append((float(t), complex(z)))
    return PoleTrajectory(samples, [], "algebraic")


class LocalExponents(NamedTuple):
    alpha_x: float
    alpha_y: float
    classification: str  # "one_scale" | "two_scale" | "traveling" | "other"
    n: int | None = None


def _slope(x, y) -> float:
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def local_exponents(
    traj: PoleTrajectory,
    T: float | None,
    x_star: float = 0.0,
    window: tuple[float, float] = (1e-6, 1e-2),
) -> LocalExponents:
    """Fit |X - x*| ~ (T-t)^alpha_x and |Y| ~ (T-t)^alpha_y and classify.

    Classes: ``traveling`` (Y constant), ``one_scale`` (X = x* identically or
    alpha_x near 1, with alpha_y near 1), ``two_scale`` of order n
    (alpha_x near 1/2 and alpha_y near an integer n >= 1).

    Raises
    ------
    UnclassifiableTrajectory
        If the fitted exponents match none of the classes.
    """
    t, Z = traj.t, traj.Z
    Y = Z.imag
    if T is None or np.std(Y) <= 1e-9 * max(np.mean(np.abs(Y)), 1e-300):
        if np.std(Y) <= 1e-9 * max(np.mean(np.abs(Y)), 1e-300):
            return LocalExponents(float("nan"), 0.0, "traveling")
        raise UnclassifiableTrajectory("no blowup time and Im Z not constant")
    tau = T - t
    sel = (tau >= window[0] * (1 - 1e-9)) & (tau <= window[1] * (1 + 1e-9))
    if sel.sum() < 3:
        raise UnclassifiableTrajectory("fewer than 3 samples inside the fit window")
    tau, X, Y = tau[sel], Z.real[sel] - x_star, np.abs(Y[sel])
    ay = _slope(tau, Y)
    if np.max(np.abs(X)) <= 1e-9:
        ax = float("inf")
        if abs(ay - 1) <= 0.1:
            return LocalExponents(ax, ay, "one_scale", 0)
        raise UnclassifiableTrajectory(f"X = x* but alpha_y = {ay:.3f}")
    ax = _slope(tau, np.abs(X))
    if abs(ax - 1) <= 0.1 and abs(ay - 1) <= 0.1:
        return LocalExponents(ax, ay, "one_scale", 0)
    n = int(round(ay))
    if abs(ax - 0.5) <= 0.05 and n >= 1 and abs(ay - n) <= 0.15:
        return LocalExponents(ax, ay, "two_scale", n)
    raise UnclassifiableTrajectory(f"alpha_x = {ax:.3f}, alpha_y = {ay:.3f} match no class")


def xy_ode_rhs(zeta0: RationalFunction, X: float, Y: float) -> tuple[float, float]:
    """(X', Y') from A_x = Re zeta_0', B_x = Im zeta_0' at Z = X + iY.

    X' = -B_x / (2 (A_x^2 + B_x^2)),  Y' = -A_x / (2 (A_x^2 + B_x^2)).
    """
    dz = derivative(zeta0)
    d = dz(complex(X, Y))
    Ax, Bx = d.real, d.imag
    m = Ax * Ax + Bx * Bx
    scale = dz.num.magnitude(complex(X, Y)) / max(abs(dz.den(complex(X, Y))), 1e-300)
    if math.sqrt(m) <= _DERIV_RTOL * max(scale, 1.0):
        raise DerivativeVanishes(f"zeta_0' vanishes at ({X}, {Y})")
    return -Bx / (2 * m), -Ax / (2 * m)


class ShapeCheck(NamedTuple):
    slope_y_residual: float  # log|Y + (c/2b) X^2n| vs log|X|
    slope_x_residual: float  # log|X^2 - (a^2/2b)(T-t)| vs log(T-t)
    slope_y_vs_x: float  # log|Y| vs log|X|
    max_rel_y_residual: float
    max_rel_x_residual: float


def shape_relation_check(traj: PoleTrajectory, local, T: float, x_star: float = 0.0) -> ShapeCheck:
    """Compare a two-scale trajectory with Y ~ -(c/2b) X^2n and X^2 ~ (a^2/2b)(T-t).

    ``local`` holds the plain Taylor constants omega_0 ~ -c x^(2n+1),
    H(omega_0) ~ a + b x^2 (see ``asymptotics.LocalParams``); theorem-style
    parameters are converted first.
    """
    from .asymptotics import TheoremParams

    if isinstance(local, TheoremParams):
        local = local.local()
    a, b, c, n = local.a, local.b, local.c, local.n
    t, Z = traj.t, traj.Z
    tau = T - t
    X, Y = Z.real - x_star, Z.imag
    ax_ = np.abs(X)
    ry = np.abs(Y + (c / (2 * b)) * X ** (2 * n))
    rx = np.abs(X**2 - (a * a / (2 * b)) * tau)
    ok_y = ry > 0
    ok_x = rx > 0
    sy = _slope(ax_[ok_y], ry[ok_y]) if ok_y.sum() >= 2 else float("inf")
    sx = _slope(tau[ok_x], rx[ok_x]) if ok_x.sum() >= 2 else float("inf")
    return ShapeCheck(
        sy,
        sx,
        _slope(ax_, np.abs(Y)),
        float(np.max(ry / np.abs(Y))),
        float(np.max(rx / X**2)),
    )

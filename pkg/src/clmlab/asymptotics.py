"""Self-similar profiles, bulk location r(t), and scaling-exponent fits.

Parameter conventions (all positive):

* one scale (``n = 0``):  H(omega_0)(0) = 2a,  omega_0'(0) = -2c
* two scales (``n >= 1``): H(omega_0)(0) = 2a,  H(omega_0)''(0) = 4b,
  omega_0^(2n+1)(0) = -4c (2n+1)!

The blowup time is T = 1/a and the bulk sits at r(t) (T-t)^(1/2) with
r(T) = a / sqrt(b).
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np
from numpy.polynomial import chebyshev as C
from scipy import optimize

from .errors import InsufficientDecades, NoBracket, PeakOnBoundary, WrongDegeneracy
from .clm_exact import InitialDatum, SolutionSnapshot, evaluate


@dataclass(frozen=True)
class TheoremParams:
    """Constants of the asymptotic blowup profiles (see module docstring)."""

    a: float
    c: float
    n: int = 0
    b: float | None = None

    def __post_init__(self):
        if self.a <= 0 or self.c <= 0:
            raise ValueError("a and c must be positive")
        if self.n < 0:
            raise ValueError("n must be non-negative")
        if self.n >= 1 and (self.b is None or self.b <= 0):
            raise ValueError("two-scale parameters need b > 0")

    @property
    def T(self) -> float:
        return 1.0 / self.a

    @property
    def rT(self) -> float | None:
        if self.n == 0 or self.b is None:
            return None
        return self.a / math.sqrt(self.b)

    def local(self) -> "LocalParams":
        return LocalParams.from_theorem(self)

    def to_dict(self) -> dict:
        return {"a": self.a, "b": self.b, "c": self.c, "n": self.n, "T": self.T, "rT": self.rT}


@dataclass(frozen=True)
class LocalParams:
    """Plain Taylor constants omega_0 ~ -c x^(2n+1), H(omega_0) ~ a + b x^2.

    These differ from :class:`TheoremParams` by fixed factors:
    a_loc = 2a, b_loc = 2b, c_loc = 4c (for n >= 1; 2c for n = 0).
    """

    a: float
    b: float | None
    c: float
    n: int

    @classmethod
    def from_theorem(cls, p: TheoremParams) -> "LocalParams":
        cf = 2.0 if p.n == 0 else 4.0
        return cls(2.0 * p.a, None if p.b is None else 2.0 * p.b, cf * p.c, p.n)

    def to_theorem(self) -> TheoremParams:
        cf = 2.0 if self.n == 0 else 4.0
        return TheoremParams(self.a / 2.0, self.c / cf, self.n, None if self.b is None else self.b / 2.0)


# ---------------------------------------------------------------------------
# parameter extraction
# ---------------------------------------------------------------------------

_CHEB_RADIUS = 0.25
_CHEB_DEGREE = 40


def _taylor_at_zero(datum: InitialDatum, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Taylor coefficients of (omega_0, H(omega_0)) at 0, exact or by interpolation."""
    src = datum.eta0
    if src is not None:
        e = src.taylor(order)
        return e.real.copy(), e.imag.copy()
    rho = _CHEB_RADIUS
    out = []
    for fn in (datum.trace.omega0, datum.trace.hilbert_omega0):
        ser = C.Chebyshev.interpolate(lambda u: np.asarray(fn(rho * u), dtype=float), _CHEB_DEGREE)
        coeffs = np.empty(order + 1)
        d = ser
        for k in range(order + 1):
            coeffs[k] = d(0.0) / math.factorial(k) / rho**k
            d = d.deriv()
        out.append(coeffs)
    return out[0], out[1]


def extract_params(datum: InitialDatum, n: int, tol: float = 1e-8) -> TheoremParams:
    """(a, b, c) from the Taylor data of the trace at the origin.

    Rational data use exact Taylor coefficients of eta_0; other data use a
    Chebyshev interpolant on [-0.25, 0.25].

    Raises
    ------
    WrongDegeneracy
        If omega_0 has a non-negligible Taylor coefficient of order < 2n+1,
        or the leading coefficient, H(omega_0)(0) or H(omega_0)''(0) has the
        wrong sign.
    """
    w, h = _taylor_at_zero(datum, 2 * n + 3)
    scale = max(1.0, float(np.max(np.abs(w))), float(np.max(np.abs(h))))
    low = np.abs(w[: 2 * n + 1])
    if np.any(low > tol * scale):
        k = int(np.flatnonzero(low > tol * scale)[0])
        raise WrongDegeneracy(f"omega_0 has a nonzero order-{k} coefficient; not the n={n} pattern")
    lead = w[2 * n + 1]
    if not lead < -tol * scale:
        raise WrongDegeneracy(f"leading coefficient of order {2 * n + 1} is {lead:.3g}, expected < 0")
    a = h[0] / 2.0
    if a <= 0:
        raise WrongDegeneracy("H(omega_0)(0) must be positive")
    if n == 0:
        return TheoremParams(a=a, c=-lead / 2.0, n=0)
    b = h[2] / 2.0  # H''(0)/4 = 2 h_2 / 4
    if b <= 0:
        raise WrongDegeneracy("H(omega_0)''(0) must be positive")
    return TheoremParams(a=a, c=-lead / 4.0, n=n, b=b)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ProfileSpec:
    kind: str  # "Omega1" | "Omega2n"
    params: TheoremParams

    def __post_init__(self):
        if self.kind == "Omega1" and self.params.n != 0:
            raise ValueError("Omega1 requires n = 0")
        if self.kind == "Omega2n" and (self.params.n < 1 or self.params.b is None):
            raise ValueError("Omega2n requires n >= 1 and b")
        if self.kind not in ("Omega1", "Omega2n"):
            raise ValueError(f"unknown profile kind {self.kind!r}")

    @classmethod
    def for_params(cls, params: TheoremParams) -> "ProfileSpec":
        return cls("Omega1" if params.n == 0 else "Omega2n", params)


def profile(spec: ProfileSpec, z):
    """(Omega(z), H(Omega)(z)) for the requested self-similar profile."""
    z = np.asarray(z, dtype=float)
    p = spec.params
    a, c = p.a, p.c
    if spec.kind == "Omega1":
        den = a**4 + (c * z) ** 2
        return -2 * a * a * c * z / den, 2 * a**4 / den
    n, b = p.n, p.b
    den = a ** (4 * n) * c * c + b ** (2 * n + 2) * z * z
    om = -(a ** (2 * n + 1)) * b ** ((2 * n + 1) / 2) * c / den
    hom = -a * b ** ((4 * n + 3) / 2) * z / den
    return om, hom


# ---------------------------------------------------------------------------
# expansion functions and the bulk location
# ---------------------------------------------------------------------------

_SERIES_ORDER = 40


def _series_radius(datum: InitialDatum) -> float:
    src = datum.eta0
    if src is None:
        return 0.0
    poles = [abs(p) for p, _ in src.poles()]
    return 0.05 * min([1.0] + poles)


def p_function(datum: InitialDatum, params: TheoremParams, x):
    """p(x) = omega_0(x) / (-4c x^(2n+1)), even with p(0) = 1.

    Near the origin, rational data use the Taylor series of eta_0 to avoid
    the cancellation in omega_0 ~ x^(2n+1).
    """
    x = np.asarray(x, dtype=float)
    n, c = params.n, params.c
    cf = 2.0 if n == 0 else 4.0
    out = np.empty_like(x)
    near = np.abs(x) < _series_radius(datum)
    if np.any(near):
        w, _ = _taylor_at_zero(datum, 2 * n + 1 + _SERIES_ORDER)
        tail = w[2 * n + 1 :] / (-cf * c)
        out[near] = np.polynomial.polynomial.polyval(x[near], tail)
    far = ~near & (x != 0)
    out[far] = np.asarray(datum.trace.omega0(x[far])) / (-cf * c * x[far] ** (2 * n + 1))
    out[~near & (x == 0)] = 1.0
    return out if out.ndim else float(out)


def q_function(datum: InitialDatum, params: TheoremParams, x):
    """q(x) = (H(omega_0)(x) - H(omega_0)(0)) / (2b x^2), even with q(0) = 1."""
    x = np.asarray(x, dtype=float)
    a, b = params.a, params.b
    out = np.empty_like(x)
    near = np.abs(x) < _series_radius(datum)
    if np.any(near):
        _, h = _taylor_at_zero(datum, 2 + _SERIES_ORDER)
        out[near] = np.polynomial.polynomial.polyval(x[near], h[2:] / (2 * b))
    far = ~near & (x != 0)
    out[far] = (np.asarray(datum.trace.hilbert_omega0(x[far])) - 2 * a) / (2 * b * x[far] ** 2)
    out[~near & (x == 0)] = 1.0
    return out if out.ndim else float(out)


def validity_radius(datum: InitialDatum, params: TheoremParams, x_max: float = 10.0) -> float:
    """Largest X with p, q in [1/2, 2] on all of (0, X]: the usable expansion window."""
    xs = np.geomspace(1e-6, x_max, 2000)
    ok = (np.abs(p_function(datum, params, xs) - 1.25) <= 0.75)
    if params.n >= 1:
        ok &= np.abs(q_function(datum, params, xs) - 1.25) <= 0.75
    bad = np.flatnonzero(~ok)
    return float(x_max if bad.size == 0 else (xs[bad[0] - 1] if bad[0] > 0 else 0.0))


def r_of_t(datum: InitialDatum, params: TheoremParams, t: float) -> float:
    """Bulk location r(t) from r^2 q(r (T-t)^(1/2)) = a / (b t).

    Roots are bracketed on (0, 2a/sqrt(b)]; the one closest to r(T) is
    returned, which is the branch continuous with r(T) as t -> T.

    Raises
    ------
    NoBracket
        If the equation has no sign change on the search interval.
    """
    if params.n < 1:
        raise ValueError("r(t) is defined for two-scale parameters only")
    T, rT = params.T, params.rT
    delta = T - t
    if delta < 0:
        raise ValueError("t must not exceed T")
    if delta == 0:
        return rT
    a, b = params.a, params.b
    sd = math.sqrt(delta)
    target = a / (b * t)

    def F(r):
        return r * r * q_function(datum, params, np.asarray(r) * sd) - target

    rs = np.linspace(1e-6 * rT, 2 * rT, 801)
    vals = F(rs)
    idx = np.flatnonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)
    if idx.size == 0:
        raise NoBracket(f"no root of the bulk-location equation at t={t} (T-t={delta:.3g})")
    roots = []
    for i in idx:
        if vals[i] == 0:
            roots.append(rs[i])
        elif vals[i + 1] != 0:
            roots.append(optimize.brentq(lambda r: float(F(r)), rs[i], rs[i + 1], xtol=1e-15, rtol=1e-15))
    return float(min(roots, key=lambda r: abs(r - rT)))


# ---------------------------------------------------------------------------
# profile error
# ---------------------------------------------------------------------------


def _center(datum, params, t, center):
    delta = params.T - t
    if params.n == 0:
        return 0.0 if center in (None, "implicit", "constant") else float(center)
    if center is None:
        center = "constant" if params.n == 1 else "implicit"
    if center == "constant":
        return params.rT * math.sqrt(delta)
    if center == "implicit":
        return r_of_t(datum, params, t) * math.sqrt(delta)
    return float(center)


def profile_error(
    datum: InitialDatum,
    params: TheoremParams,
    t: float,
    z_window: tuple[float, float] = (-10.0, 10.0),
    center: str | float | None = None,
    n_z: int = 2001,
) -> tuple[float, float]:
    """Sup over the z window of the rescaled deviation from the limiting profile.

    The solution is sampled at ``x = x_c + (T-t)^m z`` (m = 1 for one scale,
    m = n otherwise), multiplied by ``(T-t)^k`` (k = 1, resp. (2n+1)/2) and
    compared with (Omega, H(Omega)).

    ``center`` selects ``x_c``: ``"constant"`` uses r(T) (T-t)^(1/2) (the
    default for n = 1), ``"implicit"`` uses :func:`r_of_t` (default for
    n >= 2), and a number is taken literally.  One-scale profiles are
    centered at the origin.
    """
    delta = params.T - t
    if delta <= 0:
        raise ValueError("t must be before T")
    spec = ProfileSpec.for_params(params)
    z = np.linspace(z_window[0], z_window[1], n_z)
    n = params.n
    if n == 0:
        scale, power = delta, 1.0
    else:
        scale, power = delta**n, (2 * n + 1) / 2.0
    xc = _center(datum, params, t, center)
    om, hom = evaluate(datum, xc + scale * z, t)
    Om, HOm = profile(spec, z)
    pref = delta**power
    return float(np.max(np.abs(pref * om - Om))), float(np.max(np.abs(pref * hom - HOm)))


class ProfileErrorTable(NamedTuple):
    taus: np.ndarray
    err_omega: np.ndarray
    err_hilbert: np.ndarray
    slope_omega: float
    slope_hilbert: float

    def to_csv(self) -> str:
        lines = ["T_minus_t,err_omega,err_hilbert"]
        lines += ["%.17g,%.17g,%.17g" % row for row in zip(self.taus, self.err_omega, self.err_hilbert)]
        return "\n".join(lines) + "\n"


def _loglog_slope(x, y) -> float:
    x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    if np.any(y <= 0):
        return float("nan")
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def profile_error_table(datum, params, taus, **kw) -> ProfileErrorTable:
    """profile_error at t = T - tau for each tau, with fitted log-log slopes."""
    taus = np.asarray(taus, dtype=float)
    errs = np.array([profile_error(datum, params, params.T - tau, **kw) for tau in taus])
    return ProfileErrorTable(
        taus, errs[:, 0], errs[:, 1], _loglog_slope(taus, errs[:, 0]), _loglog_slope(taus, errs[:, 1])
    )


# ---------------------------------------------------------------------------
# snapshots near blowup and scale measurement
# ---------------------------------------------------------------------------


def _omega_at(datum, x, t):
    return evaluate(datum, np.asarray(x, dtype=float), t)[0]


def _locate_peak(datum: InitialDatum, t: float) -> tuple[float, float]:
    """Rough location and width of the positive-side peak of |omega| at time t."""
    xs = np.geomspace(1e-15, 1e2, 6000)
    w = np.abs(_omega_at(datum, xs, t))
    cand = [int(np.argmax(w))]
    # a two-scale bulk sits at a sign change of 2 - t H(omega_0) and can be far
    # narrower than the geometric spacing
    g = 2.0 - t * np.asarray(datum.trace.hilbert_omega0(xs))
    for i in np.flatnonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0):
        cand.append(-1 - i)
    best_x, best_v, best_w = xs[cand[0]], w[cand[0]], None
    for ci in cand[1:]:
        i = -1 - ci
        hf = lambda x: 2.0 - t * float(datum.trace.hilbert_omega0(np.array(x)))
        x0 = optimize.brentq(hf, xs[i], xs[i + 1], xtol=1e-300, rtol=1e-15)
        v = abs(float(_omega_at(datum, x0, t)))
        if v > best_v:
            dg = (hf(x0 * (1 + 1e-6)) - hf(x0 * (1 - 1e-6))) / (2e-6 * x0)
            wid = 2 * t * abs(float(datum.trace.omega0(np.array(x0)))) / max(abs(dg), 1e-300)
            best_x, best_v, best_w = x0, v, wid
    if best_w is None:
        best_w = best_x
    return float(best_x), float(best_w)


def blowup_snapshots(datum: InitialDatum, T: float, taus: Sequence[float], n_fine: int = 801) -> list[SolutionSnapshot]:
    """Closed-form snapshots at t = T - tau, gridded to resolve the positive peak.

    Each grid is a coarse geometric grid over (0, 100] merged with a uniform
    grid spanning a few estimated widths around the peak.
    """
    out = []
    for tau in taus:
        t = T - tau
        xp, wid = _locate_peak(datum, t)
        lo = max(xp - 6 * wid, xp * 1e-3)
        fine = np.linspace(lo, xp + 6 * wid, n_fine)
        xs = np.union1d(np.geomspace(1e-15, 1e2, 2000), fine)
        om, hom = evaluate(datum, xs, t)
        out.append(SolutionSnapshot(t, xs, om, hom, datum.label, {"tau": tau}))
    return out


class ScaleMeasurement(NamedTuple):
    tau: float
    peak: float
    x_peak: float
    fwhm: float
    hilbert_at_peak: float


@dataclass(frozen=True)
class ScalingReport:
    c_omega: float
    c_l: float
    c_s: float
    windows: tuple[float, float]
    residuals: dict
    power_relation_defect: float
    cs_degenerate: bool = False
    measurements: list = field(default_factory=list, compare=False)

    def to_json(self) -> str:
        return json.dumps(
            {
                "c_omega": self.c_omega,
                "c_l": self.c_l,
                "c_s": self.c_s,
                "windows": list(self.windows),
                "residuals": self.residuals,
                "power_relation_defect": self.power_relation_defect,
                "cs_degenerate": self.cs_degenerate,
            },
            indent=2,
        )

    def measurements_csv(self) -> str:
        lines = ["T_minus_t,peak,x_peak,fwhm,hilbert_at_peak"]
        lines += ["%.17g,%.17g,%.17g,%.17g,%.17g" % tuple(m) for m in self.measurements]
        return "\n".join(lines) + "\n"


def _grid_crossing(xs, w, i0, level, step):
    i = i0
    while 0 <= i + step < len(xs) and w[i + step] >= level:
        i += step
    j = i + step
    if not 0 <= j < len(xs):
        return None
    # linear interpolation between samples i and j
    return xs[i] + (level - w[i]) * (xs[j] - xs[i]) / (w[j] - w[i])


def _measure_one(snap: SolutionSnapshot, T: float, evaluator) -> ScaleMeasurement:
    pos = snap.xs > 0
    xs = snap.xs[pos]
    w = np.abs(snap.omega[pos])
    i = int(np.argmax(w))
    if i == 0 or i == len(xs) - 1:
        raise PeakOnBoundary(f"peak at grid edge x={xs[i]:.3g} (t={snap.t})")
    t = snap.t
    if evaluator is None:
        # parabola through the three samples around the maximum
        x0, x1, x2 = xs[i - 1 : i + 2]
        y0, y1, y2 = w[i - 1 : i + 2]
        den = (x0 - x1) * (x0 - x2) * (x1 - x2)
        A = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
        B = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / den
        xp = -B / (2 * A) if A < 0 else x1
        peak = float(max(y1, A * xp * xp + B * xp + (y1 - A * x1 * x1 - B * x1)))
        half = 0.5 * peak
        xl = _grid_crossing(xs, w, i, half, -1)
        xr = _grid_crossing(xs, w, i, half, +1)
        if xl is None:
            xl = 0.0
        if xr is None:
            raise PeakOnBoundary("half-maximum not reached inside the grid")
        hp = float(np.interp(xp, xs, snap.hilbert_omega[pos]))
        return ScaleMeasurement(T - t, peak, float(xp), float(xr - xl), hp)

    f = lambda x: abs(float(evaluator(np.array(x), t)))
    res = optimize.minimize_scalar(lambda x: -f(x), bracket=(xs[i - 1], xs[i], xs[i + 1]), tol=1e-15)
    xp = float(res.x) if -res.fun >= w[i] else float(xs[i])
    peak = f(xp)
    half = 0.5 * peak
    g = lambda x: f(x) - half

    def crossing(direction):
        dx = xp * 1e-13
        prev = xp
        while True:
            x = xp + direction * dx
            if direction < 0 and x <= 0:
                x = 0.0
            if g(x) < 0:
                return optimize.brentq(g, min(x, prev), max(x, prev), xtol=1e-300, rtol=1e-15)
            if x == 0.0 or dx > 1e6 * max(xp, 1.0):
                return x
            prev = x
            dx *= 2

    xl, xr = crossing(-1), crossing(+1)
    hp = float(np.interp(xp, xs, snap.hilbert_omega[pos]))
    return ScaleMeasurement(T - t, peak, xp, float(xr - xl), hp)


def measure_scales(
    snapshots: Sequence[SolutionSnapshot],
    T: float,
    evaluator: Callable | None = None,
    min_snapshots: int = 6,
    min_decades: float = 2.0,
) -> ScalingReport:
    """Fit c_omega, c_s and c_l from peak height, peak location and FWHM.

    Parameters
    ----------
    snapshots : sequence of SolutionSnapshot
        Snapshots before T whose positive-side peak is inside the grid.
    T : float
        Blowup time.
    evaluator : callable, optional
        ``evaluator(x, t) -> omega``; when given, the peak and half-maximum
        points are refined on it instead of being interpolated.

    Raises
    ------
    InsufficientDecades
        Fewer than ``min_snapshots`` snapshots, or T - t spans less than
        ``min_decades`` decades.
    PeakOnBoundary
        If the maximum of |omega| is on the edge of a grid.
    """
    if len(snapshots) < min_snapshots:
        raise InsufficientDecades(f"need at least {min_snapshots} snapshots, got {len(snapshots)}")
    taus = np.array([T - s.t for s in snapshots])
    if np.any(taus <= 0):
        raise InsufficientDecades("all snapshots must be before T")
    if math.log10(taus.max() / taus.min()) < min_decades:
        raise InsufficientDecades(f"T - t spans fewer than {min_decades} decades")
    ms = [_measure_one(s, T, evaluator) for s in snapshots]
    lt = np.log(taus)
    fits, resid = {}, {}
    for name, vals in (("c_omega", [m.peak for m in ms]), ("c_s", [m.x_peak for m in ms]), ("c_l", [m.fwhm for m in ms])):
        ly = np.log(np.asarray(vals))
        coef = np.polyfit(lt, ly, 1)
        fits[name] = float(coef[0])
        resid[name] = float(np.sqrt(np.mean((np.polyval(coef, lt) - ly) ** 2)))
    defect = fits["c_omega"] + fits["c_l"] - fits["c_s"] + 1.0
    return ScalingReport(
        c_omega=fits["c_omega"],
        c_l=fits["c_l"],
        c_s=fits["c_s"],
        windows=(float(taus.min()), float(taus.max())),
        residuals=resid,
        power_relation_defect=float(defect),
        cs_degenerate=abs(fits["c_s"] - fits["c_l"]) < 0.1,
        measurements=ms,
    )


def default_taus(lo: float = 1e-5, hi: float = 1e-2, n: int = 40) -> np.ndarray:
    return np.geomspace(hi, lo, n)


# ---------------------------------------------------------------------------
# traveling waves
# ---------------------------------------------------------------------------


def traveling_wave_profile(r: float, c: float, x):
    """f(x) = -2cr / (1 + c^2 x^2); omega(x,t) = f(x + r t) solves the equation."""
    if c <= 0:
        raise ValueError("c must be positive")
    x = np.asarray(x, dtype=float)
    return -2.0 * c * r / (1.0 + (c * x) ** 2)


def traveling_wave_residual(r: float, c: float, x):
    """r f' - f H(f) with the closed-form H of the Lorentzian, identically zero."""
    x = np.asarray(x, dtype=float)
    den = 1.0 + (c * x) ** 2
    f = -2.0 * c * r / den
    hf = -2.0 * c * r * (c * x) / den
    fprime = 4.0 * c**3 * r * x / den**2
    return r * fprime - f * hf

"""Closed-form solution of omega_t = omega H(omega) and blowup prediction.

With ``w = omega_0(x)`` and ``h = H(omega_0)(x)`` the solution is

    omega(x, t)    = 4 w / ((2 - t h)^2 + t^2 w^2)
    H(omega)(x, t) = (2 h (2 - t h) - 2 t w^2) / ((2 - t h)^2 + t^2 w^2)

and it blows up first at the zeros of ``omega_0`` where ``h`` is largest and
positive, at time ``T = 2 / sup h``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate, optimize

from .errors import AtSingularity, EmptyS, InvalidDatum, QuadratureFail
from .rational_core import BoundaryTrace, RationalFunction, boundary_trace

EPS = np.finfo(float).eps
_CHECK_GRID = np.geomspace(1e-3, 1e3, 400)


@dataclass(frozen=True)
class InitialDatum:
    """Initial vorticity given through its boundary trace.

    Parameters
    ----------
    trace : BoundaryTrace
        Handles for ``omega_0`` and ``H(omega_0)``.
    smoothness_order : int, optional
        Largest k with omega_0 in C^k near 0, when known.
    odd_symmetric : bool
        Check that omega_0 is odd and H(omega_0) even on sample points.
    sign_condition : bool
        Check that sgn(omega_0(x)) = -sgn(x) on sample points.
    label : str
        Free-form identifier carried into outputs.
    """

    trace: BoundaryTrace
    smoothness_order: int | None = None
    odd_symmetric: bool = False
    sign_condition: bool = False
    label: str = ""

    def __post_init__(self):
        xs = _CHECK_GRID
        w = self.trace.omega0(xs)
        if self.odd_symmetric:
            dw, dh = self.trace.parity_defect(xs)
            scale = 1 + float(np.max(np.abs(w)))
            if dw > 1e-12 * scale or dh > 1e-12 * scale:
                raise InvalidDatum(f"odd symmetry violated (defects {dw:.2e}, {dh:.2e})")
        if self.sign_condition:
            wm = self.trace.omega0(-xs)
            if np.any(w >= 0) or np.any(wm <= 0):
                raise InvalidDatum("sign condition sgn(omega_0(x)) = -sgn(x) violated")

    @classmethod
    def from_eta0(cls, eta0: RationalFunction, **kw) -> "InitialDatum":
        """Datum whose trace is (Re, Im) of an upper-holomorphic rational ``eta0``."""
        return cls(boundary_trace(eta0), **kw)

    @classmethod
    def from_functions(cls, omega0: Callable, hilbert_omega0: Callable, **kw) -> "InitialDatum":
        return cls(BoundaryTrace(omega0, hilbert_omega0), **kw)

    @property
    def eta0(self) -> RationalFunction | None:
        return self.trace.source

    def rescaled(self, alpha: float, beta: float) -> "InitialDatum":
        """Datum ``alpha * omega_0(beta x)`` for ``beta > 0`` (H commutes with dilation)."""
        if beta <= 0:
            raise ValueError("beta must be positive")
        w, h = self.trace.omega0, self.trace.hilbert_omega0
        return InitialDatum.from_functions(
            lambda x: alpha * w(beta * np.asarray(x, dtype=float)),
            lambda x: alpha * h(beta * np.asarray(x, dtype=float)),
            label=f"{self.label}*scaled" if self.label else "",
        )


def evaluate(datum: InitialDatum, x, t: float):
    """omega(x, t) and H(omega)(x, t) from the closed form, vectorized in ``x``.

    Raises
    ------
    AtSingularity
        When the denominator vanishes to working accuracy, i.e. the point is
        (numerically) the blowup point at or after ``T``.  Rational traces
        are evaluated in a cancellation-free form, so only an exactly zero
        (or overflowing) value counts; otherwise the rounding level of the
        terms is the threshold.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    x = np.asarray(x, dtype=float)
    w = np.asarray(datum.trace.omega0(x), dtype=float)
    h = np.asarray(datum.trace.hilbert_omega0(x), dtype=float)
    h00 = datum.trace.hilbert_at_zero
    stable = datum.trace.hilbert_increment is not None and h00 is not None and h00 > 0
    if stable:
        # 2 - t h = h(0) (T* - t) - t (h - h(0)) with T* = 2/h(0): the first
        # factor is exact near T* and the increment is free of cancellation,
        # so the denominator keeps full relative accuracy as t -> T*
        g = h00 * (2.0 / h00 - t) - t * np.asarray(datum.trace.hilbert_increment(x), dtype=float)
        guard = np.finfo(float).tiny
    else:
        g = 2.0 - t * h
        guard = (16 * EPS * (2.0 + t * np.abs(h))) ** 2
    den = g * g + (t * w) ** 2
    bad = ~(den > guard) | ~np.isfinite(4.0 * w / np.where(den > 0, den, 1.0))
    if np.any(bad):
        where = x[bad] if x.ndim else x
        raise AtSingularity(f"denominator vanishes at t={t} near x={np.ravel(where)[0]}")
    omega = 4.0 * w / den
    hom = (2.0 * h * g - 2.0 * t * w * w) / den
    return omega, hom


class BlowupPrediction(NamedTuple):
    T: float
    points: list[float]
    sup_H: float
    zeros: list[float]


def _zeros_of(fn: Callable, lo: float, hi: float, n: int) -> list[float]:
    xs = np.linspace(lo, hi, n)
    vals = fn(xs)
    sgn = np.sign(vals)
    zeros = [float(x) for x in xs[sgn == 0]]
    idx = np.flatnonzero(sgn[:-1] * sgn[1:] < 0)
    for i in idx:
        zeros.append(optimize.brentq(fn, xs[i], xs[i + 1], xtol=1e-14, rtol=1e-15, maxiter=500))
    return sorted(zeros)


def predict_blowup(
    datum: InitialDatum,
    search_interval: tuple[float, float] = (-50.0, 50.0),
    n_samples: int = 10001,
) -> BlowupPrediction:
    """Blowup time and points from the zeros of omega_0 with positive H(omega_0).

    Zeros are bracketed by sign changes on a uniform scan and refined with
    Brent's method.  Points whose H(omega_0) lies within 1e-10 (relative) of
    the supremum are all reported.

    Raises
    ------
    EmptyS
        If no zero of omega_0 in the interval has H(omega_0) > 0.
    """
    w = datum.trace.omega0
    h = datum.trace.hilbert_omega0
    zeros = _zeros_of(lambda x: np.asarray(w(np.asarray(x, dtype=float))), *search_interval, n_samples)
    S = [(z, float(h(np.array(z)))) for z in zeros]
    S = [(z, hz) for z, hz in S if hz > 0]
    if not S:
        raise EmptyS("no zero of omega_0 with H(omega_0) > 0: the solution exists globally")
    sup = max(hz for _, hz in S)
    points = [z for z, hz in S if abs(hz - sup) <= 1e-10 * max(1.0, sup)]
    return BlowupPrediction(2.0 / sup, points, sup, zeros)


def conserved_quantity(datum: InitialDatum, t: float, T: float | None = None) -> float:
    """(T - t) H(omega)(0, t), equal to 2 when the blowup is at the origin."""
    if T is None:
        T = predict_blowup(datum).T
    if t >= T:
        raise AtSingularity(f"t={t} is not before T={T}")
    _, hom = evaluate(datum, np.array([0.0]), t)
    return float((T - t) * hom[0])


def hilbert_at_zero_integral(datum: InitialDatum, tol: float = 1e-10) -> float:
    """H(omega_0)(0) as -(1/pi) int_0^inf (omega_0(y) - omega_0(-y)) / y dy.

    Raises
    ------
    QuadratureFail
        If the combined quadrature error estimate exceeds ``tol``.
    """
    w = datum.trace.omega0

    def integrand(y):
        return float(w(np.array(y)) - w(np.array(-y))) / y

    total, err = 0.0, 0.0
    for lo, hi in ((0.0, 1.0), (1.0, np.inf)):
        val, e = integrate.quad(integrand, lo, hi, epsabs=1e-13, epsrel=1e-12, limit=400)
        total += val
        err += e
    if not np.isfinite(total) or err > tol:
        raise QuadratureFail(f"quadrature error estimate {err:.2e} exceeds {tol:.0e}")
    return -total / np.pi


# ---------------------------------------------------------------------------
# snapshots
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SolutionSnapshot:
    """omega and H(omega) on a grid at one time."""

    t: float
    xs: np.ndarray
    omega: np.ndarray
    hilbert_omega: np.ndarray
    preset: str = ""
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        for name in ("xs", "omega", "hilbert_omega"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (self.xs.shape == self.omega.shape == self.hilbert_omega.shape):
            raise ValueError("xs, omega and hilbert_omega must have equal shapes")
        if not (np.all(np.isfinite(self.omega)) and np.all(np.isfinite(self.hilbert_omega))):
            raise ValueError("snapshot values must be finite")

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        buf.write(f"# t={self.t!r}, preset={self.preset}\n")
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["x", "omega", "hilbert_omega"])
        for row in zip(self.xs, self.omega, self.hilbert_omega):
            wr.writerow(["%.17g" % v for v in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_csv(cls, source: str | Path) -> "SolutionSnapshot":
        text = Path(source).read_text() if isinstance(source, Path) or "\n" not in str(source) else str(source)
        lines = text.splitlines()
        header = lines[0].lstrip("# ")
        fields = dict(part.strip().split("=", 1) for part in header.split(","))
        data = np.loadtxt(io.StringIO("\n".join(lines[2:])), delimiter=",", ndmin=2)
        return cls(float(fields["t"]), data[:, 0], data[:, 1], data[:, 2], fields.get("preset", ""))

    def to_json(self, path: str | Path | None = None) -> str:
        doc = {
            "t": self.t,
            "preset": self.preset,
            "x": self.xs.tolist(),
            "omega": self.omega.tolist(),
            "hilbert_omega": self.hilbert_omega.tolist(),
        }
        text = json.dumps(doc)
        if path is not None:
            Path(path).write_text(text)
        return text

    @classmethod
    def from_json(cls, source: str | Path) -> "SolutionSnapshot":
        text = Path(source).read_text() if isinstance(source, Path) or not str(source).lstrip().startswith("{") else str(source)
        doc = json.loads(text)
        return cls(doc["t"], doc["x"], doc["omega"], doc["hilbert_omega"], doc.get("preset", ""))


def snapshot(datum: InitialDatum, xs, t: float, preset: str = "") -> SolutionSnapshot:
    """Evaluate the closed form on a grid and package it."""
    om, hom = evaluate(datum, xs, t)
    return SolutionSnapshot(float(t), np.asarray(xs, dtype=float), om, hom, preset or datum.label)

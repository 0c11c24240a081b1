"""Numerical Hilbert transform of sampled data on the real line.

Convention: ``H f(x) = (1/pi) PV int f(y) / (x - y) dy``, so that
``H(1/(1+x^2)) = x/(1+x^2)`` and ``H(-2x/(1+x^2)) = 2/(1+x^2)``.

Three methods are offered:

``fft``
    The sinc-exact discrete kernel ``2/(pi m)`` (odd ``m``) applied as an FFT
    convolution.  The data are first extended past the grid by a fitted
    far-field model ``sum_k m_k u^-k`` and the remaining semi-infinite tails
    are integrated in closed form.  Algebraic tails such as ``1/x`` are
    therefore handled without the O(1/L) periodization error.
``quadrature``
    Singularity subtraction plus trapezoid rule, valid on graded grids; the
    same far-field model supplies the tails.  Second-order accurate.
``periodic``
    The plain spectral multiplier ``-i sgn(k)`` on the periodic extension of
    the window.  Cheap, but carries an O(1/L) error for slowly decaying data.
"""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.fft import next_fast_len

from .errors import DomainTooSmall

_SERIES_TERMS = 80


class HilbertResult(NamedTuple):
    values: np.ndarray
    error_estimate: float


# ---------------------------------------------------------------------------
# far-field model
# ---------------------------------------------------------------------------


class _TailModel(NamedTuple):
    coeffs: np.ndarray  # m_k for k = 1..K, model f(u) ~ sum m_k u^-k
    residual: float


def _fit_tail(u: np.ndarray, f: np.ndarray, span: float, order: int) -> _TailModel:
    """Least-squares fit of ``f(u) ~ sum_{k=1}^order m_k u^-k`` in sigma = span/u."""
    sigma = span / u
    A = sigma[:, None] ** np.arange(1, order + 1)[None, :]
    coef, *_ = np.linalg.lstsq(A, f, rcond=None)
    resid = float(np.max(np.abs(A @ coef - f))) if len(f) else 0.0
    m = coef * span ** np.arange(1, order + 1)
    return _TailModel(m, resid)


def _tail_kernels(s: np.ndarray, R: np.ndarray, K: int) -> np.ndarray:
    """J_k(s; R) = int_R^inf u^-k / (s - u) du for k = 1..K, shape (K, len(s)).

    A power series in s/R is used when |s| < R/2, otherwise the closed form
    for J_1 and the upward recursion J_k = (R^(1-k)/(k-1) + J_{k-1}) / s.
    """
    s = np.asarray(s, dtype=float)
    R = np.broadcast_to(np.asarray(R, dtype=float), s.shape)
    out = np.empty((K, s.size))
    ratio = s / R
    small = np.abs(ratio) < 0.5
    if np.any(small):
        rs = ratio[small]
        Rs = R[small]
        powers = rs[None, :] ** np.arange(_SERIES_TERMS)[:, None]
        for k in range(1, K + 1):
            denom = (k + np.arange(_SERIES_TERMS))[:, None]
            out[k - 1, small] = -np.sum(powers / denom, axis=0) * Rs ** (-float(k))
    big = ~small
    if np.any(big):
        sb = s[big]
        Rb = R[big]
        J = np.log1p(-sb / Rb) / sb
        out[0, big] = J
        for k in range(2, K + 1):
            J = (Rb ** (1.0 - k) / (k - 1) + J) / sb
            out[k - 1, big] = J
    return out


def _tail_contribution(s, R_right, R_left, right: _TailModel, left: _TailModel, order: int):
    """(1/pi) times the integrals of the two model tails beyond R_right and -R_left."""
    Jr = _tail_kernels(s, R_right, order)
    Jl = _tail_kernels(-s, R_left, order)
    sign = (-1.0) ** (np.arange(1, order + 1) + 1)
    val = right.coeffs[:order] @ Jr + (sign * left.coeffs[:order]) @ Jl
    return val / np.pi


# ---------------------------------------------------------------------------
# methods
# ---------------------------------------------------------------------------


def _check_decay(f: np.ndarray, decay_tol: float) -> None:
    fmax = float(np.max(np.abs(f)))
    if fmax == 0.0:
        return
    edge = max(abs(f[0]), abs(f[-1]))
    if edge > decay_tol * fmax:
        raise DomainTooSmall(
            f"boundary value {edge:.3g} exceeds {decay_tol} x max|f| = {decay_tol * fmax:.3g}"
        )


def _fit_both(s, f, span, order, fit_window):
    lo, hi = fit_window
    rmask = (s >= lo * span) & (s <= hi * span)
    lmask = (s <= -lo * span) & (s >= -hi * span)
    if rmask.sum() < order + 2 or lmask.sum() < order + 2:
        raise DomainTooSmall("too few samples in the far-field fit window")
    right = _fit_tail(s[rmask], f[rmask], span, order)
    left = _fit_tail(s[lmask], f[lmask], -span, order)
    return right, left


def _dht_kernel(M: int) -> np.ndarray:
    m = np.arange(-(M - 1), M)
    k = np.zeros(2 * M - 1)
    odd = (m % 2) != 0
    k[odd] = 2.0 / (np.pi * m[odd])
    return k


class UniformHilbert:
    """Precomputed ``fft``-method Hilbert transform for one uniform grid.

    Everything that depends only on the grid (fit pseudo-inverses, padded
    kernel spectrum, closed-form tail kernels) is built once, so repeated
    application, e.g. inside a time stepper, costs two real FFTs.
    """

    def __init__(self, x, tail_order: int = 6, fit_window: tuple[float, float] = (0.5, 0.95)):
        x = np.asarray(x, dtype=float)
        n = len(x)
        h = (x[-1] - x[0]) / (n - 1)
        if not np.allclose(np.diff(x), h, rtol=1e-9, atol=1e-12 * max(1.0, abs(h))):
            raise ValueError("method='fft' needs a uniform grid")
        self.x, self.n, self.h, self.order = x, n, h, tail_order
        c = 0.5 * (x[0] + x[-1])
        span = 0.5 * (x[-1] - x[0])
        s = x - c
        lo, hi = fit_window
        self._rmask = (s >= lo * span) & (s <= hi * span)
        self._lmask = (s <= -lo * span) & (s >= -hi * span)
        if self._rmask.sum() < tail_order + 2 or self._lmask.sum() < tail_order + 2:
            raise DomainTooSmall("too few samples in the far-field fit window")
        powers = np.arange(1, tail_order + 1)
        # fit in sigma = span/u, then rescale to coefficients of u^-k
        self._rA = (span / s[self._rmask])[:, None] ** powers
        self._lA = (-span / s[self._lmask])[:, None] ** powers
        self._rscale = span**powers
        self._lscale = (-span) ** powers
        self._rpinv = np.linalg.pinv(self._rA) * self._rscale[:, None]
        self._lpinv = np.linalg.pinv(self._lA) * self._lscale[:, None]

        # extend by the model so that every target sits well inside the padded window
        P = n // 2 + 1
        self.P = P
        s_pad = s[0] + h * np.arange(-P, n + P)
        self._inv_left = s_pad[:P, None] ** (-powers[None, :].astype(float))
        self._inv_right = s_pad[P + n :, None] ** (-powers[None, :].astype(float))
        M = n + 2 * P
        self.M = M
        self._nfft = next_fast_len(3 * M - 2, real=True)
        self._kspec = np.fft.rfft(_dht_kernel(M), self._nfft)

        # the odd-m sum is a step-2h midpoint rule; its cells end half a cell past
        # the last opposite-parity sample, which depends on the target's parity
        idx = np.arange(P, P + n)
        R_right = np.where((M - 1 - idx) % 2 == 1, s_pad[-1] + h, s_pad[-1])
        R_left = -np.where(idx % 2 == 1, s_pad[0] - h, s_pad[0])
        sign = (-1.0) ** (powers + 1)
        self._Jr = _tail_kernels(s, R_right, tail_order) / np.pi
        self._Jl = sign[:, None] * _tail_kernels(-s, R_left, tail_order) / np.pi

    def __call__(self, f) -> HilbertResult:
        f = np.asarray(f, dtype=float)
        n, P, K = self.n, self.P, self.order
        mr = self._rpinv @ f[self._rmask]
        ml = self._lpinv @ f[self._lmask]
        f_pad = np.empty(self.M)
        f_pad[P : P + n] = f
        f_pad[:P] = self._inv_left @ ml
        f_pad[P + n :] = self._inv_right @ mr
        conv = np.fft.irfft(np.fft.rfft(f_pad, self._nfft) * self._kspec, self._nfft)
        core = conv[self.M - 1 + P : self.M - 1 + P + n]
        tail = mr @ self._Jr + ml @ self._Jl
        values = core + tail

        k2 = max(K - 2, 1)
        lower = mr[:k2] @ self._Jr[:k2] + ml[:k2] @ self._Jl[:k2]
        resid = max(
            float(np.max(np.abs(self._rA @ (mr / self._rscale) - f[self._rmask]))),
            float(np.max(np.abs(self._lA @ (ml / self._lscale) - f[self._lmask]))),
        )
        err = float(np.max(np.abs(tail - lower))) + resid
        return HilbertResult(values, err)


def _hilbert_quadrature(x, f, order, fit_window):
    n = len(x)
    c = 0.5 * (x[0] + x[-1])
    span = 0.5 * (x[-1] - x[0])
    s = x - c
    right, left = _fit_both(s, f, span, order, fit_window)
    dfds = np.gradient(f, s, edge_order=2)
    w = np.empty(n)
    w[1:-1] = 0.5 * (s[2:] - s[:-2])
    w[0] = 0.5 * (s[1] - s[0])
    w[-1] = 0.5 * (s[-1] - s[-2])
    a, b = s[0], s[-1]
    out = np.empty(n)
    inner = np.arange(1, n - 1)
    for start in range(0, len(inner), 512):
        ii = inner[start : start + 512]
        diff = s[ii, None] - s[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            g = (f[None, :] - f[ii, None]) / diff
        g[np.arange(len(ii)), ii] = -dfds[ii]
        out[ii] = (g @ w + f[ii] * np.log((s[ii] - a) / (b - s[ii]))) / np.pi
    out[inner] += _tail_contribution(s[inner], b, -a, right, left, order)
    # the end samples sit on the log singularity of both pieces: extrapolate
    out[0] = 3 * out[1] - 3 * out[2] + out[3]
    out[-1] = 3 * out[-2] - 3 * out[-3] + out[-4]
    full = _tail_contribution(s[inner], b, -a, right, left, order)
    lower = _tail_contribution(s[inner], b, -a, right, left, max(order - 2, 1))
    hmax = float(np.max(np.diff(s)))
    d2 = np.gradient(dfds, s, edge_order=2)
    err = float(np.max(np.abs(full - lower))) + hmax**2 * float(np.max(np.abs(d2))) / 12.0
    return HilbertResult(out, err)


def _hilbert_periodic(x, f):
    n = len(x)
    fk = np.fft.rfft(f)
    k = np.fft.rfftfreq(n)
    mult = -1j * np.sign(k)
    if n % 2 == 0:
        mult[-1] = 0.0  # Nyquist mode carries no Hilbert pair
    values = np.fft.irfft(mult * fk, n)
    # O(1/L) periodization error: the mass of f beyond the window is unknown,
    # use the edge magnitude times a log factor as an indicator
    err = float(max(abs(f[0]), abs(f[-1])) * (1 + np.log(n)))
    return HilbertResult(values, err)


def hilbert_numeric(
    x,
    f,
    method: str = "fft",
    *,
    tail_order: int = 6,
    fit_window: tuple[float, float] = (0.5, 0.95),
    decay_tol: float = 0.25,
) -> HilbertResult:
    """Principal-value Hilbert transform of samples ``f`` on grid ``x``.

    Parameters
    ----------
    x, f : array_like
        Sorted grid (uniform for ``fft`` and ``periodic``) and real samples.
    method : {"fft", "quadrature", "periodic"}
    tail_order : int
        Number of inverse powers in the far-field model.
    fit_window : (float, float)
        Fraction of the half-width over which each far-field model is fitted.
    decay_tol : float
        Maximum allowed ratio of edge magnitude to peak magnitude.

    Returns
    -------
    HilbertResult
        ``values`` on the grid and a scalar ``error_estimate`` (sensitivity of
        the tail treatment plus fit residual, or the discretization indicator).

    Raises
    ------
    DomainTooSmall
        When the data do not decay toward the grid ends.
    """
    x = np.asarray(x, dtype=float)
    f = np.asarray(f, dtype=float)
    if x.shape != f.shape or x.ndim != 1:
        raise ValueError("x and f must be 1-D arrays of equal length")
    if len(x) < 32:
        raise DomainTooSmall("need at least 32 samples")
    _check_decay(f, decay_tol)
    if method == "fft":
        return UniformHilbert(x, tail_order, fit_window)(f)
    if method == "quadrature":
        return _hilbert_quadrature(x, f, tail_order, fit_window)
    if method == "periodic":
        return _hilbert_periodic(x, f)
    raise ValueError(f"unknown method {method!r}")


def tricomi_residual(x, f, method: str = "fft", **kw) -> np.ndarray:
    """Pointwise ``2 H(f Hf) - ((Hf)^2 - f^2)``, which vanishes identically."""
    f = np.asarray(f, dtype=float)
    hf = hilbert_numeric(x, f, method, **kw).values
    lhs = 2.0 * hilbert_numeric(x, f * hf, method, **kw).values
    return lhs - (hf**2 - f**2)

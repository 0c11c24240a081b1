"""Complex polynomials and rational functions in double precision.

Coefficients are stored in ascending degree.  Rational functions are kept in
reduced form by matching roots of the denominator against the numerator;
this is more robust with floating coefficients than a polynomial GCD.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import NoConvergence, NotUpperHolomorphic, PoleHit

EPS = np.finfo(float).eps

#: relative residual accepted for a computed root, |p(r)| <= ROOT_RTOL * |p|(r)
ROOT_RTOL = 1e-12
#: roots closer than this (relative to max(1, |z|)) are one cluster
CLUSTER_RADIUS = 1e-8
#: wide search radius for multiple roots that eigenvalues smear out
_WIDE_RADIUS = 5e-2
#: threshold for a Taylor coefficient to count as zero when reducing
_REDUCE_RTOL = 1e-10
#: |den(z)| below this fraction of the Horner magnitude is a pole hit
POLE_RTOL = 1e-14


class Polynomial:
    """Immutable complex polynomial, coefficients in ascending degree.

    Trailing (highest degree) exact zeros are trimmed, so the leading
    coefficient is nonzero unless the polynomial is identically zero.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex)).ravel().copy()
        if c.size == 0:
            c = np.zeros(1, dtype=complex)
        nz = np.flatnonzero(c)
        c = c[: nz[-1] + 1] if nz.size else c[:1] * 0
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    # -- basic properties -------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    @property
    def leading(self) -> complex:
        return complex(self.coeffs[-1])

    def __repr__(self) -> str:
        return f"Polynomial({self.coeffs.tolist()!r})"

    def __len__(self) -> int:
        return len(self.coeffs)

    # -- evaluation ---------------------------------------------------------
    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.coeffs[-1], dtype=complex)
        for a in self.coeffs[-2::-1]:
            out = out * z + a
        return out if out.ndim else complex(out)

    def magnitude(self, z):
        """Horner magnitude sum_k |a_k| |z|^k, the natural scale of p(z)."""
        r = np.abs(np.asarray(z, dtype=complex))
        out = np.full(r.shape, abs(self.coeffs[-1]))
        for a in self.coeffs[-2::-1]:
            out = out * r + abs(a)
        return out if out.ndim else float(out)

    # -- algebra --------------------------------------------------------------
    def derivative(self, k: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(k):
            if len(c) <= 1:
                return Polynomial([0])
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(c)

    def __neg__(self):
        return Polynomial(-self.coeffs)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self), len(other))
        c = np.zeros(n, dtype=complex)
        c[: len(self)] += self.coeffs
        c[: len(other)] += other.coeffs
        return Polynomial(c)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        if np.isscalar(other):
            return Polynomial(self.coeffs * complex(other))
        other = _as_poly(other)
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def trim(self, rtol: float = 1e-13) -> "Polynomial":
        """Drop leading coefficients below ``rtol * max|a_k|`` (cancellation debris)."""
        c = self.coeffs
        if self.is_zero:
            return self
        cut = rtol * np.max(np.abs(c))
        n = len(c)
        while n > 1 and abs(c[n - 1]) <= cut:
            n -= 1
        return Polynomial(c[:n])

    def taylor_shift(self, c0: complex) -> np.ndarray:
        """Coefficients b_k of p(c0 + u) = sum b_k u^k (repeated synthetic division)."""
        b = np.array(self.coeffs[::-1], dtype=complex)  # descending
        n = len(b)
        for i in range(n - 1):
            for j in range(1, n - i):
                b[j] += c0 * b[j - 1]
        return b[::-1].copy()

    def deflate(self, c0: complex, k: int = 1) -> "Polynomial":
        """Quotient of p by (z - c0)^k; the remainder is discarded."""
        c = np.array(self.coeffs, dtype=complex)
        for _ in range(k):
            if len(c) <= 1:
                return Polynomial([0])
            desc = c[::-1]
            q = np.empty(len(desc) - 1, dtype=complex)
            acc = 0j
            for i in range(len(desc) - 1):
                acc = acc * c0 + desc[i]
                q[i] = acc
            c = q[::-1]
        return Polynomial(c)

    @classmethod
    def from_roots(cls, roots: Iterable[complex], leading: complex = 1.0) -> "Polynomial":
        c = np.array([complex(leading)])
        for r in roots:
            c = np.convolve(c, [-complex(r), 1.0])
        return cls(c)

    # -- serialization ------------------------------------------------------
    def to_json(self) -> list[list[float]]:
        return [[float(a.real), float(a.imag)] for a in self.coeffs]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[float]]) -> "Polynomial":
        return cls([complex(re, im) for re, im in data])


def _as_poly(x) -> Polynomial:
    if isinstance(x, Polynomial):
        return x
    return Polynomial([complex(x)])


# ---------------------------------------------------------------------------
# Root finding
# ---------------------------------------------------------------------------


def _companion_roots(c: np.ndarray) -> np.ndarray:
    n = len(c) - 1
    C = np.zeros((n, n), dtype=complex)
    C[1:, :-1] = np.eye(n - 1)
    C[:, -1] = -c[:-1] / c[-1]
    return np.linalg.eigvals(C)


def _aberth(c: np.ndarray, maxiter: int = 500) -> np.ndarray:
    n = len(c) - 1
    p = Polynomial(c)
    dp = p.derivative()
    radius = 1 + np.max(np.abs(c[:-1] / c[-1]))
    z = radius * np.exp(2j * np.pi * (np.arange(n) + 0.25) / n)
    for _ in range(maxiter):
        ratio = p(z) / dp(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0  # drop the diagonal 1/1 term
        w = ratio / (1 - ratio * s)
        z = z - w
        if np.all(np.abs(w) <= 4 * EPS * np.maximum(1, np.abs(z))):
            break
    return z


def _newton_polish(p: Polynomial, dp: Polynomial, z: complex, maxiter: int = 8) -> complex:
    r = abs(p(z))
    for _ in range(maxiter):
        d = dp(z)
        if d == 0:
            break
        znew = z - p(z) / d
        rnew = abs(p(znew))
        if not rnew < r:
            if rnew == r == 0:
                z = znew
            break
        z, r = znew, rnew
        if r == 0:
            break
    return z


def _linkage_groups(zs: np.ndarray, radius_fn: Callable[[complex], float]) -> list[list[int]]:
    """Single-linkage grouping: i ~ j when |z_i - z_j| <= radius(z_i)."""
    n = len(zs)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(zs[i] - zs[j]) <= radius_fn(zs[i]):
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _is_multiple_root(p: Polynomial, pts: np.ndarray) -> bool:
    """Accept a cluster of m eigenvalues as one root of multiplicity m.

    A root of multiplicity m perturbed by a backward error eps*|p| scatters
    by about (eps*|p| / |b_m|)^(1/m), with b_m the m-th Taylor coefficient
    at the centroid; distinct roots stay farther apart than that.
    """
    m = len(pts)
    c = pts.mean()
    b = p.taylor_shift(c)
    if len(b) <= m or b[m] == 0:
        return False
    scale = p.magnitude(c)
    spread = np.max(np.abs(pts - c))
    return spread <= 16 * (64 * EPS * scale / abs(b[m])) ** (1.0 / m)


def roots(p: Polynomial, *, method: str = "auto") -> list[tuple[complex, int]]:
    """All roots of ``p`` with multiplicities.

    Companion-matrix eigenvalues are the primary method; Aberth-Ehrlich is
    the fallback (``method="aberth"`` forces it).  Simple roots are Newton
    polished on ``p`` itself, and clusters that ``p`` certifies as a multiple
    root are collapsed to their centroid.

    Raises
    ------
    NoConvergence
        If no method reaches ``|p(r)| <= ROOT_RTOL * |p|(r)`` for every root.
    """
    p = _as_poly(p)
    if p.is_zero or p.degree < 1:
        raise ValueError("roots() needs a polynomial of degree >= 1")
    c = np.array(p.coeffs)
    out: list[tuple[complex, int]] = []
    nzero = int(np.argmax(c != 0))
    if nzero:
        out.append((0j, nzero))
        c = c[nzero:]
    if len(c) == 1:
        return out
    q = Polynomial(c)
    methods = ["aberth"] if method == "aberth" else ["companion", "aberth"]
    for m in methods:
        try:
            raw = _companion_roots(c) if m == "companion" else _aberth(c)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(raw)):
            continue
        found = _cluster_and_polish(q, raw)
        if all(abs(q(r)) <= ROOT_RTOL * q.magnitude(r) or abs(q(r)) == 0 for r, _ in found):
            out.extend(found)
            return sorted(out, key=lambda rm: (round(rm[0].real, 12), rm[0].imag))
    raise NoConvergence(f"root finding failed for polynomial of degree {p.degree}")


def _cluster_and_polish(p: Polynomial, raw: np.ndarray) -> list[tuple[complex, int]]:
    dp = p.derivative()
    result: list[tuple[complex, int]] = []
    wide = _linkage_groups(raw, lambda z: _WIDE_RADIUS * max(1.0, abs(z)))

    def polish(pts_g):
        m = len(pts_g)
        z = complex(pts_g.mean())
        if m == 1:
            return _newton_polish(p, dp, z), 1
        # the centroid is a simple root of p^(m-1)
        return _newton_polish(p.derivative(m - 1), p.derivative(m), z, maxiter=4), m

    for g in wide:
        pts = raw[g]
        if len(pts) > 1 and _is_multiple_root(p, pts):
            z, m = polish(pts)
            if abs(p(z)) <= ROOT_RTOL * p.magnitude(z):
                result.append((z, m))
                continue
            # a near-multiple root: its members are distinct after all
        tight = _linkage_groups(pts, lambda z: CLUSTER_RADIUS * max(1.0, abs(z)))
        result.extend(polish(pts[t]) for t in tight)
    return result


def root_list(p: Polynomial) -> np.ndarray:
    """Roots repeated according to multiplicity, as a flat array."""
    return np.array([r for r, m in roots(p) for _ in range(m)], dtype=complex)


# ---------------------------------------------------------------------------
# Rational functions
# ---------------------------------------------------------------------------


def _root_multiplicity_at(p: Polynomial, c0: complex, kmax: int, rtol: float) -> int:
    b = p.taylor_shift(c0)
    scale = p.magnitude(c0)
    k = 0
    while k < min(kmax, len(b) - 1) and abs(b[k]) <= rtol * scale:
        k += 1
    return k


def _reduce(num: Polynomial, den: Polynomial, den_roots=None) -> tuple[Polynomial, Polynomial]:
    if num.is_zero:
        return Polynomial([0]), Polynomial([1])
    if den.degree < 1 or num.degree < 1:
        return num, den
    if den_roots is None:
        den_roots = roots(den)
    for c0, m in den_roots:
        k = _root_multiplicity_at(num, c0, m, _REDUCE_RTOL)
        if k:
            num = num.deflate(c0, k)
            den = den.deflate(c0, k)
    return num, den


class RationalFunction:
    """Immutable complex rational function ``num(z) / den(z)``, kept reduced."""

    __slots__ = ("num", "den", "_poles")

    def __init__(self, num, den=1.0, *, reduce: bool = True, _den_roots=None):
        num = _as_poly(num) if not isinstance(num, (list, tuple, np.ndarray)) else Polynomial(num)
        den = _as_poly(den) if not isinstance(den, (list, tuple, np.ndarray)) else Polynomial(den)
        if den.is_zero:
            raise ZeroDivisionError("denominator is the zero polynomial")
        if reduce:
            num, den = _reduce(num, den, _den_roots)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "_poles", None)

    def __setattr__(self, name, value):
        raise AttributeError("RationalFunction is immutable")

    def __repr__(self) -> str:
        return f"RationalFunction(num={self.num.coeffs.tolist()}, den={self.den.coeffs.tolist()})"

    # -- evaluation ---------------------------------------------------------
    def __call__(self, z):
        return evaluate(self, z)

    def poles(self) -> list[tuple[complex, int]]:
        if self._poles is None:
            object.__setattr__(self, "_poles", [] if self.den.degree < 1 else roots(self.den))
        return self._poles

    def zeros(self) -> list[tuple[complex, int]]:
        return [] if self.num.degree < 1 else roots(self.num)

    @property
    def decays(self) -> bool:
        return self.num.is_zero or self.num.degree < self.den.degree

    @property
    def is_upper_holomorphic(self) -> bool:
        return self.decays and all(p.imag < 0 for p, _ in self.poles())

    # -- algebra ------------------------------------------------------------
    def derivative(self) -> "RationalFunction":
        return derivative(self)

    def reciprocal(self) -> "RationalFunction":
        return RationalFunction(self.den, self.num, reduce=False)

    def __neg__(self):
        return RationalFunction(-self.num, self.den, reduce=False)

    def __add__(self, other):
        if np.isscalar(other):
            return RationalFunction(self.num + self.den * complex(other), self.den, reduce=False)
        num = (self.num * other.den + other.num * self.den).trim()
        return RationalFunction(num, self.den * other.den)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other if not np.isscalar(other) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if np.isscalar(other):
            return RationalFunction(self.num * complex(other), self.den, reduce=False)
        return RationalFunction(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if np.isscalar(other):
            return RationalFunction(self.num * (1 / complex(other)), self.den, reduce=False)
        return self * other.reciprocal()

    def taylor(self, order: int, at: complex = 0.0) -> np.ndarray:
        """Taylor coefficients f(at + u) = sum_k a_k u^k for k = 0..order."""
        n = np.zeros(order + 1, dtype=complex)
        d = np.zeros(order + 1, dtype=complex)
        ns = self.num.taylor_shift(at)[: order + 1]
        ds = self.den.taylor_shift(at)[: order + 1]
        n[: len(ns)] = ns
        d[: len(ds)] = ds
        if d[0] == 0:
            raise PoleHit(f"Taylor expansion requested at a pole z={at}")
        a = np.zeros(order + 1, dtype=complex)
        for k in range(order + 1):
            a[k] = (n[k] - np.dot(d[1 : k + 1], a[k - 1 :: -1][:k])) / d[0]
        return a

    # -- serialization ------------------------------------------------------
    def to_json(self) -> dict:
        return {"num": self.num.to_json(), "den": self.den.to_json()}

    @classmethod
    def from_json(cls, data: dict) -> "RationalFunction":
        return cls(Polynomial.from_json(data["num"]), Polynomial.from_json(data["den"]))


def evaluate(f: RationalFunction, z):
    """Evaluate ``num(z)/den(z)`` by Horner's rule.

    Raises PoleHit when ``|den(z)| < POLE_RTOL * |den|(z)`` at any point.
    """
    d = f.den(z)
    near = np.abs(d) < POLE_RTOL * f.den.magnitude(z)
    if np.any(near):
        zz = np.asarray(z, dtype=complex)
        bad = zz[near] if zz.ndim else zz
        raise PoleHit(f"evaluation at a pole: z={np.ravel(bad)[0]}")
    return f.num(z) / d


def derivative(f: RationalFunction) -> RationalFunction:
    """Quotient rule ``(N'D - ND') / D^2``, reduced by root matching."""
    N, D = f.num, f.den
    if D.degree < 1:
        return RationalFunction(N.derivative() * (1 / D.leading), [1.0], reduce=False)
    num = (N.derivative() * D - N * D.derivative()).trim()
    den_roots = [(r, 2 * m) for r, m in f.poles()]
    return RationalFunction(num, D * D, _den_roots=den_roots)


# ---------------------------------------------------------------------------
# Boundary traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BoundaryTrace:
    """Real-line trace of an upper-holomorphic function: omega_0 = Re, H(omega_0) = Im.

    ``source`` keeps the generating rational function when there is one, so
    that exact Taylor data at the origin are available downstream.
    ``hilbert_at_zero`` and ``hilbert_increment`` (x -> H(omega_0)(x) -
    H(omega_0)(0), free of cancellation) are optional accuracy aids.
    """

    omega0: Callable[[np.ndarray], np.ndarray]
    hilbert_omega0: Callable[[np.ndarray], np.ndarray]
    source: RationalFunction | None = None
    hilbert_at_zero: float | None = None
    hilbert_increment: Callable[[np.ndarray], np.ndarray] | None = None

    def eta0(self, x):
        return self.omega0(x) + 1j * self.hilbert_omega0(x)

    def parity_defect(self, xs) -> tuple[float, float]:
        """(max|w(x)+w(-x)|, max|Hw(x)-Hw(-x)|): both vanish for odd omega_0."""
        xs = np.asarray(xs, dtype=float)
        w = self.omega0(xs) + self.omega0(-xs)
        h = self.hilbert_omega0(xs) - self.hilbert_omega0(-xs)
        return float(np.max(np.abs(w))), float(np.max(np.abs(h)))


def _real_poly(c: np.ndarray) -> np.ndarray:
    c = np.trim_zeros(np.asarray(c, dtype=float), "b")
    return c if c.size else np.zeros(1)


def boundary_trace(f: RationalFunction) -> BoundaryTrace:
    """Trace handles (Re f(x), Im f(x)) for an upper-holomorphic ``f``.

    On the real line ``f = N conj(D) / |D|^2``, so both parts are ratios of
    real polynomials.  Evaluating those keeps full relative accuracy where
    Re f is much smaller than |f|, e.g. near a degenerate zero of omega_0.

    Raises
    ------
    NotUpperHolomorphic
        If some pole has Im >= 0 or ``f`` does not decay at infinity.
    """
    if not f.decays:
        raise NotUpperHolomorphic("f must decay at infinity (deg num < deg den)")
    bad = [p for p, _ in f.poles() if p.imag >= 0]
    if bad:
        raise NotUpperHolomorphic(f"pole(s) in the closed upper half-plane: {bad}")

    P = np.polynomial.polynomial
    nr, ni = f.num.coeffs.real, f.num.coeffs.imag
    dr, di = f.den.coeffs.real, f.den.coeffs.imag
    re_num = _real_poly(P.polyadd(P.polymul(nr, dr), P.polymul(ni, di)))
    im_num = _real_poly(P.polysub(P.polymul(ni, dr), P.polymul(nr, di)))
    mod2 = _real_poly(P.polyadd(P.polymul(dr, dr), P.polymul(di, di)))
    h0 = im_num[0] / mod2[0]
    # H(x) - H(0) = (im_num(x) q0 - r0 mod2(x)) / (mod2(x) q0); the constant term cancels exactly
    inc = P.polysub(im_num * mod2[0], mod2 * im_num[0])
    inc[0] = 0.0

    def omega0(x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, re_num) / P.polyval(x, mod2)

    def hilbert_omega0(x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, im_num) / P.polyval(x, mod2)

    def hilbert_increment(x):
        x = np.asarray(x, dtype=float)
        return P.polyval(x, inc) / (P.polyval(x, mod2) * mod2[0])

    return BoundaryTrace(omega0, hilbert_omega0, f, float(h0), hilbert_increment)

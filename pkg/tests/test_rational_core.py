import numpy as np
import pytest
from hypothesis import given, strategies as st

from clmlab.errors import NotUpperHolomorphic, PoleHit
from clmlab.rational_core import (
    Polynomial,
    RationalFunction,
    boundary_trace,
    derivative,
    evaluate,
    root_list,
    roots,
)

from oracles import TRACES, mp_eval

coef = st.floats(-5, 5, allow_nan=False).filter(lambda v: abs(v) > 1e-3 or v == 0)
cplx = st.builds(complex, coef, coef)


def test_polynomial_trims_and_degree():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert Polynomial([0, 0]).is_zero
    assert Polynomial([]).is_zero


def test_polynomial_immutable():
    p = Polynomial([1, 2])
    with pytest.raises(AttributeError):
        p.coeffs = None
    with pytest.raises(ValueError):
        p.coeffs[0] = 3


def test_polynomial_json_round_trip():
    p = Polynomial([1 + 2j, -3, 0.5j])
    q = Polynomial.from_json(p.to_json())
    assert np.array_equal(p.coeffs, q.coeffs)


def test_eval_basic():
    f = RationalFunction([-2], [1j, 1])
    assert evaluate(f, 0) == pytest.approx(2j)


def test_eval_at_pole_raises():
    f = RationalFunction([-2], [1j, 1])
    with pytest.raises(PoleHit):
        evaluate(f, -1j)


def test_eval_matches_extended_precision(presets):
    eta = presets["III"].eta0
    z = 1.0
    assert evaluate(eta, z) == pytest.approx(2 / (-1j) - 2 / (2 + 1j), abs=1e-14)
    ref = mp_eval(eta.num.coeffs, eta.den.coeffs, z)
    assert abs(evaluate(eta, z) - ref) <= 1e-14


def test_roots_simple_pair():
    rs = roots(Polynomial([1, 0, 1]))
    assert sorted(m for _, m in rs) == [1, 1]
    assert sorted(r.imag for r, _ in rs) == pytest.approx([-1, 1])


def test_roots_triple():
    p = Polynomial.from_roots([-1j] * 3)
    rs = roots(p)
    assert len(rs) == 1
    assert rs[0][1] == 3
    assert abs(rs[0][0] + 1j) < 1e-8


def test_roots_quartic_back_substitution():
    p = Polynomial([25, 0, 24, 0, 16])
    zs = root_list(p)
    assert len(zs) == 4
    assert np.max(np.abs(p(zs))) <= 1e-10


def test_roots_near_double_stay_distinct():
    # two roots 3e-6 apart must not be merged into a spurious double root
    p = Polynomial.from_roots([-0.5j + 1.5e-6, -0.5j - 1.5e-6])
    rs = roots(p)
    assert [m for _, m in rs] == [1, 1]


@given(st.lists(cplx, min_size=1, max_size=6, unique=True))
def test_roots_round_trip(zs):
    zs = np.array(zs)
    d = np.abs(zs[:, None] - zs[None, :]) + np.eye(len(zs))
    if d.min() < 1e-2:
        return
    found = root_list(Polynomial.from_roots(zs))
    assert len(found) == len(zs)
    for z in zs:
        assert np.min(np.abs(found - z)) <= 1e-8 * max(1, abs(z)) * 1e2


def test_reduce_removes_common_factor():
    f = RationalFunction(Polynomial.from_roots([1, 2]), Polynomial.from_roots([1, -3j]))
    assert f.den.degree == 1
    assert f(0.5) == pytest.approx((0.5 - 2) / (0.5 + 3j))


def test_derivative_known():
    zeta = RationalFunction([-0.5j, -0.5])
    d = derivative(zeta)
    assert d(0.3) == pytest.approx(-0.5)
    assert derivative(RationalFunction([3.0])).num.is_zero


def test_derivative_matches_finite_difference(presets):
    zeta = presets["III"].zeta0
    d = derivative(zeta)
    rng = np.random.default_rng(1)
    for z in rng.normal(size=5) + 1j * rng.normal(size=5) * 0.3:
        h = 1e-5
        fd = (zeta(z + h) - zeta(z - h)) / (2 * h)
        assert abs(d(z) - fd) <= 1e-8 * max(1, abs(fd))


@given(cplx, cplx, st.floats(-3, 3), st.floats(-3, 3))
def test_derivative_linear(al, be, x, y):
    f = RationalFunction([1, 2j], [1j, 1])
    g = RationalFunction([2, 0, 1], [2, -2j, -1])
    z = complex(x, y)
    if min(abs(z + 1j), *(abs(z - r) for r in root_list(g.den))) < 0.2:
        return
    lhs = derivative(al * f + be * g)(z)
    rhs = al * derivative(f)(z) + be * derivative(g)(z)
    assert abs(lhs - rhs) <= 1e-9 * (1 + abs(rhs))


@pytest.mark.parametrize("pid", list(TRACES))
def test_boundary_trace_matches_hand_formulas(presets, pid):
    tr = boundary_trace(presets[pid].eta0)
    w, h = TRACES[pid]
    xs = np.linspace(-8, 8, 321)
    assert np.max(np.abs(tr.omega0(xs) - w(xs))) <= 1e-12
    assert np.max(np.abs(tr.hilbert_omega0(xs) - h(xs))) <= 1e-12


def test_boundary_trace_rejects_upper_pole():
    with pytest.raises(NotUpperHolomorphic):
        boundary_trace(RationalFunction([1], [-1j, 1]))


def test_parity_of_odd_trace(presets):
    tr = boundary_trace(presets["III"].eta0)
    dw, dh = tr.parity_defect(np.linspace(0.1, 5, 50))
    assert dw <= 1e-14 and dh <= 1e-14


def test_rational_json_round_trip(presets):
    f = presets["V"].eta0
    g = RationalFunction.from_json(f.to_json())
    assert g(0.7) == pytest.approx(f(0.7), abs=1e-15)

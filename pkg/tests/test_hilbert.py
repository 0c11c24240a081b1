import numpy as np
import pytest
from hypothesis import given, strategies as st

from clmlab.errors import DomainTooSmall
from clmlab.hilbert import UniformHilbert, hilbert_numeric, tricomi_residual

from oracles import TRACES, hilbert_quad

N, L = 4096, 40.0
XS = -L + (np.arange(N) + 0.5) * (2 * L / N)
CORE = np.abs(XS) <= 10


@pytest.mark.parametrize("pid", list(TRACES))
def test_fft_matches_analytic_pair(pid):
    w, h = TRACES[pid]
    res = hilbert_numeric(XS, w(XS))
    assert np.max(np.abs(res.values - h(XS))[CORE]) <= 1e-6
    assert res.error_estimate >= 0


def test_analytic_pair_agrees_with_cauchy_quadrature():
    # check the oracle pair itself against an independent PV integral
    w, h = TRACES["III"]
    for x in (-2.3, 0.0, 0.7, 4.0):
        assert hilbert_quad(w, x) == pytest.approx(h(x), abs=1e-7)


def test_quadrature_method():
    w, h = TRACES["I"]
    xs = np.sinh(np.linspace(-np.arcsinh(200), np.arcsinh(200), 4001))
    res = hilbert_numeric(xs, w(xs), method="quadrature")
    core = np.abs(xs) <= 10
    assert np.max(np.abs(res.values - h(xs))[core]) <= 1e-4


def test_even_input_odd_output():
    f = np.exp(-XS**2)
    hf = hilbert_numeric(XS, f).values
    assert np.max(np.abs(hf + hf[::-1])) <= 1e-12


@given(st.floats(0.3, 3.0), st.floats(-3.0, 3.0))
def test_linearity_and_shift(scale, shift):
    w, _ = TRACES["VI"]
    f = scale * w(XS - shift)
    a = hilbert_numeric(XS, f).values
    b = scale * hilbert_numeric(XS, w(XS - shift)).values
    assert np.max(np.abs(a - b)) <= 1e-10 * scale


@pytest.mark.parametrize("pid", list(TRACES))
def test_tricomi_identity(pid):
    w, _ = TRACES[pid]
    r = tricomi_residual(XS, w(XS))
    assert np.max(np.abs(r[CORE])) <= 1e-6


def test_domain_too_small():
    xs = np.linspace(-1, 1, 512)
    with pytest.raises(DomainTooSmall):
        hilbert_numeric(xs, 2 / (1 + xs**2))


def test_too_few_samples():
    with pytest.raises(DomainTooSmall):
        hilbert_numeric(np.linspace(-1, 1, 8), np.zeros(8))


def test_operator_reuse_matches_function():
    op = UniformHilbert(XS)
    w, _ = TRACES["V"]
    assert np.array_equal(op(w(XS)).values, hilbert_numeric(XS, w(XS)).values)


def test_zero_input():
    assert np.all(hilbert_numeric(XS, np.zeros_like(XS)).values == 0)

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from clmlab.errors import AtSingularity, EmptyS, InvalidDatum
from clmlab.clm_exact import (
    InitialDatum,
    SolutionSnapshot,
    conserved_quantity,
    evaluate,
    hilbert_at_zero_integral,
    predict_blowup,
    snapshot,
)
from clmlab.rational_core import RationalFunction

from oracles import TRACES, self_similar_I


@pytest.fixture(scope="module")
def data(presets):
    return {k: p.datum() for k, p in presets.items()}


def test_t_zero_returns_initial(data):
    xs = np.linspace(-5, 5, 101)
    for pid, d in data.items():
        om, hom = evaluate(d, xs, 0.0)
        w, h = TRACES[pid]
        assert np.max(np.abs(om - w(xs))) <= 1e-13
        assert np.max(np.abs(hom - h(xs))) <= 1e-13


def test_first_datum_point_values(data):
    om, _ = evaluate(data["I"], np.array([1.0]), 0.5)
    assert om[0] == pytest.approx(-1.6, rel=1e-14)
    _, hom = evaluate(data["I"], np.array([0.0]), 0.9)
    assert hom[0] == pytest.approx(20.0, rel=1e-13)


@pytest.mark.parametrize("t", [0.1, 0.3, 0.5, 0.7, 0.9])
def test_self_similarity(data, t):
    xs = np.linspace(-20, 20, 801)
    om, hom = evaluate(data["I"], xs, t)
    ref_om, ref_h = self_similar_I(xs, t)
    assert np.max(np.abs(om - ref_om) / np.maximum(1e-300, np.max(np.abs(ref_om)))) <= 1e-12
    assert np.max(np.abs(hom - ref_h)) / np.max(np.abs(ref_h)) <= 1e-12


@given(st.floats(0.2, 5), st.floats(0.2, 5), st.floats(-5, 5), st.floats(0, 0.9))
def test_scaling_property(alpha, beta, x, s):
    base = InitialDatum.from_eta0(RationalFunction([4j, 4], [2, -2j, -1]))
    scaled = base.rescaled(alpha, beta)
    t = s / alpha  # keep alpha t below the blowup time of the base datum
    a = evaluate(scaled, np.array([x]), t)
    b = evaluate(base, np.array([beta * x]), alpha * t)
    for u, v in zip(a, b):
        assert u[0] == pytest.approx(alpha * v[0], rel=1e-12, abs=1e-12 * alpha)


def test_parity_preserved(data):
    xs = np.linspace(-6, 6, 241)
    om, hom = evaluate(data["III"], xs, 0.8)
    assert np.max(np.abs(om + om[::-1])) <= 1e-12 * np.max(np.abs(om))
    assert np.max(np.abs(hom - hom[::-1])) <= 1e-12 * np.max(np.abs(hom))


def test_at_singularity(data):
    with pytest.raises(AtSingularity):
        evaluate(data["I"], np.array([0.0]), 1.0)
    with pytest.raises(ValueError):
        evaluate(data["I"], np.array([0.0]), -0.1)


@pytest.mark.parametrize(
    "pid,T,points",
    [
        ("I", 1.0, [0.0]),
        ("II", 1.0, [0.0]),
        ("III", 1.0, [0.0]),
        ("IV", 1.0, [-math.sqrt(3), math.sqrt(3)]),
        ("V", 16 / 3, [0.0]),
        ("III-fig", 2.0, [0.0]),
    ],
)
def test_predict_blowup(data, pid, T, points):
    pred = predict_blowup(data[pid])
    assert pred.T == pytest.approx(T, abs=1e-10)
    assert pred.points == pytest.approx(points, abs=1e-10)
    assert pred.T == pytest.approx(2 / pred.sup_H, rel=1e-15)


def test_fourth_datum_zero_set(data):
    pred = predict_blowup(data["IV"])
    assert pred.zeros == pytest.approx([-math.sqrt(3), 0, math.sqrt(3)], abs=1e-10)
    assert data["IV"].trace.hilbert_omega0(np.array(0.0)) == pytest.approx(0.8)


def test_no_blowup(data):
    with pytest.raises(EmptyS):
        predict_blowup(data["VI"])


@pytest.mark.parametrize("t", [0.0, 0.5, 0.9, 0.99])
def test_conservation_first(data, t):
    assert conserved_quantity(data["I"], t, 1.0) == pytest.approx(2.0, abs=1e-10)


def test_conservation_others(data):
    assert conserved_quantity(data["III"], 0.999) == pytest.approx(2.0, abs=1e-9)
    assert conserved_quantity(data["V"], 5.0) == pytest.approx(2.0, abs=1e-9)
    with pytest.raises(AtSingularity):
        conserved_quantity(data["I"], 1.0, 1.0)


@pytest.mark.parametrize("pid,value", [("I", 2.0), ("III", 2.0), ("V", 0.375), ("II", 2.0)])
def test_hilbert_at_zero_integral(data, pid, value):
    assert hilbert_at_zero_integral(data[pid]) == pytest.approx(value, abs=1e-9)


def test_sign_condition_checked():
    with pytest.raises(InvalidDatum):
        InitialDatum.from_eta0(RationalFunction([2j], [1j, 1]), sign_condition=True)
    with pytest.raises(InvalidDatum):
        InitialDatum.from_eta0(RationalFunction([2j], [1j, 1]), odd_symmetric=True)


def test_snapshot_round_trips(data, tmp_path):
    s = snapshot(data["III"], np.linspace(-3, 3, 31), 0.4, "III")
    back = SolutionSnapshot.from_csv(s.to_csv())
    assert back.t == s.t and back.preset == "III"
    assert np.array_equal(back.omega, s.omega) and np.array_equal(back.xs, s.xs)
    path = tmp_path / "s.json"
    s.to_json(path)
    back = SolutionSnapshot.from_json(path)
    assert np.array_equal(back.hilbert_omega, s.hilbert_omega)


def test_snapshot_rejects_nonfinite():
    with pytest.raises(ValueError):
        SolutionSnapshot(0.0, [0.0, 1.0], [np.inf, 0.0], [0.0, 0.0])

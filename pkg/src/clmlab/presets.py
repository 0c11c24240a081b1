"""Built-in initial data, each given by an upper-holomorphic rational eta_0.

Coefficients are ascending in z.  ``expected`` records the reference values
each datum is known to produce (blowup time, points, exponents, theorem
parameters); tests and the CLI compare against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .clm_exact import InitialDatum
from .rational_core import RationalFunction


@dataclass(frozen=True)
class Preset:
    id: str
    eta0: RationalFunction
    description: str
    expected: dict = field(default_factory=dict)
    odd_symmetric: bool = False
    sign_condition: bool = False

    @property
    def zeta0(self) -> RationalFunction:
        return self.eta0.reciprocal()

    def datum(self) -> InitialDatum:
        return InitialDatum.from_eta0(
            self.eta0,
            odd_symmetric=self.odd_symmetric,
            sign_condition=self.sign_condition,
            label=self.id,
        )


def _rf(num, den) -> RationalFunction:
    return RationalFunction(num, den)


PRESETS: dict[str, Preset] = {
    p.id: p
    for p in [
        Preset(
            "I",
            _rf([-2], [1j, 1]),
            "omega_0 = -2x/(1+x^2); exactly self-similar, one pole moving straight up",
            {"T": 1.0, "points": [0.0], "c_omega": -1.0, "c_l": 1.0, "c_s": None,
             "theorem": "exact", "n": 0, "a": 1.0, "c": 1.0},
            odd_symmetric=True, sign_condition=True,
        ),
        Preset(
            "II",
            _rf([5j, 5], [2.5, -4j, -2]),
            "two poles merging at -i/2 at t=4/5, then one pole rising to the origin",
            {"T": 1.0, "points": [0.0], "c_omega": -1.0, "c_l": 1.0, "c_s": None, "merge_t": 0.8, "merge_z": -0.5j,
             "theorem": "one-scale", "n": 0},
            odd_symmetric=True, sign_condition=True,
        ),
        Preset(
            "III",
            _rf([4j, 4], [2, -2j, -1]),
            "omega_0 = -4x^3/(4+x^4); two poles collide at the origin",
            {"T": 1.0, "points": [0.0], "c_omega": -1.5, "c_l": 1.0, "c_s": 0.5,
             "theorem": "two-scale-basic", "n": 1, "a": 1.0, "b": 0.5, "c": 0.25,
             "rT": math.sqrt(2.0)},
            odd_symmetric=True, sign_condition=True,
        ),
        Preset(
            "IV",
            _rf([4j, 4], [5, -2j, -1]),
            "blowup at two points x = +-sqrt(3) simultaneously",
            {"T": 1.0, "points": [-math.sqrt(3.0), math.sqrt(3.0)]},
            odd_symmetric=True,
        ),
        Preset(
            "V",
            _rf([3, -9j, -8], [-8j, -24, 24j, 8]),
            "omega_0 = -x^5/(1+x^2)^3; a triple pole splits into three, two collide at 0",
            {"T": 16.0 / 3.0, "points": [0.0], "c_omega": -2.5, "c_l": 2.0, "c_s": 0.5,
             "theorem": "two-scale-general", "n": 2, "a": 3.0 / 16.0, "b": 1.0 / 16.0,
             "c": 0.25, "rT": 0.75},
            odd_symmetric=True, sign_condition=True,
        ),
        Preset(
            "VI",
            _rf([2j], [1j, 1]),
            "omega_0 = 2/(1+x^2); traveling wave, no blowup",
            {"T": None, "points": [], "speed": 1.0},
        ),
        Preset(
            "III-fig",
            _rf([2j, 2], [2, -2j, -1]),
            "omega_0 = -2x^3/(4+x^4); half of III, same exponents, T = 2",
            {"T": 2.0, "points": [0.0], "c_omega": -1.5, "c_l": 1.0, "c_s": 0.5,
             "theorem": "two-scale-basic", "n": 1, "a": 0.5, "b": 0.25, "c": 0.125,
             "rT": 1.0},
            odd_symmetric=True, sign_condition=True,
        ),
    ]
}


def get_preset(pid: str) -> Preset:
    try:
        return PRESETS[pid]
    except KeyError:
        raise KeyError(f"unknown preset {pid!r}; choose from {sorted(PRESETS)}") from None

"""Exact solutions, complex pole dynamics and blowup asymptotics for the
one-dimensional vortex-stretching model omega_t = omega H(omega).

Modules
-------
rational_core     complex polynomials, rational functions, boundary traces
hilbert           numerical Hilbert transform on the line
clm_exact         closed-form solution, blowup prediction, snapshots
spectral_evolver  pseudo-spectral RK4 integrator
asymptotics       blowup parameters, limiting profiles, scaling exponents
pole_dynamics     zeros of zeta = 1/eta: tracking, touch detection, local exponents
presets           built-in initial data
cli               command-line front end
"""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .rational_core import Polynomial, RationalFunction, BoundaryTrace, boundary_trace, roots
from .hilbert import HilbertResult, UniformHilbert, hilbert_numeric, tricomi_residual
from .clm_exact import (
    BlowupPrediction,
    InitialDatum,
    SolutionSnapshot,
    conserved_quantity,
    evaluate,
    hilbert_at_zero_integral,
    predict_blowup,
    snapshot,
)
from .spectral_evolver import EvolverConfig, EvolverRun, convergence_study, deviation_from_exact, evolve
from .asymptotics import (
    LocalParams,
    ProfileSpec,
    ScalingReport,
    TheoremParams,
    blowup_snapshots,
    extract_params,
    measure_scales,
    profile,
    profile_error,
    profile_error_table,
    r_of_t,
)
from .pole_dynamics import (
    LocalExponents,
    PoleTrajectory,
    ZetaState,
    critical_events,
    first_touch,
    integrate_trajectory,
    local_exponents,
    shape_relation_check,
    track_zeros,
    xy_ode_rhs,
    zeros_at_time,
)
from .presets import PRESETS, Preset, get_preset

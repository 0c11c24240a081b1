"""Pseudo-spectral RK4 integrator for omega_t = omega H(omega).

Serves as an independent check on the closed form before blowup, and as the
only route for sampled data with no rational extension.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .errors import GuardTripped
from .clm_exact import InitialDatum, SolutionSnapshot, evaluate
from .hilbert import UniformHilbert, _check_decay, hilbert_numeric


@dataclass(frozen=True)
class EvolverConfig:
    """Discretization and stopping parameters.

    Parameters
    ----------
    L : float
        Half-width of the computational window [-L, L].
    N : int
        Number of grid points, a power of two >= 256.
    dt : float
        Initial time step.
    t_end : float
        Final time.
    guard : float
        Stop once max|omega| exceeds this.
    snapshot_interval : float, optional
        Store a snapshot every this much time; only t=0 and t_end otherwise.
    auto_halve : bool
        Halve ``dt`` while ``max|omega| * dt > halve_threshold``.
    dealias : bool
        Apply a 2/3-rule spectral filter to omega after every step.
    hilbert_method : {"fft", "periodic"}
    decay_tol : float
        Edge-to-peak ratio allowed in the initial data.
    """

    L: float = 40.0
    N: int = 4096
    dt: float = 1e-3
    t_end: float = 0.5
    guard: float = 1e6
    snapshot_interval: float | None = None
    auto_halve: bool = True
    halve_threshold: float = 0.1
    dealias: bool = False
    hilbert_method: str = "fft"
    decay_tol: float = 0.25

    def __post_init__(self):
        if self.N < 256 or self.N & (self.N - 1):
            raise ValueError("N must be a power of two and at least 256")
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if not self.L > 0:
            raise ValueError("L must be positive")
        if self.t_end < 0:
            raise ValueError("t_end must be non-negative")

    def grid(self) -> np.ndarray:
        h = 2.0 * self.L / self.N
        return -self.L + (np.arange(self.N) + 0.5) * h


class StepEvent(NamedTuple):
    t: float
    dt: float
    reason: str


@dataclass(frozen=True)
class EvolverRun:
    snapshots: list[SolutionSnapshot]
    stopped_reason: str  # "reached_t_end" | "guard_tripped"
    step_log: list[StepEvent] = field(default_factory=list)
    config: EvolverConfig | None = None

    @property
    def final(self) -> SolutionSnapshot:
        return self.snapshots[-1]


def _sample(initial, xs) -> np.ndarray:
    if isinstance(initial, InitialDatum):
        return np.asarray(initial.trace.omega0(xs), dtype=float)
    if callable(initial):
        return np.asarray(initial(xs), dtype=float)
    arr = np.asarray(initial, dtype=float)
    if arr.shape != xs.shape:
        raise ValueError(f"initial samples have shape {arr.shape}, grid has {xs.shape}")
    return arr


def _two_thirds_filter(w: np.ndarray) -> np.ndarray:
    wk = np.fft.rfft(w)
    cut = int(len(w) // 3)
    wk[cut:] = 0.0
    return np.fft.irfft(wk, len(w))


def evolve(initial, cfg: EvolverConfig, *, strict: bool = False, label: str = "") -> EvolverRun:
    """Integrate from ``initial`` (datum, callable or samples on ``cfg.grid()``).

    Classical RK4; H(omega) is recomputed at every stage.  The run stops at
    ``t_end`` or when max|omega| exceeds ``cfg.guard``.

    Raises
    ------
    DomainTooSmall
        If the initial data do not decay toward +-L.
    GuardTripped
        Only with ``strict=True``; otherwise the run records the reason.
    """
    xs = cfg.grid()
    w = _sample(initial, xs)
    _check_decay(w, cfg.decay_tol)
    if cfg.hilbert_method == "fft":
        op = UniformHilbert(xs)
        H = lambda v: op(v).values
    else:
        H = lambda v: hilbert_numeric(xs, v, cfg.hilbert_method, decay_tol=np.inf).values
    if not label and isinstance(initial, InitialDatum):
        label = initial.label

    def rhs(v):
        return v * H(v)

    snaps = [SolutionSnapshot(0.0, xs, w, H(w), label)]
    log: list[StepEvent] = []
    t, dt = 0.0, cfg.dt
    next_snap = cfg.snapshot_interval if cfg.snapshot_interval else None
    reason = "reached_t_end"
    while t < cfg.t_end * (1 - 1e-14):
        wmax = float(np.max(np.abs(w)))
        if wmax > cfg.guard:
            reason = "guard_tripped"
            break
        while cfg.auto_halve and wmax * dt > cfg.halve_threshold:
            dt *= 0.5
            log.append(StepEvent(t, dt, "halved"))
        step = min(dt, cfg.t_end - t)
        if next_snap is not None:
            step = min(step, next_snap - t)
        k1 = rhs(w)
        k2 = rhs(w + 0.5 * step * k1)
        k3 = rhs(w + 0.5 * step * k2)
        k4 = rhs(w + step * k3)
        w = w + step / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
        if cfg.dealias:
            w = _two_thirds_filter(w)
        t = t + step
        if not np.all(np.isfinite(w)):
            reason = "guard_tripped"
            break
        if next_snap is not None and abs(t - next_snap) <= 1e-12 * max(1.0, t):
            t = next_snap
            if t < cfg.t_end * (1 - 1e-14):
                snaps.append(SolutionSnapshot(t, xs, w, H(w), label))
            next_snap += cfg.snapshot_interval
    if reason == "reached_t_end":
        t = cfg.t_end if abs(t - cfg.t_end) <= 1e-12 * max(1.0, cfg.t_end) else t
    if snaps[-1].t < t and np.all(np.isfinite(w)):
        snaps.append(SolutionSnapshot(t, xs, w, H(w), label))
    if reason == "guard_tripped" and strict:
        raise GuardTripped(f"max|omega| exceeded {cfg.guard:g} at t={t:.6g}")
    return EvolverRun(snaps, reason, log, cfg)


def deviation_from_exact(snap: SolutionSnapshot, datum: InitialDatum, window: float = 10.0) -> float:
    """Relative sup-norm deviation of omega from the closed form on |x| <= window."""
    mask = np.abs(snap.xs) <= window
    exact, _ = evaluate(datum, snap.xs[mask], snap.t)
    return float(np.max(np.abs(snap.omega[mask] - exact)) / np.max(np.abs(exact)))


class ConvergenceRow(NamedTuple):
    dt: float
    N: int
    error: float
    ratio: float  # previous error / this error; nan on the first row


def convergence_study(
    initial: InitialDatum,
    cfg: EvolverConfig,
    refinements: int = 3,
    kind: str = "dt",
    window: float = 10.0,
) -> list[ConvergenceRow]:
    """Errors against the closed form while halving ``dt`` or doubling ``N``.

    For ``kind="dt"`` step halving is switched off so that every run uses a
    fixed step; the error ratio per halving approaches 16 for RK4.
    """
    if kind not in ("dt", "N"):
        raise ValueError("kind must be 'dt' or 'N'")
    rows: list[ConvergenceRow] = []
    prev = np.nan
    for k in range(refinements + 1):
        if kind == "dt":
            c = replace(cfg, dt=cfg.dt / 2**k, auto_halve=False)
        else:
            c = replace(cfg, N=cfg.N * 2**k)
        if c.t_end == 0:
            err = 0.0
        else:
            run = evolve(initial, c, strict=True)
            err = deviation_from_exact(run.final, initial, window)
        ratio = prev / err if (k and err > 0) else np.nan
        rows.append(ConvergenceRow(c.dt, c.N, err, ratio))
        prev = err
    return rows

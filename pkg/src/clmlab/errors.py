"""Exception hierarchy shared by all modules."""


class CLMError(Exception):
    """Base class for every domain error raised by clmlab."""


class PoleHit(CLMError):
    """A rational function was evaluated at (or numerically on top of) a pole."""


class NoConvergence(CLMError):
    """Polynomial root finding failed to reach the residual tolerance."""


class NotUpperHolomorphic(CLMError):
    """A rational function has a pole with Im >= 0 or does not decay at infinity."""


class DomainTooSmall(CLMError):
    """Sampled data do not decay enough toward the ends of the grid."""


class InvalidDatum(CLMError):
    """Initial datum violates a flagged symmetry or sign condition."""


class AtSingularity(CLMError):
    """The explicit solution was requested at or beyond the blowup point."""


class EmptyS(CLMError):
    """No zero of omega_0 has positive Hilbert transform: no finite-time blowup."""


class QuadratureFail(CLMError):
    """Adaptive quadrature did not meet its error tolerance."""


class GuardTripped(CLMError):
    """The time integrator stopped because max|omega| exceeded the guard."""


class WrongDegeneracy(CLMError):
    """The datum's vanishing-derivative pattern at 0 does not match the requested n."""


class NoBracket(CLMError):
    """No sign change for the implicit bulk-location equation."""


class PeakOnBoundary(CLMError):
    """The maximum of |omega| sits on the edge of the snapshot grid."""


class InsufficientDecades(CLMError):
    """Too few snapshots, or T - t spans less than the required range."""


class DerivativeVanishes(CLMError):
    """zeta_0'(Z) vanished while following a pole: a merge or branch point."""


class NoTouch(CLMError):
    """No pole reached the real axis before t_max."""


class UnclassifiableTrajectory(CLMError):
    """Fitted local exponents match none of the known trajectory classes."""

"""Probability weighting and its inverse.

The weighting function

    tau(p) = p**g / (p**g + (1 - p)**g) ** (1 / g)

compresses stated probabilities toward certainty-insensitivity: small
probabilities are overweighted and large ones underweighted. For g = 1 it
is the identity. It stops being injective once g drops below roughly 0.28,
so inversion is guarded at MIN_INVERTIBLE_GAMMA.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConvergenceFailureError, DomainError, NonMonotoneGammaError

# Below ~0.279 the weighting curve is no longer strictly increasing on
# (0, 1); 0.3 keeps a safety margin above the exact threshold.
MIN_INVERTIBLE_GAMMA = 0.3

DEFAULT_TOLERANCE = 1e-10
DEFAULT_MAX_ITERATIONS = 100


@dataclass(frozen=True)
class WeightingParams:
    """Weighting exponent plus numeric knobs for the inverse."""

    gamma: float
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS

    def __post_init__(self):
        if not 0.0 < self.gamma <= 1.0:
            raise DomainError(f"gamma must lie in (0, 1], got {self.gamma}")
        if self.tolerance <= 0.0:
            raise DomainError("tolerance must be positive")
        if self.max_iterations < 1:
            raise DomainError("max_iterations must be at least 1")


def trust_of_probability(p: float, gamma: float) -> float:
    """Apply the weighting function; exact at the endpoints."""
    if not 0.0 <= p <= 1.0:
        raise DomainError(f"probability must lie in [0, 1], got {p}")
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if p == 0.0 or p == 1.0:
        return p
    num = p**gamma
    den = (num + (1.0 - p) ** gamma) ** (1.0 / gamma)
    return num / den


def _weight_derivative(p: float, gamma: float) -> float:
    # d tau / d p, for interior p. Writing s = p^g + (1-p)^g:
    #   tau  = p^g * s^(-1/g)
    #   tau' = g p^(g-1) s^(-1/g) - p^g s^(-1/g - 1) (p^(g-1) - (1-p)^(g-1))
    a = p ** (gamma - 1.0)
    b = (1.0 - p) ** (gamma - 1.0)
    s = a * p + b * (1.0 - p)
    s_pow = s ** (-1.0 / gamma)
    return gamma * a * s_pow - a * p * s_pow / s * (a - b)


def probability_of_trust(
    tau: float,
    gamma: float,
    tolerance: float = DEFAULT_TOLERANCE,
    max_iterations: int = DEFAULT_MAX_ITERATIONS,
) -> float:
    """Invert the weighting function on [0, 1].

    Newton-Raphson seeded at the target value, with a shrinking bisection
    bracket as a safeguard: any step that leaves the bracket, or makes no
    progress, falls back to the midpoint. Raises NonMonotoneGammaError when
    gamma is too small for the curve to be injective, and
    ConvergenceFailureError if the residual never reaches the tolerance.
    """
    if not 0.0 <= tau <= 1.0:
        raise DomainError(f"trust must lie in [0, 1], got {tau}")
    if not 0.0 < gamma <= 1.0:
        raise DomainError(f"gamma must lie in (0, 1], got {gamma}")
    if gamma < MIN_INVERTIBLE_GAMMA:
        raise NonMonotoneGammaError(
            f"gamma={gamma} is below {MIN_INVERTIBLE_GAMMA}; the weighting "
            "function is not reliably invertible there"
        )
    if tau == 0.0 or tau == 1.0:
        return tau

    lo, hi = 0.0, 1.0
    p = tau
    for _ in range(max_iterations):
        f = trust_of_probability(p, gamma) - tau
        if abs(f) <= tolerance:
            return p
        if f > 0.0:
            hi = p
        else:
            lo = p
        d = _weight_derivative(p, gamma)
        step_ok = False
        if d > 0.0 and math.isfinite(d):
            candidate = p - f / d
            if lo < candidate < hi:
                p = candidate
                step_ok = True
        if not step_ok:
            p = 0.5 * (lo + hi)
    if abs(trust_of_probability(p, gamma) - tau) <= tolerance:
        return p
    raise ConvergenceFailureError(
        f"inversion of tau={tau} at gamma={gamma} did not reach "
        f"tolerance {tolerance} in {max_iterations} iterations"
    )


def weight_probability(p: float, gamma: float | None) -> float:
    """Identity when gamma is None, otherwise the weighting function."""
    if gamma is None:
        if not 0.0 <= p <= 1.0:
            raise DomainError(f"probability must lie in [0, 1], got {p}")
        return p
    return trust_of_probability(p, gamma)

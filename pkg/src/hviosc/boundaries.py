"""Critical forcing boundaries and the peak transient energy map.

Escape from the linear regime is governed by the topmost level set of the
slow-flow conserved quantity. Two mechanisms decide whether a chosen energy
threshold is reached: the rising branch of the level set can stall at its
turning point before the threshold (maximum mechanism), or the level set can
slip past the corner separating the linear and wall-bounded regimes and climb
far beyond it (saddle mechanism). Each mechanism has its own critical forcing
curve over detuning; the curves intersect once and the lower one is active on
each side. This module evaluates both curves, the point where they coexist,
the energy level attained right after a boundary crossing, frequency-response
branches at fixed forcing, and the map from forcing parameters to the largest
transient energy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from hviosc.action_angle import a1, averaged_action
from hviosc.manifold import ScaledForcing, lpt_contour

__all__ = [
    "CriticalEnergy",
    "FrequencyResponsePoint",
    "MechanismNotApplicable",
    "TransitionBoundary",
    "boundary_maximum",
    "boundary_saddle",
    "coexistence_point",
    "energy_map",
    "frequency_response",
    "post_crossing_energy",
    "transition_boundary",
]

# energy of the corner point between the linear and wall-bounded regimes
_XI_CORNER = 0.5


class MechanismNotApplicable(ValueError):
    """The requested escape mechanism cannot operate at these parameters."""


@dataclass(frozen=True)
class CriticalEnergy:
    """A chosen transient energy threshold, strictly positive."""

    xi_tilde: float

    def __post_init__(self) -> None:
        if not self.xi_tilde > 0.0:
            raise ValueError("threshold energy must be positive")


@dataclass(frozen=True)
class TransitionBoundary:
    """Sampled critical-forcing curve with its mechanism labels.

    ``samples`` holds ``(sigma, f_crit, mechanism)`` triples ordered by
    detuning; ``coexistence`` is the ``(sigma, f)`` point where the maximum
    and saddle branches intersect.
    """

    xi_tilde: CriticalEnergy
    eps: float
    samples: tuple
    coexistence: tuple


@dataclass(frozen=True)
class FrequencyResponsePoint:
    """One response-curve sample: branch label plus jump marker."""

    sigma: float
    xi: float
    branch: str
    at_jump: bool


def _threshold(xi_tilde) -> float:
    xt = xi_tilde.xi_tilde if isinstance(xi_tilde, CriticalEnergy) else float(xi_tilde)
    if not xt > 0.0:
        raise ValueError("threshold energy must be positive")
    return xt


def _check_eps(eps) -> float:
    e = float(eps)
    if not e > 0.0:
        raise ValueError("scale separation parameter must be positive")
    return e


def _apex_forcing(xi, sigma, eps):
    """Forcing amplitude whose zero level set passes through (nu=0, xi)."""
    return (2.0 / (eps * a1(xi))) * (xi - (1.0 + eps * sigma) * averaged_action(xi))


def _apex_roots(sigma, eps, f, cap):
    """Ascending wall-regime energies where the level set crosses nu = 0.

    Scans (1/2, cap] on a grid that is fine near the corner, where roots
    cluster, then polishes each sign change. The corner itself is excluded:
    the defining expression can vanish there trivially.
    """
    if cap <= _XI_CORNER:
        raise ValueError("search cap must exceed the corner energy")
    parts = [np.array([_XI_CORNER + 1e-9])]
    fine_top = min(cap, 0.62)
    n_fine = int(round((fine_top - _XI_CORNER) / 1e-4))
    parts.append(_XI_CORNER + np.arange(1, n_fine + 1) * 1e-4)
    if cap > 0.62:
        n_coarse = int(math.ceil((cap - 0.62) / 1e-3))
        parts.append(0.62 + np.arange(1, n_coarse + 1) * 1e-3)
    xs = np.concatenate(parts)
    xs = xs[xs <= cap]
    if xs[-1] < cap:
        xs = np.append(xs, cap)

    vals = _apex_forcing(xs, sigma, eps) - f

    def residual(x):
        return _apex_forcing(float(x), sigma, eps) - f

    roots = []
    for i in range(len(xs) - 1):
        if vals[i] == 0.0:
            roots.append(float(xs[i]))
        elif vals[i] * vals[i + 1] < 0.0:
            roots.append(brentq(residual, xs[i], xs[i + 1], xtol=1e-14))
    if vals[-1] == 0.0:
        roots.append(float(xs[-1]))
    return roots


def boundary_maximum(sigma, xi_tilde, eps) -> float:
    """Critical forcing at which the rising branch just reaches the threshold.

    Below the corner energy the turning point sits in the linear regime and
    the critical amplitude is ``sqrt(2 xi_tilde) |sigma|``; above it the
    level set through ``(nu=0, xi_tilde)`` fixes the amplitude. Raises
    :class:`MechanismNotApplicable` when that amplitude would be negative,
    meaning the rising branch cannot reach the level at this detuning.
    """
    xt = _threshold(xi_tilde)
    e = _check_eps(eps)
    s = float(sigma)
    if xt <= _XI_CORNER:
        return math.sqrt(2.0 * xt) * abs(s)
    f = _apex_forcing(xt, s, e)
    if f < 0.0:
        raise MechanismNotApplicable(
            "rising branch cannot reach the threshold at this detuning")
    return f


def boundary_saddle(sigma, eps) -> float:
    """Critical forcing for passage through the corner point.

    Evaluates the general corner-passage expression and checks it against
    the exact simplification: the critical amplitude equals the detuning.
    Only positive detuning admits this mechanism.
    """
    e = _check_eps(eps)
    s = float(sigma)
    if s <= 0.0:
        raise MechanismNotApplicable("corner passage needs positive detuning")
    f = (2.0 / (e * a1(_XI_CORNER))) * (
        (1.0 + e * s) * averaged_action(_XI_CORNER) - _XI_CORNER)
    assert abs(f - s) < 1e-12 * max(1.0, abs(s)), "corner identity violated"
    return f


def coexistence_point(xi_tilde, eps):
    """Detuning and forcing where both escape mechanisms meet.

    Returns ``(sigma_star, f_star)`` with ``f_star`` on the corner-passage
    branch; the maximum branch is checked to pass through the same point.
    """
    xt = _threshold(xi_tilde)
    e = _check_eps(eps)
    if xt < _XI_CORNER:
        raise ValueError("coexistence needs a wall-regime threshold")
    amp = a1(xt)
    act = averaged_action(xt)
    sigma_star = ((amp + 2.0 * xt) / (amp + 2.0 * act) - 1.0) / e
    f_star = sigma_star
    assert abs(boundary_maximum(sigma_star, xt, e) - f_star) < 1e-6
    return sigma_star, f_star


def post_crossing_energy(sigma, eps, branch, xi_cap=50.0) -> float:
    """Energy level attained right after crossing the transition boundary.

    ``branch`` picks the boundary side: ``"saddle"`` (positive detuning,
    topmost level after corner passage) or ``"maximum"`` (negative detuning,
    first turning point above the corner). Raises ``ArithmeticError`` when
    no wall-regime level exists inside ``(1/2, xi_cap]``.
    """
    e = _check_eps(eps)
    s = float(sigma)
    if branch == "saddle":
        if s <= 0.0:
            raise MechanismNotApplicable("right branch needs positive detuning")
        roots = _apex_roots(s, e, s, xi_cap)
        if not roots:
            raise ArithmeticError("no post-crossing level inside the bracket")
        return roots[-1]
    if branch == "maximum":
        if s >= 0.0:
            raise MechanismNotApplicable("left branch needs negative detuning")
        roots = _apex_roots(s, e, -s, xi_cap)
        if not roots:
            raise ArithmeticError("no post-crossing level inside the bracket")
        return roots[0]
    raise ValueError("branch must be 'maximum' or 'saddle'")


def frequency_response(f, eps, sigma_range=(-3.0, 3.0), n_samples=121):
    """Response branches over a detuning range at fixed forcing amplitude.

    Each detuning carries one linear-regime point (capped at the corner
    energy) plus every wall-regime level whose rising branch passes through
    it. The smallest wall-regime root per detuning is the first turning
    point (branch ``hvi_max``); higher roots, reached only after corner
    passage or lying on the fold-back segment, are labelled ``hvi_saddle``.
    The detunings where the energy jumps, at forcing equal to the detuning
    magnitude, are inserted into the sample set and flagged ``at_jump``.
    """
    ff = float(f)
    e = _check_eps(eps)
    if ff <= 0.0:
        raise ValueError("forcing amplitude must be positive")
    lo, hi = float(sigma_range[0]), float(sigma_range[1])
    n = int(n_samples)
    if hi < lo or n < 1:
        raise ValueError("empty detuning range")
    sigmas = list(np.linspace(lo, hi, n))
    for jump in (-ff, ff):
        if lo <= jump <= hi and all(abs(jump - x) > 1e-12 for x in sigmas):
            sigmas.append(jump)
    points = []
    for s in sorted(sigmas):
        s = float(s)
        at_jump = abs(abs(s) - ff) <= 1e-12
        xi_lin = 0.5 if s == 0.0 else min(ff * ff / (2.0 * s * s), 0.5)
        points.append(FrequencyResponsePoint(s, xi_lin, "linear", at_jump))
        for j, r in enumerate(_apex_roots(s, e, ff, 50.0)):
            branch = "hvi_max" if j == 0 else "hvi_saddle"
            points.append(FrequencyResponsePoint(s, r, branch, at_jump))
    return points


def energy_map(sigma, f, eps, validate=False) -> float:
    """Largest transient energy reached at the given forcing parameters.

    Below the critical amplitude the response stays linear with the
    resonance-peak value; at or above it the attained level is a wall-regime
    crossing of the level set: the first turning point for negative
    detuning, the topmost level (past the corner) otherwise. The two sides
    meet the corner energy continuously from below and jump across the
    boundary. With ``validate=True`` the analytic value is compared against
    a direct level-set trace and a disagreement beyond 5e-2 raises
    ``ArithmeticError``.
    """
    e = _check_eps(eps)
    s = float(sigma)
    ff = float(f)
    if ff < 0.0:
        raise ValueError("forcing amplitude must be nonnegative")
    if ff == 0.0:
        return 0.0
    if ff < abs(s):
        val = ff * ff / (2.0 * s * s)
    else:
        roots = _apex_roots(s, e, ff, 50.0)
        if not roots:
            raise ArithmeticError("no wall-regime level inside the bracket")
        val = roots[-1] if s >= 0.0 else roots[0]
    if validate:
        probe = lpt_contour(ScaledForcing(f=ff, sigma=s, eps=e),
                            nu_samples=192, xi_max=val + 1.0)
        if abs(probe.max_xi - val) > 5e-2:
            raise ArithmeticError("analytic level and level-set trace disagree")
    return val


def transition_boundary(xi_tilde, eps, sigma_range=(-3.0, 3.0), n_samples=121):
    """Sample the active critical-forcing curve over a detuning range.

    The maximum mechanism is active up to the coexistence detuning and the
    corner-passage mechanism beyond it; the coexistence point itself is
    inserted into the samples.
    """
    xt = _threshold(xi_tilde)
    e = _check_eps(eps)
    if xt < _XI_CORNER:
        raise ValueError("mechanism labels need a wall-regime threshold")
    sigma_star, f_star = coexistence_point(xt, e)
    lo, hi = float(sigma_range[0]), float(sigma_range[1])
    n = int(n_samples)
    if hi < lo or n < 1:
        raise ValueError("empty detuning range")
    sigmas = list(np.linspace(lo, hi, n))
    if lo <= sigma_star <= hi and all(abs(x - sigma_star) > 1e-12 for x in sigmas):
        sigmas.append(sigma_star)
    samples = []
    for s in sorted(sigmas):
        s = float(s)
        if s <= sigma_star:
            samples.append((s, boundary_maximum(s, xt, e), "maximum"))
        else:
            samples.append((s, boundary_saddle(s, e), "saddle"))
    wrapped = xi_tilde if isinstance(xi_tilde, CriticalEnergy) else CriticalEnergy(xt)
    return TransitionBoundary(wrapped, e, tuple(samples), (sigma_star, f_star))

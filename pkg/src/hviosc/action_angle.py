"""Closed-form action-angle description of the wall-bounded oscillator.

The unforced system is a unit-frequency oscillator confined between rigid
elastic walls at |q| = 1. Below the averaged energy 1/2 the walls are never
reached and the motion is plain harmonic; at and above 1/2 every half period
ends in an elastic reflection, which stiffens the response. This module
provides the averaged action, response frequency, the first harmonic
coefficient of the angle-parametrized motion and their derivatives, plus the
generalized basis functions used for isolated validation of the non-smooth
regime. All functions accept scalars or numpy arrays.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

__all__ = [
    "WALL",
    "AAQuantities",
    "BasisSample",
    "BnComparison",
    "phi",
    "averaged_action",
    "frequency",
    "a1",
    "d_averaged_action",
    "d_a1",
    "q_of_theta",
    "potential",
    "aa_quantities",
    "beta_of_energy",
    "basis_g",
    "fourier_bn",
    "fourier_bn_compare",
]

WALL = math.inf

THRESHOLD = 0.5  # averaged energy at which wall contact begins

# |omega - 1| window where sin(pi/omega)/(omega^2 - 1) is evaluated by its
# series about omega = 1; the closed form loses ~8 digits to cancellation
# there. Written for s2 = (2/pi) omega^2 sin(pi/omega)/(omega^2 - 1):
# s2(1 + u) = 1 + u/2 + (-1/4 - pi^2/6) u^2 + O(u^3).
_SERIES_WINDOW = 1e-4
_S2_C2 = -(0.25 + math.pi ** 2 / 6.0)


def _as_grid(xi):
    arr = np.asarray(xi, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError("averaged energy must be nonnegative")
    return np.atleast_1d(arr).astype(float), arr.ndim == 0


def _unwrap(values, scalar):
    return float(values[0]) if scalar else values


def _check_scalar(xi):
    x = float(xi)
    if x < 0.0:
        raise ValueError("averaged energy must be nonnegative")
    return x


# scalar fast paths: the manifold and boundary solvers evaluate these inside
# bracketing loops where numpy dispatch overhead dominates

def _phi_s(x):
    return math.sqrt(max(2.0 * x, 1.0) - 1.0)


def _J_s(x):
    if x <= THRESHOLD:
        return x
    ph = math.sqrt(2.0 * x - 1.0)
    return (ph + 2.0 * x * math.atan(1.0 / ph)) / math.pi


def _om_s(x):
    if x <= THRESHOLD:
        return 1.0
    return (0.5 * math.pi) / math.atan(1.0 / math.sqrt(2.0 * x - 1.0))


def _s2_s(om):
    u = om - 1.0
    if abs(u) < _SERIES_WINDOW:
        return 1.0 + 0.5 * u + _S2_C2 * u * u
    return 2.0 * om * om * math.sin(math.pi / om) / (math.pi * (om * om - 1.0))


def _ds2_s(om):
    u = om - 1.0
    if abs(u) < _SERIES_WINDOW:
        return 0.5 + 2.0 * _S2_C2 * u
    n = om * om * math.sin(math.pi / om)
    dn = 2.0 * om * math.sin(math.pi / om) - math.pi * math.cos(math.pi / om)
    d = om * om - 1.0
    return (2.0 / math.pi) * (dn * d - 2.0 * om * n) / (d * d)


def _a1_s(x):
    amp = math.sqrt(2.0 * x)
    if x <= THRESHOLD:
        return amp
    return amp * _s2_s(_om_s(x))


def _da1_s(x):
    if x < THRESHOLD:
        return 1.0 / math.sqrt(2.0 * x) if x > 0.0 else math.inf
    ph = math.sqrt(2.0 * x - 1.0)
    om = (0.5 * math.pi) / math.atan(1.0 / ph)
    amp = math.sqrt(2.0 * x)
    dom = om * om / (math.pi * x * ph)
    return _s2_s(om) / amp + amp * _ds2_s(om) * dom


def phi(xi):
    """Impact speed sqrt(2*max(xi, 1/2) - 1); zero through the linear regime."""
    if isinstance(xi, (int, float)):
        return _phi_s(_check_scalar(xi))
    x, scalar = _as_grid(xi)
    return _unwrap(np.sqrt(np.maximum(2.0 * x, 1.0) - 1.0), scalar)


def averaged_action(xi):
    """Averaged action; equals xi below the impact threshold."""
    if isinstance(xi, (int, float)):
        return _J_s(_check_scalar(xi))
    x, scalar = _as_grid(xi)
    out = x.copy()
    m = x > THRESHOLD
    if m.any():
        ph = np.sqrt(2.0 * x[m] - 1.0)
        out[m] = (ph + 2.0 * x[m] * np.arctan(1.0 / ph)) / math.pi
    return _unwrap(out, scalar)


def frequency(xi):
    """Response frequency; exactly 1 below the impact threshold."""
    if isinstance(xi, (int, float)):
        return _om_s(_check_scalar(xi))
    x, scalar = _as_grid(xi)
    out = np.ones_like(x)
    m = x > THRESHOLD
    if m.any():
        ph = np.sqrt(2.0 * x[m] - 1.0)
        out[m] = (0.5 * math.pi) / np.arctan(1.0 / ph)
    return _unwrap(out, scalar)


def _s2(om):
    """(2/pi) om^2 sin(pi/om)/(om^2-1) with the removable singularity patched."""
    u = om - 1.0
    series = 1.0 + 0.5 * u + _S2_C2 * u * u
    with np.errstate(divide="ignore", invalid="ignore"):
        closed = 2.0 * om * om * np.sin(np.pi / om) / (math.pi * (om * om - 1.0))
    return np.where(np.abs(u) < _SERIES_WINDOW, series, closed)


def _ds2(om):
    """Derivative of _s2 with the same series patch near om = 1."""
    u = om - 1.0
    series = 0.5 + 2.0 * _S2_C2 * u
    with np.errstate(divide="ignore", invalid="ignore"):
        n = om * om * np.sin(np.pi / om)
        dn = 2.0 * om * np.sin(np.pi / om) - math.pi * np.cos(np.pi / om)
        d = om * om - 1.0
        closed = (2.0 / math.pi) * (dn * d - 2.0 * om * n) / (d * d)
    return np.where(np.abs(u) < _SERIES_WINDOW, series, closed)


def a1(xi):
    """First harmonic coefficient of the angle-parametrized motion."""
    if isinstance(xi, (int, float)):
        return _a1_s(_check_scalar(xi))
    x, scalar = _as_grid(xi)
    out = np.sqrt(2.0 * x)
    m = x > THRESHOLD
    if m.any():
        ph = np.sqrt(2.0 * x[m] - 1.0)
        om = (0.5 * math.pi) / np.arctan(1.0 / ph)
        out[m] = np.sqrt(2.0 * x[m]) * _s2(om)
    return _unwrap(out, scalar)


def d_averaged_action(xi):
    """dJ/dxi, the reciprocal of the response frequency."""
    if isinstance(xi, (int, float)):
        return 1.0 / _om_s(_check_scalar(xi))
    x, scalar = _as_grid(xi)
    return _unwrap(1.0 / np.atleast_1d(frequency(x)), scalar)


def d_a1(xi, side=None):
    """da1/dxi. One-sided at the kink xi = 1/2: pass side='left' or 'right'."""
    if isinstance(xi, (int, float)):
        x = _check_scalar(xi)
        if x == THRESHOLD:
            if side == "left":
                return 1.0
            if side == "right":
                return math.inf
            raise ValueError(
                "da1/dxi is one-sided at xi = 1/2; pass side='left' or 'right'")
        return _da1_s(x)
    x, scalar = _as_grid(xi)
    at_kink = x == THRESHOLD
    if at_kink.any():
        if side == "left":
            pass  # fall through to the linear-branch slope
        elif side == "right":
            out = np.empty_like(x)
            out[at_kink] = math.inf
            rest = ~at_kink
            if rest.any():
                out[rest] = np.atleast_1d(d_a1(x[rest]))
            return _unwrap(out, scalar)
        else:
            raise ValueError(
                "da1/dxi is one-sided at xi = 1/2; pass side='left' or 'right'")
    with np.errstate(divide="ignore"):
        out = 1.0 / np.sqrt(2.0 * x)
    m = x > THRESHOLD
    if m.any():
        xm = x[m]
        ph = np.sqrt(2.0 * xm - 1.0)
        om = (0.5 * math.pi) / np.arctan(1.0 / ph)
        amp = np.sqrt(2.0 * xm)
        dom = om * om / (math.pi * xm * ph)
        out[m] = _s2(om) / amp + amp * _ds2(om) * dom
    return _unwrap(out, scalar)


def q_of_theta(xi, theta):
    """Displacement as a function of the angle variable, sqrt(2 xi) sin(theta/omega)."""
    x, xscalar = _as_grid(xi)
    th = np.asarray(theta, dtype=float)
    out = np.sqrt(2.0 * x) * np.sin(th / np.atleast_1d(frequency(x)))
    if xscalar and th.ndim == 0:
        return float(out[0] if out.ndim else out)
    return out if out.ndim else float(out)


def potential(q, energy=None):
    """Truncated quadratic well: q^2/2 between the walls, infinite outside.

    Passing the energy selects the bounded branch explicitly; motion with
    E <= 1/2 never reaches the walls so the quadratic branch always applies.
    """
    if energy is not None and 0.0 < energy <= THRESHOLD:
        return 0.5 * q * q
    if abs(q) <= 1.0:
        return 0.5 * q * q
    return WALL


@dataclass(frozen=True)
class AAQuantities:
    """Action-angle bundle evaluated at one averaged-energy level."""

    xi: float
    phi: float
    J: float
    omega: float
    a1: float
    dJ_dxi: float
    da1_dxi: float


def aa_quantities(xi, kink_side=None):
    """Evaluate the full action-angle bundle at one energy level."""
    return AAQuantities(
        xi=float(xi),
        phi=phi(xi),
        J=averaged_action(xi),
        omega=frequency(xi),
        a1=a1(xi),
        dJ_dxi=d_averaged_action(xi),
        da1_dxi=d_a1(xi, side=kink_side),
    )


# ----------------------------------------------------------------------
# generalized basis functions
#
# Kept isolated from the action-angle bundle: their energy parametrization
# E(beta) = (beta/sin beta)^2 / 2 spans [1/2, pi^2/8] and is not the
# averaged energy used above.
# ----------------------------------------------------------------------

_BETA_E_MIN = 0.5
_BETA_E_MAX = 0.5 * (0.5 * math.pi) ** 2  # pi^2 / 8


def _beta_map(b):
    if b == 0.0:
        return _BETA_E_MIN
    r = b / math.sin(b)
    return 0.5 * r * r


def beta_of_energy(E):
    """Invert E = (beta/sin beta)^2 / 2 on beta in [0, pi/2]."""
    e = float(E)
    if not (_BETA_E_MIN - 1e-12 <= e <= _BETA_E_MAX + 1e-12):
        raise ValueError(f"no beta solves the energy relation for E = {e!r}")
    if e <= _BETA_E_MIN:
        return 0.0
    if e >= _BETA_E_MAX:
        return 0.5 * math.pi
    lo, hi = 0.0, 0.5 * math.pi
    while hi - lo > 1e-14:
        mid = 0.5 * (lo + hi)
        if _beta_map(mid) < e:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BasisSample:
    """Generalized basis functions evaluated at one normalized time."""

    tau: float
    tau_bar: float
    e_bar: float
    g: float
    g_prime: float
    g_prime_printed: float
    beta: float


def basis_g(tau, beta):
    """Evaluate the generalized basis pair at (tau, beta).

    g_prime is the exact derivative of the implemented g and carries the
    2/pi slope of tau_bar; g_prime_printed drops that factor and is kept
    only for comparison against the transcribed expression.
    """
    t = float(tau)
    b = float(beta)
    tau_bar = (2.0 / math.pi) * math.asin(math.sin(t))
    c = math.cos(t)
    e_bar = 0.0 if c == 0.0 else math.copysign(1.0, c)
    if b == 0.0:
        g = tau_bar
        slope = e_bar
    else:
        sb = math.sin(b)
        g = math.sin(b * tau_bar) / sb
        slope = b * math.cos(b * tau_bar) / sb * e_bar
    return BasisSample(
        tau=t,
        tau_bar=tau_bar,
        e_bar=e_bar,
        g=g,
        g_prime=(2.0 / math.pi) * slope,
        g_prime_printed=slope,
        beta=b,
    )


def fourier_bn(n, beta):
    """Quadrature Fourier sine coefficient of g, normalized to g = sum bn sin(n tau).

    Even orders vanish by half-wave antisymmetry. Odd orders reduce to
    (4/pi) * integral over [0, pi/2] where tau_bar is simply 2 tau / pi.
    """
    n = int(n)
    if n < 1:
        raise ValueError("harmonic order must be >= 1")
    if n % 2 == 0:
        return 0.0
    b = float(beta)
    if b == 0.0:
        def g_fn(t):
            return (2.0 / math.pi) * t
    else:
        sb = math.sin(b)

        def g_fn(t):
            return math.sin(b * (2.0 / math.pi) * t) / sb

    val, err = quad(lambda t: g_fn(t) * math.sin(n * t), 0.0, 0.5 * math.pi,
                    epsabs=1e-13, epsrel=1e-13, limit=200)
    return 4.0 * val / math.pi


@dataclass(frozen=True)
class BnComparison:
    """Quadrature coefficient next to the transcribed closed form."""

    n: int
    beta: float
    quadrature: float
    closed_form: float
    discrepancy: float


def fourier_bn_printed(n, beta):
    """Transcribed closed form for bn; untrusted (diverges as beta -> 0)."""
    n = int(n)
    b = float(beta)
    s = math.sin(0.5 * math.pi * n)
    if s == 0.0:
        return 0.0
    return 4.0 * b / (math.pi * (b * b * n * n - 1.0)) * (1.0 / math.tan(0.5 * math.pi / b)) * s


def fourier_bn_compare(n, beta):
    """Report the quadrature value, the transcribed closed form and their gap."""
    q = fourier_bn(n, beta)
    c = fourier_bn_printed(n, beta)
    return BnComparison(n=int(n), beta=float(beta), quadrature=q,
                        closed_form=c, discrepancy=c - q)

"""Slow-flow conservation law on the phase cylinder and its critical structure.

Near the 1:1 resonance the averaged dynamics conserves

    C(nu, xi) = xi - (eps f / 2) a1(xi) cos(nu) - (1 + eps sigma) J(xi),

so orbits of the slow flow are level sets of C. The trajectory grown from
rest ("limiting phase trajectory", LPT) is the connected component of
C = 0 attached to the bottom circle xi = 0; its height decides whether the
wall regime is reached. Stationary points of C organise the portrait and
can sit only on the lines nu = 0 and nu = pi.
"""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from hviosc.action_angle import (
    _a1_s,
    _da1_s,
    _J_s,
    _om_s,
    a1,
    averaged_action,
    d_a1,
    frequency,
)

__all__ = [
    "LPTContour",
    "PhasePoint",
    "ScaledForcing",
    "StationaryPoint",
    "classify_stationary",
    "lpt_contour",
    "manifold_value",
    "sigma_of_stationary",
    "stationary_points",
]

TWO_PI = 2.0 * math.pi
XI_SADDLE = 0.5   # degenerate saddle energy, pinned by the wall contact
_XI_STEP = 1e-3   # bracket grid resolution in xi


@dataclass(frozen=True)
class ScaledForcing:
    """Forcing in slow-flow scaling: F = eps*f, Omega = 1 + eps*sigma."""

    f: float
    sigma: float
    eps: float = 0.1

    def __post_init__(self):
        if self.eps <= 0.0:
            raise ValueError("eps must be positive")
        if self.f < 0.0:
            raise ValueError("scaled amplitude f must be nonnegative")

    @property
    def F(self):
        return self.eps * self.f

    @property
    def Omega(self):
        return 1.0 + self.eps * self.sigma


@dataclass(frozen=True)
class PhasePoint:
    """Point on the phase cylinder; nu wraps modulo 2*pi."""

    nu: float
    xi: float

    def __post_init__(self):
        object.__setattr__(self, "nu", float(self.nu) % TWO_PI)
        object.__setattr__(self, "xi", float(self.xi))
        if self.xi < 0.0:
            raise ValueError("xi must be nonnegative")


@dataclass(frozen=True)
class StationaryPoint:
    nu0: float
    xi0: float
    kind: str


@dataclass(frozen=True)
class LPTContour:
    points: tuple
    max_xi: float
    passes_saddle: bool


def _cos_snapped(nu):
    # keep the exactly-vertical columns (cos nu = 0) exact so the sigma = 0
    # degeneracy, where C vanishes identically along them, is representable
    c = math.cos(nu)
    return 0.0 if abs(c) < 1e-15 else c


def _c_at(cn, xi, forcing):
    return (xi - 0.5 * forcing.eps * forcing.f * cn * _a1_s(xi)
            - forcing.Omega * _J_s(xi))


def manifold_value(p, forcing):
    """Conservation-law value C(nu, xi); zero on every slow-flow LPT sample."""
    return _c_at(math.cos(p.nu), p.xi, forcing)


# ----------------------------------------------------------------------
# limiting phase trajectory
# ----------------------------------------------------------------------

def _column_roots(cvals, xi_nodes, cn, forcing):
    """All zeros of C along one nu column, refined to 1e-12 in xi.

    Returns (roots, zero_values) where zero_values marks grid nodes on which
    C vanishes exactly (degenerate vertical segments).
    """
    sign = np.sign(cvals)
    zero_idx = np.flatnonzero(sign == 0.0)
    roots = [float(xi_nodes[i]) for i in zero_idx]
    zero_vals = set(roots)
    nz = np.flatnonzero(sign != 0.0)
    if nz.size >= 2:
        flips = np.flatnonzero(sign[nz[:-1]] * sign[nz[1:]] < 0.0)
        for j in flips:
            lo_i, hi_i = int(nz[j]), int(nz[j + 1])
            if hi_i != lo_i + 1:
                continue  # an exact-zero node sits between; already recorded
            r = brentq(lambda x: _c_at(cn, x, forcing),
                       float(xi_nodes[lo_i]), float(xi_nodes[hi_i]), xtol=1e-12)
            roots.append(float(r))
    return sorted(roots), zero_vals


def _clean_crossing(c_left, c_right, xi_nodes, r1, r2):
    """True when the zero level can sweep monotonically from r1 to r2.

    Every grid row strictly between the two roots must separate the columns
    with opposite signs; a shared sign means another branch intervenes.
    """
    lo, hi = (r1, r2) if r1 <= r2 else (r2, r1)
    j0 = int(np.searchsorted(xi_nodes, lo, side="right"))
    j1 = int(np.searchsorted(xi_nodes, hi, side="left"))
    if j1 <= j0:
        return True
    seg = c_left[j0:j1] * c_right[j0:j1]
    return not np.any(seg > 0.0)


def lpt_contour(forcing, nu_samples=256, xi_max=4.0):
    """Trace the zero level set of C grown from the rest state.

    Per-column bracketed root solving on a (nu, xi) grid, then a
    connectivity pass keeps only the component attached to the bottom
    circle. Raises ValueError when that component reaches the top of the
    energy window.
    """
    if nu_samples < 16:
        raise ValueError("nu_samples must be at least 16")
    if xi_max <= 0.0:
        raise ValueError("xi_max must be positive")

    base = np.linspace(0.0, TWO_PI, nu_samples, endpoint=False)
    if forcing.f == 0.0:
        pts = tuple(PhasePoint(float(nu), 0.0) for nu in base)
        return LPTContour(points=pts, max_xi=0.0, passes_saddle=False)

    # the component touches the bottom circle where cos(nu) = 0; add columns
    # there (and just beside, scaled so the near-bottom root stays under the
    # seeding threshold) plus the symmetry lines
    deltas = [1e-3]
    if forcing.sigma != 0.0:
        deltas.append(min(1e-3, 0.02 * abs(forcing.sigma) / forcing.f))
    specials = [math.pi, 0.5 * math.pi, 1.5 * math.pi]
    for anchor in (0.5 * math.pi, 1.5 * math.pi):
        for d in deltas:
            specials.extend((anchor - d, anchor + d))
    nus = np.unique(np.concatenate([base, np.asarray(specials)]))

    n_nodes = int(round(xi_max / _XI_STEP))
    xi_nodes = np.concatenate(([1e-12], np.arange(1, n_nodes + 1) * _XI_STEP))
    a1_vals = a1(xi_nodes)
    j_vals = averaged_action(xi_nodes)

    cols = []
    for nu in nus:
        cn = _cos_snapped(float(nu))
        cvals = xi_nodes - (0.5 * forcing.eps * forcing.f * cn) * a1_vals \
            - forcing.Omega * j_vals
        roots, zero_vals = _column_roots(cvals, xi_nodes, cn, forcing)
        cols.append((float(nu), cvals, roots, zero_vals))

    ncols = len(cols)
    adj = {}

    def _add_edge(a, b):
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)

    right_linked = set()
    left_linked = set()
    for k in range(ncols):
        _, cvals, roots, _ = cols[k]
        k2 = (k + 1) % ncols
        _, cvals2, roots2, _ = cols[k2]
        for i, r in enumerate(roots):
            for i2, r2 in enumerate(roots2):
                if _clean_crossing(cvals, cvals2, xi_nodes, r, r2):
                    _add_edge((k, i), (k2, i2))
                    right_linked.add((k, i))
                    left_linked.add((k2, i2))
    for k in range(ncols):
        _, cvals, roots, zero_vals = cols[k]
        for i in range(len(roots) - 1):
            lo, hi = roots[i], roots[i + 1]
            # vertical degenerate segments: chain exact-zero neighbours
            if lo in zero_vals and hi in zero_vals and hi - lo <= 1.5 * _XI_STEP:
                _add_edge((k, i), (k, i + 1))
                continue
            # fold partners: two adjacent roots that both dead-end on the
            # same side belong to a branch turning back between the columns
            a, b = (k, i), (k, i + 1)
            if (a not in right_linked and b not in right_linked) or \
                    (a not in left_linked and b not in left_linked):
                _add_edge(a, b)

    seeds = [(k, i) for k, (_, _, roots, _) in enumerate(cols)
             for i, r in enumerate(roots) if r < 2.0 * _XI_STEP]
    seen = set(seeds)
    queue = deque(seeds)
    while queue:
        node = queue.popleft()
        for nxt in adj.get(node, ()):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)

    if not seen:
        pts = tuple(PhasePoint(float(nu), 0.0) for nu in base)
        return LPTContour(points=pts, max_xi=0.0, passes_saddle=False)

    samples = sorted((cols[k][0], cols[k][2][i]) for k, i in seen)
    max_xi = max(x for _, x in samples)
    if max_xi >= xi_max - max(2.0 * _XI_STEP, 0.02):
        raise ValueError("the limiting trajectory reaches the top of the "
                         "energy window; enlarge xi_max")
    passes = any(x >= XI_SADDLE - 1e-3 and math.cos(nu) <= 1e-12
                 for nu, x in samples)
    pts = tuple(PhasePoint(nu, x) for nu, x in samples)
    return LPTContour(points=pts, max_xi=max_xi, passes_saddle=passes)


# ----------------------------------------------------------------------
# stationary points
# ----------------------------------------------------------------------

def _c_xi(nu0, x, forcing):
    cn = math.cos(nu0)
    return 1.0 - 0.5 * forcing.eps * forcing.f * cn * _da1_s(x) \
        - forcing.Omega / _om_s(x)


def _scan_roots(xs, gvals, scalar_g):
    """Bracketed sign-change roots plus isolated exact zeros of a 1-d scan.

    Runs of consecutive exact zeros mark a degenerate continuum, not
    isolated stationary points, and are skipped.
    """
    sign = np.sign(gvals)
    roots = []
    zero_idx = np.flatnonzero(sign == 0.0)
    for i in zero_idx:
        prev_zero = i - 1 in zero_idx
        next_zero = i + 1 in zero_idx
        if not prev_zero and not next_zero:
            roots.append(float(xs[i]))
    nz = np.flatnonzero(sign != 0.0)
    if nz.size >= 2:
        flips = np.flatnonzero(sign[nz[:-1]] * sign[nz[1:]] < 0.0)
        for j in flips:
            lo_i, hi_i = int(nz[j]), int(nz[j + 1])
            if hi_i != lo_i + 1:
                continue
            roots.append(float(brentq(scalar_g, float(xs[lo_i]),
                                      float(xs[hi_i]), xtol=1e-12)))
    return roots


def _stationary_roots(nu0, forcing, xi_window):
    cn = math.cos(nu0)
    half = 0.5 * forcing.eps * forcing.f * cn
    roots = []
    if forcing.f > 0.0:
        xs = np.concatenate(([1e-9], np.arange(1, 500) * _XI_STEP,
                             [XI_SADDLE - 1e-9]))
        gvals = 1.0 - half / np.sqrt(2.0 * xs) - forcing.Omega
        roots += _scan_roots(
            xs, gvals,
            lambda x: 1.0 - half / math.sqrt(2.0 * x) - forcing.Omega)
    n = int(math.ceil((xi_window - XI_SADDLE) / _XI_STEP))
    xs = np.concatenate(([XI_SADDLE + 1e-9],
                         XI_SADDLE + np.arange(1, n) * _XI_STEP,
                         [xi_window]))
    gvals = 1.0 - half * d_a1(xs) - forcing.Omega / frequency(xs)
    roots += _scan_roots(xs, gvals, lambda x: _c_xi(nu0, x, forcing))
    return roots


def _c_xixi(nu0, xi0, forcing):
    if xi0 > XI_SADDLE:
        h = min(1e-6, 0.25 * (xi0 - XI_SADDLE))
    else:
        h = min(1e-6, 0.25 * min(xi0, XI_SADDLE - xi0))
    return (_c_xi(nu0, xi0 + h, forcing) - _c_xi(nu0, xi0 - h, forcing)) / (2.0 * h)


def _classify(nu0, xi0, forcing):
    if abs(xi0 - XI_SADDLE) < 1e-9:
        # wall-contact point: the xi curvature is one-sided there and the
        # portrait shows the separatrix structure of a (degenerate) saddle
        return "saddle"
    c_nunu = 0.5 * forcing.eps * forcing.f * _a1_s(xi0) * math.cos(nu0)
    c_xixi = _c_xixi(nu0, xi0, forcing)
    if c_nunu == 0.0:
        # unforced: C has no nu dependence and the fixed points form a ring
        return "minimum" if c_xixi > 0.0 else "maximum"
    if abs(c_xixi) < 1e-8:
        warnings.warn("nearly degenerate stationary point: |d2C/dxi2| < 1e-8",
                      RuntimeWarning, stacklevel=2)
    if c_nunu > 0.0 and c_xixi > 0.0:
        return "minimum"
    if c_nunu < 0.0 and c_xixi < 0.0:
        return "maximum"
    return "saddle"


def classify_stationary(p, forcing):
    """Classify a stationary point by the two pure second partials of C."""
    return _classify(p.nu0, p.xi0, forcing)


def stationary_points(forcing, xi_window=4.0):
    """All stationary points of C with xi in (0, xi_window), classified.

    The wall-contact saddle at (pi, 1/2) exists for every forcing and is
    always included.
    """
    if xi_window <= XI_SADDLE:
        raise ValueError("xi_window must exceed 1/2")
    pts = []
    for nu0 in (0.0, math.pi):
        for xi0 in _stationary_roots(nu0, forcing, xi_window):
            if abs(xi0 - XI_SADDLE) < 1e-9:
                continue
            pts.append(StationaryPoint(nu0, xi0, _classify(nu0, xi0, forcing)))
    pts.append(StationaryPoint(math.pi, XI_SADDLE, "saddle"))
    pts.sort(key=lambda p: (p.nu0, p.xi0))
    return pts


# ----------------------------------------------------------------------
# stationary locus over the detuning
# ----------------------------------------------------------------------

def sigma_of_stationary(xi0, eps):
    """Detuning at which a stationary point sits on the LPT at energy xi0.

    Obtained by eliminating f between C = 0 and dC/dxi = 0 on the lines
    nu in {0, pi}.
    """
    x = float(xi0)
    if x <= XI_SADDLE:
        raise ValueError("xi0 must exceed 1/2 so that both derivatives exist")
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    amp = _a1_s(x)
    damp = _da1_s(x)
    act = _J_s(x)
    dact = 1.0 / _om_s(x)
    den = amp * dact - damp * act
    if abs(den) < 1e-9:
        raise ArithmeticError("vertical asymptote of the stationary locus")
    return ((amp - damp * x) / den - 1.0) / eps

"""Transition-boundary, response-curve, and energy-map tests.

The wall-regime closed forms (a1, averaged_action) are verified against
quadrature in test_action_angle; here they serve as trusted primitives.
Independent oracles: the level-set value from the manifold module, the
root of 2*J(xi) = a1(xi) for the far-detuned jump limit, and direct
residuals of the defining equations.
"""

import math

import numpy as np
import pytest
from scipy.optimize import bisect

from hviosc.action_angle import a1, averaged_action
from hviosc.boundaries import (
    CriticalEnergy,
    MechanismNotApplicable,
    boundary_maximum,
    boundary_saddle,
    coexistence_point,
    energy_map,
    frequency_response,
    post_crossing_energy,
    transition_boundary,
)
from hviosc.manifold import PhasePoint, ScaledForcing, lpt_contour, manifold_value


def general_saddle_expression(sigma, eps):
    # unsimplified critical amplitude through the corner level: the
    # level set must pass the corner point, so the forcing term there
    # balances the detuning term
    return (2.0 / (eps * a1(0.5))) * ((1.0 + eps * sigma) * averaged_action(0.5) - 0.5)


# ----------------------------------------------------------------------
# maximum-mechanism boundary
# ----------------------------------------------------------------------

def test_boundary_maximum_threshold_half_anchor():
    assert abs(boundary_maximum(1.0, 0.5, 0.1) - 1.0) < 1e-12


def test_boundary_maximum_wall_regime_anchor():
    assert abs(boundary_maximum(1.0, 1.0, 0.1) - 1.6637) < 1e-4


def test_boundary_maximum_resonance_dip():
    assert boundary_maximum(0.0, 0.25, 0.1) == 0.0


def test_boundary_maximum_linear_branch_formula():
    rng = np.random.default_rng(7)
    for _ in range(50):
        sigma = rng.uniform(-3.0, 3.0)
        xt = rng.uniform(0.05, 0.5)
        want = math.sqrt(2.0 * xt) * abs(sigma)
        assert abs(boundary_maximum(sigma, xt, 0.1) - want) < 1e-12


def test_boundary_maximum_puts_level_set_through_apex():
    # the critical forcing is the one whose zero level set passes
    # through (nu=0, xi_tilde): cross-check against the manifold value
    for xt in (0.75, 1.0, 1.4):
        for sigma in (-1.5, 0.0, 0.7):
            f = boundary_maximum(sigma, xt, 0.1)
            fr = ScaledForcing(f=f, sigma=sigma)
            assert abs(manifold_value(PhasePoint(0.0, xt), fr)) < 1e-12


def test_boundary_maximum_mechanism_gap():
    with pytest.raises(MechanismNotApplicable):
        boundary_maximum(3.0, 0.6, 0.1)


def test_boundary_maximum_validation():
    with pytest.raises(ValueError):
        boundary_maximum(1.0, 1.0, 0.0)
    with pytest.raises(ValueError):
        boundary_maximum(1.0, -0.2, 0.1)


# ----------------------------------------------------------------------
# saddle-mechanism boundary
# ----------------------------------------------------------------------

def test_boundary_saddle_equals_detuning():
    rng = np.random.default_rng(11)
    for eps in (0.05, 0.1, 0.2):
        for sigma in rng.uniform(0.01, 5.0, size=40):
            assert abs(boundary_saddle(sigma, eps) - sigma) < 1e-12


def test_boundary_saddle_anchor():
    assert abs(boundary_saddle(1.5, 0.1) - 1.5) < 1e-12
    assert abs(boundary_saddle(1.0, 0.2) - 1.0) < 1e-12


def test_boundary_saddle_matches_general_expression():
    sigma = 0.5
    assert abs(boundary_saddle(sigma, 0.1) - general_saddle_expression(sigma, 0.1)) < 1e-12


def test_boundary_saddle_out_of_range():
    with pytest.raises(MechanismNotApplicable):
        boundary_saddle(0.0, 0.1)
    with pytest.raises(MechanismNotApplicable):
        boundary_saddle(-1.0, 0.1)


# ----------------------------------------------------------------------
# coexistence of both mechanisms
# ----------------------------------------------------------------------

def test_coexistence_anchor():
    sigma_star, f_star = coexistence_point(1.0, 0.1)
    assert abs(sigma_star - 1.28) < 1e-2
    assert f_star == sigma_star


def test_coexistence_branches_intersect():
    for xt in (0.75, 1.0, 1.5):
        sigma_star, f_star = coexistence_point(xt, 0.1)
        assert abs(boundary_maximum(sigma_star, xt, 0.1) - f_star) < 1e-6
        assert abs(boundary_saddle(sigma_star, 0.1) - f_star) < 1e-6


def test_coexistence_dip_at_threshold_half():
    sigma_star, f_star = coexistence_point(0.5, 0.1)
    assert abs(sigma_star) < 1e-12 and abs(f_star) < 1e-12


def test_coexistence_scales_inversely_with_eps():
    a, _ = coexistence_point(1.0, 0.05)
    b, _ = coexistence_point(1.0, 0.1)
    assert abs(a - 2.0 * b) < 1e-6


def test_coexistence_requires_wall_threshold():
    with pytest.raises(ValueError):
        coexistence_point(0.3, 0.1)


# ----------------------------------------------------------------------
# post-crossing energy jump
# ----------------------------------------------------------------------

def test_post_crossing_far_detuning_limit():
    # oracle first: the far-detuned balance reduces to 2*J(xi) = a1(xi);
    # that equation also holds trivially at the corner, so bracket above it
    limit = bisect(lambda x: 2.0 * averaged_action(x) - a1(x), 0.51, 0.6,
                   xtol=1e-14)
    assert abs(limit - 0.5543) < 1e-3
    seq = [post_crossing_energy(s, 0.1, "maximum") for s in (-5.0, -50.0, -2000.0)]
    assert seq[0] < seq[1] < seq[2] < limit
    assert abs(seq[2] - limit) < 1e-3


def test_post_crossing_residuals_match_printed_signs():
    eps = 0.1
    for sigma in (0.5, 1.5, 3.0):
        xp = post_crossing_energy(sigma, eps, "saddle")
        res = sigma + (2.0 / (eps * a1(xp))) * ((1.0 + eps * sigma) * averaged_action(xp) - xp)
        assert abs(res) < 1e-10
    for sigma in (-0.5, -1.5, -3.0):
        xp = post_crossing_energy(sigma, eps, "maximum")
        res = sigma - (2.0 / (eps * a1(xp))) * ((1.0 + eps * sigma) * averaged_action(xp) - xp)
        assert abs(res) < 1e-10
        assert xp > 0.5


def test_post_crossing_saddle_jump_dominates():
    for mag in np.linspace(0.5, 3.0, 9):
        up = post_crossing_energy(mag, 0.1, "saddle")
        down = post_crossing_energy(-mag, 0.1, "maximum")
        assert up > down > 0.5


def test_post_crossing_branch_guards():
    with pytest.raises(MechanismNotApplicable):
        post_crossing_energy(-1.0, 0.1, "saddle")
    with pytest.raises(MechanismNotApplicable):
        post_crossing_energy(1.0, 0.1, "maximum")
    with pytest.raises(ValueError):
        post_crossing_energy(1.0, 0.1, "center")
    with pytest.raises(ArithmeticError):
        post_crossing_energy(1.5, 0.1, "saddle", xi_cap=0.9)


# ----------------------------------------------------------------------
# frequency response
# ----------------------------------------------------------------------

def test_frequency_response_linear_point():
    pts = frequency_response(1.0, 0.1, sigma_range=(-2.0, 2.0), n_samples=81)
    hit = [p for p in pts if p.branch == "linear" and abs(p.sigma + 2.0) < 1e-12]
    assert len(hit) == 1
    assert abs(hit[0].xi - 0.125) < 1e-12


def test_frequency_response_jump_markers():
    pts = frequency_response(1.0, 0.1, sigma_range=(-2.5, 2.5), n_samples=50)
    jumps = sorted({p.sigma for p in pts if p.at_jump})
    assert len(jumps) == 2
    assert abs(jumps[0] + 1.0) < 1e-12 and abs(jumps[1] - 1.0) < 1e-12


def test_frequency_response_meets_post_crossing_level():
    pts = frequency_response(1.0, 0.1, sigma_range=(-2.0, 2.0), n_samples=41)
    level = post_crossing_energy(1.0, 0.1, "saddle")
    top = [p for p in pts if abs(p.sigma - 1.0) < 1e-12 and p.branch != "linear"]
    assert any(abs(p.xi - level) < 1e-9 for p in top)


def test_frequency_response_residual_invariant():
    eps = 0.1
    f = 1.0
    for p in frequency_response(f, eps, sigma_range=(-2.0, 2.0), n_samples=41):
        if p.branch == "linear":
            if p.xi < 0.5:
                assert abs(2.0 * p.sigma ** 2 * p.xi - f * f) < 1e-9
            else:
                assert p.xi == 0.5
        else:
            got = (2.0 / (eps * a1(p.xi))) * (p.xi - (1.0 + eps * p.sigma) * averaged_action(p.xi))
            assert abs(got - f) < 1e-9


def test_frequency_response_branch_structure():
    pts = frequency_response(1.0, 0.1, sigma_range=(-2.0, 2.0), n_samples=41)
    by_sigma = {}
    for p in pts:
        by_sigma.setdefault(p.sigma, []).append(p)
    for sigma, group in by_sigma.items():
        wall = sorted((p for p in group if p.branch != "linear"), key=lambda p: p.xi)
        if sigma < -1.0 - 1e-9:
            assert not wall
        if wall:
            assert wall[0].branch == "hvi_max"
            assert all(p.branch == "hvi_saddle" for p in wall[1:])
            assert all(p.xi > 0.5 for p in wall)


def test_frequency_response_fold_pair():
    # inside the fold window both wall-regime roots coexist
    pts = frequency_response(1.49, 0.1, sigma_range=(-1.5, -1.5), n_samples=1)
    wall = sorted((p for p in pts if p.branch != "linear"), key=lambda p: p.xi)
    assert len(wall) == 2
    assert wall[0].branch == "hvi_max" and wall[1].branch == "hvi_saddle"
    assert 0.5 < wall[0].xi < wall[1].xi < 0.53


def test_frequency_response_validation():
    with pytest.raises(ValueError):
        frequency_response(0.0, 0.1)


# ----------------------------------------------------------------------
# peak-energy map
# ----------------------------------------------------------------------

def test_energy_map_zero_forcing():
    for sigma in (-2.0, -0.3, 0.0, 1.1):
        assert energy_map(sigma, 0.0, 0.1) == 0.0


def test_energy_map_linear_regime():
    assert abs(energy_map(-2.0, 1.0, 0.1) - 0.125) < 1e-12
    assert abs(energy_map(3.0, 1.5, 0.1) - 0.125) < 1e-12


def test_energy_map_boundary_anchor():
    assert abs(energy_map(1.0, 1.6637, 0.1) - 1.0) < 2e-2


def test_energy_map_jump_matches_post_crossing():
    for sigma, branch in ((-1.5, "maximum"), (1.5, "saddle")):
        just_below = energy_map(sigma, abs(sigma) - 1e-6, 0.1)
        at_boundary = energy_map(sigma, abs(sigma), 0.1)
        assert abs(just_below - 0.5) < 1e-5
        assert abs(at_boundary - post_crossing_energy(sigma, 0.1, branch)) < 1e-9
        assert at_boundary > just_below


def test_energy_map_tracks_level_set():
    for sigma in (-1.5, -0.5, 0.0, 0.8, 1.5):
        for f in (0.3, 1.0, 1.7, 2.4):
            want = energy_map(sigma, f, 0.1)
            got = lpt_contour(ScaledForcing(f=f, sigma=sigma),
                              nu_samples=192, xi_max=want + 1.0).max_xi
            assert abs(want - got) < 5e-2, (sigma, f)


def test_energy_map_monotone_in_forcing():
    for sigma in (-1.2, 0.0, 0.7, 2.0):
        vals = [energy_map(sigma, f, 0.1) for f in np.linspace(0.0, 3.0, 31)]
        assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))


def test_energy_map_validated_path():
    v0 = energy_map(1.0, 1.6637, 0.1)
    v1 = energy_map(1.0, 1.6637, 0.1, validate=True)
    assert v0 == v1


def test_energy_map_validation():
    with pytest.raises(ValueError):
        energy_map(1.0, -0.5, 0.1)


# ----------------------------------------------------------------------
# assembled transition boundary
# ----------------------------------------------------------------------

def test_transition_boundary_mechanism_split():
    tb = transition_boundary(1.0, 0.1, sigma_range=(-3.0, 3.0), n_samples=61)
    sigma_star, f_star = tb.coexistence
    assert abs(sigma_star - 1.28) < 1e-2
    for sigma, f_crit, mech in tb.samples:
        assert f_crit >= 0.0
        assert mech == ("maximum" if sigma <= sigma_star else "saddle")
    sigmas = [s for s, _, _ in tb.samples]
    assert sigmas == sorted(sigmas)
    # the star itself is a sample and both branches agree there
    star = [s for s in tb.samples if abs(s[0] - sigma_star) < 1e-12]
    assert star and abs(star[0][1] - f_star) < 1e-6


def test_transition_boundary_type_one_overlap():
    tb = transition_boundary(0.5, 0.1, sigma_range=(-2.0, 2.0), n_samples=50)
    for sigma, f_crit, _ in tb.samples:
        assert abs(f_crit - abs(sigma)) < 1e-12


def test_transition_boundary_accepts_wrapper():
    tb = transition_boundary(CriticalEnergy(1.0), 0.1, n_samples=17)
    assert tb.xi_tilde.xi_tilde == 1.0


def test_transition_boundary_requires_wall_threshold():
    with pytest.raises(ValueError):
        transition_boundary(0.45, 0.1)


def test_critical_energy_validation():
    with pytest.raises(ValueError):
        CriticalEnergy(0.0)

"""Analysis and simulation of a harmonically forced oscillator with rigid walls."""

from hviosc.action_angle import (
    WALL,
    AAQuantities,
    a1,
    aa_quantities,
    averaged_action,
    basis_g,
    beta_of_energy,
    d_a1,
    d_averaged_action,
    fourier_bn,
    fourier_bn_compare,
    frequency,
    phi,
    potential,
    q_of_theta,
)
from hviosc.boundaries import (
    CriticalEnergy,
    FrequencyResponsePoint,
    MechanismNotApplicable,
    TransitionBoundary,
    boundary_maximum,
    boundary_saddle,
    coexistence_point,
    energy_map,
    frequency_response,
    post_crossing_energy,
    transition_boundary,
)
from hviosc.manifold import (
    LPTContour,
    PhasePoint,
    ScaledForcing,
    StationaryPoint,
    classify_stationary,
    lpt_contour,
    manifold_value,
    sigma_of_stationary,
    stationary_points,
)
from hviosc.sim import (
    BACKEND,
    EnergySummary,
    SimConfig,
    Trajectory,
    energy_summary,
    normalize,
    numeric_boundary,
    simulate,
)

__version__ = "0.1.0"

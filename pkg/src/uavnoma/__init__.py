"""Deterministic Monte Carlo simulator for two-user downlink NOMA from a UAV base station.

A UAV hovering at altitude ``h`` serves ground users dropped by a Poisson
point process in an annular sector, through a steerable directional beam with
a limited vertical beamwidth.  The weakest and strongest users (by effective
channel gain against the beam) are paired for power-domain superposition with
successive interference cancellation, and compared against orthogonal access.
When the beam cannot cover the whole region, a boresight grid search maximizes
the estimated outage sum rate.
"""

from .channel import (
    ArrayConfig,
    CloseInReference,
    DistancePowerLaw,
    PathLossModel,
    array_gain_factor,
    effective_gain,
    path_loss_linear,
)
from .geometry import (
    BeamGeometry,
    RadiatedInterval,
    UserRegion,
    boresight_bounds,
    coverage_fraction,
    elevation_angle,
    radiated_interval,
    required_vertical_angle,
)
from .montecarlo import (
    BoresightScan,
    DropOutcomes,
    PointEstimate,
    PopulationBatch,
    ScanNotNeededError,
    ScenarioConfig,
    SweepRow,
    altitude_sweep,
    estimate,
    evaluate_drops,
    optimize_boresight,
    run_drop,
    sample_batch,
)
from .noma import (
    DropCase,
    DropResult,
    NomaConfig,
    OmaDof,
    analytic_single_user_outage,
    drop_outcome,
    epsilon,
    noma_pair_outcome,
    oma_pair_outcome,
    order_and_select,
    single_user_outcome,
)
from .population import (
    DropPopulation,
    UserSample,
    drop_rng,
    mean_user_count,
    sample_count,
    sample_drop,
    sample_positions,
    sample_user,
)

__version__ = "0.1.0"

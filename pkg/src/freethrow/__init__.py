"""Free-throw shot-quality metrics and a closed-form flight model."""

from .physics import (
    DEFAULT_GEOMETRY,
    AxisSpec,
    CourtGeometry,
    LaunchConditions,
    NeverReachesRim,
    Outcome,
    classify_outcome,
    error_grid,
    error_propagation,
    flight_time,
    landing_x,
    outcome_grid,
    simulate_trajectory,
)

__version__ = "0.1.0"

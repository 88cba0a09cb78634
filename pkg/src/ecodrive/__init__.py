"""Energy-optimal on/off speed control for low-consumption race vehicles."""

from .controller import (
    ControllerConfig,
    RaceResult,
    ReplanRecord,
    TelemetrySample,
    min_switch_interval,
    replan,
    run_race,
    switch_logic,
)
from .dynamics import (
    CONSTANT_ELECTRICAL,
    DEFAULT_PARAMS,
    WHEEL_POWER,
    AssumptionReport,
    FrozenDynamics,
    PowerModel,
    RaceState,
    TrackProfile,
    VehicleParams,
    WindField,
    acceleration,
    check_assumptions,
    engine_power,
    equilibrium_speeds,
    freeze,
    integrate,
)
from .errors import (
    DivergenceRiskError,
    DomainError,
    EcodriveError,
    ExpansionInapplicableError,
    InfeasibleCandidateError,
    InfeasibleSliceError,
    InfeasibleTargetError,
    InvalidProfileError,
    InvalidSegmentError,
    NumericError,
    ScenarioError,
)
from .optimizer import (
    GridSpec,
    OscillationBand,
    asymptotic_average_cost,
    band_cost,
    optimal_band,
    upper_limit,
)
from .quadrature import (
    PeriodStats,
    SpeedSegment,
    covered_length,
    elapsed_time,
    energy_used,
    period_stats,
)
from .robustness import (
    SpeedProfile,
    mean_speed,
    perturbation_series,
    proportional_invariance_check,
    ratio_statistics,
)
from .scenario import Scenario, emit_report, load_scenario, write_scenario

__version__ = "0.1.0"

"""Proactive underfrequency protection toolkit.

A particle filter tracks noisy 30 Hz frequency reports, artificial data
points extend its prediction seconds ahead, and the predicted excursion is
converted into staged load shedding or continuous DER compensation against
a reduced-order swing-equation grid model.
"""

from .control import (
    DerCommand,
    DerController,
    RocofBand,
    ShedAction,
    ShedPolicy,
    Thresholds,
    Trigger,
    TriggerMonitor,
    check_trigger,
    der_setpoint,
    load_excess,
    plan_shed,
    rocof,
)
from .errors import (
    ConfigurationError,
    DegenerateWeightsError,
    LatencyViolationError,
    SimulationFault,
)
from .estimators import ParticleFrequencyFilter
from .filtering import (
    FilterConfig,
    Particle,
    ParticleSet,
    assimilate,
    estimate,
    init_particles,
    propagate,
    resample,
    update_weights,
)
from .grid import GridEvent, GridParams, GridState, apply_actuation, run_until, step
from .horizon import (
    AdpVector,
    DerivativeWindow,
    Prediction,
    estimate_derivatives,
    generate_adps,
    num_adps,
    predict_horizon,
)
from .pmu import FrequencySample, NoiseModel, PmuSampler, sample_stream
from .scenario import (
    DerSettings,
    RunArtifacts,
    ScenarioConfig,
    config_from_dict,
    config_to_dict,
    load_config,
    preset,
    run_scenario,
    save_config,
    summarize,
)

__version__ = "0.1.0"

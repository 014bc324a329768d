"""Linear small-scale helicopter model with LQR synthesis and simulation."""

from .analysis import (
    ControllabilityResult,
    ModeReport,
    controllability_matrix,
    controllability_rank,
    stability_report,
)
from .exceptions import HeliLqrError
from .lqr import (
    LqrSolution,
    LqrWeights,
    LQRRegulator,
    closed_loop_matrix,
    default_weights,
    lqr_gain,
    solve_care,
)
from .model import (
    INPUT_LABELS,
    STATE_LABELS,
    ParameterSet,
    StateSpace,
    build_system,
    load_params,
    load_params_file,
    output_matrix,
)
from .scenario import (
    NoiseConfig,
    ReferenceCommand,
    Scenario,
    load_scenario,
    make_reference,
    preset_scenario,
)
from .sim import (
    Trajectory,
    rk4_step,
    simulate_closed_loop,
    simulate_open_loop,
    steady_state,
)

__version__ = "0.1.0"

"""Adaptive iterative learning control for non-affine plants with iteration-varying parameters."""

from .adaptation import AdaptState, ProjectionBall, Variant, dead_zone, gdpa_update, lyapunov, project
from .controller import ControllerConfig, IterationTrace, mimo_run_experiment, run_experiment, run_iteration
from .ddilc import DdilcParams, DdilcState, ddilc_update, run_ddilc_experiment
from .disturbances import DisturbanceSpec, DisturbanceStream, sample
from .errors import (AilcError, BracketingError, ConfigurationError, DivergenceError, NumericalError,
                     NumericalOverflowError, RolloutAborted, SequencingError, UsageError)
from .estimator import EstimatorMemory, estimate_joint, estimate_state_vector
from .harness import (ScenarioConfig, builtin_scenarios, emit_results, get_scenario, load_scenario,
                      run_scenario, summarize)
from .plant import CoupledPlant, PlantSpec, assumption_check, reset, step
from .solver import SolverConfig, oracle_root, solve_fixed_point, stopping_p0

__version__ = "0.1.0"

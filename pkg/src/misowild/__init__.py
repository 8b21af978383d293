"""Bayesian optimization over multiple information sources with location-dependent costs."""

from .agp import AugmentedModel, build_agp, build_augmenting_set, fit_augmented
from .acquisition import (
    AcquisitionContext,
    Candidate,
    acquisition_value,
    apply_correction,
    beta_schedule,
    select_next,
)
from .baselines import CoolingState, cooling_alpha, ei_cool_value, expected_improvement, run_baseline
from .errors import (
    ConfigError,
    IllConditioned,
    NonpositiveCost,
    RunAborted,
    SourceUnavailable,
)
from .gp import GPModel, KernelParams, fit_gp, matern32, mle_fit
from .models import Observation, SourceState, cost_ucb, discrepancy, ingest
from .optimizer import RunConfig, RunHistory, RunResult, final_solution, run, run_miso_wild
from .problems import PROBLEMS, SyntheticProblem, branin_trio, evaluate, forrester_pair, get_problem
from .sampling import lhs_sample
from .space import SearchSpace

__version__ = "0.1.0"

"""Two-region economic geography with heterothetic Cobb-Douglas demand."""

from .demand import (ComposedHCD, Constant, DemandConfig, DirectLogistic, ShareSchedule,
                     WeightSchedule, schedule_from_dict, validate_assumptions)
from .errors import (AssumptionViolation, BracketFailure, DegenerateDenominator, DomainError,
                     HCDError, NoConvergenceWithinHorizon, NonConvergence, NotDefined,
                     SingularSystem)
from .short_run import EconomyParams, ShortRunSolution, solve_short_run
from .spatial import EVERYWHERE, Regime, classify, critical_points

__version__ = "0.1.0"

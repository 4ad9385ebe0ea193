"""Medical-waste collection routing under transport cost and accident risk."""

from .ahp import AhpResult, PairwiseMatrix, default_weights, derive_weights
from .ga import Chromosome, GaConfig, GaResult, decode, encode, parse_rendered, run_ga
from .instance import (
    CovidParams,
    EdgeRiskProfile,
    FleetParams,
    ProblemInstance,
    Scenario,
    Site,
    load_instance,
    validate_instance,
    write_instance,
)
from .objective import evaluate_plan
from .oracle import OracleResult, solve_exact
from .risk import RiskBreakdown, RiskWeights, total_risk_cost
from .transport import CostBreakdown, RoutePlan, check_feasibility, schedule_routes

__version__ = "0.1.0"

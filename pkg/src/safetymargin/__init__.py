"""Decision engine for protective-system alternatives.

Selects the socially optimal technology by expected lifecycle social cost and
reports catastrophe premiums, reliability premiums, margins of safety and
Hand Rule verdicts.
"""

__version__ = "0.1.0"

from .alternatives import (
    Alternative,
    CostDistribution,
    Discrete,
    LogNormal,
    PointMass,
    Scenario,
    Triangular,
    Uniform,
    Violation,
    sample_lifecycle,
    sample_lifecycles,
    validate_scenario,
)
from .evaluation import (
    BoundCheck,
    Evaluation,
    Label,
    NegligenceCase,
    PortfolioAnalysis,
    Verdict,
    analyze_evaluations,
    classify_portfolio,
    evaluate_alternative,
    hand_rule,
    margin_of_safety,
    point_slope_bound,
    reliability_premium,
    select_optimal,
)
from .montecarlo import (
    Estimate,
    EstimationConfig,
    EstimationMode,
    brute_force_expected_social_cost,
    estimate_conditional,
    split_stream,
)
from .scenario_io import (
    DEFAULT_FIG3_SEED,
    ScenarioDocument,
    generate_fig3_fixture,
    parse_scenario,
    read_scenario,
    serialize_scenario,
    write_scenario,
)
from .welfare import Family, WelfareFunction, affine_transform, eval_welfare

"""Expected social cost decomposition and portfolio analysis.

For an alternative with catastrophe probability ``p``, expected social cost
given a clean lifecycle ``c_good`` and given catastrophe ``c_fail``::

    E[w(C)] = c_good + (c_fail - c_good) * p

The difference ``c_fail - c_good`` is the catastrophe premium. The socially
optimal alternative minimizes ``E[w(C)]``; any rival with a strictly smaller
catastrophe probability is super-optimal and carries a positive margin of
safety ``p_opt - p``.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .alternatives import Alternative, Scenario
from .errors import EmptyPortfolioError, ParamError, SameAlternativeError
from .montecarlo import (
    PURPOSE_COST_FAIL,
    PURPOSE_COST_GOOD,
    EstimationConfig,
    estimate_conditional,
    split_stream,
)
from .welfare import WelfareFunction

#: Tolerance for the point-slope bound check.
BOUND_TOL = 1e-9


class Label(str, enum.Enum):
    SOCIALLY_OPTIMAL = "SociallyOptimal"
    SUPER_OPTIMAL = "SuperOptimal"
    SUB_OPTIMAL = "SubOptimal"


class Verdict(str, enum.Enum):
    NEGLIGENT = "NEGLIGENT"
    NOT_NEGLIGENT = "NOT_NEGLIGENT"


@dataclass(frozen=True)
class Evaluation:
    id: str
    c_good: float
    c_fail: float
    c_premium: float
    p_cat: float
    expected_social_cost: float
    stderr: float = 0.0

    @classmethod
    def from_parts(cls, id: str, c_good: float, c_fail: float, p_cat: float, stderr: float = 0.0) -> Evaluation:
        premium = c_fail - c_good
        return cls(id, c_good, c_fail, premium, p_cat, c_good + premium * p_cat, stderr)


@dataclass(frozen=True)
class BoundCheck:
    """Point-slope form of the optimality inequality for one rival.

    When not degenerate, ``satisfied`` means
    ``p_opt <= slope * p_rival + intercept`` (up to :data:`BOUND_TOL`).
    A non-positive optimal catastrophe premium makes the check degenerate.
    """

    optimal_id: str
    rival_id: str
    slope: float
    intercept: float
    satisfied: bool
    degenerate: bool


@dataclass(frozen=True)
class PortfolioAnalysis:
    optimal_id: str
    evaluations: tuple[Evaluation, ...]
    labels: Mapping[str, Label]
    margins: Mapping[str, float]
    reliability_premiums: Mapping[str, float]
    bound_checks: tuple[BoundCheck, ...] = field(default=())

    @property
    def optimal(self) -> Evaluation:
        return next(e for e in self.evaluations if e.id == self.optimal_id)

    def count(self, label: Label) -> int:
        return sum(1 for v in self.labels.values() if v is label)


@dataclass(frozen=True)
class NegligenceCase:
    """Inputs to the calculus of negligence.

    Attributes:
        burden: Value of the protection effort forgone or applied.
        p_harm: Probability of the loss.
        loss: Value of the loss caused.
    """

    burden: float
    p_harm: float
    loss: float

    def __post_init__(self) -> None:
        for name in ("burden", "p_harm", "loss"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ParamError(f"{name} must be a finite real, got {v!r}")
        if self.burden < 0:
            raise ParamError(f"burden must be >= 0, got {self.burden}")
        if not 0 <= self.p_harm <= 1:
            raise ParamError(f"p_harm must lie in [0, 1], got {self.p_harm}")
        if self.loss < 0:
            raise ParamError(f"loss must be >= 0, got {self.loss}")


def evaluate_alternative(a: Alternative, w: WelfareFunction, cfg: EstimationConfig | None = None) -> Evaluation:
    """Conditional social costs and their probability-weighted total for ``a``.

    Monte Carlo streams are keyed by ``(cfg.seed, a.id)``, so the result does
    not depend on which other alternatives are evaluated or in what order.
    """
    cfg = cfg or EstimationConfig()
    good = estimate_conditional(a.cost_good, w, cfg, split_stream(cfg.seed, a.id, PURPOSE_COST_GOOD))
    fail = estimate_conditional(a.cost_fail, w, cfg, split_stream(cfg.seed, a.id, PURPOSE_COST_FAIL))
    p = float(a.p_cat)
    stderr = math.hypot((1.0 - p) * good.stderr, p * fail.stderr)
    return Evaluation.from_parts(a.id, good.value, fail.value, p, stderr)


def _selection_key(e: Evaluation):
    return (e.expected_social_cost, e.p_cat, e.id)


def select_optimal(evals: Sequence[Evaluation]) -> str:
    """Id of the minimum expected social cost alternative.

    Exact ties go to the lower catastrophe probability, then the smaller id.
    """
    if not evals:
        raise EmptyPortfolioError("cannot select from an empty portfolio")
    return min(evals, key=_selection_key).id


def _distinct(optimal: Evaluation, rival: Evaluation) -> None:
    if optimal.id == rival.id:
        raise SameAlternativeError(f"{optimal.id!r} compared against itself")


def reliability_premium(optimal: Evaluation, rival: Evaluation) -> float:
    """Clean-lifecycle social cost of choosing ``optimal`` over ``rival``; may be negative."""
    _distinct(optimal, rival)
    return optimal.c_good - rival.c_good


def margin_of_safety(optimal: Evaluation, rival: Evaluation) -> float:
    """``p_opt - p_rival``; positive when the rival is safer than the optimum."""
    _distinct(optimal, rival)
    return optimal.p_cat - rival.p_cat


def point_slope_bound(optimal: Evaluation, rival: Evaluation) -> BoundCheck:
    _distinct(optimal, rival)
    premium = optimal.c_premium
    if premium == 0:
        return BoundCheck(optimal.id, rival.id, math.nan, math.nan, satisfied=False, degenerate=True)
    slope = rival.c_premium / premium
    intercept = -(optimal.c_good - rival.c_good) / premium
    if premium < 0:
        return BoundCheck(optimal.id, rival.id, slope, intercept, satisfied=False, degenerate=True)
    satisfied = optimal.p_cat <= slope * rival.p_cat + intercept + BOUND_TOL
    return BoundCheck(optimal.id, rival.id, slope, intercept, satisfied=satisfied, degenerate=False)


def analyze_evaluations(evals: Sequence[Evaluation]) -> PortfolioAnalysis:
    """Label, margins, premiums and bound checks for already-evaluated alternatives."""
    opt_id = select_optimal(evals)
    opt = next(e for e in evals if e.id == opt_id)
    labels: dict[str, Label] = {}
    margins: dict[str, float] = {}
    premiums: dict[str, float] = {}
    checks: list[BoundCheck] = []
    for e in evals:
        if e.id == opt_id:
            labels[e.id] = Label.SOCIALLY_OPTIMAL
            margins[e.id] = 0.0
            continue
        labels[e.id] = Label.SUPER_OPTIMAL if e.p_cat < opt.p_cat else Label.SUB_OPTIMAL
        margins[e.id] = margin_of_safety(opt, e)
        premiums[e.id] = reliability_premium(opt, e)
        checks.append(point_slope_bound(opt, e))
    return PortfolioAnalysis(opt_id, tuple(evals), labels, margins, premiums, tuple(checks))


def classify_portfolio(
    s: Scenario,
    cfg: EstimationConfig | None = None,
    workers: int = 1,
) -> PortfolioAnalysis:
    """Evaluate every alternative in ``s`` and classify it against the optimum.

    ``cfg`` defaults to the scenario's seed and sample budget. With
    ``workers > 1`` alternatives are evaluated on a thread pool; results are
    identical to sequential evaluation.
    """
    if cfg is None:
        cfg = EstimationConfig(seed=s.seed, max_samples=s.samples_per_alternative)
    if workers > 1 and len(s.alternatives) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            evals = list(pool.map(lambda a: evaluate_alternative(a, s.welfare, cfg), s.alternatives))
    else:
        evals = [evaluate_alternative(a, s.welfare, cfg) for a in s.alternatives]
    return analyze_evaluations(evals)


def hand_rule(case: NegligenceCase) -> Verdict:
    """Negligent iff the burden of protection is strictly below ``P * L``."""
    if case.burden < case.p_harm * case.loss:
        return Verdict.NEGLIGENT
    return Verdict.NOT_NEGLIGENT

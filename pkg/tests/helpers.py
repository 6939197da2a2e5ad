"""Random scenario generators shared by the property and acceptance tests."""

from __future__ import annotations

import math

import numpy as np

from safetymargin.alternatives import Alternative, CostDistribution, Discrete, PointMass, Scenario
from safetymargin.welfare import Family, WelfareFunction


def random_finite_alternative(
    rng: np.random.Generator,
    alt_id: str,
    *,
    max_atoms: int = 4,
    cost_scale: float = 100.0,
    positive_premium: bool = False,
) -> Alternative:
    """A random finite-support alternative, for property checks and demos.

    With ``positive_premium`` every catastrophe cost exceeds every
    catastrophe-free cost, so the catastrophe premium is positive under any
    increasing welfare.
    """

    def discrete(lo: float, hi: float) -> CostDistribution:
        k = int(rng.integers(1, max_atoms + 1))
        if k == 1:
            return PointMass(float(rng.uniform(lo, hi)))
        values = tuple(float(v) for v in np.unique(rng.uniform(lo, hi, k)))
        raw = rng.uniform(0.05, 1.0, len(values))
        probs = [float(p) for p in raw / raw.sum()]
        probs[-1] = 1.0 - math.fsum(probs[:-1])
        return Discrete(values, tuple(probs))

    good = discrete(0.0, cost_scale)
    if positive_premium:
        fail = discrete(cost_scale, 10.0 * cost_scale)
    else:
        fail = discrete(0.0, 10.0 * cost_scale)
    return Alternative(alt_id, float(rng.uniform(0.0, 1.0)), good, fail)


def random_finite_scenario(
    rng: np.random.Generator,
    welfare: WelfareFunction | None = None,
    *,
    n_min: int = 2,
    n_max: int = 8,
    positive_premium: bool = False,
) -> Scenario:
    n = int(rng.integers(n_min, n_max + 1))
    alts = tuple(
        random_finite_alternative(rng, f"alt{i:02d}", positive_premium=positive_premium) for i in range(n)
    )
    return Scenario(alts, welfare or WelfareFunction(), seed=int(rng.integers(0, 2**63)))


def random_welfare(rng: np.random.Generator) -> WelfareFunction:
    family = [Family.LINEAR, Family.EXPONENTIAL, Family.POWER][int(rng.integers(0, 3))]
    if family is Family.LINEAR:
        return WelfareFunction(family)
    if family is Family.EXPONENTIAL:
        # keeps exp(a c) well inside float range for costs up to 1000
        return WelfareFunction(family, float(rng.uniform(1e-4, 5e-3)))
    return WelfareFunction(family, float(rng.uniform(1.0, 2.5)))

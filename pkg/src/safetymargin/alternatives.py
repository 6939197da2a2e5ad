"""Candidate technologies and their conditional lifecycle-cost laws.

Each alternative is a two-stage experiment: a Bernoulli draw decides whether
the lifecycle ends in catastrophe, then the lifecycle cost is drawn from the
law conditional on that outcome.

Construction never raises for out-of-range parameters; :func:`validate_scenario`
reports every problem as data so hand-written inputs can be diagnosed in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .welfare import WelfareFunction

PROB_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Violation:
    """One invariant violation found during validation."""

    alternative_id: str | None
    field: str
    message: str

    def __str__(self) -> str:
        where = f"alternative {self.alternative_id!r}" if self.alternative_id is not None else "scenario"
        return f"{where}: {self.field}: {self.message}"


def _is_real(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


class CostDistribution:
    """Base for lifecycle-cost laws; support must lie in ``[0, inf)``."""

    kind: ClassVar[str]
    finite_support: ClassVar[bool] = False

    def problems(self) -> list[str]:
        raise NotImplementedError

    def support(self) -> tuple[float, float]:
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError

    def atoms(self) -> list[tuple[float, float]]:
        """``(value, probability)`` pairs; finite-support laws only."""
        raise TypeError(f"{self.kind} has no finite support")

    def params(self) -> dict:
        raise NotImplementedError

    def _support_problems(self) -> list[str]:
        lo, _ = self.support()
        if _is_real(lo) and lo < 0:
            return [f"support must be nonnegative, lower end is {lo!r}"]
        return []


@dataclass(frozen=True)
class PointMass(CostDistribution):
    value: float

    kind: ClassVar[str] = "PointMass"
    finite_support: ClassVar[bool] = True

    def problems(self) -> list[str]:
        if not _is_real(self.value):
            return [f"value must be a finite real, got {self.value!r}"]
        return self._support_problems()

    def support(self):
        return (self.value, self.value)

    def mean(self):
        return float(self.value)

    def sample(self, rng, n):
        return np.full(n, float(self.value))

    def atoms(self):
        return [(float(self.value), 1.0)]

    def params(self):
        return {"value": self.value}


@dataclass(frozen=True)
class Discrete(CostDistribution):
    values: tuple[float, ...]
    probs: tuple[float, ...]

    kind: ClassVar[str] = "Discrete"
    finite_support: ClassVar[bool] = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "probs", tuple(self.probs))

    def problems(self) -> list[str]:
        out = []
        if not self.values:
            return ["needs at least one value"]
        if len(self.values) != len(self.probs):
            return [f"{len(self.values)} values but {len(self.probs)} probs"]
        if not all(_is_real(v) for v in self.values):
            out.append("values must be finite reals")
        elif len(set(self.values)) != len(self.values):
            out.append("values must be distinct")
        if not all(_is_real(p) for p in self.probs):
            out.append("probs must be finite reals")
            return out
        if any(p < 0 for p in self.probs):
            out.append("probs must be >= 0")
        total = math.fsum(self.probs)
        if abs(total - 1.0) > PROB_SUM_TOL:
            out.append(f"probs sum to {total!r}, not 1")
        if not out:
            out.extend(self._support_problems())
        return out

    def support(self):
        return (min(self.values), max(self.values))

    def mean(self):
        return math.fsum(v * p for v, p in zip(self.values, self.probs))

    def sample(self, rng, n):
        cdf = np.cumsum(self.probs)
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        return np.asarray(self.values, dtype=float)[np.minimum(idx, len(self.values) - 1)]

    def atoms(self):
        return [(float(v), float(p)) for v, p in zip(self.values, self.probs)]

    def params(self):
        return {"values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class Uniform(CostDistribution):
    lo: float
    hi: float

    kind: ClassVar[str] = "Uniform"

    def problems(self) -> list[str]:
        if not (_is_real(self.lo) and _is_real(self.hi)):
            return ["lo and hi must be finite reals"]
        if not self.lo < self.hi:
            return [f"needs lo < hi, got lo={self.lo!r} hi={self.hi!r}"]
        return self._support_problems()

    def support(self):
        return (self.lo, self.hi)

    def mean(self):
        return 0.5 * (self.lo + self.hi)

    def sample(self, rng, n):
        return rng.uniform(self.lo, self.hi, n)

    def params(self):
        return {"lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class Triangular(CostDistribution):
    lo: float
    mode: float
    hi: float

    kind: ClassVar[str] = "Triangular"

    def problems(self) -> list[str]:
        if not all(_is_real(x) for x in (self.lo, self.mode, self.hi)):
            return ["lo, mode and hi must be finite reals"]
        if not self.lo < self.hi:
            return [f"needs lo < hi, got lo={self.lo!r} hi={self.hi!r}"]
        if not self.lo <= self.mode <= self.hi:
            return [f"needs lo <= mode <= hi, got mode={self.mode!r}"]
        return self._support_problems()

    def support(self):
        return (self.lo, self.hi)

    def mean(self):
        return (self.lo + self.mode + self.hi) / 3.0

    def sample(self, rng, n):
        return rng.triangular(self.lo, self.mode, self.hi, n)

    def params(self):
        return {"lo": self.lo, "mode": self.mode, "hi": self.hi}


@dataclass(frozen=True)
class LogNormal(CostDistribution):
    """``exp(N(mu, sigma**2))``."""

    mu: float
    sigma: float

    kind: ClassVar[str] = "LogNormal"

    def problems(self) -> list[str]:
        if not (_is_real(self.mu) and _is_real(self.sigma)):
            return ["mu and sigma must be finite reals"]
        if not self.sigma > 0:
            return [f"needs sigma > 0, got {self.sigma!r}"]
        return []

    def support(self):
        return (0.0, math.inf)

    def mean(self):
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def sample(self, rng, n):
        return rng.lognormal(self.mu, self.sigma, n)

    def params(self):
        return {"mu": self.mu, "sigma": self.sigma}


DISTRIBUTION_KINDS: dict[str, type[CostDistribution]] = {
    cls.kind: cls for cls in (PointMass, Discrete, Uniform, Triangular, LogNormal)
}


@dataclass(frozen=True)
class Alternative:
    """A candidate technology.

    Attributes:
        id: Identifier, unique within a scenario.
        p_cat: Probability that the lifecycle terminates in catastrophe.
        cost_good: Lifecycle-cost law given no catastrophe.
        cost_fail: Lifecycle-cost law given catastrophe.
    """

    id: str
    p_cat: float
    cost_good: CostDistribution
    cost_fail: CostDistribution

    @property
    def finite_support(self) -> bool:
        return self.cost_good.finite_support and self.cost_fail.finite_support


@dataclass(frozen=True)
class Scenario:
    alternatives: tuple[Alternative, ...]
    welfare: WelfareFunction = field(default_factory=WelfareFunction)
    seed: int = 0
    samples_per_alternative: int = 100_000

    def __post_init__(self) -> None:
        object.__setattr__(self, "alternatives", tuple(self.alternatives))

    def by_id(self, alt_id: str) -> Alternative:
        for a in self.alternatives:
            if a.id == alt_id:
                return a
        raise KeyError(alt_id)


def validate_alternative(a: Alternative) -> list[Violation]:
    out: list[Violation] = []
    aid = a.id if isinstance(a.id, str) else repr(a.id)
    if not isinstance(a.id, str) or not a.id:
        out.append(Violation(aid, "id", "must be a nonempty string"))
    if not _is_real(a.p_cat):
        out.append(Violation(aid, "pCat", f"must be a finite real, got {a.p_cat!r}"))
    elif not 0.0 <= a.p_cat <= 1.0:
        out.append(Violation(aid, "pCat", f"must lie in [0, 1], got {a.p_cat!r}"))
    for name, dist in (("costGood", a.cost_good), ("costFail", a.cost_fail)):
        if not isinstance(dist, CostDistribution):
            out.append(Violation(aid, name, f"not a cost distribution: {dist!r}"))
            continue
        out.extend(Violation(aid, name, f"{dist.kind}: {msg}") for msg in dist.problems())
    return out


def validate_scenario(s: Scenario) -> list[Violation]:
    """Every invariant violation in ``s``; an empty list means valid."""
    out: list[Violation] = []
    if not s.alternatives:
        out.append(Violation(None, "alternatives", "at least one alternative is required"))
    seen: set[str] = set()
    for a in s.alternatives:
        if a.id in seen:
            out.append(Violation(a.id, "id", "duplicate alternative id"))
        seen.add(a.id)
        out.extend(validate_alternative(a))
    if isinstance(s.seed, bool) or not isinstance(s.seed, int) or not 0 <= s.seed < 2**64:
        out.append(Violation(None, "seed", f"must be an unsigned 64-bit integer, got {s.seed!r}"))
    n = s.samples_per_alternative
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        out.append(Violation(None, "samplesPerAlternative", f"must be a positive integer, got {n!r}"))
    return out


def sample_lifecycle(a: Alternative, stream: np.random.Generator) -> tuple[int, float]:
    """Draw one ``(catastrophe, cost)`` lifecycle outcome."""
    catastrophe = int(stream.random() < a.p_cat)
    dist = a.cost_fail if catastrophe else a.cost_good
    return catastrophe, float(dist.sample(stream, 1)[0])


def sample_lifecycles(a: Alternative, stream: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`sample_lifecycle`: ``n`` catastrophe bits and costs."""
    bits = (stream.random(n) < a.p_cat).astype(np.int8)
    costs = np.empty(n)
    n_fail = int(bits.sum())
    costs[bits == 0] = a.cost_good.sample(stream, n - n_fail)
    costs[bits == 1] = a.cost_fail.sample(stream, n_fail)
    return bits, costs

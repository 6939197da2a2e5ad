"""Estimation of conditional expected social cost.

Finite-support laws are summed exactly. Continuous laws are estimated by
seeded Monte Carlo with a relative-stderr stopping rule. Random streams are
PCG64 generators keyed by a BLAKE2b hash of ``(seed, label, purpose)``, so a
stream depends only on its key and never on creation order or worker count.
"""

from __future__ import annotations

import enum
import hashlib
import math
import struct
import warnings
from dataclasses import dataclass

import numpy as np

from .alternatives import Alternative, CostDistribution
from .errors import ConvergenceWarning, DomainError, EstimationError, ParamError, UnsupportedDistributionError
from .welfare import WelfareFunction


#: Stopping tolerance used instead of the relative target when the estimate is ~0.
ABSOLUTE_STDERR_FLOOR = 1e-9
#: Draws taken before the first stopping test.
FIRST_BATCH = 1024

PURPOSE_COST_GOOD = 0
PURPOSE_COST_FAIL = 1


class EstimationMode(str, enum.Enum):
    EXACT_PREFERRED = "ExactPreferred"
    FORCE_MONTE_CARLO = "ForceMonteCarlo"


@dataclass(frozen=True)
class EstimationConfig:
    """How conditional expectations are computed.

    ``strict`` turns an unconverged Monte Carlo estimate into an
    :class:`EstimationError` instead of a :class:`ConvergenceWarning`.
    """

    mode: EstimationMode = EstimationMode.EXACT_PREFERRED
    max_samples: int = 100_000
    target_stderr: float = 1e-3
    seed: int = 0
    strict: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "mode", EstimationMode(self.mode))
        if isinstance(self.max_samples, bool) or not isinstance(self.max_samples, int) or self.max_samples < 2:
            raise ParamError(f"max_samples must be an integer >= 2, got {self.max_samples!r}")
        if not (isinstance(self.target_stderr, (int, float)) and self.target_stderr > 0):
            raise ParamError(f"target_stderr must be > 0, got {self.target_stderr!r}")
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ParamError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")


@dataclass(frozen=True)
class Estimate:
    value: float
    stderr: float
    samples_used: int
    exact: bool
    converged: bool = True


def stream_key(seed: int, label: str, purpose: int) -> int:
    """128-bit key of the stream for ``(seed, label, purpose)``."""
    payload = struct.pack("<QI", seed, purpose) + label.encode("utf-8")
    return int.from_bytes(hashlib.blake2b(payload, digest_size=16, person=b"safetymargin.v1").digest(), "little")


def split_stream(seed: int, label: str, purpose: int = 0) -> np.random.Generator:
    """Independent, reproducible PCG64 stream for ``(seed, label, purpose)``."""
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ParamError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    if not 0 <= purpose < 2**32:
        raise ParamError(f"purpose must fit in 32 bits, got {purpose!r}")
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(stream_key(seed, label, purpose))))


def _exact(dist: CostDistribution, w: WelfareFunction) -> Estimate:
    atoms = dist.atoms()
    social = w(np.array([v for v, _ in atoms]))
    value = math.fsum(p * float(s) for (_, p), s in zip(atoms, social))
    if not math.isfinite(value):
        raise EstimationError(f"non-finite expected social cost for {dist!r}")
    return Estimate(value, 0.0, 0, exact=True)


def _monte_carlo(dist: CostDistribution, w: WelfareFunction, cfg: EstimationConfig, rng: np.random.Generator) -> Estimate:
    n = 0
    mean = 0.0
    m2 = 0.0
    stderr = math.inf
    batch = min(FIRST_BATCH, cfg.max_samples)
    while True:
        x = w(dist.sample(rng, batch))
        if not np.all(np.isfinite(x)):
            raise EstimationError(f"welfare overflowed while sampling {dist!r}")
        # Chan et al. pairwise merge of running moments
        b_mean = float(x.mean())
        b_m2 = float(((x - b_mean) ** 2).sum())
        total = n + batch
        delta = b_mean - mean
        mean += delta * batch / total
        m2 += b_m2 + delta * delta * n * batch / total
        n = total
        stderr = math.sqrt(m2 / (n - 1) / n) if n > 1 else math.inf
        if stderr <= max(cfg.target_stderr * abs(mean), ABSOLUTE_STDERR_FLOOR):
            return Estimate(mean, stderr, n, exact=False, converged=True)
        if n >= cfg.max_samples:
            break
        batch = min(n, cfg.max_samples - n)

    msg = (
        f"{dist.kind}: stderr {stderr:.3g} above target "
        f"{cfg.target_stderr:.3g}*|{mean:.6g}| after {n} samples"
    )
    if cfg.strict:
        raise EstimationError(msg)
    warnings.warn(msg, ConvergenceWarning, stacklevel=3)
    return Estimate(mean, stderr, n, exact=False, converged=False)


def estimate_conditional(
    dist: CostDistribution,
    w: WelfareFunction,
    cfg: EstimationConfig | None = None,
    rng: np.random.Generator | None = None,
) -> Estimate:
    """Estimate ``E[w(C)]`` for ``C`` drawn from ``dist``.

    Finite-support laws are summed exactly unless the config forces Monte
    Carlo. When ``rng`` is omitted the stream is derived from ``cfg.seed``.

    Raises:
        DomainError: the law's support leaves the welfare domain.
        EstimationError: the estimate is non-finite, or strict mode and unconverged.
    """
    cfg = cfg or EstimationConfig()
    lo, _ = dist.support()
    if lo < w.domain_min:
        raise DomainError(f"{dist.kind} support starts at {lo}, below welfare domain {w.domain_min}")
    if dist.finite_support and cfg.mode is EstimationMode.EXACT_PREFERRED:
        return _exact(dist, w)
    if rng is None:
        rng = split_stream(cfg.seed, "", 0)
    return _monte_carlo(dist, w, cfg, rng)


def brute_force_expected_social_cost(a: Alternative, w: WelfareFunction) -> float:
    """Expected social cost by enumerating every ``(catastrophe, cost)`` outcome.

    Deliberately shares no code with the evaluation path: it walks the joint
    outcome space and accumulates probability-weighted welfare directly.
    """
    for dist in (a.cost_good, a.cost_fail):
        if not dist.finite_support:
            raise UnsupportedDistributionError(f"{dist.kind} is not finite-support")
    total = 0.0
    for bit, p_bit in ((0, 1.0 - a.p_cat), (1, a.p_cat)):
        dist = a.cost_fail if bit else a.cost_good
        for cost, p_cost in dist.atoms():
            total += p_bit * p_cost * w(cost)
    return total

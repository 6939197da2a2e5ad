"""Social welfare functions over lifecycle cost.

Welfare is expressed in the cost domain: ``w(c)`` is increasing in ``c`` and the
socially optimal alternative minimizes ``E[w(C)]``. A value-domain utility ``u``
maps onto this form through ``w(c) = -u(-c)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParamError


class Family(str, enum.Enum):
    LINEAR = "Linear"
    EXPONENTIAL = "Exponential"
    POWER = "Power"


@dataclass(frozen=True)
class WelfareFunction:
    """Increasing map from lifecycle cost to social cost.

    ``eval(c) = affine_scale * base(c) + affine_shift`` with ``base`` one of

    * Linear: ``c``
    * Exponential: ``(exp(a c) - 1) / a`` with ``a = risk_param > 0``
    * Power: ``c ** gamma`` with ``gamma = risk_param >= 1`` and ``c >= 0``
    """

    family: Family = Family.LINEAR
    risk_param: float = 0.0
    affine_scale: float = 1.0
    affine_shift: float = 0.0

    def __post_init__(self) -> None:
        try:
            family = Family(self.family)
        except ValueError:
            raise ParamError(f"unknown welfare family {self.family!r}") from None
        object.__setattr__(self, "family", family)
        for name in ("risk_param", "affine_scale", "affine_shift"):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ParamError(f"{name} must be a real number, got {value!r}")
            if not math.isfinite(value):
                raise ParamError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, float(value))
        if self.affine_scale <= 0:
            raise ParamError(f"affine_scale must be > 0, got {self.affine_scale}")
        if family is Family.EXPONENTIAL and self.risk_param <= 0:
            raise ParamError(f"Exponential welfare needs risk_param > 0, got {self.risk_param}")
        if family is Family.POWER and self.risk_param < 1:
            raise ParamError(f"Power welfare needs risk_param >= 1, got {self.risk_param}")

    @property
    def domain_min(self) -> float:
        """Smallest admissible cost."""
        return 0.0 if self.family is Family.POWER else -math.inf

    def _base(self, cost):
        if self.family is Family.LINEAR:
            return cost
        if self.family is Family.EXPONENTIAL:
            a = self.risk_param
            # expm1 keeps (exp(a c) - 1) / a accurate as a c -> 0
            return np.expm1(a * cost) / a
        return np.power(cost, self.risk_param)

    def __call__(self, cost):
        """Evaluate at a scalar or array of costs."""
        arr = np.asarray(cost, dtype=float)
        if self.family is Family.POWER and np.any(arr < 0):
            raise DomainError("Power welfare is defined only for cost >= 0")
        with np.errstate(over="ignore"):
            out = self.affine_scale * self._base(arr) + self.affine_shift
        if out.ndim == 0:
            return float(out)
        return out

    def affine(self, scale: float, shift: float) -> WelfareFunction:
        return affine_transform(self, scale, shift)


def eval_welfare(w: WelfareFunction, cost: float) -> float:
    """Social cost of a single lifecycle cost under ``w``."""
    return w(float(cost))


def affine_transform(w: WelfareFunction, scale: float, shift: float) -> WelfareFunction:
    """Return ``scale * w + shift``; ``scale`` must be positive."""
    if isinstance(scale, bool) or not isinstance(scale, (int, float)) or not scale > 0:
        raise ParamError(f"affine scale must be > 0, got {scale!r}")
    return WelfareFunction(
        family=w.family,
        risk_param=w.risk_param,
        affine_scale=scale * w.affine_scale,
        affine_shift=scale * w.affine_shift + shift,
    )


LINEAR = WelfareFunction()

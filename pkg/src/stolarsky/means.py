"""The Stolarsky mean family and its inverse in alpha.

For a != b the mean is

    S_alpha(a, b) = ((b**alpha - a**alpha) / (alpha * (b - a))) ** (1 / (alpha - 1))

with the logarithmic mean at alpha = 0, the identric mean at alpha = 1 and
S_alpha(a, a) = a. All branches are evaluated in log-ratio space by
:mod:`stolarsky._kernels`; see that module for the numerics.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .errors import DomainError, EvaluationOverflow, NotBracketed, OutOfRange

NEAR_SINGULAR = 1e-7
ALPHA_WINDOW = (-64.0, 64.0)
BISECTION_STEPS = 200


class Branch(enum.Enum):
    GENERIC = "generic"
    LOG = "log"
    IDENTRIC = "identric"
    NEAR_ZERO = "near-zero"
    NEAR_ONE = "near-one"


def classify(value: float) -> Branch:
    if value == 0.0:
        return Branch.LOG
    if value == 1.0:
        return Branch.IDENTRIC
    if abs(value) < NEAR_SINGULAR:
        return Branch.NEAR_ZERO
    if abs(value - 1.0) < NEAR_SINGULAR:
        return Branch.NEAR_ONE
    return Branch.GENERIC


@dataclass(frozen=True)
class Alpha:
    """The family parameter, tagged with its evaluation branch.

    The near-singular branches are informational: the kernel is accurate
    through alpha = 0 and alpha = 1 without switching formulas.
    """

    value: float
    branch: Branch = field(init=False, compare=False)

    def __post_init__(self):
        value = float(self.value)
        if not math.isfinite(value):
            raise DomainError(f"alpha must be finite, got {self.value!r}")
        object.__setattr__(self, "value", value)
        object.__setattr__(self, "branch", classify(value))

    @property
    def is_singular(self) -> bool:
        return self.branch in (Branch.LOG, Branch.IDENTRIC)

    def __float__(self):
        return self.value


def as_alpha(alpha) -> Alpha:
    return alpha if isinstance(alpha, Alpha) else Alpha(alpha)


@dataclass(frozen=True)
class Interval:
    """Positive endpoints stored in ascending order."""

    a: float
    b: float
    swapped: bool = field(init=False, default=False, compare=False)

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        for name, v in (("a", a), ("b", b)):
            if not (v > 0.0) or math.isinf(v):
                raise DomainError(f"endpoint {name} must be finite and > 0, got {v!r}")
        if a > b:
            a, b = b, a
            object.__setattr__(self, "swapped", True)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    @property
    def width(self) -> float:
        return self.b - self.a

    @property
    def degenerate(self) -> bool:
        return self.a == self.b


def as_interval(iv) -> Interval:
    if isinstance(iv, Interval):
        return iv
    a, b = iv
    return Interval(a, b)


def _checked(value: float, alpha: float, iv: Interval) -> float:
    if math.isnan(value):
        raise DomainError(f"S_{alpha}({iv.a}, {iv.b}) is undefined")
    if math.isinf(value):
        raise EvaluationOverflow(f"S_{alpha}({iv.a}, {iv.b}) overflowed")
    return value


def stolarsky_mean(alpha, iv) -> float:
    """S_alpha(a, b).

    >>> stolarsky_mean(2, (1, 3))
    2.0
    """
    alpha = as_alpha(alpha)
    iv = as_interval(iv)
    return _checked(_kernels.stolarsky_scalar(alpha.value, iv.a, iv.b), alpha.value, iv)


def logarithmic_mean(iv) -> float:
    """(b - a) / (log b - log a); same code path as ``stolarsky_mean(0, iv)``."""
    return stolarsky_mean(0.0, iv)


def identric_mean(iv) -> float:
    """exp((b log b - a log a)/(b - a)) / e; same path as ``stolarsky_mean(1, iv)``."""
    return stolarsky_mean(1.0, iv)


def stolarsky_mean_array(alpha, a, b, backend=None) -> np.ndarray:
    """Vectorized S_alpha(a, b) with numpy broadcasting.

    Invalid entries (non-positive or non-finite endpoints) come back as NaN
    rather than raising.
    """
    return _kernels.stolarsky_array(alpha, a, b, backend=backend)


def invert_alpha(iv, c: float, tol: float = 1e-12) -> Alpha:
    """Find alpha with S_alpha(a, b) = c by bisection over [-64, 64].

    ``tol`` bounds ``|S_alpha(a, b) - c| / max(1, |c|)``.

    Raises :class:`OutOfRange` if c is not strictly inside (a, b) and
    :class:`NotBracketed` if c is attained only outside the alpha window.
    """
    iv = as_interval(iv)
    c = float(c)
    if not (iv.a < c < iv.b):
        raise OutOfRange(f"c={c!r} is not inside the open interval ({iv.a}, {iv.b})")
    lo, hi = ALPHA_WINDOW
    value = _kernels.invert_scalar(iv.a, iv.b, c, lo, hi, BISECTION_STEPS)
    if math.isnan(value):
        raise NotBracketed(f"c={c!r} is not attained for alpha in [{lo}, {hi}]")
    achieved = stolarsky_mean(value, iv)
    if abs(achieved - c) > max(tol, 0.0) * max(1.0, abs(c)):
        raise NotBracketed(
            f"bisection stalled at alpha={value!r}: |S - c| = {abs(achieved - c):.3g}"
        )
    return Alpha(value)


def invert_alpha_array(a, b, c, backend=None) -> np.ndarray:
    """Vectorized inverse; NaN where c is outside the window or the interval."""
    a, b, c = (np.asarray(v, dtype=float) for v in np.broadcast_arrays(a, b, c))
    lo, hi = ALPHA_WINDOW
    out = _kernels.invert_array(
        np.minimum(a, b), np.maximum(a, b), c, lo, hi, BISECTION_STEPS, backend=backend
    )
    inside = (np.minimum(a, b) < c) & (c < np.maximum(a, b))
    return np.where(inside, out, np.nan)

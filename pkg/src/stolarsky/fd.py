"""Finite differences and Richardson order estimates used to validate
analytic derivatives."""

from __future__ import annotations

import math
from dataclasses import dataclass

EPS = 2.0**-52


def fd_step(x: float) -> float:
    """Default validation step: balances truncation against round-off."""
    return max(1e-5, 1e-5 * abs(x))


def central_difference(fn, x: float, h: float) -> float:
    return (fn(x + h) - fn(x - h)) / (2.0 * h)


@dataclass
class OrderEstimate:
    steps: list
    errors: list
    noise: list
    orders: list  # None where either error sits at the round-off floor

    @property
    def resolved(self) -> list:
        return [p for p in self.orders if p is not None]

    @property
    def exact(self) -> bool:
        """True when every difference is at round-off level (e.g. the
        difference quotient is exact for a quadratic)."""
        return not self.resolved

    @property
    def min_order(self) -> float | None:
        r = self.resolved
        return min(r) if r else None


def richardson_order(fn, deriv_value: float, x: float, h: float, levels: int = 4,
                     floor: float = 1000.0) -> OrderEstimate:
    """Observed order of the central difference of ``fn`` at ``x`` against an
    exact derivative value, halving ``h`` ``levels - 1`` times.

    An error counts as resolved only if it exceeds ``floor`` times the
    estimated round-off of the difference quotient.
    """
    steps, errors, noise = [], [], []
    for j in range(levels):
        hj = h / 2.0**j
        fp, fm = fn(x + hj), fn(x - hj)
        steps.append(hj)
        errors.append(abs((fp - fm) / (2.0 * hj) - deriv_value))
        noise.append(EPS * (abs(fp) + abs(fm) + abs(deriv_value) * hj) / hj)
    orders = []
    for j in range(levels - 1):
        e0, e1 = errors[j], errors[j + 1]
        if e0 > floor * noise[j] and e1 > floor * noise[j + 1]:
            orders.append(math.log2(e0 / e1))
        else:
            orders.append(None)
    return OrderEstimate(steps, errors, noise, orders)


def convergence_orders(diffs, ratio: float = 2.0) -> list:
    """log_ratio(d_k / d_{k+1}) for successive differences; None where a
    difference is zero."""
    out = []
    for d0, d1 in zip(diffs, diffs[1:]):
        if d0 > 0.0 and d1 > 0.0:
            out.append(math.log(d0 / d1, ratio))
        else:
            out.append(None)
    return out

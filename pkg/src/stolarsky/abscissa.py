"""Mean-value abscissas: points c in (a, b) with f'(c) equal to the secant
slope, located by a uniform grid scan refined with bisection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DegenerateFunction, DomainError, NoRootFound
from .means import as_alpha, as_interval, stolarsky_mean
from .solutions import _as_fn

DEFAULT_GRID = 256
DEFAULT_TOL = 1e-10
DEGENERATE_FRACTION = 0.9


@dataclass
class Scan:
    slope: float
    roots: list
    degenerate: bool
    bisection_steps: list = field(default_factory=list)
    grid_n: int = DEFAULT_GRID
    tol: float = DEFAULT_TOL


def max_bisection_steps(tol: float) -> int:
    return math.ceil(math.log2(1.0 / tol)) + 2


def _refine(g, lo, hi, glo, width_tol, bound):
    steps = 0
    while hi - lo > width_tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        gm = g(mid)
        steps += 1
        if gm == 0.0:
            return mid, steps
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
    c = 0.5 * (lo + hi)
    # keep halving until the residual bound holds or floats run out
    while abs(g(c)) > bound:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            return None, steps
        gm = g(mid)
        steps += 1
        if (gm < 0.0) == (glo < 0.0):
            lo, glo = mid, gm
        else:
            hi = mid
        c = 0.5 * (lo + hi)
    return c, steps


def scan(f, iv, grid_n: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> Scan:
    f = _as_fn(f)
    iv = as_interval(iv)
    if iv.a == iv.b:
        raise DomainError("mean-value abscissas need a < b")
    if grid_n < 8:
        raise ValueError(f"grid_n must be >= 8, got {grid_n}")
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    a, b = iv.a, iv.b
    width = b - a
    slope = (f.eval0(b) - f.eval0(a)) / width
    bound = tol * (1.0 + abs(slope))

    def g(x):
        return f.eval1(x) - slope

    xs = [a + width * i / grid_n for i in range(grid_n + 1)]
    xs[-1] = b
    gs = [g(x) for x in xs]

    if sum(abs(v) <= bound for v in gs) >= DEGENERATE_FRACTION * len(gs):
        return Scan(slope, [], True, [], grid_n, tol)

    roots, steps = [], []
    crossing = [False] * len(xs)
    for i in range(grid_n):
        g0, g1 = gs[i], gs[i + 1]
        if g0 == 0.0 and i > 0:
            roots.append(xs[i])
            crossing[i] = True
        elif g0 * g1 < 0.0:
            crossing[i] = crossing[i + 1] = True
            c, n = _refine(g, xs[i], xs[i + 1], g0, tol * width, bound)
            steps.append(n)
            if c is not None:
                roots.append(c)
    # tangential touches: interior grid minima of |g| within the bound
    for i in range(1, grid_n):
        if crossing[i] or abs(gs[i]) > bound:
            continue
        if abs(gs[i]) <= abs(gs[i - 1]) and abs(gs[i]) <= abs(gs[i + 1]):
            roots.append(xs[i])

    roots.sort()
    merged = []
    for r in roots:
        if merged and r - merged[-1] <= 10.0 * tol * width:
            continue
        merged.append(r)
    # independent re-check of every survivor
    merged = [c for c in merged if a < c < b and abs(g(c)) <= bound]
    return Scan(slope, merged, False, steps, grid_n, tol)


def mean_value_abscissas(f, iv, grid_n: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> list:
    """All c in (a, b) with |f'(c) - slope| <= tol (1 + |slope|), ascending.

    Raises :class:`DegenerateFunction` when f' matches the slope on nearly
    every grid point, and :class:`NoRootFound` when nothing was found. Roots
    where f' - slope touches zero without changing sign are only seen if a
    grid point lands within tolerance.
    """
    s = scan(f, iv, grid_n, tol)
    if s.degenerate:
        raise DegenerateFunction("f' equals the secant slope across the interval")
    if not s.roots:
        raise NoRootFound("no sign change of f' - slope and no grid point within tolerance")
    return s.roots


@dataclass
class AbscissaReport:
    alpha: float
    a: float
    b: float
    slope: float
    mean: float
    abscissas: list
    min_distance: float
    matches: bool
    degenerate: bool

    def as_dict(self):
        return dict(self.__dict__)


def abscissa_report(f, alpha, iv, grid_n: int = DEFAULT_GRID, tol: float = DEFAULT_TOL) -> AbscissaReport:
    alpha = as_alpha(alpha)
    iv = as_interval(iv)
    mean = stolarsky_mean(alpha, iv)
    s = scan(f, iv, grid_n, tol)
    if s.degenerate:
        # every point of (a, b) is an abscissa, the mean included
        return AbscissaReport(alpha.value, iv.a, iv.b, s.slope, mean, [], 0.0, True, True)
    if not s.roots:
        raise NoRootFound("no sign change of f' - slope and no grid point within tolerance")
    dist = min(abs(c - mean) for c in s.roots)
    return AbscissaReport(
        alpha.value, iv.a, iv.b, s.slope, mean, s.roots, dist,
        dist <= 10.0 * tol * (iv.b - iv.a), False,
    )

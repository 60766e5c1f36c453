"""Solution families of f(b) - f(a) = (b - a) f'(S_alpha(a, b)) and residuals
of that equation and of the reduced ODE f''' - ((alpha - 2)/t) f'' = 0."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import DomainError
from .expr import DifferentiableFn
from .means import Alpha, Branch, as_alpha, as_interval, stolarsky_mean, stolarsky_mean_array

MEMBERSHIP_POINTS = 32
MEMBERSHIP_THRESHOLD = 1e-7


@dataclass(frozen=True)
class SolutionFamily:
    """c1 x^alpha + c2 x + c3, or c1 x^alpha log x + c2 x + c3 for alpha in {0, 1}."""

    alpha: Alpha
    c1: float
    c2: float = 0.0
    c3: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "alpha", as_alpha(self.alpha))
        for name in ("c1", "c2", "c3"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @property
    def has_log(self) -> bool:
        return self.alpha.branch in (Branch.LOG, Branch.IDENTRIC)

    def __call__(self, x, order: int = 0):
        return family_eval(self, x, order)

    def scaled(self, k: float) -> "SolutionFamily":
        return SolutionFamily(self.alpha, k * self.c1, k * self.c2, k * self.c3)

    def as_function(self) -> DifferentiableFn:
        return DifferentiableFn(
            *(lambda x, n=n: family_eval(self, x, n) for n in range(4)),
            origin=self,
            label=str(self),
        )

    def __str__(self):
        a = self.alpha.value
        core = f"x^{a:g}*log(x)" if self.has_log else f"x^{a:g}"
        return f"{self.c1:g}*{core} + {self.c2:g}*x + {self.c3:g}"


def family_eval(fam: SolutionFamily, x, order: int = 0):
    """Closed-form f^(order)(x); accepts scalars or arrays."""
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0..3, got {order}")
    xa = np.asarray(x, dtype=float)
    if np.any(~(xa > 0.0)):
        raise DomainError("solution families are defined for x > 0 only")
    al, c1, c2, c3 = fam.alpha.value, fam.c1, fam.c2, fam.c3
    if fam.alpha.branch is Branch.LOG:
        out = (
            c1 * np.log(xa) + c2 * xa + c3,
            c1 / xa + c2,
            -c1 / xa**2,
            2.0 * c1 / xa**3,
        )[order]
    elif fam.alpha.branch is Branch.IDENTRIC:
        out = (
            c1 * xa * np.log(xa) + c2 * xa + c3,
            c1 * (np.log(xa) + 1.0) + c2,
            c1 / xa,
            -c1 / xa**2,
        )[order]
    else:
        if order == 0:
            out = c1 * xa**al + c2 * xa + c3
        elif order == 1:
            out = c1 * al * xa ** (al - 1.0) + c2
        elif order == 2:
            out = c1 * al * (al - 1.0) * xa ** (al - 2.0)
        else:
            out = c1 * al * (al - 1.0) * (al - 2.0) * xa ** (al - 3.0)
    out = np.asarray(out, dtype=float)
    return float(out) if out.ndim == 0 else out


def _as_fn(f) -> DifferentiableFn:
    return f.as_function() if isinstance(f, SolutionFamily) else f


def fde_residual(f, alpha, iv) -> float:
    """f(b) - f(a) - (b - a) f'(S_alpha(a, b))."""
    f = _as_fn(f)
    iv = as_interval(iv)
    s = stolarsky_mean(alpha, iv)
    return f.eval0(iv.b) - f.eval0(iv.a) - (iv.b - iv.a) * f.eval1(s)


def fde_scale(f, iv) -> float:
    f = _as_fn(f)
    iv = as_interval(iv)
    return 1.0 + abs(f.eval0(iv.a)) + abs(f.eval0(iv.b))


def relative_fde_residual(f, alpha, iv) -> float:
    return abs(fde_residual(f, alpha, iv)) / fde_scale(f, iv)


def ode_residual(f, alpha, t: float) -> float:
    """f'''(t) - ((alpha - 2)/t) f''(t)."""
    f = _as_fn(f)
    al = as_alpha(alpha).value
    if not t > 0:
        raise DomainError(f"t must be > 0, got {t!r}")
    return f.eval3(t) - (al - 2.0) / t * f.eval2(t)


def halton_pairs(n: int = MEMBERSHIP_POINTS, lo: float = 0.1, hi: float = 10.0):
    """Deterministic (a, b) pairs, log-uniform over (lo, hi)^2, a != b."""
    pts = qmc.Halton(d=2, scramble=False).random(n + 1)[1:]
    ab = lo * (hi / lo) ** pts
    return [(float(a), float(b)) for a, b in ab if a != b]


@dataclass
class Membership:
    member: bool
    max_relative_residual: float
    max_abs_residual: float
    witness: tuple


def membership(f, alpha, lo: float = 0.1, hi: float = 10.0,
               n: int = MEMBERSHIP_POINTS, threshold: float = MEMBERSHIP_THRESHOLD) -> Membership:
    """Aggregate the relative FDE residual over a Halton set of intervals.

    A single vanishing residual can be accidental, so ``member`` requires the
    maximum over all pairs to stay below ``threshold``.
    """
    f = _as_fn(f)
    worst, worst_abs, witness = -1.0, 0.0, None
    for a, b in halton_pairs(n, lo, hi):
        r = fde_residual(f, alpha, (a, b))
        rel = abs(r) / fde_scale(f, (a, b))
        worst_abs = max(worst_abs, abs(r))
        if rel > worst:
            worst, witness = rel, (a, b)
    return Membership(worst <= threshold, worst, worst_abs, witness)


# --- seeded sweep ------------------------------------------------------------------


@dataclass
class SweepRow:
    alpha: float
    trials: int
    max_fde: float
    max_ode: float
    fde_witness: dict
    ode_witness: dict

    def passes(self, tol: float) -> bool:
        return self.max_fde <= tol and self.max_ode <= tol


def _family_arrays(al, c, x, order):
    # vectorized family_eval over per-trial coefficients
    fam = SolutionFamily(al, 1.0)
    basis = family_eval(fam, x, order)
    lin = (x, np.ones_like(x), np.zeros_like(x), np.zeros_like(x))[order]
    const = np.ones_like(x) if order == 0 else np.zeros_like(x)
    return c[:, 0] * basis + c[:, 1] * lin + c[:, 2] * const


def sweep_families(alpha_grid, trials: int = 100, seed: int = 0,
                   coeff_range: float = 10.0, lo: float = 0.1, hi: float = 10.0,
                   backend=None) -> list[SweepRow]:
    """Max relative FDE and ODE residuals of random solution families.

    Randomness comes from ``numpy.random.Generator(PCG64(seed))``; for each
    alpha in order the draws are c (trials x 3) uniform in
    [-coeff_range, coeff_range], then a, b, t uniform in (lo, hi).
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    rows = []
    for al in alpha_grid:
        al = float(al)
        c = rng.uniform(-coeff_range, coeff_range, size=(trials, 3))
        a = rng.uniform(lo, hi, size=trials)
        b = rng.uniform(lo, hi, size=trials)
        t = rng.uniform(lo, hi, size=trials)
        b = np.where(a == b, np.nextafter(b, np.inf), b)
        s = stolarsky_mean_array(al, a, b, backend=backend)
        fa = _family_arrays(al, c, a, 0)
        fb = _family_arrays(al, c, b, 0)
        fde = (fb - fa - (b - a) * _family_arrays(al, c, s, 1)) / (1.0 + np.abs(fa) + np.abs(fb))
        f2 = _family_arrays(al, c, t, 2)
        f3 = _family_arrays(al, c, t, 3)
        ode = (f3 - (al - 2.0) / t * f2) / (1.0 + np.abs(f3))
        i, j = int(np.argmax(np.abs(fde))), int(np.argmax(np.abs(ode)))
        rows.append(SweepRow(
            alpha=al,
            trials=trials,
            max_fde=float(np.abs(fde[i])),
            max_ode=float(np.abs(ode[j])),
            fde_witness={"alpha": al, "c": c[i].tolist(), "a": float(a[i]), "b": float(b[i])},
            ode_witness={"alpha": al, "c": c[j].tolist(), "t": float(t[j])},
        ))
    return rows

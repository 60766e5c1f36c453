"""Numerical checks of why only the Stolarsky solution families work:
the implicit functions phi and g, the quantities R, S, T with their
small-r limits, and the reduction to f''' - ((alpha - 2)/t) f'' = 0.

Notation for fixed t > 0 and r > 0 (alpha not in {0, 1})::

    A   = ((r+t)^alpha - t^alpha) / (alpha r)       (= x0^(alpha-1))
    phi = A - t^(alpha-1)        psi = A - (r+t)^(alpha-1)
    D   = (r+t)^(alpha-1) - t^(alpha-1) = phi - psi

    R = (f''(r+t) phi^2 - f''(t) psi^2) / r^3
    S = (alpha/r^3) D phi + (alpha (alpha-1)/r^2) t^(alpha-2) psi
    T = ((alpha-1)/r^3) ((r+t)^(alpha-2) phi - t^(alpha-2) psi) - D^2/r^4

and for every r > 0 these satisfy

    (f'(r+t) - f'(t)) / (alpha r) = R/S - (f'(x0) - f'(t)) T/S.

phi, psi and D are O(r) and R, S, T are O(1) differences of O(1/r^k)
terms, so they are evaluated from binomial tails of (1 + r/t)^alpha rather
than from the raw powers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import _kernels
from .errors import BranchError, DegenerateDenominator, NotBracketed, PrecisionFloor
from .fd import EPS, OrderEstimate, convergence_orders, fd_step, richardson_order
from .means import Alpha, Branch, as_alpha, stolarsky_mean
from .solutions import _as_fn

SEARCH_FACTOR = 64.0
BISECTION_STEPS = 200
TINY_DENOMINATOR = 1e-300
FLOOR_RELATIVE_NOISE = 1e-6
FLOOR_MIN_K = 10
DEFAULT_KMAX = 16


def _generic(alpha) -> Alpha:
    alpha = as_alpha(alpha)
    if alpha.branch in (Branch.LOG, Branch.IDENTRIC):
        raise BranchError(
            f"alpha={alpha.value:g}: the implicit-function construction needs alpha not in {{0, 1}}"
        )
    return alpha


def _bisect(fn, lo, hi, what):
    flo, fhi = fn(lo), fn(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise NotBracketed(f"{what}: no sign change on [{lo:.6g}, {hi:.6g}]")
    for _ in range(BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


# --- the lemma: psi(x, y) and its implicit solution phi(x) ---------------------------


@dataclass(frozen=True)
class LemmaSetup:
    alpha: Alpha
    x0: float
    h0: float
    y0: float

    def psi(self, x, y):
        al, h0 = self.alpha.value, self.h0
        return (y + h0) ** al - y**al - al * h0 * x ** (al - 1.0)

    def psi_scale(self, x, y):
        al, h0 = self.alpha.value, self.h0
        return abs((y + h0) ** al) + abs(y**al) + abs(al * h0 * x ** (al - 1.0))

    def relative_residual(self, x, y):
        return abs(self.psi(x, y)) / self.psi_scale(x, y)


def seed_factor(alpha) -> float:
    """((2^alpha - 1)/alpha)^(1/(1-alpha))."""
    al = _generic(alpha).value
    return math.exp(math.log(math.expm1(al * math.log(2.0)) / al) / (1.0 - al))


def lemma_seed(alpha, x0: float) -> LemmaSetup:
    """The seed y0 = h0 = ((2^alpha - 1)/alpha)^(1/(1-alpha)) x0, for which
    psi(x0, y0) = 0."""
    alpha = _generic(alpha)
    if not x0 > 0:
        raise ValueError(f"x0 must be > 0, got {x0!r}")
    h0 = seed_factor(alpha) * x0
    return LemmaSetup(alpha, float(x0), h0, h0)


def solve_phi(setup: LemmaSetup, x: float) -> float:
    """phi(x): the root y of psi(x, y) = 0 in (0, 64 y0]."""
    lo = setup.y0 * 1e-12
    hi = SEARCH_FACTOR * setup.y0
    return _bisect(lambda y: setup.psi(x, y), lo, hi, f"phi({x:g})")


def phi_derivative(setup: LemmaSetup, x: float, phi_x: float) -> float:
    """(alpha-1) h0 x^(alpha-2) / ((phi+h0)^(alpha-1) - phi^(alpha-1))."""
    al, h0 = setup.alpha.value, setup.h0
    den = (phi_x + h0) ** (al - 1.0) - phi_x ** (al - 1.0)
    if abs(den) < TINY_DENOMINATOR:
        raise DegenerateDenominator(f"phi'({x:g}): denominator {den!r}")
    return (al - 1.0) * h0 * x ** (al - 2.0) / den


# --- g(h) from Psi(h, y) = (y+h)^alpha - y^alpha - alpha h x0^(alpha-1) ------------------


def big_psi(alpha, x0: float, h: float, y: float) -> float:
    al = as_alpha(alpha).value
    return (y + h) ** al - y**al - al * h * x0 ** (al - 1.0)


def big_psi_scale(alpha, x0, h, y):
    al = as_alpha(alpha).value
    return abs((y + h) ** al) + abs(y**al) + abs(al * h * x0 ** (al - 1.0))


def solve_g(alpha, x0: float, r: float, t: float, h: float) -> float:
    """g(h): the root y of Psi(h, y) = 0 in (0, 64 t]; g(r) = t when
    x0 = S_alpha(t, t + r)."""
    alpha = _generic(alpha)
    return _bisect(lambda y: big_psi(alpha, x0, h, y), t * 1e-12, SEARCH_FACTOR * t, f"g({h:g})")


def g_derivative(alpha, h: float, g_h: float) -> float:
    """g'(h) = (1/(alpha h)) ((g+h)^alpha - g^alpha - alpha h (g+h)^(alpha-1))
    / ((g+h)^(alpha-1) - g^(alpha-1)), evaluated as psi(h, g) / D(h, g)."""
    al = _generic(alpha).value
    p = _pieces(al, h, g_h)
    if abs(p.D) < TINY_DENOMINATOR:
        raise DegenerateDenominator(f"g'({h:g}): denominator {p.D!r}")
    return p.psi / p.D


def implicit_slope(alpha, x0: float, h: float, y: float) -> float:
    """-(dPsi/dh)/(dPsi/dy) at (h, y)."""
    al = as_alpha(alpha).value
    d_h = al * (y + h) ** (al - 1.0) - al * x0 ** (al - 1.0)
    d_y = al * ((y + h) ** (al - 1.0) - y ** (al - 1.0))
    return -d_h / d_y


# --- R, S, T --------------------------------------------------------------------------


@dataclass(frozen=True)
class _Pieces:
    phi: float
    psi: float
    D: float
    D2: float  # D - (alpha-1) r t^(alpha-2)
    phi_plus_psi: float
    E2: float  # (1 + r/t)^(alpha-2) - 1
    x0: float


def _pieces(al: float, r: float, t: float) -> _Pieces:
    rho = r / t
    w = math.log1p(rho)
    tp = math.exp((al - 1.0) * math.log(t))
    phi_hat = _kernels.binomial_tail(al, rho, 2) / (al * rho)
    d_hat = math.expm1((al - 1.0) * w)
    d2_hat = _kernels.binomial_tail(al - 1.0, rho, 2)
    sum_hat = 2.0 * _kernels.binomial_tail(al, rho, 3) / (al * rho) - d2_hat
    x0 = t * math.exp(math.log1p(phi_hat) / (al - 1.0))
    return _Pieces(
        phi=tp * phi_hat,
        psi=tp * (phi_hat - d_hat),
        D=tp * d_hat,
        D2=tp * d2_hat,
        phi_plus_psi=tp * sum_hat,
        E2=math.expm1((al - 2.0) * w),
        x0=x0,
    )


@dataclass(frozen=True)
class RstPoint:
    r: float
    t: float
    phi: float
    psi: float
    R: float
    S: float
    T: float
    x0: float
    noise_R: float = 0.0
    noise_S: float = 0.0
    noise_T: float = 0.0


def rst_terms(alpha, f, r: float, t: float) -> RstPoint:
    al = _generic(alpha).value
    f = _as_fn(f)
    p = _pieces(al, r, t)
    lin = (al - 1.0) * r * math.exp((al - 2.0) * math.log(t))  # (alpha-1) r t^(alpha-2)
    f2_rt, f2_t = f.eval2(r + t), f.eval2(t)
    r3, r4 = r**3, r**4

    r_a = (f2_rt - f2_t) * p.phi**2
    r_b = f2_t * p.D * p.phi_plus_psi
    s_a = lin * p.phi_plus_psi
    s_b = p.D2 * p.phi
    t_a = -p.D * p.D2
    t_b = lin * p.E2 * p.phi
    k = 16.0 * EPS
    return RstPoint(
        r=r, t=t, phi=p.phi, psi=p.psi,
        R=(r_a + r_b) / r3,
        S=al * (s_a + s_b) / r3,
        T=(t_a + t_b) / r4,
        x0=p.x0,
        noise_R=k * ((abs(f2_rt) + abs(f2_t)) * p.phi**2 + abs(r_b)) / r3,
        noise_S=k * abs(al) * (abs(s_a) + abs(s_b)) / r3,
        noise_T=k * (abs(t_a) + abs(t_b)) / r4,
    )


def rst_leading(alpha, f, t: float) -> tuple:
    """Limits (R0, S0, T0) of R, S, T as r -> 0."""
    al = _generic(alpha).value
    f = _as_fn(f)
    c = (al - 1.0) ** 2
    R0 = c / 4.0 * t ** (2 * al - 4) * f.eval3(t) - c * (al - 2.0) / 6.0 * t ** (2 * al - 5) * f.eval2(t)
    S0 = al * c * (al - 2.0) / 12.0 * t ** (2 * al - 5)
    T0 = -c * (al - 2.0) / 12.0 * t ** (2 * al - 6)
    return R0, S0, T0


# --- tabulation as r -> 0 --------------------------------------------------------------


@dataclass
class ConvergenceRow:
    k: int
    r: float
    R: float
    S: float
    T: float
    dR: float
    dS: float
    dT: float
    x0: float
    x0_gap: float
    T_over_S: float
    lhs: float
    rhs: float
    identity_residual: float  # the R/S/T identity, relative
    chain_residual: float  # f'(r+t)(1+g') - f'(t) g' - f'(x0), relative
    ode_estimate: float
    noisy: bool


@dataclass
class ConvergenceReport:
    alpha: float
    t: float
    R0: float
    S0: float
    T0: float
    T_over_S_limit: float
    rows: list
    orders: dict
    decreasing: dict
    best_k: int
    floor_k: int | None
    x0_decreasing: bool
    x0_constant: float
    limiting_ode_residual: float
    direct_ode_residual: float
    max_identity_residual: float = field(default=0.0)
    max_chain_residual: float = field(default=0.0)

    def passes(self, identity_tol: float = 1e-7, ode_tol: float = 1e-6) -> bool:
        return (
            all(self.decreasing.values())
            and self.x0_decreasing
            and self.max_identity_residual <= identity_tol
            and self.max_chain_residual <= identity_tol
            and abs(self.limiting_ode_residual) <= ode_tol
        )


def _nonincreasing(diffs, noise):
    for j in range(1, len(diffs)):
        if diffs[j] >= diffs[j - 1] and diffs[j] > noise[j]:
            return False
    return True


def asymptotic_convergence(alpha, f, t: float = 1.0, kmax: int = DEFAULT_KMAX, kmin: int = 4) -> ConvergenceReport:
    """Tabulate R, S, T at r = 2^-k against their limits, check the R/S/T
    identity and the differentiated identity at every k, and extrapolate the
    ODE residual 4 (R - S lhs) / ((alpha-1)^2 t^(2 alpha - 4)) to r = 0.

    alpha = 2 is refused: S and T vanish identically there, so R/S is 0/0.
    Raises :class:`PrecisionFloor` when round-off exceeds
    ``FLOOR_RELATIVE_NOISE`` before k = ``FLOOR_MIN_K``.
    """
    alpha = _generic(alpha)
    al = alpha.value
    if al == 2.0:
        raise BranchError("alpha=2: S and T vanish identically, so the R/S limit is 0/0")
    if kmax <= kmin:
        raise ValueError("kmax must exceed kmin")
    f = _as_fn(f)
    R0, S0, T0 = rst_leading(alpha, f, t)
    f1_t = f.eval1(t)
    ode_scale = (al - 1.0) ** 2 * t ** (2 * al - 4)

    rows, noise = [], {"R": [], "S": [], "T": [], "x0": []}
    floor_k = None
    for k in range(kmin, kmax + 1):
        r = 2.0**-k
        pt = rst_terms(alpha, f, r, t)
        f1_rt, f1_x0 = f.eval1(r + t), f.eval1(pt.x0)
        lhs = (f1_rt - f1_t) / (al * r)
        rhs = pt.R / pt.S - (f1_x0 - f1_t) * pt.T / pt.S
        gp = g_derivative(alpha, r, t)
        chain = f1_rt * (1.0 + gp) - f1_t * gp
        rel_noise = max(
            pt.noise_R / (abs(R0) + abs(pt.R) + 1e-300),
            pt.noise_S / (abs(S0) + abs(pt.S)),
            pt.noise_T / (abs(T0) + abs(pt.T)),
        )
        noisy = rel_noise > FLOOR_RELATIVE_NOISE
        if noisy and floor_k is None:
            floor_k = k
        rows.append(ConvergenceRow(
            k=k, r=r, R=pt.R, S=pt.S, T=pt.T,
            dR=abs(pt.R - R0), dS=abs(pt.S - S0), dT=abs(pt.T - T0),
            x0=pt.x0, x0_gap=abs(pt.x0 - t), T_over_S=pt.T / pt.S,
            lhs=lhs, rhs=rhs,
            identity_residual=abs(lhs - rhs) / max(1.0, abs(lhs)),
            chain_residual=abs(chain - f1_x0) / max(1.0, abs(f1_x0)),
            ode_estimate=4.0 * (pt.R - pt.S * lhs) / ode_scale,
            noisy=noisy,
        ))
        noise["R"].append(pt.noise_R)
        noise["S"].append(pt.noise_S)
        noise["T"].append(pt.noise_T)
        noise["x0"].append(4.0 * EPS * t)

    good = [row for row in rows if not row.noisy]
    best_k = good[-1].k if good else kmin - 1
    if floor_k is not None and floor_k < FLOOR_MIN_K:
        raise PrecisionFloor(
            f"round-off dominates from k={floor_k}", best_k=best_k,
            report=rows,
        )
    n_good = len(good)
    series = {q: [getattr(row, "d" + q) for row in good] for q in ("R", "S", "T")}
    orders = {
        q: convergence_orders([d if d > nz else 0.0 for d, nz in zip(series[q], noise[q])])
        for q in series
    }
    decreasing = {q: _nonincreasing(series[q], noise[q][:n_good]) for q in series}
    gaps = [row.x0_gap for row in good]
    x0_dec = _nonincreasing(gaps, noise["x0"][:n_good]) and all(g2 < g1 for g1, g2 in zip(gaps, gaps[1:]))
    x0_c = max(row.x0_gap / (t * row.r) for row in good) if good else math.nan
    if n_good >= 2:
        limit = 2.0 * good[-1].ode_estimate - good[-2].ode_estimate
    else:
        limit = good[-1].ode_estimate if good else math.nan
    return ConvergenceReport(
        alpha=al, t=t, R0=R0, S0=S0, T0=T0, T_over_S_limit=-1.0 / (al * t),
        rows=rows, orders=orders, decreasing=decreasing,
        best_k=best_k, floor_k=floor_k,
        x0_decreasing=x0_dec, x0_constant=x0_c,
        limiting_ode_residual=limit,
        direct_ode_residual=f.eval3(t) - (al - 2.0) / t * f.eval2(t),
        max_identity_residual=max((row.identity_residual for row in good), default=math.nan),
        max_chain_residual=max((row.chain_residual for row in good), default=math.nan),
    )


# --- implicit-function checks bundled for reporting ---------------------------------------


@dataclass
class DerivativeCheck:
    point: float
    analytic: float
    finite_difference: float
    relative_error: float
    order: OrderEstimate

    @property
    def min_order(self):
        return self.order.min_order


def check_phi(setup: LemmaSetup, x: float, h: float | None = None) -> DerivativeCheck:
    y = solve_phi(setup, x)
    exact = phi_derivative(setup, x, y)
    fn = lambda z: solve_phi(setup, z)  # noqa: E731
    step = fd_step(x)
    fd = (fn(x + step) - fn(x - step)) / (2.0 * step)
    est = richardson_order(fn, exact, x, h if h is not None else 0.02 * setup.x0)
    return DerivativeCheck(x, exact, fd, abs(fd - exact) / max(abs(exact), 1e-300), est)


def check_g(alpha, x0: float, r: float, t: float, h: float, step: float | None = None) -> DerivativeCheck:
    y = solve_g(alpha, x0, r, t, h)
    exact = g_derivative(alpha, h, y)
    fn = lambda z: solve_g(alpha, x0, r, t, z)  # noqa: E731
    s = fd_step(h)
    fd = (fn(h + s) - fn(h - s)) / (2.0 * s)
    est = richardson_order(fn, exact, h, step if step is not None else 0.02 * r)
    return DerivativeCheck(h, exact, fd, abs(fd - exact) / max(abs(exact), 1e-300), est)


@dataclass
class ImplicitReport:
    alpha: float
    x0: float
    h0: float
    seed_residual: float
    phi_residuals: list
    phi_checks: list
    g_r: float
    g_t: float
    g_x0: float
    g_residuals: list
    g_checks: list
    partial_mismatch: float

    def passes(self, residual_tol=1e-12, fd_tol=1e-6, min_order=1.8, partial_tol=1e-10) -> bool:
        checks = self.phi_checks + self.g_checks
        return (
            self.seed_residual <= residual_tol
            and max(self.phi_residuals) <= residual_tol
            and max(self.g_residuals) <= residual_tol
            and all(c.relative_error <= fd_tol for c in checks)
            and all(c.min_order is None or c.min_order >= min_order for c in checks)
            and self.partial_mismatch <= partial_tol
        )


def implicit_checks(alpha, x0: float = 1.0, offsets=(-0.05, -0.02, 0.0, 0.03, 0.06)) -> ImplicitReport:
    """Seed residual, implicit-solver residuals and derivative-vs-difference
    checks for phi around x0 and for g around r = x0/2 with t = x0."""
    alpha = _generic(alpha)
    setup = lemma_seed(alpha, x0)
    xs = [x0 * (1.0 + d) for d in offsets]
    phi_res = [setup.relative_residual(x, solve_phi(setup, x)) for x in xs]
    phi_checks = [check_phi(setup, x) for x in xs]

    t, r = x0, 0.5 * x0
    gx0 = stolarsky_mean(alpha, (t, t + r))
    hs = [r * (1.0 + d) for d in offsets]
    g_res, g_checks, mismatch = [], [], 0.0
    for h in hs:
        y = solve_g(alpha, gx0, r, t, h)
        g_res.append(abs(big_psi(alpha, gx0, h, y)) / big_psi_scale(alpha, gx0, h, y))
        g_checks.append(check_g(alpha, gx0, r, t, h))
        gd, sl = g_derivative(alpha, h, y), implicit_slope(alpha, gx0, h, y)
        mismatch = max(mismatch, abs(gd - sl) / max(abs(sl), 1e-300))
    return ImplicitReport(
        alpha=alpha.value, x0=x0, h0=setup.h0,
        seed_residual=setup.relative_residual(x0, setup.y0),
        phi_residuals=phi_res, phi_checks=phi_checks,
        g_r=r, g_t=t, g_x0=gx0, g_residuals=g_res, g_checks=g_checks,
        partial_mismatch=mismatch,
    )

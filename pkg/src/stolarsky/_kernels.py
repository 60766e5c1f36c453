"""Hot numeric kernels.

Every scalar kernel here is written against :mod:`math` so that it runs
unchanged under ``numba.njit`` or as plain Python. The array entry points
dispatch to an njit loop over the scalar kernel, or to a vectorized numpy
implementation of the same algorithm when numba is disabled.

The Stolarsky mean is evaluated as ``a * exp(L)`` with ``u = log(b/a)`` and

    L = log(S/a) = (E(alpha*u) - E(u)) / (alpha - 1),  E(x) = log(expm1(x)/x)

Near ``alpha = 1`` the quotient above loses ``1/|alpha - 1|`` digits, so for
``|alpha - 1| < 0.5`` we instead use

    L = log1p((e^u expm1(d u) - d expm1(u)) / (alpha expm1(u))) / d,  d = alpha - 1

which carries no cancellation in ``d``. alpha = 2 and alpha = -1 use the
arithmetic and geometric means directly. For ``max(1, |alpha|) * u`` small the
even power series of ``E`` gives ``L`` directly.
"""

import math

import numpy as np

from ._backend import USE_NUMBA, jit

SERIES_CUT = 0.05
LOG_OVERFLOW = 700.0

# log(sinh(y)/y) with y = x/2, coefficients of x^2, x^4, ..., x^10
_E_COEFFS = (
    1.0 / 24.0,
    -1.0 / 2880.0,
    1.0 / 181440.0,
    -1.0 / 9676800.0,
    1.0 / 479001600.0,
)


@jit
def log_expm1_ratio(x):
    """log(expm1(x)/x), finite for every finite x."""
    if x == 0.0:
        return 0.0
    if x > 30.0:
        return x - math.log(x) + math.log1p(-math.exp(-x))
    if x < -30.0:
        return math.log1p(-math.exp(x)) - math.log(-x)
    return math.log(math.expm1(x) / x)


@jit
def _series_log_ratio(alpha, u):
    # sum_k c_k u^{2k} (alpha^{2k} - 1)/(alpha - 1), the quotient expanded as a
    # geometric sum so that alpha near 1 costs nothing
    u2 = u * u
    upow = 1.0
    apow = 1.0
    psum = 0.0
    total = 0.5 * u
    for k in range(5):
        psum += apow
        apow *= alpha
        psum += apow
        apow *= alpha
        upow *= u2
        total += _E_COEFFS[k] * upow * psum
    return total


@jit
def log_mean_ratio(alpha, u):
    """log(S_alpha(1, e^u)) for u > 0 and alpha != 0."""
    big = max(1.0, abs(alpha))
    if big * u <= SERIES_CUT:
        return _series_log_ratio(alpha, u)
    if alpha == 1.0:
        return u / -math.expm1(-u) - 1.0
    d = alpha - 1.0
    if abs(d) < 0.5 and u < 600.0:
        em = math.expm1(u)
        x = (math.exp(u) * math.expm1(d * u) - d * em) / (alpha * em)
        return math.log1p(x) / d
    return (log_expm1_ratio(alpha * u) - log_expm1_ratio(u)) / d


@jit
def log_gap(lo, hi):
    q = (hi - lo) / lo
    if math.isinf(q):
        return math.log(hi) - math.log(lo)
    return math.log1p(q)


@jit
def geometric_mean(a, b):
    p = a * b
    if p > 1e-300 and not math.isinf(p):
        return math.sqrt(p)
    return math.sqrt(a) * math.sqrt(b)


@jit
def stolarsky_scalar(alpha, a, b):
    """S_alpha(a, b); NaN on invalid endpoints."""
    if not (a > 0.0 and b > 0.0) or math.isinf(a) or math.isinf(b):
        return math.nan
    if math.isnan(alpha) or math.isinf(alpha):
        return math.nan
    if a > b:
        a, b = b, a
    if a == b:
        return a
    if alpha == 2.0:
        return 0.5 * a + 0.5 * b
    if alpha == -1.0:
        return geometric_mean(a, b)
    u = log_gap(a, b)
    if alpha == 0.0:
        return (b - a) / u
    r = log_mean_ratio(alpha, u)
    if r < LOG_OVERFLOW:
        return a * math.exp(r)
    return math.exp(math.log(a) + r)


@jit
def invert_scalar(a, b, c, lo, hi, iters):
    """Bisection in alpha for S_alpha(a, b) = c. NaN when c is outside the
    window [S_lo, S_hi]."""
    s_lo = stolarsky_scalar(lo, a, b)
    s_hi = stolarsky_scalar(hi, a, b)
    if not (s_lo <= c <= s_hi):
        return math.nan
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        s = stolarsky_scalar(mid, a, b)
        if s < c:
            lo = mid
            s_lo = s
        else:
            hi = mid
            s_hi = s
    if c - s_lo <= s_hi - c:
        return lo
    return hi


@jit
def binomial_tail(alpha, rho, m):
    """sum_{n >= m} C(alpha, n) rho^n for 0 <= rho, i.e. (1+rho)^alpha minus
    its first m binomial terms, without cancellation for small rho."""
    if rho <= 0.5:
        term = 1.0
        total = 0.0
        n = 0
        while n < 2000:
            if n >= m:
                total += term
                if abs(term) <= 1e-18 * abs(total) or term == 0.0:
                    break
            n += 1
            term *= (alpha - n + 1.0) * rho / n
        return total
    total = math.exp(alpha * math.log1p(rho))
    term = 1.0
    for n in range(m):
        total -= term
        term *= (alpha - n) * rho / (n + 1.0)
    return total


@jit
def _stolarsky_loop(alpha, a, b, out):
    for i in range(out.size):
        out[i] = stolarsky_scalar(alpha[i], a[i], b[i])


@jit
def _invert_loop(a, b, c, lo, hi, iters, out):
    for i in range(out.size):
        out[i] = invert_scalar(a[i], b[i], c[i], lo, hi, iters)


# --- pure numpy path ---------------------------------------------------------


def _log_expm1_ratio_np(x):
    with np.errstate(all="ignore"):
        return np.select(
            [x == 0.0, x > 30.0, x < -30.0],
            [
                0.0,
                x - np.log(x) + np.log1p(-np.exp(-x)),
                np.log1p(-np.exp(x)) - np.log(-x),
            ],
            np.log(np.expm1(x) / x),
        )


def _series_log_ratio_np(alpha, u):
    u2 = u * u
    upow = np.ones_like(u)
    apow = np.ones_like(alpha)
    psum = np.zeros_like(alpha)
    total = 0.5 * u
    for coeff in _E_COEFFS:
        psum = psum + apow
        apow = apow * alpha
        psum = psum + apow
        apow = apow * alpha
        upow = upow * u2
        total = total + coeff * upow * psum
    return total


def stolarsky_numpy(alpha, a, b):
    alpha, a, b = (np.array(v, dtype=float) for v in np.broadcast_arrays(alpha, a, b))
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    with np.errstate(all="ignore"):
        q = (hi - lo) / lo
        u = np.where(np.isinf(q), np.log(hi) - np.log(lo), np.log1p(q))
        d = alpha - 1.0
        em = np.expm1(u)
        near_one = np.log1p((np.exp(u) * np.expm1(d * u) - d * em) / (alpha * em)) / d
        generic = (_log_expm1_ratio_np(alpha * u) - _log_expm1_ratio_np(u)) / d
        r = np.select(
            [
                np.maximum(1.0, np.abs(alpha)) * u <= SERIES_CUT,
                alpha == 1.0,
                (np.abs(d) < 0.5) & (u < 600.0),
            ],
            [_series_log_ratio_np(alpha, u), u / -np.expm1(-u) - 1.0, near_one],
            generic,
        )
        s = np.where(r < LOG_OVERFLOW, lo * np.exp(r), np.exp(np.log(lo) + r))
        s = np.where(alpha == 0.0, (hi - lo) / u, s)
        s = np.where(alpha == 2.0, 0.5 * lo + 0.5 * hi, s)
        p = lo * hi
        geo = np.where((p > 1e-300) & np.isfinite(p), np.sqrt(p), np.sqrt(lo) * np.sqrt(hi))
        s = np.where(alpha == -1.0, geo, s)
        s = np.where(hi == lo, lo, s)
        ok = (lo > 0.0) & np.isfinite(hi) & np.isfinite(alpha)
        return np.where(ok, s, np.nan)


def invert_numpy(a, b, c, lo, hi, iters):
    a, b, c = (np.array(v, dtype=float) for v in np.broadcast_arrays(a, b, c))
    lo_a = np.full(a.shape, float(lo))
    hi_a = np.full(a.shape, float(hi))
    s_lo = stolarsky_numpy(lo_a, a, b)
    s_hi = stolarsky_numpy(hi_a, a, b)
    valid = (s_lo <= c) & (c <= s_hi)
    for _ in range(iters):
        mid = 0.5 * (lo_a + hi_a)
        moving = (mid != lo_a) & (mid != hi_a)
        if not moving.any():
            break
        s = stolarsky_numpy(mid, a, b)
        below = moving & (s < c)
        above = moving & ~(s < c)
        lo_a = np.where(below, mid, lo_a)
        s_lo = np.where(below, s, s_lo)
        hi_a = np.where(above, mid, hi_a)
        s_hi = np.where(above, s, s_hi)
    out = np.where(c - s_lo <= s_hi - c, lo_a, hi_a)
    return np.where(valid, out, np.nan)


# --- array entry points -------------------------------------------------------


def stolarsky_array(alpha, a, b, backend=None):
    """Elementwise S_alpha(a, b) over broadcast arrays."""
    use_jit = USE_NUMBA if backend is None else backend == "numba"
    if not use_jit:
        return stolarsky_numpy(alpha, a, b)
    alpha, a, b = (np.array(v, dtype=float) for v in np.broadcast_arrays(alpha, a, b))
    out = np.empty(a.shape)
    _stolarsky_loop(alpha.ravel(), a.ravel(), b.ravel(), out.reshape(-1))
    return out


def invert_array(a, b, c, lo, hi, iters, backend=None):
    use_jit = USE_NUMBA if backend is None else backend == "numba"
    if not use_jit:
        return invert_numpy(a, b, c, lo, hi, iters)
    a, b, c = (np.array(v, dtype=float) for v in np.broadcast_arrays(a, b, c))
    out = np.empty(a.shape)
    _invert_loop(a.ravel(), b.ravel(), c.ravel(), float(lo), float(hi), int(iters), out.reshape(-1))
    return out

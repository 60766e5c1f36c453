import math

import numpy as np
import pytest

from stolarsky import (
    DegenerateFunction,
    NoRootFound,
    SolutionFamily,
    abscissa_report,
    mean_value_abscissas,
    stolarsky_mean,
)
from stolarsky.abscissa import max_bisection_steps, scan
from stolarsky.expr import DifferentiableFn


def fn(text):
    return DifferentiableFn.from_expr(text)


class TestAbscissas:
    def test_square(self):
        (c,) = mean_value_abscissas(fn("x^2"), (1, 3))
        assert c == pytest.approx(2.0, abs=1e-9)

    def test_reciprocal_plus_linear(self):
        (c,) = mean_value_abscissas(fn("1/x + 5*x - 7"), (1, 4))
        assert c == pytest.approx(2.0, abs=1e-9)

    def test_log(self):
        (c,) = mean_value_abscissas(fn("log(x)"), (1, math.e))
        assert c == pytest.approx(math.e - 1, abs=1e-9)

    def test_several_roots(self):
        # sin-free oscillation: f' - slope = (x-1.5)(x-2.5)(x-3.5) style cubic
        f = fn("x^4/4 - 2.5*x^3 + 8.75*x^2/1 - 13.125*x")
        roots = mean_value_abscissas(f, (1, 4))
        assert len(roots) == 3

    def test_soundness(self):
        f = fn("exp(x) + 1/x")
        iv = (0.3, 2.5)
        s = scan(f, iv)
        for c in s.roots:
            assert abs(f.eval1(c) - s.slope) <= 1e-10 * (1 + abs(s.slope))

    def test_degenerate(self):
        with pytest.raises(DegenerateFunction):
            mean_value_abscissas(SolutionFamily(2, 0, 3, 1).as_function(), (1, 2))

    def test_no_root_within_unreachable_tolerance(self):
        # the crossing exists but no double gets f' - slope below 1e-20
        with pytest.raises(NoRootFound):
            mean_value_abscissas(fn("x^3"), (1, 2.3), tol=1e-20)

    def test_step_bound(self):
        tol = 1e-10
        s = scan(fn("x^3 + x"), (0.5, 9.0), tol=tol)
        assert s.bisection_steps
        assert max(s.bisection_steps) <= max_bisection_steps(tol)

    def test_invalid(self):
        with pytest.raises(ValueError):
            scan(fn("x^2"), (1, 2), grid_n=2)
        with pytest.raises(ValueError):
            scan(fn("x^2"), (1, 2), tol=0.0)


class TestReport:
    def test_geometric_mean_family(self):
        rep = abscissa_report(SolutionFamily(-1, 1, 1, 0), -1, (1, 4))
        assert rep.matches
        assert rep.min_distance <= 1e-8

    def test_cube_is_not_a_match(self):
        rep = abscissa_report(fn("x^3"), 2, (1, 2))
        assert not rep.matches
        (c,) = rep.abscissas
        assert c == pytest.approx(math.sqrt(7 / 3), abs=1e-9)

    def test_affine_is_degenerate(self):
        rep = abscissa_report(SolutionFamily(0.5, 0, 2, 1), 0.5, (1, 5))
        assert rep.degenerate and rep.matches

    @pytest.mark.parametrize("alpha", [-3.0, -1.0, 0.0, 0.5, 1.0, 2.0, 3.0])
    def test_own_alpha_gives_unique_match(self, alpha):
        rng = np.random.Generator(np.random.PCG64(21))
        for _ in range(10):
            c1 = rng.choice([-1, 1]) * rng.uniform(0.5, 10)
            fam = SolutionFamily(alpha, c1, *rng.uniform(-10, 10, 2))
            a, b = sorted(rng.uniform(0.1, 10, 2))
            rep = abscissa_report(fam, alpha, (a, b), grid_n=64)
            assert len(rep.abscissas) == 1
            assert abs(rep.abscissas[0] - stolarsky_mean(alpha, (a, b))) <= 10 * 1e-10 * (b - a)

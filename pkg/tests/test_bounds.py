import math

import numpy as np
import pytest

from pointreg.bounds import (GeometryParams, alpha_m, assumption3_check,
                             eta_bound, failure_probability, r_bounds,
                             r_difference_bound)

# generous geometry so only the clauses under test bind
WIDE = GeometryParams(m=2, R=1.0, i0=math.pi, K_curv=1.0, p_min=0.05,
                      p_max=0.10)


def test_alpha_m_closed_forms():
    assert alpha_m(1) == pytest.approx(2.0, rel=1e-12)
    assert alpha_m(2) == pytest.approx(math.pi, rel=1e-12)
    assert alpha_m(3) == pytest.approx(4 * math.pi / 3, rel=1e-12)


def test_alpha_m_rejects_zero():
    with pytest.raises(ValueError):
        alpha_m(0)


def test_geometry_params_validation():
    with pytest.raises(ValueError):
        GeometryParams(m=2, R=-1.0, i0=1.0, K_curv=1.0, p_min=0.1, p_max=0.2)
    with pytest.raises(ValueError):
        GeometryParams(m=2, R=1.0, i0=1.0, K_curv=1.0, p_min=0.3, p_max=0.2)


def test_r_bounds_flat_noiseless_limit():
    g = GeometryParams(m=2, R=1e14, i0=1e6, K_curv=1e-12, p_min=1.0,
                       p_max=1.0)
    lo, hi = r_bounds(0.05, 0.0, g)
    assert lo == pytest.approx(0.05, rel=1e-9)
    assert hi == pytest.approx(0.05, rel=1e-9)


def test_r_bounds_reference_values():
    # frozen from a 40-digit evaluation of the closed forms
    lo, hi = r_bounds(0.1, 0.01, WIDE)
    assert lo == pytest.approx(0.0896503096874234934, rel=1e-12)
    assert hi == pytest.approx(0.108922595721314906, rel=1e-12)


def test_r_bounds_bracket_and_difference_bound():
    rng = np.random.default_rng(12)
    checked = 0
    while checked < 500:
        r = float(rng.uniform(1e-3, math.sqrt(WIDE.R / 32)))
        sigma = float(rng.uniform(0.0, r / 3))
        if not assumption3_check(r, sigma, WIDE):
            continue
        try:
            lo, hi = r_bounds(r, sigma, WIDE)
        except ValueError:
            continue
        assert lo <= r <= hi
        assert hi / 2 <= r <= 2 * lo
        assert hi - lo <= r_difference_bound(r, sigma, WIDE.m, WIDE.R) + 1e-15
        checked += 1


def test_r_bounds_raises_on_violated_assumptions():
    with pytest.raises(ValueError, match="assumption violated"):
        r_bounds(0.1, 0.1, WIDE)


def test_assumption3_pass_and_named_clauses():
    assert assumption3_check(1e-3, 0.0, WIDE).passed
    report = assumption3_check(0.09, 0.031, WIDE)
    assert not report.passed
    assert report.violations == ["sigma <= r/3"]


def test_assumption3_boundary_r_squared_R_over_16():
    # r^2 = R/16 violates only the sqrt(R/32) cap when curvature is mild
    g = GeometryParams(m=2, R=1.0, i0=10.0, K_curv=0.01, p_min=0.1,
                       p_max=0.1)
    report = assumption3_check(0.25, 1e-4, g)
    assert report.violations == ["r <= sqrt(R/32)"]


def test_eta_bound_values():
    assert eta_bound(0.3, 0.0, 2.0) == pytest.approx(2.0 * 0.3**3, rel=1e-12)
    assert eta_bound(math.sqrt(0.04), 0.04, 1.0) == pytest.approx(
        3 * 0.04**1.5, rel=1e-12)


def test_eta_bound_convex_and_minimized_near_sqrt_sigma():
    sigma = 0.09
    grid = np.linspace(0.05, 1.2, 400)
    vals = np.array([eta_bound(r, sigma) for r in grid])
    second = vals[2:] - 2 * vals[1:-1] + vals[:-2]
    assert np.all(second >= -1e-12)
    argmin = grid[int(np.argmin(vals))]
    # stationarity of r^3 + r s + s^2/r gives r^2 = s (sqrt(13) - 1) / 6
    root = math.sqrt(sigma * (math.sqrt(13) - 1) / 6)
    assert abs(argmin - root) < 2 * (grid[1] - grid[0])
    assert argmin == pytest.approx(math.sqrt(sigma), rel=0.8)


def test_failure_probability_constant_and_clamp():
    # m=2, p_min=1/(4 pi) gives exponent constant 1/4096
    n = 60000
    value = failure_probability(n, 1.0, 2, 1 / (4 * math.pi))
    recovered = -math.log(value / (4 * n)) / n
    assert recovered == pytest.approx(1 / 4096, rel=1e-9)
    assert failure_probability(10, 1e-9, 2, 0.1) == 1.0


def test_failure_probability_decreases_in_n():
    vals = [failure_probability(n, 0.9, 2, 1 / (4 * math.pi))
            for n in (10**5, 2 * 10**5, 4 * 10**5)]
    assert vals[0] > vals[1] > vals[2]

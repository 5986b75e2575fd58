"""Closed-form constants and bounds for ball-average regularization.

Everything in this module is a pure scalar computation: the volume of the
Euclidean unit ball, the inner/outer averaging radii that bracket which
clean points can contribute to a ball average around a noisy point, the
distance-error bound they imply, the validity conditions on (r, sigma),
and the sampling failure probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .validation import check_count, check_non_negative, check_positive


@dataclass
class GeometryParams:
    """Geometric description of the hidden manifold and sampling density.

    m is the intrinsic dimension, R the reach, i0 the injectivity radius,
    K_curv the maximum absolute sectional curvature, p_min/p_max density
    bounds, and C_M an aggregate constant used by the distance-error
    bound (caller-supplied, defaults to 1).
    """

    m: int
    R: float
    i0: float
    K_curv: float
    p_min: float
    p_max: float
    C_M: float = 1.0

    def __post_init__(self):
        self.m = check_count(self.m, "m")
        for name in ("R", "i0", "K_curv", "p_min", "p_max", "C_M"):
            setattr(self, name, check_positive(getattr(self, name), name))
        if self.p_min > self.p_max:
            raise ValueError("p_min must not exceed p_max")


def alpha_m(m: int) -> float:
    """Volume of the m-dimensional Euclidean unit ball."""
    m = check_count(m, "m")
    return math.pi ** (m / 2) / math.gamma(m / 2 + 1)


@dataclass
class Assumption3Report:
    """Outcome of the (r, sigma) validity check, clause by clause."""

    passed: bool
    violations: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.passed


def assumption3_check(r: float, sigma: float, g: GeometryParams,
                      C: float = 1.0) -> Assumption3Report:
    """Check the smallness conditions on the averaging radius and noise.

    Evaluates every clause and reports each violated one by name, so a
    failing configuration explains itself.
    """
    r = check_positive(r, "r")
    sigma = check_non_negative(sigma, "sigma")
    C = check_positive(C, "C")
    violations = []
    if sigma > g.R / (16 * g.m):
        violations.append("sigma <= R/(16 m)")
    if r > g.i0:
        violations.append("r <= i0")
    if r > 1 / math.sqrt(g.K_curv):
        violations.append("r <= 1/sqrt(K_curv)")
    if r > math.sqrt(alpha_m(g.m) / (2 * C * g.m * g.K_curv)):
        violations.append("r <= sqrt(alpha_m/(2 C m K_curv))")
    if r > math.sqrt(g.R / 32):
        violations.append("r <= sqrt(R/32)")
    if sigma > r / 3:
        violations.append("sigma <= r/3")
    return Assumption3Report(passed=not violations, violations=violations)


def r_bounds(r: float, sigma: float, g: GeometryParams,
             C: float = 1.0) -> tuple[float, float]:
    """Inner and outer radii (r_minus, r_plus) bracketing the ball average.

    Requires the assumption3_check conditions; raises if they fail or if
    the square root in r_plus degenerates.
    """
    report = assumption3_check(r, sigma, g, C)
    if not report:
        raise ValueError(
            "assumption violated: " + "; ".join(report.violations))
    m, R = g.m, g.R
    r_minus = r / (math.sqrt(1 + 4 * sigma / R + 16 * sigma**2 / r**2)
                   + m * sigma / R)
    root_arg = 1 - 8 * r**2 / R - 4 * sigma / R
    shift = m * sigma / R
    if root_arg <= 0 or root_arg <= shift**2:
        raise ValueError("domain-error: the r_plus square root degenerates")
    r_plus = r / (math.sqrt(root_arg) - shift)
    return r_minus, r_plus


def r_difference_bound(r: float, sigma: float, m: int, R: float) -> float:
    """Upper bound on r_plus - r_minus: C_{m,R} (r^3 + r sigma + sigma^2/r)."""
    c = max((8 * m + 32) / R, 64.0)
    return c * (r**3 + r * sigma + sigma**2 / r)


def eta_bound(r: float, sigma: float, C_M: float = 1.0) -> float:
    """Distance-error bound C_M (r^3 + r sigma + sigma^2/r).

    For fixed sigma the minimizing radius scales like sqrt(sigma), where
    the bound is of order sigma^(3/2).
    """
    r = check_positive(r, "r")
    sigma = check_non_negative(sigma, "sigma")
    C_M = check_positive(C_M, "C_M")
    return C_M * (r**3 + r * sigma + sigma**2 / r)


def failure_probability(n: int, r: float, m: int, p_min: float) -> float:
    """Probability bound 4 n exp(-c n r^max(2m, m+4)), clamped to [0, 1]."""
    n = check_count(n, "n")
    r = check_positive(r, "r")
    m = check_count(m, "m")
    p_min = check_positive(p_min, "p_min")
    c = min(alpha_m(m) ** 2 * p_min**2 / 4 ** (m + 2), 1 / 16)
    value = 4 * n * math.exp(-c * n * r ** max(2 * m, m + 4))
    return min(max(value, 0.0), 1.0)

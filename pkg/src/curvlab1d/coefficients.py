"""Model coefficients for curvature-dimension comparisons.

Three closed-form families drive every inequality in the toolkit:

* ``sigma(t, params, theta)`` -- the distortion coefficient with sin /
  linear / sinh branches.  It returns ``math.inf`` in the conjugate-point
  regime ``K*theta**2 >= N*pi**2``; callers treat that as a flag, never as
  a number to combine.  Values are never NaN.
* ``s_vol(params, t)`` -- the model volume density (sin / linear / sinh in
  the radius, built from N-1 rather than N).
* ``f_vol(params, r)`` -- the antiderivative of ``s_vol**(N-1)``, computed
  by adaptive Simpson quadrature to absolute tolerance 1e-10.

Near the K = 0 seam the sin/sinh ratios cancel catastrophically, so for
``|K| * theta**2 / N < 1e-8`` sigma switches to the shared Taylor series of
both branches (the series is analytic in the signed argument).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = ["CurvatureParams", "sigma", "s_vol", "f_vol", "conjugate_radius"]

# seam threshold for |K| theta^2 / N below which the series expansion is used
_SEAM = 1e-8

# quadrature settings for f_vol (absolute tolerance, max bisection depth)
_QUAD_TOL = 1e-10
_QUAD_MAX_DEPTH = 40


@dataclass(frozen=True)
class CurvatureParams:
    """Curvature bound K (1/length^2) and dimension bound N > 1."""

    K: float
    N: float

    def __post_init__(self):
        if not math.isfinite(self.K):
            raise ValueError(f"K must be finite, got {self.K}")
        if not (math.isfinite(self.N) and self.N > 1.0):
            raise ValueError(f"N must be a finite number > 1, got {self.N}")


def sigma(t: float, params: CurvatureParams, theta: float) -> float:
    """Distortion coefficient sigma^(t)_{K,N}(theta).

    Returns math.inf iff K*theta^2 >= N*pi^2 (conjugate-point regime).
    Exactly t when K*theta^2 == 0.  Continuous in K across K = 0.
    """
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"t must lie in [0,1], got {t}")
    if theta < 0.0:
        raise ValueError(f"theta must be >= 0, got {theta}")
    K, N = params.K, params.N
    if K * theta * theta >= N * math.pi * math.pi:
        return math.inf
    s = K * theta * theta / N  # signed squared argument
    if s == 0.0:
        return t
    if abs(s) < _SEAM:
        # sin(t x)/sin(x) and sinh(t x)/sinh(x) share one series in s = +-x^2
        num = 1.0 - t * t * s / 6.0 + (t ** 4) * s * s / 120.0
        den = 1.0 - s / 6.0 + s * s / 120.0
        return t * num / den
    if s > 0.0:
        x = math.sqrt(s)
        return math.sin(t * x) / math.sin(x)
    x = math.sqrt(-s)
    return math.sinh(t * x) / math.sinh(x)


def s_vol(params: CurvatureParams, t: float) -> float:
    """Model volume density S_{K,N}(t); S(0) = 0 and S'(0) = 1."""
    if t < 0.0:
        raise ValueError(f"t must be >= 0, got {t}")
    K, N = params.K, params.N
    if K == 0.0:
        return t
    if K > 0.0:
        c = math.sqrt(K / (N - 1.0))
        return math.sin(t * c) / c
    c = math.sqrt(-K / (N - 1.0))
    return math.sinh(t * c) / c


def conjugate_radius(params: CurvatureParams) -> float:
    """First zero of s_vol for K > 0 (pi*sqrt((N-1)/K)), inf otherwise."""
    if params.K <= 0.0:
        return math.inf
    return math.pi * math.sqrt((params.N - 1.0) / params.K)


def f_vol(params: CurvatureParams, r: float) -> float:
    """Integral of s_vol**(N-1) over [0, r], to absolute error <= 1e-10.

    For K > 0 the radius must not exceed the conjugate radius
    pi*sqrt((N-1)/K); past it the comparison density is meaningless.
    """
    if r < 0.0:
        raise ValueError(f"r must be >= 0, got {r}")
    if r > conjugate_radius(params) * (1.0 + 1e-12):
        raise ValueError(
            f"r={r} exceeds the conjugate radius {conjugate_radius(params)} "
            f"for K={params.K}, N={params.N}"
        )
    if r == 0.0:
        return 0.0
    expo = params.N - 1.0

    def integrand(x: float) -> float:
        return s_vol(params, x) ** expo

    # large N or K<0 make the integral astronomically big; an absolute
    # 1e-10 target below the double-precision floor would recurse forever,
    # so the tolerance is floored relative to a coarse size estimate
    probe = max(abs(integrand(r * f)) for f in (0.25, 0.5, 0.75, 1.0))
    tol = max(_QUAD_TOL, 1e-13 * probe * r)
    return adaptive_simpson(integrand, 0.0, r, tol, _QUAD_MAX_DEPTH)


def adaptive_simpson(fn, a: float, b: float, tol: float, max_depth: int = _QUAD_MAX_DEPTH) -> float:
    """Adaptive Simpson quadrature of fn over [a, b] to absolute tolerance."""
    if b <= a:
        return 0.0
    fa, fb = fn(a), fn(b)
    m = 0.5 * (a + b)
    fm = fn(m)
    whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb)
    return _simpson_rec(fn, a, b, fa, fm, fb, whole, tol, max_depth)


def _simpson_rec(fn, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm, frm = fn(lm), fn(rm)
    left = (m - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - m) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        return left + right + delta / 15.0
    return (
        _simpson_rec(fn, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + _simpson_rec(fn, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    )

import math

import numpy as np
import pytest

from curvlab1d.coefficients import CurvatureParams, conjugate_radius, f_vol, s_vol, sigma

from oracles import s_vol_hp, sigma_hp, trapezoid_refined


def test_sigma_zero_curvature_is_exactly_t():
    params = CurvatureParams(0.0, 2.0)
    for t in (0.0, 0.125, 0.37, 0.5, 1.0):
        assert sigma(t, params, 5.0) == t
    # theta = 0 also lands on the linear branch
    assert sigma(0.25, CurvatureParams(3.0, 2.0), 0.0) == 0.25


def test_sigma_endpoints():
    for K, N, theta in [(1.0, 2.0, 1.0), (-2.0, 3.0, 2.5), (0.5, 1.5, 0.7)]:
        params = CurvatureParams(K, N)
        assert sigma(0.0, params, theta) == 0.0
        assert sigma(1.0, params, theta) == pytest.approx(1.0, abs=1e-15)


def test_sigma_conjugate_regime_is_inf():
    assert math.isinf(sigma(0.5, CurvatureParams(10.0, 2.0), 3.0))
    # boundary case K theta^2 == N pi^2 (theta = pi makes both sides
    # the same float expression)
    assert math.isinf(sigma(0.5, CurvatureParams(2.0, 2.0), math.pi))
    # just above the boundary
    K = 2.0 * math.pi ** 2 / 1.3 ** 2 * (1.0 + 1e-9)
    assert math.isinf(sigma(0.5, CurvatureParams(K, 2.0), 1.3))


def test_sigma_against_high_precision_oracle():
    # frozen from the 50-digit oracle
    assert sigma(0.5, CurvatureParams(1.0, 2.0), math.pi / 2) == pytest.approx(
        0.5884357139583579, abs=1e-15)
    rng = np.random.default_rng(2024)
    for _ in range(60):
        t = float(rng.uniform(0.0, 1.0))
        K = float(rng.uniform(-4.0, 4.0))
        N = float(rng.uniform(1.01, 16.0))
        theta = float(rng.uniform(0.0, 2.0))
        if K * theta ** 2 >= N * math.pi ** 2 * 0.98:
            continue
        got = sigma(t, CurvatureParams(K, N), theta)
        want = float(sigma_hp(t, K, N, theta))
        assert got == pytest.approx(want, abs=1e-13)


def test_sigma_seam_continuity_in_k():
    # |sigma - t| <= c |K| theta^2 around K = 0, scanning both branch sides
    rng = np.random.default_rng(5)
    for _ in range(200):
        t = float(rng.uniform(0.0, 1.0))
        theta = float(rng.uniform(0.1, 3.0))
        N = float(rng.uniform(1.5, 8.0))
        mag = 10.0 ** rng.uniform(-12, -4)
        K = mag / theta ** 2 * (1 if rng.random() < 0.5 else -1)
        val = sigma(t, CurvatureParams(K, N), theta)
        assert abs(val - t) <= 10.0 * abs(K) * theta ** 2 + 1e-15


def test_sigma_strictly_increasing_in_t():
    params = CurvatureParams(2.0, 3.0)
    ts = np.linspace(0.0, 1.0, 50)
    vals = [sigma(float(t), params, 1.2) for t in ts]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_sigma_monotone_in_k():
    # fixed (t, theta): sigma nondecreasing in K on the finite branch
    for t in (0.25, 0.5, 0.75):
        for theta in (0.5, 1.0, 2.0):
            ks = np.linspace(-5.0, 5.0, 41)
            vals = []
            for K in ks:
                v = sigma(t, CurvatureParams(float(K), 2.0), theta)
                if math.isinf(v):
                    break
                vals.append(v)
            assert all(b >= a - 1e-14 for a, b in zip(vals, vals[1:]))


def test_sigma_rescaling_identity():
    # sigma_{K/lam^2, N}(lam theta) == sigma_{K, N}(theta)
    params = CurvatureParams(1.5, 2.5)
    for lam in (2.0, 4.0, 0.5):
        scaled = CurvatureParams(1.5 / lam ** 2, 2.5)
        for t in (0.2, 0.7):
            assert sigma(t, scaled, lam * 0.8) == pytest.approx(
                sigma(t, params, 0.8), abs=1e-15)


def test_sigma_domain_errors():
    p = CurvatureParams(1.0, 2.0)
    with pytest.raises(ValueError):
        sigma(-0.1, p, 1.0)
    with pytest.raises(ValueError):
        sigma(1.1, p, 1.0)
    with pytest.raises(ValueError):
        sigma(0.5, p, -1.0)


def test_params_validation():
    with pytest.raises(ValueError):
        CurvatureParams(0.0, 1.0)
    with pytest.raises(ValueError):
        CurvatureParams(math.inf, 2.0)


def test_s_vol_branches():
    assert s_vol(CurvatureParams(0.0, 3.0), 2.5) == 2.5
    assert s_vol(CurvatureParams(1.0, 2.0), 0.0) == 0.0
    # frozen from the oracle: sinh(1)
    assert s_vol(CurvatureParams(-1.0, 2.0), 1.0) == pytest.approx(
        1.1752011936438014, abs=1e-15)
    rng = np.random.default_rng(7)
    for _ in range(40):
        K = float(rng.uniform(-3.0, 3.0))
        N = float(rng.uniform(1.1, 10.0))
        t = float(rng.uniform(0.0, 2.0))
        assert s_vol(CurvatureParams(K, N), t) == pytest.approx(
            float(s_vol_hp(K, N, t)), abs=1e-13)


def test_s_vol_slope_one_at_zero():
    for K, N in [(1.0, 2.0), (-2.0, 3.0), (0.0, 5.0), (4.0, 1.5)]:
        v = s_vol(CurvatureParams(K, N), 1e-6)
        assert v / 1e-6 == pytest.approx(1.0, rel=1e-6)


def test_f_vol_closed_forms():
    assert f_vol(CurvatureParams(0.0, 2.0), 1.7) == pytest.approx(1.7 ** 2 / 2, abs=1e-10)
    assert f_vol(CurvatureParams(0.0, 3.0), 1.0) == pytest.approx(1.0 / 3.0, abs=1e-10)
    # int_0^{pi/2} sin = 1, cross-checked by the trapezoid refinement oracle
    got = f_vol(CurvatureParams(1.0, 2.0), math.pi / 2)
    assert got == pytest.approx(1.0, abs=1e-10)
    orc = trapezoid_refined(lambda s: math.sin(s), 0.0, math.pi / 2)
    assert got == pytest.approx(orc, abs=1e-9)


def test_f_vol_against_quadrature_oracle():
    rng = np.random.default_rng(11)
    for _ in range(10):
        K = float(rng.uniform(-2.0, 2.0))
        N = float(rng.uniform(1.2, 6.0))
        params = CurvatureParams(K, N)
        r = float(rng.uniform(0.1, min(2.0, 0.9 * conjugate_radius(params))))
        orc = trapezoid_refined(lambda s: s_vol(params, s) ** (N - 1.0), 0.0, r)
        assert f_vol(params, r) == pytest.approx(orc, abs=1e-8)


def test_f_vol_monotone():
    params = CurvatureParams(1.0, 2.0)
    rs = np.linspace(0.1, 3.0, 15)
    vals = [f_vol(params, float(r)) for r in rs]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_f_vol_domain_error_past_conjugate_radius():
    params = CurvatureParams(1.0, 2.0)  # conjugate radius pi
    with pytest.raises(ValueError):
        f_vol(params, math.pi + 0.1)
    with pytest.raises(ValueError):
        f_vol(params, -0.5)

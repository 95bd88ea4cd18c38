import numpy as np
import pytest

from fronttrack.curves import (
    hugoniot_offset, lax_curve, rarefaction_curve, shock_curve,
    shock_deviation_coefficient,
)
from fronttrack.errors import RadiusError

U0 = np.array([1.0, 0.0])


def test_rarefaction_at_zero_is_identity(gas):
    cp = rarefaction_curve(gas, U0, 1, 0.0)
    assert np.array_equal(cp.state, U0)
    assert cp.speed == pytest.approx(-1.0)


def test_linear_rarefaction_is_affine(diag_linear):
    u0 = np.array([0.3, -0.2])
    cp = rarefaction_curve(diag_linear, u0, 2, 0.17)
    assert np.allclose(cp.state, u0 + 0.17 * np.array([0.0, 1.0]), atol=1e-15)


def _rk4(gas, u0, family, sigma, steps):
    """Fixed-step integrator for the sigma-normalized eigenvector field."""
    def field(u):
        eig = gas.eigen(u)
        r = eig.r(family)
        return r / (gas.chart_gradient(u, family) @ r)

    h = sigma / steps
    u = np.asarray(u0, dtype=float)
    for _ in range(steps):
        k1 = field(u)
        k2 = field(u + 0.5 * h * k1)
        k3 = field(u + 0.5 * h * k2)
        k4 = field(u + h * k3)
        u = u + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return u


def test_gas_rarefaction_against_step_halving_integrator(gas):
    cp = rarefaction_curve(gas, U0, 2, 0.1)
    assert cp.speed > gas.lambdas(U0)[1]
    coarse = _rk4(gas, U0, 2, 0.1, 64)
    fine = _rk4(gas, U0, 2, 0.1, 128)
    assert np.max(np.abs(coarse - fine)) < 1e-8
    assert np.max(np.abs(cp.state - fine)) < 1e-8


def test_rarefaction_speed_increases_with_sigma(gas):
    speeds = [rarefaction_curve(gas, U0, 1, s).speed
              for s in np.linspace(-0.2, 0.2, 9)]
    assert np.all(np.diff(speeds) > 0)


def test_shock_at_zero_is_identity(gas):
    cp = shock_curve(gas, U0, 1, 0.0)
    assert np.array_equal(cp.state, U0)
    assert cp.speed == pytest.approx(-1.0)


def test_shock_satisfies_jump_conditions_and_admissibility(gas):
    cp = shock_curve(gas, U0, 1, -0.2)
    jump = gas.flux(cp.state) - gas.flux(U0) - cp.speed * (cp.state - U0)
    assert np.max(np.abs(jump)) < 1e-10
    assert cp.residual < 1e-10
    assert gas.lambdas(U0)[0] > cp.speed > gas.lambdas(cp.state)[0]


def test_shock_curve_radius_guard(gas):
    with pytest.raises(RadiusError):
        shock_curve(gas, U0, 1, -0.9)


def test_random_shocks_keep_tight_residual_and_lax_margin(gas):
    rng = np.random.default_rng(23)
    for _ in range(40):
        u0 = rng.uniform([0.7, -0.2], [1.3, 0.2])
        family = int(rng.integers(1, 3))
        sigma = -rng.uniform(0.01, 0.25)
        cp = shock_curve(gas, u0, family, sigma)
        assert cp.residual < 1e-10
        margin_l = gas.lambdas(u0)[family - 1] - cp.speed
        margin_r = cp.speed - gas.lambdas(cp.state)[family - 1]
        assert margin_l > 0.05 * abs(sigma)
        assert margin_r > 0.05 * abs(sigma)


def test_shock_rarefaction_tangency_is_cubic(gas):
    sigmas = np.array([0.05, 0.1, 0.2])
    gaps = []
    for s in sigmas:
        gap = max(
            np.max(np.abs(shock_curve(gas, U0, 1, s).state
                          - rarefaction_curve(gas, U0, 1, s).state)),
            np.max(np.abs(shock_curve(gas, U0, 1, -s).state
                          - rarefaction_curve(gas, U0, 1, -s).state)))
        gaps.append(gap)
    slope = np.polyfit(np.log(sigmas), np.log(gaps), 1)[0]
    assert slope >= 2.7


def test_lax_curve_branches_bitwise(gas):
    plus = lax_curve(gas, U0, 2, 0.15)
    assert np.array_equal(plus.state, rarefaction_curve(gas, U0, 2, 0.15).state)
    minus = lax_curve(gas, U0, 2, -0.15)
    assert np.array_equal(minus.state, shock_curve(gas, U0, 2, -0.15).state)


def test_lax_curve_c1_across_zero(gas):
    # one-sided second-order difference quotients of the composite curve
    h = 1e-3
    for family in (1, 2):
        def point(s):
            return lax_curve(gas, U0, family, s).state
        d_plus = (4 * point(h) - 3 * point(0.0) - point(2 * h)) / (2 * h)
        d_minus = (3 * point(0.0) - 4 * point(-h) + point(-2 * h)) / (2 * h)
        assert np.max(np.abs(d_plus - d_minus)) < 1e-6


def test_deviation_coefficient_sign_and_value(gas):
    c1 = shock_deviation_coefficient(gas, U0, 1)
    c2 = shock_deviation_coefficient(gas, U0, 2)
    assert c1 < 0
    assert c2 < 0
    # closed form for this flux works out to -(1-th)/(4 K^2 (1+th)^2 rho^(2 th))
    # with th = (gamma-1)/2, i.e. -1/18 at (1, 0) for K=1, gamma=2
    assert c1 == pytest.approx(-1.0 / 18.0, abs=1e-6)
    assert c2 == pytest.approx(-1.0 / 18.0, abs=1e-6)


def test_deviation_coefficient_matches_cubic_fit(gas):
    sig = np.array([-0.2, -0.15, -0.1, -0.05, -0.02])
    for family in (1, 2):
        offsets = np.array([hugoniot_offset(gas, U0, family, s) for s in sig])
        basis = np.vstack([sig ** 3 / 6.0, sig ** 4 / 6.0]).T
        coef, *_ = np.linalg.lstsq(basis, offsets, rcond=None)
        closed = shock_deviation_coefficient(gas, U0, family)
        assert abs(coef[0] - closed) <= 0.05 * abs(closed)


def test_deviation_coefficients_negative_across_box(gas):
    for rho in (0.8, 1.0, 1.2):
        for v in (-0.15, 0.0, 0.15):
            u = np.array([rho, v])
            assert shock_deviation_coefficient(gas, u, 1) < 0
            assert shock_deviation_coefficient(gas, u, 2) < 0

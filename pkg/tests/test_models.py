import numpy as np
import pytest

from fronttrack.errors import DomainError
from fronttrack.models import (
    Box, GasModel, LinearModel, TableModel, crossing_time, eigen_structure,
    eval_flux, from_riemann_coordinates, riemann_coordinates,
    verify_hypotheses,
)


def test_linear_flux_is_matrix_product(diag_linear):
    out = eval_flux(diag_linear, np.array([2.0, 3.0]))
    assert np.allclose(out, [-2.0, 3.0], atol=1e-15)


def test_gas_flux_reference_point(gas):
    # (rho u, u^2/2 + K^2 rho^(gamma-1)/(gamma-1)) at (1, 0) with K=1, gamma=2
    out = eval_flux(gas, np.array([1.0, 0.0]))
    assert np.allclose(out, [0.0, 1.0], atol=1e-15)


def test_negative_density_rejected(gas):
    with pytest.raises(DomainError):
        eval_flux(gas, np.array([-1.0, 0.0]))


def test_diagonal_eigenstructure(diag_linear):
    eig = eigen_structure(diag_linear, np.zeros(2))
    assert np.allclose(eig.lams, [-1.0, 1.0])
    assert np.allclose(eig.r(1), [1.0, 0.0])
    assert np.allclose(eig.r(2), [0.0, 1.0])


@pytest.mark.parametrize("u, expected", [
    ([1.0, 0.0], [-1.0, 1.0]),
    ([1.0, 0.5], [-0.5, 1.5]),
])
def test_gas_eigenvalues_closed_form(gas, u, expected):
    eig = eigen_structure(gas, np.array(u))
    assert np.allclose(eig.lams, expected, atol=1e-12)


def test_gas_eigenvalues_match_numeric_jacobian(gas):
    # oracle: eigensolve of a central finite-difference Jacobian
    rng = np.random.default_rng(3)
    for _ in range(10):
        u = rng.uniform([0.7, -0.2], [1.3, 0.2])
        h = 1e-6
        J = np.empty((2, 2))
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            J[:, k] = (gas.flux(u + e) - gas.flux(u - e)) / (2 * h)
        numeric = np.sort(np.linalg.eigvals(J).real)
        assert np.allclose(gas.lambdas(u), numeric, atol=1e-8)


def test_biorthonormality_and_eigen_residual(gas):
    for u in gas.admitted_grid(7):
        eig = gas.eigen(u)
        assert np.max(np.abs(eig.left @ eig.right - np.eye(2))) < 1e-10
        J = gas.jacobian(u)
        for i in (1, 2):
            r = eig.r(i)
            assert np.max(np.abs(J @ r - eig.lam(i) * r)) < 1e-8 * np.linalg.norm(r)
        assert eig.lams[1] - eig.lams[0] > 2 * gas.sound_speed(u[0]) - 1e-12


def test_hypotheses_pass_on_moderate_box():
    model = GasModel(K=1.0, gamma=2.0, box=Box([0.5, -0.2], [1.5, 0.2]))
    report = verify_hypotheses(model, samples_per_axis=12)
    assert report.admitted, report.summary()
    assert report.margins["gnl_1"] > 0
    assert report.margins["gnl_2"] > 0
    assert report.margins["wedge_r1_r2"] > 0
    assert report.margins["wedge_bend_1"] > 0
    assert report.margins["wedge_bend_2"] > 0


def test_hypotheses_detect_sonic_crossing():
    # lambda_1 = u - sqrt(rho) crosses zero inside this box (e.g. u=1.1, rho=1)
    model = GasModel(K=1.0, gamma=2.0, box=Box([0.9, 0.8], [1.1, 1.2]))
    report = verify_hypotheses(model, samples_per_axis=9)
    assert not report.checks["speed_floor"]
    assert any(name == "speed_floor" for name, _ in report.violations)


def test_hypotheses_linear_diagonal(diag_linear):
    report = verify_hypotheses(diag_linear, samples_per_axis=5)
    assert report.checks["speed_signs"]
    assert report.checks["speed_floor"]
    assert diag_linear.p == 1
    assert report.min_abs_speed == pytest.approx(1.0)


def test_chart_anchored_at_reference(gas):
    assert np.allclose(riemann_coordinates(gas, gas.ref_state), [0.0, 0.0],
                       atol=1e-14)


def test_chart_matches_velocity_soundspeed_combination(gas):
    rng = np.random.default_rng(7)
    for _ in range(20):
        rho, v = rng.uniform([0.7, -0.2], [1.3, 0.2])
        w = riemann_coordinates(gas, np.array([rho, v]))
        raw1 = v - 2.0 * np.sqrt(rho)     # u - 2K rho^((gamma-1)/2)/(gamma-1)
        raw2 = v + 2.0 * np.sqrt(rho)
        anchor1, anchor2 = -2.0, 2.0      # raw chart at the (1, 0) reference
        assert w[0] == pytest.approx(raw1 - anchor1, abs=1e-12)
        assert w[1] == pytest.approx(raw2 - anchor2, abs=1e-12)


def test_opposite_coordinate_constant_along_integral_curves(gas):
    # integrate du/ds = r_1(u) independently and watch w_2 stay fixed
    from scipy.integrate import solve_ivp

    u0 = np.array([1.0, 0.0])
    w2_0 = riemann_coordinates(gas, u0)[1]

    def field(_s, u):
        eig = gas.eigen(u)
        r = eig.r(1)
        return r / (gas.chart_gradient(u, 1) @ r)

    sol = solve_ivp(field, (0.0, -0.3), u0, method="DOP853",
                    rtol=1e-12, atol=1e-13, t_eval=np.linspace(0, -0.3, 7))
    for u in sol.y.T:
        assert abs(riemann_coordinates(gas, u)[1] - w2_0) < 1e-6


def test_chart_round_trip(gas):
    rng = np.random.default_rng(11)
    for _ in range(50):
        u = rng.uniform([0.6, -0.3], [1.4, 0.3])
        back = from_riemann_coordinates(gas, riemann_coordinates(gas, u))
        assert np.max(np.abs(back - u)) < 1e-10


def test_table_model_matches_gas_with_quadratic_exponent(gas):
    # gamma = 2 makes the gas flux polynomial: (rho u, u^2/2 + rho)
    table = TableModel(
        terms=[[(1.0, (1, 1))], [(0.5, (0, 2)), (1.0, (1, 0))]],
        p=1, box=Box([0.5, -0.4], [1.5, 0.4]))
    rng = np.random.default_rng(5)
    for _ in range(10):
        u = rng.uniform([0.7, -0.2], [1.3, 0.2])
        assert np.allclose(table.flux(u), gas.flux(u), atol=1e-14)
        assert np.allclose(table.jacobian(u), gas.jacobian(u), atol=1e-12)
        assert np.allclose(table.lambdas(u), gas.lambdas(u), atol=1e-7)
        eig = table.eigen(u)
        assert np.max(np.abs(eig.left @ eig.right - np.eye(2))) < 1e-10


def test_crossing_time_constant_speeds(diag_linear):
    assert crossing_time(diag_linear, (0.0, 1.0)) == pytest.approx(1.0)


def test_crossing_time_gas_grid_minimum(gas):
    tau = crossing_time(gas, (0.0, 1.0), samples_per_axis=21)
    grid = gas.admitted_grid(21)
    m = min(float(np.min(np.abs(gas.lambdas(u)))) for u in grid)
    assert tau == pytest.approx(1.0 / m)


def test_crossing_time_rejects_vanishing_speeds():
    model = LinearModel([[1e-9, 0.0], [0.0, 1.0]])
    with pytest.raises(DomainError):
        crossing_time(model, (0.0, 1.0))

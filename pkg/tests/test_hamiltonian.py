import numpy as np
import pytest

from sispersist.asymptotics import (
    action_closed_form,
    endemic_equilibrium,
    terminal_momentum,
)
from sispersist.errors import SpecError
from sispersist.hamiltonian import (
    action_grid,
    eom_jacobian,
    eom_rhs,
    equilibrium_eigenvalues,
    grid_spec,
    hamiltonian,
    hamiltonian_staged,
    solve_extinction_path,
)

from conftest import random_spec, two_group


def test_hamiltonian_vanishes_at_equilibria(strong_spec):
    y_star = endemic_equilibrium(strong_spec)
    theta_star = terminal_momentum(strong_spec)
    k = strong_spec.k
    assert abs(hamiltonian(strong_spec, y_star, np.zeros(k))) < 1e-14
    assert abs(hamiltonian(strong_spec, np.zeros(k), theta_star)) < 1e-14
    assert abs(hamiltonian(strong_spec, np.zeros(k), np.zeros(k))) < 1e-15


def test_eom_vanishes_at_equilibria(strong_spec):
    y_star = endemic_equilibrium(strong_spec)
    theta_star = terminal_momentum(strong_spec)
    k = strong_spec.k
    g1 = eom_rhs(strong_spec, y_star, np.zeros(k))
    g2 = eom_rhs(strong_spec, np.zeros(k), theta_star)
    assert np.max(np.abs(np.concatenate(g1))) < 1e-13
    assert np.max(np.abs(np.concatenate(g2))) < 1e-13


def test_eom_jacobian_matches_finite_differences(mild_spec):
    rng = np.random.default_rng(1)
    y = mild_spec.groups.f * rng.uniform(0.05, 0.5, 2)
    theta = rng.uniform(-0.5, 0.1, 2)
    jac = eom_jacobian(mild_spec, y, theta)
    x = np.concatenate([y, theta])
    h = 1e-7

    def rhs(v):
        dy, dth = eom_rhs(mild_spec, v[:2], v[2:])
        return np.concatenate([dy, dth])

    for j in range(4):
        e = np.zeros(4)
        e[j] = h
        fd = (rhs(x + e) - rhs(x - e)) / (2 * h)
        assert np.max(np.abs(jac[:, j] - fd)) < 1e-6


def test_equilibrium_eigenvalues_oracle(strong_spec):
    endemic, extinct = equilibrium_eigenvalues(strong_spec)
    assert np.max(np.abs(endemic.imag)) < 1e-12
    got = np.sort(endemic.real)
    assert np.allclose(got, [-1.5, -0.5, 0.5, 1.5], atol=1e-10)
    got_e = np.sort(extinct.real)
    expect = [-1.03833497, -0.48664256, 0.48664256, 1.03833497]
    assert np.allclose(got_e, expect, atol=1e-6)
    # spectra come in +/- pairs for a Hamiltonian linearization
    for vals in (endemic.real, extinct.real):
        assert np.allclose(np.sort(vals), -np.sort(-vals)[::-1], atol=1e-10)


def test_path_matches_closed_form(strong_spec, mild_spec):
    for spec in (strong_spec, mild_spec):
        path = solve_extinction_path(spec)
        assert path.converged
        cf = action_closed_form(spec)
        assert abs(path.action - cf) < 1e-9
        assert abs(path.action - path.action_backward) < 1e-9
        assert path.h_residual_max < 1e-8
        assert max(path.endpoint_defects) < 1e-8


def test_path_endpoints_sit_on_the_fixed_points(strong_spec):
    path = solve_extinction_path(strong_spec)
    y_star = endemic_equilibrium(strong_spec)
    theta_star = terminal_momentum(strong_spec)
    assert np.max(np.abs(path.y[0] - y_star)) < 1e-4
    assert np.max(np.abs(path.theta[0])) < 1e-4
    assert np.max(np.abs(path.y[-1])) < 1e-4
    assert np.max(np.abs(path.theta[-1] - theta_star)) < 1e-4
    # monotone decay of total prevalence along the escape path
    total = path.y.sum(axis=1)
    assert total[0] > total[-1]


def test_theta_path_is_scalar_reparameterized(strong_spec):
    # with uniform susceptibility the momentum path lies on the curve
    # theta_i = -ln(1 + lam_i z) for a common scalar z
    path = solve_extinction_path(strong_spec)
    lam = strong_spec.groups.lam
    th = path.theta
    mask = np.abs(th[:, 0]) > 1e-8
    z1 = (np.exp(-th[mask, 0]) - 1.0) / lam[0]
    z2 = (np.exp(-th[mask, 1]) - 1.0) / lam[1]
    assert np.max(np.abs(z1 - z2)) < 1e-6


def test_warm_start_accepts_previous_solution(mild_spec):
    first = solve_extinction_path(mild_spec)
    guess = (first.t, np.concatenate([first.y, first.theta], axis=1))
    second = solve_extinction_path(mild_spec, guess=guess)
    assert second.converged
    assert second.newton_iterations <= 3
    assert abs(second.action - first.action) < 1e-10


def test_mixed_heterogeneity_handled():
    spec = two_group(lam=(0.4, 1.6), mu=(1.3, 0.7), target_r0=1.2)
    path = solve_extinction_path(spec)
    assert path.converged
    # between the two single-sided exponents of its marginal weight vectors
    assert 0.0 < path.action < action_closed_form(
        two_group(lam=(1.0, 1.0), mu=(1.0, 1.0), target_r0=1.2))


def test_random_single_heterogeneity_specs():
    rng = np.random.default_rng(31)
    for side in ("lambda", "mu"):
        spec = random_spec(rng, side=side, r0_range=(1.2, 1.8))
        path = solve_extinction_path(spec)
        assert path.converged
        assert abs(path.action - action_closed_form(spec)) < 1e-6


def test_staged_hamiltonian_reduces(mild_spec):
    rng = np.random.default_rng(2)
    y = mild_spec.groups.f * rng.uniform(0.05, 0.5, 2)
    theta = rng.uniform(-0.5, 0.1, 2)
    plain = hamiltonian(mild_spec, y, theta)
    staged = hamiltonian_staged(mild_spec, y.reshape(2, 1), theta.reshape(2, 1))
    assert staged == pytest.approx(plain, abs=1e-14)


def test_guess_shape_validated(mild_spec):
    with pytest.raises(SpecError):
        solve_extinction_path(mild_spec, guess=(np.linspace(0, 10, 11),
                                                np.zeros((11, 3))))


def test_grid_spec_normalization():
    spec = grid_spec(0.4, 1.6, target_r0=1.2)
    assert np.allclose(spec.groups.lam, [0.4, 1.6])
    assert np.allclose(spec.groups.mu, [1.6, 0.4])
    from sispersist.model import r0
    assert r0(spec) == pytest.approx(1.2, rel=1e-12)


@pytest.mark.slow
def test_small_grid_symmetries():
    vals = np.linspace(0.3, 1.7, 5)
    grid = action_grid(vals, vals, target_r0=1.2, threads=4)
    assert grid.converged.all()
    a = grid.actions
    assert np.nanmax(np.abs(a - a[::-1, ::-1])) < 1e-6
    assert np.nanmax(np.abs(a - a.T)) < 1e-6
    # single-heterogeneity column agrees with the closed form
    j = 2  # mu1 = 1.0
    for i, l1 in enumerate(vals):
        cf = action_closed_form(grid_spec(float(l1), 1.0, 1.2))
        assert abs(a[i, j] - cf) < 1e-8

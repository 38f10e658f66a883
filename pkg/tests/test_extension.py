import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from fraclap.domain import Domain, GridFunction, build_grid, default_basis, make_corpus, sample
from fraclap.extension import (ExtensionField, YGrid, commutator_source, discrete_flux_trace,
                               energy_identity_residual, extend_poisson, extend_spectral, neumann_trace,
                               poisson_constant, solve_weighted_pde, theta_kernel, theta_profile, trace_constant,
                               trace_relation, weighted_field_l2, weighted_gradient_energy, weighted_sup_gradient)
from fraclap.operators import fourier_frac_laplacian, frac_sobolev_norm, spectral_frac_laplacian

ALPHAS = (0.25, 0.5, 0.75)


def bessel_profile(r, a):
    """Closed form 2^{1-a}/Gamma(a) r^a K_a(r)."""
    return 2 ** (1 - a) / special.gamma(a) * r**a * special.kv(a, r)


# --------------------------------------------------------------------------- theta kernel

@pytest.mark.parametrize("alpha", ALPHAS + (0.1, 0.9))
def test_theta_matches_bessel_closed_form(alpha):
    r = np.logspace(-6, 2, 300)
    np.testing.assert_allclose(theta_profile(r, alpha), bessel_profile(r, alpha), rtol=1e-10, atol=1e-300)


def test_theta_examples():
    y = np.linspace(0, 8, 200)
    assert theta_kernel(2.0, 0.0, 0.3) == 1.0
    np.testing.assert_allclose(theta_kernel(1.0, y, 0.5), np.exp(-y), atol=1e-13)
    for a in ALPHAS:
        assert np.all(np.diff(theta_kernel(3.0, y, a)) < 0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_trace_constant_against_bessel_derivative(alpha):
    r = 1e-14  # corrections are O(r^{min(2a, 2-2a)})
    # -r^{1-2a} F'(r) as r -> 0, with F' from the Bessel derivative formula
    dF = 2 ** (1 - alpha) / special.gamma(alpha) * (-(r**alpha) * special.kv(alpha - 1, r))
    assert abs(-(r ** (1 - 2 * alpha)) * dF - trace_constant(alpha)) < 1e-5 * trace_constant(alpha)


def test_poisson_constant_closed_form():
    for a in (0.2, 0.5, 0.8):
        ref = special.gamma(0.5 + a) / (math.sqrt(math.pi) * special.gamma(a))
        assert abs(poisson_constant(a) - ref) < 1e-10 * ref


# --------------------------------------------------------------------------- extensions

def test_extend_spectral_closed_form_half(interval_pi):
    _, grid, basis = interval_pi
    yg = YGrid(6.0, 200, 3.0)
    U = extend_spectral(basis.phi(1), basis, 0.5, yg)
    ref = np.outer(basis.phi(1).values, np.exp(-yg.nodes))
    assert np.max(np.abs(U.values - ref)) <= 1e-4
    # the bottom layer is the spectral projection, exact for an eigenfunction up to roundoff
    assert np.max(np.abs(U.values[:, 0] - basis.phi(1).values)) < 1e-13


def test_extend_spectral_decay(interval_pi):
    _, grid, basis = interval_pi
    g = sample(grid, lambda x: np.sin(x) ** 3)
    for a in ALPHAS:
        yg = YGrid.for_alpha(a, basis.lambdas[0])
        U = extend_spectral(g, basis, a, yg)
        bound = math.exp(-math.sqrt(basis.lambdas[0]) * yg.y_max / 2) * np.abs(g.values).max()
        assert np.abs(U.values[:, -1]).max() <= bound


@pytest.mark.parametrize("alpha", ALPHAS)
def test_spectral_trace_of_phi2(interval_pi, alpha):
    _, grid, basis = interval_pi
    yg = YGrid.for_alpha(alpha, 1.0)
    p = basis.phi(2)
    tr = neumann_trace(extend_spectral(p, basis, alpha, yg), alpha, p).trace
    assert (tr - 4**alpha * p).l2_norm() <= 2e-2 * 4**alpha


def test_trace_of_y_constant_field_is_zero(interval_pi):
    _, grid, basis = interval_pi
    yg = YGrid(6.0, 50)
    g = basis.phi(1)
    F = ExtensionField(grid, yg, np.repeat(g.values[:, None], yg.K + 1, axis=1))
    assert np.max(np.abs(neumann_trace(F, 0.4, g).trace.values)) < 1e-10


@pytest.mark.parametrize("alpha", ALPHAS)
def test_spectral_trace_consistency_corpus(sym_interval, alpha):
    dom, grid, basis = sym_interval
    yg = YGrid.for_alpha(alpha, basis.lambdas[0])
    for g, _ in make_corpus(dom, grid, 4, seed=0):
        ref = spectral_frac_laplacian(g, basis, alpha)
        tr = neumann_trace(extend_spectral(g, basis, alpha, yg), alpha, g).trace
        assert (tr - ref).l2_norm() <= 1e-2 * ref.l2_norm()


@pytest.mark.parametrize("alpha", (0.3, 0.5, 0.7))
def test_poisson_extension_matches_direct_quadrature(alpha):
    fn = lambda t: np.where(np.abs(t) < 1, np.cos(np.pi * t / 2) ** 4, 0.0)
    grid = build_grid(Domain.interval(-1, 1), 1024)
    g = sample(grid, fn)
    yg = YGrid(2.0, 30, 2.0)
    U = extend_poisson(g, alpha, yg)
    assert np.array_equal(U.values[:, 0], g.values)
    c = special.gamma(0.5 + alpha) / (math.sqrt(math.pi) * special.gamma(alpha))
    for i in (300, 512, 900):
        x = grid.coords()[i]
        for k in (5, 15, 30):
            y = yg.nodes[k]
            ker = lambda t: c * y ** (2 * alpha) * ((x - t) ** 2 + y**2) ** (-(1 + 2 * alpha) / 2) * float(fn(t))
            ref = integrate.quad(ker, -1, 1, points=[x], limit=400, epsabs=1e-13)[0]
            assert abs(U.values[i, k] - ref) < 1e-4


@pytest.mark.parametrize("alpha", ALPHAS)
def test_poisson_trace_matches_fourier(alpha):
    grid = build_grid(Domain.interval(-1, 1), 512)
    g = sample(grid, lambda x: np.where(np.abs(x) < 0.8, np.exp(-1 / np.maximum(1e-300, 1 - (x / 0.8) ** 2)), 0))
    basis = default_basis(grid)
    U = extend_poisson(g, alpha, YGrid.for_alpha(alpha, basis.lambdas[0]))
    tr = neumann_trace(U, alpha, g).trace
    ref = fourier_frac_laplacian(g, alpha)
    assert (tr - ref).l2_norm() <= 2e-2 * ref.l2_norm()


# --------------------------------------------------------------------------- solver

def test_solver_zero_data_gives_zero():
    grid = build_grid(Domain.interval(0, np.pi), 32)
    Z = solve_weighted_pde(None, GridFunction(grid, np.zeros(32)), 0.4, ygrid=YGrid(6.0, 40))
    assert np.all(np.abs(Z.values) == 0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_solver_manufactured_solution(alpha):
    a = 1 - 2 * alpha
    Y = 3.0
    errs = []
    for n, K in ((32, 40), (64, 80), (128, 160)):
        grid = build_grid(Domain.interval(0, np.pi), n)
        x = grid.coords()

        def F(y, x=x):
            y = np.asarray(y, dtype=float)
            prof = -y ** (a + 2) * (Y - y) + 2 * Y * (a + 1) * y**a - 3 * (a + 2) * y ** (a + 1)
            return np.outer(np.sin(x), prof)

        yg = YGrid(Y, K, 2.0)
        Z = solve_weighted_pde(F, GridFunction(grid, np.zeros(n)), alpha, ygrid=yg)
        exact = np.outer(np.sin(x), yg.nodes**2 * (Y - yg.nodes))
        errs.append(np.max(np.abs(Z.values - exact)))
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 2e-3
    assert math.log2(errs[1] / errs[2]) > 1.5


@pytest.mark.parametrize("alpha", ALPHAS)
def test_formula_vs_solver_order(alpha):
    dom = Domain.interval(-1, 1)
    errs = []
    for n, K in ((64, 50), (128, 100), (256, 200)):
        grid = build_grid(dom, n)
        basis = default_basis(grid)
        g = make_corpus(dom, grid, 1, seed=3)[0][0]
        yg = YGrid.for_alpha(alpha, basis.lambdas[0], K=K)
        U = extend_spectral(g, basis, alpha, yg)
        V = solve_weighted_pde(None, g, alpha, dom, yg, top=U.values[:, -1])
        errs.append(math.sqrt(weighted_gradient_energy(U - V, 1 - 2 * alpha) / weighted_gradient_energy(U, 1 - 2 * alpha)))
    orders = [math.log2(e0 / e1) for e0, e1 in zip(errs[:-1], errs[1:])]
    assert min(orders) >= 0.8


@pytest.fixture(scope="module")
def commutator_field():
    dom = Domain.interval(-1, 1)
    grid = build_grid(dom, 256)
    basis = default_basis(grid)
    g, h = make_corpus(dom, grid, 4, seed=0)[3]
    alpha = 0.4
    F = commutator_source(g, h, basis, alpha)
    yg = YGrid.for_alpha(alpha, basis.lambdas[0], K=200)
    Z = solve_weighted_pde(F, GridFunction(grid, np.zeros(grid.size)), alpha, dom, yg)
    return g, h, basis, alpha, F, Z


def test_energy_identity(commutator_field):
    g, h, basis, alpha, F, Z = commutator_field
    rng = np.random.default_rng(1)
    for _ in range(3):
        psi = rng.standard_normal(Z.values.shape)
        psi[:, -1] = 0
        res = energy_identity_residual(Z, F, alpha, psi)
        assert res <= 10 * max(Z.solver_residual, 1e-12)


def test_trace_relation_nodewise(commutator_field):
    *_, alpha, F, Z = commutator_field
    lhs, rhs = trace_relation(Z, alpha)
    m = np.abs(lhs) > 1e-6
    assert m.any()
    assert np.max(np.abs(rhs[m] / lhs[m] - 1)) <= 0.05


def test_commutator_via_trace(commutator_field):
    g, h, basis, alpha, F, Z = commutator_field
    tr = neumann_trace(Z, alpha, GridFunction(g.grid, np.zeros(g.grid.size))).trace
    op = lambda u: spectral_frac_laplacian(u, basis, alpha)
    direct = op(g * h) - g * op(h) - h * op(g)
    assert (tr - direct).l2_norm() <= 3e-2 * direct.l2_norm()


# --------------------------------------------------------------------------- energies

def test_energy_zero_and_homogeneity(interval_pi):
    _, grid, basis = interval_pi
    yg = YGrid(6.0, 100)
    Z = ExtensionField(grid, yg, np.zeros((grid.size, yg.K + 1)))
    assert weighted_gradient_energy(Z, 0.2) == 0
    assert weighted_sup_gradient(Z, 0.2) == 0
    U = extend_spectral(basis.phi(2), basis, 0.3, yg)
    e1 = weighted_gradient_energy(U, 0.4)
    assert abs(weighted_gradient_energy(U * 2.0, 0.4) - 4 * e1) < 1e-12 * e1


def test_energy_matches_sobolev_norm_with_universal_constant(sym_interval):
    dom, grid, basis = sym_interval
    beta = 0.6
    yg = YGrid.for_alpha(beta, basis.lambdas[0], K=200)
    ratios = []
    for _, h in make_corpus(dom, grid, 6, seed=2):
        E = weighted_gradient_energy(extend_spectral(h, basis, beta, yg), 1 - 2 * beta)
        ratios.append(E / frac_sobolev_norm(h, "spectral", beta, basis) ** 2)
    assert (max(ratios) - min(ratios)) / np.mean(ratios) < 0.05


def test_field_l2_of_linear_profile():
    grid = build_grid(Domain.interval(0, 1), 8)
    yg = YGrid(2.0, 20, 2.0)
    Z = ExtensionField(grid, yg, np.outer(np.ones(8), yg.nodes))
    # ∫_0^2 y^a y^2 dy = 2^{a+3}/(a+3) per unit x-length
    for a in (-1.5, -0.5, 0.3):
        assert abs(weighted_field_l2(Z, a) - 2 ** (a + 3) / (a + 3)) < 1e-12


def test_flux_trace_shape(interval_pi):
    _, grid, basis = interval_pi
    U = extend_spectral(basis.phi(1), basis, 0.5, YGrid(6.0, 50))
    assert discrete_flux_trace(U, 0.5).values.shape == (grid.size,)


@settings(max_examples=15, deadline=None)
@given(st.floats(0.05, 0.95), st.floats(0.01, 30.0))
def test_theta_bounded_by_one_and_positive(alpha, r):
    v = float(theta_profile(np.array([r]), alpha)[0])
    assert 0 < v < 1

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from fraclap.domain import Domain, GridFunction, build_grid, default_basis, exterior_tail, interior_bump, sample
from fraclap.operators import (OperatorKind, ZeroExtensionError, apply_operator, fourier_frac_laplacian,
                               frac_sobolev_norm, gagliardo_seminorm, normalization_constant, periodic_multiplier,
                               regional_frac_laplacian, restricted_frac_laplacian, spectral_frac_laplacian,
                               sup_norm, weighted_l1_norm)

ALPHAS = (0.25, 0.5, 0.75)


def gaussian_oracle(x, s):
    """(-Delta)^s exp(-x^2) in one dimension, via Kummer's function."""
    return 4**s * special.gamma(0.5 + s) / special.gamma(0.5) * special.hyp1f1(0.5 + s, 0.5, -x**2)


def pv_oracle(f, x, s):
    """Direct principal-value quadrature c * int_0^inf (2f(x) - f(x+z) - f(x-z)) z^{-1-2s} dz."""
    c = normalization_constant(1, s)
    g = lambda z: (2 * f(x) - f(x + z) - f(x - z)) * z ** (-1 - 2 * s)
    val = integrate.quad(g, 0, 1, limit=200, epsabs=1e-13)[0] + integrate.quad(g, 1, np.inf, limit=200)[0]
    return c * val


def smooth_bump(grid):
    return sample(grid, lambda x: np.where(np.abs(x) < 0.8, np.exp(-1 / np.maximum(1e-300, 1 - (x / 0.8) ** 2)), 0))


# --------------------------------------------------------------------------- spectral

def test_spectral_eigen_examples(interval_pi):
    _, grid, basis = interval_pi
    p1, p2, p3 = basis.phi(1), basis.phi(2), basis.phi(3)
    np.testing.assert_allclose(spectral_frac_laplacian(p1, basis, 0.5).values, p1.values, atol=1e-10)
    np.testing.assert_allclose(spectral_frac_laplacian(p2, basis, 0.5).values, 2 * p2.values, atol=1e-10)
    out = spectral_frac_laplacian(p1 + p3, basis, 0.25)
    np.testing.assert_allclose(out.values, p1.values + 1.7320508075688772 * p3.values, atol=1e-10)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_spectral_eigenfunction_exactness(interval_pi, alpha):
    _, grid, basis = interval_pi
    for j in range(1, basis.J // 4 + 1, 5):
        p = basis.phi(j)
        err = (spectral_frac_laplacian(p, basis, alpha) - basis.lambdas[j - 1] ** alpha * p).l2_norm()
        assert err <= 1e-8 * basis.lambdas[j - 1] ** alpha


def test_spectral_self_adjoint(sym_interval):
    _, grid, basis = sym_interval
    u = sample(grid, lambda x: np.cos(3 * x) * (1 - x**2))
    v = sample(grid, lambda x: np.sin(5 * x) * (1 - x**2) ** 2)
    for a in ALPHAS:
        lhs = np.sum(grid.weights * spectral_frac_laplacian(u, basis, a).values * v.values)
        rhs = np.sum(grid.weights * u.values * spectral_frac_laplacian(v, basis, a).values)
        assert abs(lhs - rhs) <= 1e-10 * max(abs(lhs), 1)


# --------------------------------------------------------------------------- constants

def test_normalization_constant_values():
    assert abs(normalization_constant(1, 0.5) - 1 / math.pi) < 1e-15
    for a in np.linspace(0.05, 0.95, 19):
        lhs = normalization_constant(1, a) * abs(special.gamma(-a))
        assert abs(lhs - 4**a * special.gamma(0.5 + a) / math.sqrt(math.pi)) < 1e-12 * lhs
    # 2D: c_{2,1/2} = 4^{1/2} Gamma(3/2) / (pi |Gamma(-1/2)|) = 1/(2 pi)
    assert abs(normalization_constant(2, 0.5) - 1 / (2 * math.pi)) < 1e-15


# --------------------------------------------------------------------------- kernel operators

@pytest.mark.parametrize("op", [regional_frac_laplacian, restricted_frac_laplacian])
def test_kernel_zero(op, sym_interval):
    _, grid, _ = sym_interval
    assert np.all(op(GridFunction(grid, np.zeros(grid.size)), alpha=0.4).values == 0)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_tail_identity(sym_interval, alpha):
    _, grid, _ = sym_interval
    u = smooth_bump(grid)
    diff = restricted_frac_laplacian(u, alpha=alpha) - regional_frac_laplacian(u, alpha=alpha)
    tail = exterior_tail(grid.domain, grid.nodes, 2 * alpha)
    expect = normalization_constant(1, alpha) * u.values * tail
    assert np.max(np.abs(diff.values - expect)) <= 1e-12 * max(1, np.abs(expect).max())
    assert np.all(tail > 0)


def test_tail_at_centre_alpha_quarter():
    dom = Domain.interval(-1, 1)
    grid = build_grid(dom, 513)
    mid = grid.size // 2
    assert abs(grid.coords()[mid]) < 1e-14
    u = sample(grid, lambda x: np.cos(np.pi * x / 2) ** 4)
    diff = restricted_frac_laplacian(u, alpha=0.25) - regional_frac_laplacian(u, alpha=0.25)
    assert abs(diff.values[mid] - normalization_constant(1, 0.25) * u.values[mid] * 4.0) < 1e-12


def test_restricted_matches_fourier_smooth_bump(sym_interval):
    _, grid, _ = sym_interval
    u = smooth_bump(grid)
    r = restricted_frac_laplacian(u, alpha=0.5)
    f = fourier_frac_laplacian(u, 0.5)
    m = np.abs(grid.coords()) < 0.8
    rel = np.linalg.norm((r - f).values[m]) / np.linalg.norm(f.values[m])
    assert rel <= 1e-3


def test_restricted_matches_pv_quadrature():
    grid = build_grid(Domain.interval(-1, 1), 1024)
    fn = lambda x: np.where(np.abs(x) < 1, np.cos(np.pi * x / 2) ** 6, 0.0)
    u = sample(grid, fn)
    r = restricted_frac_laplacian(u, alpha=0.4, far_order=2)
    for i in (300, 512, 700):
        ref = pv_oracle(lambda t: float(fn(np.array(t))), grid.coords()[i], 0.4)
        assert abs(r.values[i] - ref) <= 1e-3 * abs(ref)


def test_zero_extension_check_rejects_nonvanishing(sym_interval):
    _, grid, _ = sym_interval
    with pytest.raises(ZeroExtensionError):
        restricted_frac_laplacian(sample(grid, lambda x: 1.0 + 0 * x), alpha=0.5)


@pytest.mark.parametrize("alpha", ALPHAS)
def test_reflection_symmetry(sym_interval, alpha):
    _, grid, basis = sym_interval
    u = sample(grid, lambda x: (1 - x**2) ** 3 * (1 + 0.5 * x + 0.3 * np.sin(4 * x)))
    ur = GridFunction(grid, u.values[::-1])
    for kind in OperatorKind:
        a = apply_operator(kind, ur, alpha, basis=basis).values
        b = apply_operator(kind, u, alpha, basis=basis).values[::-1]
        assert np.max(np.abs(a - b)) <= 1e-9 * max(1, np.abs(b).max()), kind


@settings(max_examples=20, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.sampled_from(ALPHAS), st.sampled_from(list(OperatorKind)))
def test_linearity(a, b, alpha, kind):
    grid = build_grid(Domain.interval(-1, 1), 256)
    basis = default_basis(grid)
    u = sample(grid, lambda x: (1 - x**2) ** 3 * np.cos(2 * x))
    v = sample(grid, lambda x: (1 - x**2) ** 3 * np.sin(3 * x + 0.2))
    lhs = apply_operator(kind, a * u + b * v, alpha, basis=basis).values
    rhs = a * apply_operator(kind, u, alpha, basis=basis).values + b * apply_operator(kind, v, alpha, basis=basis).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-10 * max(1, np.abs(rhs).max())


def test_kernel_operators_2d_rectangle_agree_with_fourier():
    grid = build_grid(Domain.rectangle((-1, 1), (-1, 1)), 48)
    u = sample(grid, lambda x, y: (np.cos(np.pi * x / 2) * np.cos(np.pi * y / 2)) ** 4)
    r = restricted_frac_laplacian(u, alpha=0.4)
    f = fourier_frac_laplacian(u, 0.4, padding_factor=4)
    m = np.all(np.abs(grid.nodes) < 0.8, axis=1)
    assert np.linalg.norm((r - f).values[m]) / np.linalg.norm(f.values[m]) < 2e-2


# --------------------------------------------------------------------------- fourier

@pytest.mark.parametrize("alpha", ALPHAS)
def test_fourier_gaussian_closed_form(alpha):
    grid = build_grid(Domain.interval(-6, 6), 1024)
    u = sample(grid, lambda x: np.exp(-x**2))
    out = fourier_frac_laplacian(u, alpha)
    assert np.max(np.abs(out.values - gaussian_oracle(grid.coords(), alpha))) <= 1e-10


def test_fourier_matches_pv_quadrature():
    grid = build_grid(Domain.interval(-4, 4), 512)
    fn = lambda x: np.exp(-x**2) * (1 + 0.3 * x)
    out = fourier_frac_laplacian(sample(grid, fn), 0.35)
    for i in (100, 256, 400):
        ref = pv_oracle(lambda t: float(fn(t)), grid.coords()[i], 0.35)
        assert abs(out.values[i] - ref) <= 1e-3 * abs(ref)


def test_fourier_zero():
    grid = build_grid(Domain.interval(-1, 1), 64)
    assert np.all(fourier_frac_laplacian(GridFunction(grid, np.zeros(64)), 0.3).values == 0)


def test_periodic_multiplier_semigroup():
    grid = build_grid(Domain.interval(-6, 6), 512)
    u = np.exp(-grid.coords() ** 2)
    one = periodic_multiplier(u, grid.spacing, 0.7)
    two = periodic_multiplier(periodic_multiplier(u, grid.spacing, 0.3), grid.spacing, 0.4)
    assert np.max(np.abs(one - two)) <= 1e-12


def test_fourier_semigroup_whole_space():
    """Whole-space composition; the intermediate power-law tail is truncated by the finite box."""
    grid = build_grid(Domain.interval(-6, 6), 1024)
    u = sample(grid, lambda x: np.exp(-x**2))
    v = fourier_frac_laplacian(u, 0.3, restrict=False)
    w = fourier_frac_laplacian(v, 0.4, padding_factor=4)
    x = w.grid.coords()
    m = np.abs(x) < 6
    ref = gaussian_oracle(x[m], 0.7)
    assert np.max(np.abs(w.values[m] - ref)) <= 1e-4 * np.abs(ref).max()


# --------------------------------------------------------------------------- norms

def test_sobolev_norm_examples(interval_pi):
    _, grid, basis = interval_pi
    assert abs(frac_sobolev_norm(basis.phi(1), "spectral", 0.5, basis) - 1) < 1e-10
    assert abs(frac_sobolev_norm(basis.phi(2), "spectral", 0.5, basis) - math.sqrt(2)) < 1e-10
    h = basis.phi(3) + 0.5 * basis.phi(1)
    assert abs(frac_sobolev_norm(h, "spectral", 0.0, basis) - h.l2_norm()) < 1e-14
    assert abs(frac_sobolev_norm(h, "fourier", 0.0) - h.l2_norm()) < 1e-12
    with pytest.raises(ValueError):
        frac_sobolev_norm(h, "regional", 0.5)


def test_sup_and_weighted_norms(interval_pi):
    _, grid, basis = interval_pi
    # cell-centred nodes straddle pi/2; the sampled maximum sits within h^2 of sqrt(2/pi)
    assert abs(sup_norm(basis.phi(1)) - math.sqrt(2 / math.pi)) < grid.h**2
    assert weighted_l1_norm(GridFunction(grid, np.zeros(grid.size))) == 0


def test_gagliardo_zero_and_fourier_identity():
    grid = build_grid(Domain.interval(-1, 1), 1024)
    assert gagliardo_seminorm(GridFunction(grid, np.zeros(grid.size)), alpha=0.3) == 0
    u = smooth_bump(grid)
    for s in (0.2, 0.4):
        full = gagliardo_seminorm(u, alpha=s) ** 2 + 2 * gagliardo_seminorm(u, alpha=s, region="exterior") ** 2
        ref = 2 / normalization_constant(1, s) * np.sum(grid.weights * u.values * fourier_frac_laplacian(u, s).values)
        assert abs(full - ref) <= 2e-3 * ref


def test_gagliardo_refinement_stable():
    vals = []
    for n in (512, 1024):
        grid = build_grid(Domain.interval(-1, 1), n)
        vals.append(gagliardo_seminorm(interior_bump(grid), alpha=0.35, p=2))
    assert abs(vals[1] - vals[0]) / vals[1] < 1e-2


def test_gagliardo_2d_fourier_identity():
    grid = build_grid(Domain.rectangle((-1, 1), (-1, 1)), 40)
    u = sample(grid, lambda x, y: (np.cos(np.pi * x / 2) * np.cos(np.pi * y / 2)) ** 4)
    s = 0.3
    full = gagliardo_seminorm(u, alpha=s) ** 2 + 2 * gagliardo_seminorm(u, alpha=s, region="exterior") ** 2
    ref = 2 / normalization_constant(2, s) * np.sum(grid.weights * u.values *
                                                    fourier_frac_laplacian(u, s, padding_factor=4).values)
    assert abs(full - ref) <= 2e-2 * ref

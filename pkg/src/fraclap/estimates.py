"""Commutator estimates, the weighted sub-inequalities behind them, the Hardy
inequality, the cutoff counterexample and the L^1 weighted bound."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate

from .domain import (Domain, GridFunction, GridMismatchError, build_cutoff, build_grid,
                     default_basis, exterior_tail, make_corpus)
from .extension import (ExtensionField, YGrid, _power_integral, commutator_source, extend_spectral,
                        solve_weighted_pde, weighted_field_l2, weighted_gradient_energy,
                        weighted_sup_gradient)
from .operators import (OperatorKind, _whole_space_on_box, embed, frac_sobolev_norm,
                        fourier_frac_laplacian, gagliardo_seminorm, normalization_constant,
                        regional_frac_laplacian, restricted_frac_laplacian, spectral_frac_laplacian,
                        sup_norm, weighted_l1_norm, weighted_l2_integral)

__all__ = [
    "EstimateReport",
    "ScalingFit",
    "CounterexampleResult",
    "SweepResult",
    "commutator",
    "check_theorem_1",
    "check_es2",
    "check_es42_es39",
    "check_es43",
    "check_hardy",
    "check_hardy_profile",
    "fit_scaling",
    "run_counterexample",
    "check_l1_theorem",
    "truncation",
    "ratio_sweep",
]


@dataclass
class EstimateReport:
    """One inequality instance ``lhs <= C * rhs`` (``lhs >= rhs`` for Hardy)."""

    estimate: str
    lhs: float
    rhs_factors: dict
    rhs: float
    ratio: float = field(init=False)
    config: dict = field(default_factory=dict)
    flag: str = ""

    def __post_init__(self):
        self.lhs = float(self.lhs)
        self.rhs = float(self.rhs)
        vals = [self.lhs, self.rhs] + [float(v) for v in self.rhs_factors.values()]
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"{self.estimate}: non-finite entry in {self.rhs_factors}")
        if self.lhs < 0 or self.rhs < 0:
            raise ValueError(f"{self.estimate}: negative side")
        if self.rhs > 0:
            self.ratio = self.lhs / self.rhs
        elif self.lhs == 0:
            self.ratio = 0.0
        else:
            raise ValueError(f"{self.estimate}: rhs vanishes while lhs = {self.lhs}")


@dataclass
class ScalingFit:
    samples: list
    fitted_slope: float
    r2: float

    @property
    def inconclusive(self) -> bool:
        return self.r2 < 0.95


def fit_scaling(eps: Sequence[float], values: Sequence[float]) -> ScalingFit:
    """Least-squares slope of ``log value`` against ``log eps``."""
    eps = np.asarray(eps, dtype=float)
    values = np.asarray(values, dtype=float)
    if len(eps) < 4:
        raise ValueError("need at least 4 samples")
    x, y = np.log(eps), np.log(values)
    slope, icpt = np.polyfit(x, y, 1)
    ss_res = np.sum((y - (slope * x + icpt)) ** 2)
    ss_tot = np.sum((y - y.mean()) ** 2)
    r2 = 1.0 if ss_tot == 0 else max(0.0, 1 - ss_res / ss_tot)
    return ScalingFit(list(zip(eps.tolist(), values.tolist())), float(slope), float(r2))


# --------------------------------------------------------------------------- commutators

def _op(kind: OperatorKind, u: GridFunction, alpha: float, basis, padding_factor: int) -> GridFunction:
    if kind is OperatorKind.SPECTRAL:
        return spectral_frac_laplacian(u, basis, alpha)
    if kind is OperatorKind.RESTRICTED:
        return restricted_frac_laplacian(u, alpha=alpha)
    if kind is OperatorKind.REGIONAL:
        return regional_frac_laplacian(u, alpha=alpha)
    return fourier_frac_laplacian(u, alpha, padding_factor)


def commutator(g: GridFunction, h: GridFunction, kind, alpha: float, basis=None,
               padding_factor: int = 8, whole_space: bool = False) -> GridFunction:
    """``Op(g h) - g Op(h) - h Op(g)``.

    For the Fourier kind with ``whole_space`` everything is evaluated on the
    padded box, including the exterior of the domain.
    """
    if g.grid is not h.grid:
        raise GridMismatchError("g and h must share a grid")
    kind = OperatorKind(kind)
    gh = g * h
    if kind is OperatorKind.FOURIER and whole_space:
        gb, hb, ghb = (embed(u, padding_factor) for u in (g, h, gh))
        op = lambda ub: GridFunction(ub.grid, _whole_space_on_box(ub, alpha, True))
        return op(ghb) - gb * op(hb) - hb * op(gb)
    if kind is OperatorKind.SPECTRAL:
        basis = basis or default_basis(g.grid)
    return _op(kind, gh, alpha, basis, padding_factor) - g * _op(kind, h, alpha, basis, padding_factor) \
        - h * _op(kind, g, alpha, basis, padding_factor)


def _check_orders(alpha: float, beta: float):
    if not 0 < alpha < 1:
        raise ValueError(f"need 0 < alpha < 1, got {alpha}")
    if not 0 <= beta <= alpha:
        raise ValueError(f"need 0 <= beta <= alpha, got beta={beta} > alpha={alpha}" if beta > alpha
                         else f"need beta >= 0, got {beta}")


def _leibniz_rhs(sob: float, sup_g: float, sup_lap: float, alpha: float, beta: float) -> float:
    return sob * sup_g ** (beta / (2 * alpha)) * sup_lap ** ((2 * alpha - beta) / (2 * alpha))


def check_theorem_1(g: GridFunction, h: GridFunction, alpha: float, beta: float, kind="spectral",
                    basis=None, padding_factor: int = 8, config: dict | None = None) -> EstimateReport:
    """``||D(g,h)||_2 <= C ||(-Δ)^{β/2} h||_2 ||g||_∞^{β/2α} ||(-Δ)^α g||_∞^{(2α-β)/2α}``.

    Spectral kind: all norms over Ω. Fourier kind: all norms over the padded
    box standing in for R^d. Restricted/regional kinds are evaluated over Ω
    for exploration only and flagged.
    """
    _check_orders(alpha, beta)
    kind = OperatorKind(kind)
    cfg = {"alpha": alpha, "beta": beta, "kind": kind.value, "n": g.grid.shape[0]} | (config or {})
    flag = ""
    if kind is OperatorKind.SPECTRAL:
        basis = basis or default_basis(g.grid)
        C = commutator(g, h, kind, alpha, basis)
        sob = frac_sobolev_norm(h, kind, beta, basis)
        lap = spectral_frac_laplacian(g, basis, alpha)
    elif kind is OperatorKind.FOURIER:
        C = commutator(g, h, kind, alpha, padding_factor=padding_factor, whole_space=True)
        sob = frac_sobolev_norm(h, kind, beta, padding_factor=padding_factor)
        lap = fourier_frac_laplacian(g, alpha, padding_factor, restrict=False)
    else:
        C = commutator(g, h, kind, alpha)
        op = restricted_frac_laplacian if kind is OperatorKind.RESTRICTED else regional_frac_laplacian
        sob = h.l2_norm() if beta == 0 else op(h, alpha=beta / 2).l2_norm()
        lap = op(g, alpha=alpha)
        flag = "conjectural" if kind is OperatorKind.RESTRICTED else "no-estimate"
    factors = {"sobolev_h": sob, "sup_g": sup_norm(g), "sup_fraclap_g": sup_norm(lap)}
    rhs = _leibniz_rhs(sob, factors["sup_g"], factors["sup_fraclap_g"], alpha, beta)
    return EstimateReport("theorem_1" if kind is not OperatorKind.FOURIER else "theorem_2",
                          C.l2_norm(), factors, rhs, cfg, flag)


# --------------------------------------------------------------------------- sub-lemmas

def check_es2(h: GridFunction, alpha: float, beta: float, basis=None, K: int = 200,
              config: dict | None = None) -> EstimateReport:
    """``∬ y^{1-2β} |∇V|^2 <= C ||(-Δ)^{β/2} h||^2`` with V the order-α extension of h.

    Factors record the comparison energy of the order-β extension φ of h,
    the ratio ``E(V)/E(φ)`` (the intermediate comparison) and the constant
    ``E(φ) / ||(-Δ)^{β/2} h||^2``.
    """
    _check_orders(alpha, beta)
    if beta == 0:
        raise ValueError("the order-beta extension needs beta > 0")
    basis = basis or default_basis(h.grid)
    lam1 = float(basis.lambdas[0])
    V = extend_spectral(h, basis, alpha, YGrid.for_alpha(alpha, lam1, K))
    phi = V if beta == alpha else extend_spectral(h, basis, beta, YGrid.for_alpha(beta, lam1, K))
    eV = weighted_gradient_energy(V, 1 - 2 * beta)
    ephi = eV if phi is V else weighted_gradient_energy(phi, 1 - 2 * beta)
    sob2 = frac_sobolev_norm(h, "spectral", beta, basis) ** 2
    factors = {"sobolev_h_sq": sob2, "energy_phi": ephi,
               "es1_ratio": eV / ephi if ephi > 0 else 0.0,
               "c_beta": ephi / sob2 if sob2 > 0 else 0.0}
    cfg = {"alpha": alpha, "beta": beta, "kind": "spectral", "n": h.grid.shape[0], "y_layers": K} | (config or {})
    return EstimateReport("es2", eV, factors, sob2, cfg)


def check_es42_es39(g: GridFunction, alpha: float, basis=None, K: int = 200,
                    config: dict | None = None) -> tuple[EstimateReport, EstimateReport]:
    """``||y^{1-2α}|∇U|||_∞ <= C ||(-Δ)^α g||_∞`` and ``||y|∇U|||_∞ <= C ||g||_∞``."""
    basis = basis or default_basis(g.grid)
    U = extend_spectral(g, basis, alpha, YGrid.for_alpha(alpha, float(basis.lambdas[0]), K))
    a = 1 - 2 * alpha
    cfg = {"alpha": alpha, "kind": "spectral", "n": g.grid.shape[0], "y_layers": K} | (config or {})
    lap = sup_norm(spectral_frac_laplacian(g, basis, alpha))
    r42 = EstimateReport("es42", weighted_sup_gradient(U, a),
                         {"sup_fraclap_g": lap,
                          "lhs_y_component": weighted_sup_gradient(U, a, "y"),
                          "lhs_x_component": weighted_sup_gradient(U, a, "x")}, lap, cfg)
    r39 = EstimateReport("es39", weighted_sup_gradient(U, 1.0), {"sup_g": sup_norm(g)}, sup_norm(g), cfg)
    return r42, r39


def solve_commutator_field(g: GridFunction, h: GridFunction, alpha: float, basis=None,
                           K: int = 200, ygrid: YGrid | None = None) -> ExtensionField:
    """``Z = W - U V`` from the weighted PDE with source ``-2 y^{1-2α} ∇U·∇V`` and zero data."""
    basis = basis or default_basis(g.grid)
    yg = ygrid or YGrid.for_alpha(alpha, float(basis.lambdas[0]), K)
    F = commutator_source(g, h, basis, alpha)
    return solve_weighted_pde(F, GridFunction(g.grid, np.zeros(g.grid.size)), alpha, g.grid.domain, yg)


def check_es43(g: GridFunction, h: GridFunction, alpha: float, beta: float, basis=None, K: int = 200,
               Z: ExtensionField | None = None, config: dict | None = None) -> EstimateReport:
    """``∬ y^{-1-2α} Z^2 <= C ||(-Δ)^{β/2}h||^2 ||g||_∞^{2β/α} ||(-Δ)^α g||_∞^{2(α-β)/α}``."""
    _check_orders(alpha, beta)
    basis = basis or default_basis(g.grid)
    if Z is None:
        Z = solve_commutator_field(g, h, alpha, basis, K)
    lhs = weighted_field_l2(Z, -1 - 2 * alpha)
    sob2 = frac_sobolev_norm(h, "spectral", beta, basis) ** 2
    sg = sup_norm(g)
    sl = sup_norm(spectral_frac_laplacian(g, basis, alpha))
    rhs = sob2 * sg ** (2 * beta / alpha) * sl ** (2 * (alpha - beta) / alpha)
    cfg = {"alpha": alpha, "beta": beta, "kind": "spectral", "n": g.grid.shape[0],
           "y_layers": Z.ygrid.K} | (config or {})
    return EstimateReport("es43", lhs, {"sobolev_h_sq": sob2, "sup_g": sg, "sup_fraclap_g": sl}, rhs, cfg)


# --------------------------------------------------------------------------- Hardy

def _num_deriv(w, y):
    s = 1e-3 * y
    return (-w(y + 2 * s) + 8 * w(y + s) - 8 * w(y - s) + w(y - 2 * s)) / (12 * s)


def check_hardy(w: Callable, sigma: float, dw: Callable | None = None, y_max: float = np.inf,
                y_lo: float = 1e-10, config: dict | None = None) -> EstimateReport:
    """Half-line Hardy inequality ``∫ y^{1-2σ} w'^2 >= σ^2 ∫ y^{-1-2σ} w^2`` on ``(0, y_max)``.

    Integrals are computed by adaptive quadrature in ``log y`` above
    ``y_lo``; below it ``w`` is extrapolated as a power law.
    """
    if not 0 < sigma < 1:
        raise ValueError("need 0 < sigma < 1")
    if abs(float(w(0.0))) > 1e-12:
        raise ValueError("w must vanish at 0")
    dw = dw or (lambda y: _num_deriv(w, y))
    fl = lambda t: math.exp((2 - 2 * sigma) * t) * float(dw(math.exp(t))) ** 2
    fr = lambda t: math.exp(-2 * sigma * t) * float(w(math.exp(t))) ** 2

    def integ(f):
        tlo = math.log(y_lo)
        thi = min(math.log(y_max), 0.0) if np.isfinite(y_max) else 0.0
        total = integrate.quad(f, tlo, thi, limit=400, epsabs=0, epsrel=1e-11)[0]
        if y_max > 1:
            top = math.log(y_max) if np.isfinite(y_max) else 7.0
            pts = np.linspace(0.0, top, 8)
            total += sum(integrate.quad(f, p0, p1, limit=400, epsabs=0, epsrel=1e-11)[0]
                         for p0, p1 in zip(pts[:-1], pts[1:]))
            if not np.isfinite(y_max):
                g = lambda y: f(math.log(y)) / y
                total += integrate.quad(g, math.exp(top), np.inf, limit=400, epsabs=0, epsrel=1e-11)[0]
        return total

    lhs = integ(fl)
    rhs_int = integ(fr)
    # power-law extrapolation below y_lo
    w1, w2 = float(w(y_lo)), float(w(2 * y_lo))
    if w1 != 0 and w2 != 0:
        p = math.log(abs(w2 / w1)) / math.log(2)
        if p <= sigma:
            raise ValueError("Hardy integrals diverge at 0 for this w")
        scale = w1**2 * y_lo ** (-2 * sigma) / (2 * p - 2 * sigma)
        lhs += p * p * scale
        rhs_int += scale
    rhs = sigma**2 * rhs_int
    cfg = {"sigma": sigma} | (config or {})
    return EstimateReport("hardy", lhs, {"weighted_l2_w": rhs_int}, rhs, cfg,
                          "" if lhs >= rhs * (1 - 1e-12) else "violated")


def check_hardy_profile(values: np.ndarray, y: np.ndarray, sigma: float,
                        config: dict | None = None) -> EstimateReport:
    """Hardy inequality for the piecewise-linear interpolant of ``values`` at nodes ``y``.

    Both integrals are exact for the interpolant; ``values[0]`` must vanish.
    """
    v = np.asarray(values, dtype=float)
    y = np.asarray(y, dtype=float)
    if y[0] != 0 or abs(v[0]) > 1e-14 * max(np.abs(v).max(), 1e-300):
        raise ValueError("profile must start at y = 0 with value 0")
    B = np.diff(v) / np.diff(y)
    lhs = float(np.sum(B**2 * _power_integral(1 - 2 * sigma, y[:-1], y[1:])))
    A = v[:-1] - B * y[:-1]
    a = -1 - 2 * sigma
    m2 = _power_integral(a + 2, y[:-1], y[1:])
    m1 = np.where(A != 0, _power_integral(a + 1, np.maximum(y[:-1], 1e-300), y[1:]), 0.0)
    m0 = np.where(A != 0, _power_integral(a, np.maximum(y[:-1], 1e-300), y[1:]), 0.0)
    A[0] = 0.0
    rhs_int = float(np.sum(A**2 * m0 + 2 * A * B * m1 + B**2 * m2))
    rhs = sigma**2 * rhs_int
    cfg = {"sigma": sigma} | (config or {})
    return EstimateReport("hardy_profile", lhs, {"weighted_l2_w": rhs_int}, rhs, cfg,
                          "" if lhs >= rhs * (1 - 1e-12) else "violated")


# --------------------------------------------------------------------------- appendix

@dataclass
class CounterexampleResult:
    eps: list
    W: list
    G: list
    H: list
    H_regional: list
    H_tail: list
    G_alpha1: list
    seminorm_fit: ScalingFit
    regional_fit: ScalingFit
    checks: dict
    params: dict

    @property
    def hardy_quotients(self) -> list:
        return [g / w for g, w in zip(self.G, self.W)]

    @property
    def halfnorm_values(self) -> list:
        return list(self.H)


def run_counterexample(alpha: float = 0.3, alpha0: float = 0.4, alpha1: float = 0.35, alpha2: float = 0.45,
                       eps_list: Sequence[float] = (0.08, 0.04, 0.02, 0.01), n: int = 4096) -> CounterexampleResult:
    """Cutoffs ``u_eps`` on ``B_1 ⊂ R``: the weighted L^2 integral ``W`` and the
    half-order norm ``H`` stay of order one while the Gagliardo energy ``G``
    tends to zero."""
    if not 0 < alpha < alpha0 < 0.5:
        raise ValueError("need 0 < alpha < alpha0 < 1/2")
    if not alpha < alpha1 < alpha2 < 0.5:
        raise ValueError("need alpha < alpha1 < alpha2 < 1/2")
    eps_list = [float(e) for e in eps_list]
    if len(eps_list) < 4 or not all(0 < e < 0.1 for e in eps_list):
        raise ValueError("need at least 4 values of eps in (0, 1/10)")
    dom = Domain.ball(0.0, 1.0, dim=1)
    grid = build_grid(dom, n)
    c = normalization_constant(1, alpha / 2)
    tail = exterior_tail(dom, grid.nodes, alpha)
    W, G, H, Hr, Ht, G1 = [], [], [], [], [], []
    for e in eps_list:
        u = build_cutoff(e, grid)
        W.append(weighted_l2_integral(u, dom, alpha, weight="ball"))
        G.append(gagliardo_seminorm(u, alpha=alpha, p=2) ** 2)
        G1.append(gagliardo_seminorm(u, alpha=alpha1, p=2) ** 2)
        reg = regional_frac_laplacian(u, alpha=alpha / 2)
        Hr.append(reg.l2_norm() ** 2)
        Ht.append(float(np.sum(grid.weights * (c * u.values * tail) ** 2)))
        H.append(GridFunction(grid, reg.values + c * u.values * tail).l2_norm() ** 2)
    fit = fit_scaling(eps_list, G)
    rfit = fit_scaling(eps_list, Hr)
    order = np.argsort(eps_list)[::-1]                       # decreasing eps
    quot = np.array([G[i] / W[i] for i in order])
    emin, emax = min(eps_list), max(eps_list)
    gmin, gmax = G[eps_list.index(emin)], G[eps_list.index(emax)]
    checks = {
        "W_band": max(W) / min(W) <= 4.0,
        "H_band": max(H) / min(H) <= 4.0,
        "G_slope": fit.fitted_slope >= 1 - 2 * alpha0 - 0.15,
        "G_fit_conclusive": not fit.inconclusive,
        "quotient_monotone": bool(np.all(np.diff(quot) < 0)),
        "G_separation": gmin / gmax <= (emin / emax) ** 0.1,
    }
    params = {"alpha": alpha, "alpha0": alpha0, "alpha1": alpha1, "alpha2": alpha2, "n": n}
    return CounterexampleResult(eps_list, W, G, H, Hr, Ht, G1, fit, rfit, checks, params)


def truncation(u: GridFunction, eps: float) -> GridFunction:
    """``sign(u) min(eps, |u|)``."""
    if eps < 0:
        raise ValueError("eps must be non-negative")
    return GridFunction(u.grid, np.sign(u.values) * np.minimum(eps, np.abs(u.values)))


def check_l1_theorem(u: GridFunction, alpha: float, delta: float, config: dict | None = None) -> EstimateReport:
    """``∫|u|/d^{2α} + [u]_{W^{2α-δ,1}(R^d)} <= C ||f||_{L^1(Ω)}`` with ``f`` the
    raw-kernel operator ``∫(u(x)-u(y))|x-y|^{-d-2α} dy`` of ``u``.

    Factors also record the intermediate weighted bound and the exact
    exterior bound ``∫_Ω |u| tail_{2α} <= ||f||_1`` (constant one).
    """
    if not 0 < alpha < 1:
        raise ValueError("need 0 < alpha < 1")
    if not 0 < delta < alpha / 4:
        raise ValueError(f"need 0 < delta < alpha/4, got {delta}")
    grid = u.grid
    c = normalization_constant(grid.dim, alpha)
    f = restricted_frac_laplacian(u, alpha=alpha)
    f1 = float(np.sum(grid.weights * np.abs(f.values))) / c
    wl1 = weighted_l1_norm(u, grid.domain, alpha)
    s = 2 * alpha - delta
    if s >= 1:
        raise ValueError("2*alpha - delta must be below 1 for the p=1 seminorm")
    inner = gagliardo_seminorm(u, alpha=s, p=1, region="omega")
    outer = gagliardo_seminorm(u, alpha=s, p=1, region="exterior")
    semi = inner + 2 * outer
    ext = float(np.sum(grid.weights * np.abs(u.values) * exterior_tail(grid.domain, grid.nodes, 2 * alpha)))
    factors = {"f_l1": f1, "weighted_l1": wl1, "seminorm_w1": semi,
               "z4_ratio": wl1 / f1 if f1 > 0 else 0.0,
               "exterior_bound_ratio": ext / f1 if f1 > 0 else 0.0}
    cfg = {"alpha": alpha, "beta": delta, "kind": "restricted", "n": grid.shape[0]} | (config or {})
    return EstimateReport("z5", wl1 + semi, factors, f1, cfg)


# --------------------------------------------------------------------------- sweeps

@dataclass
class SweepResult:
    reports: list
    max_ratio: dict            # (estimate, kind, alpha, beta, level) -> max ratio
    drift: dict                # (estimate, kind, alpha, beta) -> relative drift between finest levels


ESTIMATES = ("theorem_1", "es2", "es42", "es43")


def ratio_sweep(corpus: Callable | None = None, alphas: Sequence[float] = (0.25, 0.5, 0.75),
                beta_fracs: Sequence[float] = (0.5, 1.0), kinds: Sequence[str] = ("spectral", "fourier"),
                levels: Sequence[tuple[int, int]] = ((128, 100), (256, 200)),
                domain: Domain | None = None, corpus_size: int = 12, seed: int = 0,
                estimates: Sequence[str] = ESTIMATES, betas: Sequence[float] | None = None) -> SweepResult:
    """Run the estimates over corpus x alpha x beta x kind x refinement level.

    ``levels`` lists ``(n, K)`` pairs; ``beta_fracs`` are fractions of alpha,
    replaced by the absolute values ``betas`` when those are given.
    The sub-lemmas (es*) are spectral-only. ``corpus(grid)`` returns
    ``(g, h)`` pairs; by default the standard corpus of ``corpus_size`` pairs.
    """
    domain = domain or Domain.interval(-1.0, 1.0)
    corpus = corpus or (lambda grid: make_corpus(domain, grid, corpus_size, seed))
    reports = []
    for lev, (n, K) in enumerate(levels):
        grid = build_grid(domain, n)
        basis = default_basis(grid)
        pairs = corpus(grid)
        for a in alphas:
            for i, (g, h) in enumerate(pairs):
                base = {"level": lev, "sample": i, "n": n}
                Z = None
                if "es42" in estimates:
                    for r in check_es42_es39(g, a, basis, K, config=dict(base)):
                        reports.append(r)
                for b in (betas if betas is not None else [a * bf for bf in beta_fracs]):
                    _check_orders(a, b)
                    cfg = dict(base, beta=b)
                    if "theorem_1" in estimates:
                        for kind in kinds:
                            reports.append(check_theorem_1(g, h, a, b, kind, basis, config=dict(cfg)))
                    if "es2" in estimates:
                        r = check_es2(h, a, b, basis, K, config=dict(cfg))
                        reports.append(r)
                        reports.append(EstimateReport("es1", r.lhs, {"energy_phi": r.rhs_factors["energy_phi"]},
                                                      r.rhs_factors["energy_phi"], dict(r.config)))
                    if "es43" in estimates:
                        if Z is None:
                            Z = solve_commutator_field(g, h, a, basis, K)
                        reports.append(check_es43(g, h, a, b, basis, K, Z=Z, config=dict(cfg)))
    return summarize_sweep(reports, len(levels))


def summarize_sweep(reports: list, n_levels: int) -> SweepResult:
    mx: dict = {}
    for r in reports:
        c = r.config
        key = (r.estimate, c.get("kind", ""), c["alpha"], c.get("beta"), c["level"])
        mx[key] = max(mx.get(key, 0.0), r.ratio)
    drift = {}
    if n_levels >= 2:
        for (est, kind, a, b, lev), v in mx.items():
            if lev == n_levels - 1:
                prev = mx.get((est, kind, a, b, lev - 1))
                if prev is not None:
                    drift[(est, kind, a, b)] = abs(v - prev) / prev if prev > 0 else (0.0 if v == 0 else math.inf)
    return SweepResult(reports, mx, drift)

"""Geometry, grids, quadrature, Dirichlet eigenbases and test-function corpora."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

__all__ = [
    "Domain",
    "Grid",
    "GridFunction",
    "EigenBasis",
    "GridMismatchError",
    "build_grid",
    "build_eigenbasis",
    "default_basis",
    "project",
    "synthesize",
    "dist_to_boundary",
    "exterior_tail",
    "bump_family",
    "smoothstep5",
    "smoothstep7",
    "build_cutoff",
    "interior_bump",
    "make_corpus",
    "sample",
    "MIN_NODES_PER_AXIS",
]

MIN_NODES_PER_AXIS = 8


class GridMismatchError(ValueError):
    """Raised when two objects that must share a grid do not."""


@dataclass(frozen=True)
class Domain:
    """A bounded interval, rectangle, or ball in dimension 1 or 2."""

    kind: str
    bounds: tuple[tuple[float, float], ...] = ()
    center: tuple[float, ...] = ()
    radius: float = 0.0

    def __post_init__(self):
        if self.kind in ("interval", "rectangle"):
            want = 1 if self.kind == "interval" else 2
            if len(self.bounds) != want:
                raise ValueError(f"{self.kind} needs {want} axis bound(s)")
            for a, b in self.bounds:
                if not a < b:
                    raise ValueError(f"need a < b per axis, got ({a}, {b})")
        elif self.kind == "ball":
            if self.radius <= 0:
                raise ValueError("radius must be positive")
            if len(self.center) not in (1, 2):
                raise ValueError("ball supported only in d=1 and d=2")
        else:
            raise ValueError(f"unknown domain kind {self.kind!r}")

    @classmethod
    def interval(cls, a: float, b: float) -> "Domain":
        return cls("interval", bounds=((float(a), float(b)),))

    @classmethod
    def rectangle(cls, xb: tuple[float, float], yb: tuple[float, float]) -> "Domain":
        return cls("rectangle", bounds=(tuple(map(float, xb)), tuple(map(float, yb))))

    @classmethod
    def ball(cls, center=0.0, radius: float = 1.0, dim: int | None = None) -> "Domain":
        c = tuple(float(v) for v in np.atleast_1d(center))
        if dim is not None and len(c) != dim:
            c = (c[0],) * dim
        return cls("ball", center=c, radius=float(radius))

    @property
    def dim(self) -> int:
        return len(self.center) if self.kind == "ball" else len(self.bounds)

    @property
    def box(self) -> tuple[tuple[float, float], ...]:
        """Axis-aligned bounding box; for a 1D ball this is the domain itself."""
        if self.kind == "ball":
            return tuple((c - self.radius, c + self.radius) for c in self.center)
        return self.bounds

    @property
    def is_box(self) -> bool:
        """True when the domain coincides with its bounding box."""
        return self.kind != "ball" or self.dim == 1

    @property
    def measure(self) -> float:
        if self.kind == "ball" and self.dim == 2:
            return np.pi * self.radius**2
        return float(np.prod([b - a for a, b in self.box]))

    def contains(self, x, tol: float = 1e-12) -> np.ndarray:
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self.kind == "ball":
            r = np.linalg.norm(x - np.asarray(self.center), axis=1)
            return r <= self.radius + tol
        inside = np.ones(len(x), dtype=bool)
        for k, (a, b) in enumerate(self.bounds):
            inside &= (x[:, k] >= a - tol) & (x[:, k] <= b + tol)
        return inside


@dataclass(frozen=True, eq=False)
class Grid:
    """Quadrature nodes and positive weights covering a domain.

    Tensor grids store nodes in C order over ``shape``. Identity defines
    equality, so grids can key caches.
    """

    domain: Domain
    nodes: np.ndarray
    weights: np.ndarray
    spacing: tuple[float, ...]
    shape: tuple[int, ...]
    include_boundary: bool = False
    tensor: bool = True
    axes: tuple[np.ndarray, ...] = ()

    @property
    def h(self) -> float:
        return max(self.spacing)

    @property
    def dim(self) -> int:
        return self.nodes.shape[1]

    @property
    def size(self) -> int:
        return len(self.weights)

    def coords(self, axis: int = 0) -> np.ndarray:
        return self.nodes[:, axis]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A real function sampled at the nodes of a grid."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if len(v) != self.grid.size:
            raise ValueError(f"length {len(v)} does not match grid size {self.grid.size}")
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", v)

    def _other(self, other):
        if isinstance(other, GridFunction):
            if other.grid is not self.grid:
                raise GridMismatchError("grid functions live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return GridFunction(self.grid, self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return GridFunction(self.grid, self.values - self._other(other))

    def __rsub__(self, other):
        return GridFunction(self.grid, self._other(other) - self.values)

    def __mul__(self, other):
        return GridFunction(self.grid, self.values * self._other(other))

    __rmul__ = __mul__

    def __neg__(self):
        return GridFunction(self.grid, -self.values)

    def reshaped(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)

    def l2_norm(self) -> float:
        return float(np.sqrt(np.sum(self.grid.weights * self.values**2)))

    def integral(self) -> float:
        return float(np.sum(self.grid.weights * self.values))


@dataclass(frozen=True, eq=False)
class EigenBasis:
    """Truncated Dirichlet eigenpairs sampled on a grid.

    ``phis`` has shape (J, N); ``dphis`` holds the gradient, shape (d, J, N).
    """

    grid: Grid
    lambdas: np.ndarray
    phis: np.ndarray
    dphis: np.ndarray
    indices: np.ndarray = field(repr=False, default=None)

    @property
    def J(self) -> int:
        return len(self.lambdas)

    def phi(self, j: int) -> GridFunction:
        """The j-th eigenfunction, 1-based as in the usual notation."""
        return GridFunction(self.grid, self.phis[j - 1])


def build_grid(domain: Domain, n_per_axis: int, include_boundary: bool = False) -> Grid:
    """Uniform composite quadrature on ``domain``.

    The default is the midpoint rule (cell centres, strictly interior);
    ``include_boundary`` switches to the trapezoid rule with ``n + 1`` nodes
    per axis. A 2D ball gets a polar midpoint grid (n radial cells, 4n
    angular cells), which integrates the area exactly.
    """
    if n_per_axis < MIN_NODES_PER_AXIS:
        raise ValueError(f"n_per_axis must be >= {MIN_NODES_PER_AXIS}, got {n_per_axis}")
    n = int(n_per_axis)
    if domain.kind == "ball" and domain.dim == 2:
        R = domain.radius
        dr = R / n
        r = (np.arange(n) + 0.5) * dr
        nt = 4 * n
        dt = 2 * np.pi / nt
        t = (np.arange(nt) + 0.5) * dt
        rr, tt = np.meshgrid(r, t, indexing="ij")
        c = np.asarray(domain.center)
        nodes = np.column_stack([c[0] + (rr * np.cos(tt)).ravel(), c[1] + (rr * np.sin(tt)).ravel()])
        weights = (rr * dr * dt).ravel()
        return Grid(domain, nodes, weights, (dr,), (n, nt), False, tensor=False, axes=(r, t))

    axes, wts, spacing = [], [], []
    for a, b in domain.box:
        h = (b - a) / n
        if include_boundary:
            x = a + h * np.arange(n + 1)
            w = np.full(n + 1, h)
            w[[0, -1]] = h / 2
        else:
            x = a + h * (np.arange(n) + 0.5)
            w = np.full(n, h)
        axes.append(x)
        wts.append(w)
        spacing.append(h)
    mesh = np.meshgrid(*axes, indexing="ij")
    nodes = np.column_stack([m.ravel() for m in mesh])
    weights = wts[0]
    for w in wts[1:]:
        weights = np.multiply.outer(weights, w)
    shape = tuple(len(x) for x in axes)
    return Grid(domain, nodes, np.ravel(weights), tuple(spacing), shape, include_boundary,
                tensor=True, axes=tuple(axes))


def _sine_modes(x: np.ndarray, a: float, b: float, jmax: int):
    L = b - a
    j = np.arange(1, jmax + 1)[:, None]
    arg = j * np.pi * (x[None, :] - a) / L
    s = np.sqrt(2.0 / L)
    return s * np.sin(arg), s * (j * np.pi / L) * np.cos(arg), (j[:, 0] * np.pi / L) ** 2


def build_eigenbasis(domain: Domain, grid: Grid, J: int) -> EigenBasis:
    """First ``J`` Dirichlet eigenpairs in increasing eigenvalue order.

    Closed form on intervals (sines) and rectangles (tensor products; ties
    broken by the index pair). Balls in 2D are rejected.
    """
    if domain.kind == "ball" and domain.dim == 2:
        raise NotImplementedError("no closed-form eigenbasis for a 2D ball")
    if grid.domain != domain or not grid.tensor:
        raise GridMismatchError("grid was not built on this domain")
    if J < 1:
        raise ValueError("J must be >= 1")
    box = domain.box
    if domain.dim == 1:
        (a, b), = box
        phis, dphis, lam = _sine_modes(grid.axes[0], a, b, J)
        return EigenBasis(grid, lam, phis, dphis[None], np.arange(1, J + 1)[:, None])

    (a1, b1), (a2, b2) = box
    # enough 1D modes per axis to contain the J smallest sums
    m = J
    s1, d1, l1 = _sine_modes(grid.axes[0], a1, b1, m)
    s2, d2, l2 = _sine_modes(grid.axes[1], a2, b2, m)
    pairs = [(l1[i] + l2[k], i, k) for i in range(m) for k in range(m)]
    pairs.sort()
    pairs = pairs[:J]
    lam = np.array([p[0] for p in pairs])
    idx = np.array([(p[1] + 1, p[2] + 1) for p in pairs])
    phis = np.empty((J, grid.size))
    dphis = np.empty((2, J, grid.size))
    for q, (_, i, k) in enumerate(pairs):
        phis[q] = np.multiply.outer(s1[i], s2[k]).ravel()
        dphis[0, q] = np.multiply.outer(d1[i], s2[k]).ravel()
        dphis[1, q] = np.multiply.outer(s1[i], d2[k]).ravel()
    return EigenBasis(grid, lam, phis, dphis, idx)


@lru_cache(maxsize=64)
def _cached_basis(grid: Grid, J: int) -> EigenBasis:
    return build_eigenbasis(grid.domain, grid, J)


def default_basis(grid: Grid, J: int | None = None) -> EigenBasis:
    """Cached eigenbasis with ``J = n/4`` modes per axis resolution by default."""
    if J is None:
        J = max(1, min(grid.shape) // 4)
        if grid.dim == 2:
            J = J * J
    return _cached_basis(grid, int(J))


def _check_same_grid(f: GridFunction, basis: EigenBasis):
    if f.grid is not basis.grid:
        raise GridMismatchError("function and basis live on different grids")


def project(f: GridFunction, basis: EigenBasis) -> np.ndarray:
    """Coefficients ``u_j = sum_i w_i f(x_i) phi_j(x_i)``."""
    _check_same_grid(f, basis)
    return basis.phis @ (basis.grid.weights * f.values)


def synthesize(coeffs, basis: EigenBasis) -> GridFunction:
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.ndim != 1 or len(coeffs) > basis.J:
        raise ValueError(f"need at most {basis.J} coefficients, got shape {coeffs.shape}")
    return GridFunction(basis.grid, coeffs @ basis.phis[: len(coeffs)])


def dist_to_boundary(domain: Domain, x) -> np.ndarray | float:
    """Euclidean distance from ``x`` (a point or an (N, d) array) to the boundary."""
    pts = np.asarray(x, dtype=float)
    scalar = pts.ndim == 0 or (pts.ndim == 1 and domain.dim > 1)
    pts = pts.reshape(-1, domain.dim)
    if not np.all(domain.contains(pts)):
        raise ValueError("point outside the domain")
    if domain.kind == "ball":
        d = domain.radius - np.linalg.norm(pts - np.asarray(domain.center), axis=1)
    else:
        d = np.min([np.minimum(pts[:, k] - a, b - pts[:, k])
                    for k, (a, b) in enumerate(domain.bounds)], axis=0)
    d = np.maximum(d, 0.0)
    return float(d[0]) if scalar else d


_GL_X, _GL_W = np.polynomial.legendre.leggauss(48)


def _angular_integral(rho_fn, breaks, p: float, pts: np.ndarray) -> np.ndarray:
    """Integrate rho(theta)^(-p) over [0, 2pi] piecewise with Gauss-Legendre."""
    total = np.zeros(len(pts))
    for t0, t1 in zip(breaks[:-1], breaks[1:]):
        t0 = np.asarray(t0)
        t1 = np.asarray(t1)
        mid, half = (t0 + t1) / 2, (t1 - t0) / 2
        th = mid[..., None] + half[..., None] * _GL_X
        rho = rho_fn(th)
        total += half * np.sum(_GL_W * rho ** (-p), axis=-1)
    return total


def exterior_tail(domain: Domain, points, s: float) -> np.ndarray:
    """``∫_{complement of domain} |x - y|^{-d-s} dy`` for each point ``x``.

    Closed form in 1D. In 2D the integral is reduced to
    ``(1/s) ∫_0^{2π} ρ(θ)^{-s} dθ`` with ρ the distance to the boundary
    along direction θ, integrated piecewise between corner angles.
    """
    if s <= 0:
        raise ValueError("tail exponent must be positive")
    pts = np.asarray(points, dtype=float).reshape(-1, domain.dim)
    if domain.dim == 1:
        (a, b), = domain.box
        x = pts[:, 0]
        return ((x - a) ** (-s) + (b - x) ** (-s)) / s

    if domain.kind == "ball":
        c = np.asarray(domain.center)
        R = domain.radius
        q = pts - c

        def rho(th):
            e0, e1 = np.cos(th), np.sin(th)
            qe = q[:, 0:1] * e0 + q[:, 1:2] * e1
            qq = np.sum(q**2, axis=1)[:, None]
            return -qe + np.sqrt(qe**2 + R**2 - qq)

        nb = 16
        breaks = [np.full(len(pts), 2 * np.pi * k / nb) for k in range(nb + 1)]
        return _angular_integral(rho, breaks, s, pts) / s

    (a1, b1), (a2, b2) = domain.bounds
    x, y = pts[:, 0], pts[:, 1]
    dr, du, dl, dd = b1 - x, b2 - y, x - a1, y - a2
    c1 = np.arctan2(du, dr)
    c2 = np.pi - np.arctan2(du, dl)
    c3 = np.pi + np.arctan2(dd, dl)
    c4 = 2 * np.pi - np.arctan2(dd, dr)

    def rho_side(dist, phi0):
        return lambda th: dist[:, None] / np.cos(th - phi0)

    total = np.zeros(len(pts))
    pieces = [
        (rho_side(dr, 0.0), [np.zeros(len(pts)), c1]),
        (rho_side(du, np.pi / 2), [c1, c2]),
        (rho_side(dl, np.pi), [c2, c3]),
        (rho_side(dd, 3 * np.pi / 2), [c3, c4]),
        (rho_side(dr, 2 * np.pi), [c4, np.full(len(pts), 2 * np.pi)]),
    ]
    for fn, br in pieces:
        total += _angular_integral(fn, br, s, pts)
    return total / s


def smoothstep5(t):
    """Quintic smoothstep: 0 at t<=0, 1 at t>=1, C2 seams."""
    t = np.clip(t, 0.0, 1.0)
    return t**3 * (10 - 15 * t + 6 * t**2)


def smoothstep7(t):
    """Degree-7 smoothstep with C3 seams."""
    t = np.clip(t, 0.0, 1.0)
    return t**4 * (35 - 84 * t + 70 * t**2 - 20 * t**3)


def build_cutoff(eps: float, grid: Grid, center=None) -> GridFunction:
    """Cutoff ``u_eps``: 1 on ``|x| <= 1-2eps``, 0 on ``|x| >= 1-eps``.

    The transition is a quintic smoothstep in ``|x|``, so the gradient is
    at most ``1.875/eps`` (attained mid-ramp).
    """
    if not 0 < eps < 0.1:
        raise ValueError(f"eps must lie in (0, 1/10), got {eps}")
    if center is None:
        center = grid.domain.center if grid.domain.kind == "ball" else \
            [(a + b) / 2 for a, b in grid.domain.box]
    r = np.linalg.norm(grid.nodes - np.asarray(center, dtype=float), axis=1)
    return GridFunction(grid, smoothstep5((1 - eps - r) / eps))


def interior_bump(grid: Grid, margin: float = 0.1, ramp: float = 0.2) -> GridFunction:
    """Product of degree-7 ramps; zero within ``margin`` (fraction of the axis
    length, or of the radius for a 2D ball) of the boundary, one beyond
    ``margin + ramp``."""
    dom = grid.domain
    if dom.kind == "ball" and dom.dim == 2:
        r = np.linalg.norm(grid.nodes - np.asarray(dom.center), axis=1) / dom.radius
        return GridFunction(grid, smoothstep7((1 - margin - r) / ramp))
    v = np.ones(grid.size)
    for k, (a, b) in enumerate(dom.box):
        s = (grid.nodes[:, k] - a) / (b - a)
        v *= smoothstep7((s - margin) / ramp) * smoothstep7((1 - margin - s) / ramp)
    return GridFunction(grid, v)


def _box_sine(grid: Grid, j: int) -> np.ndarray:
    v = np.ones(grid.size)
    for k, (a, b) in enumerate(grid.domain.box):
        L = b - a
        v *= np.sqrt(2 / L) * np.sin(j * np.pi * (grid.nodes[:, k] - a) / L)
    return v


def _random_trig(grid: Grid, rng: np.random.Generator, n_terms: int = 4) -> np.ndarray:
    d = grid.dim
    s = np.column_stack([(grid.nodes[:, k] - a) / (b - a) for k, (a, b) in enumerate(grid.domain.box)])
    v = np.full(grid.size, rng.uniform(0.5, 1.5) * rng.choice([-1.0, 1.0]))
    for _ in range(n_terms):
        kvec = rng.integers(0, 5, size=d)
        amp = rng.uniform(-1, 1) / (1 + np.linalg.norm(kvec))
        phase = rng.uniform(0, 2 * np.pi)
        v += amp * np.cos(np.pi * (s @ kvec) + phase)
    return v


def make_corpus(domain: Domain, grid: Grid, count: int, seed: int = 0) -> list[tuple[GridFunction, GridFunction]]:
    """Deterministic list of ``count`` (g, h) pairs vanishing near the boundary.

    The first three pairs are fixed: (bump*phi_1, bump*phi_2), (bump, bump),
    (bump, bump*cos(8*pi*s)). The rest are random trigonometric polynomials
    times the interior bump. Sup norms stay below 10 by construction.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if grid.domain != domain:
        raise GridMismatchError("grid was not built on this domain")
    bump = interior_bump(grid).values
    a, b = domain.box[0]
    s0 = (grid.nodes[:, 0] - a) / (b - a)
    canonical = [
        (bump * _box_sine(grid, 1), bump * _box_sine(grid, 2)),
        (bump, bump.copy()),
        (bump, bump * np.cos(8 * np.pi * s0)),
    ]
    rng = np.random.default_rng(seed)
    pairs = []
    for k in range(count):
        if k < len(canonical):
            g, h = canonical[k]
        else:
            g = bump * _random_trig(grid, rng)
            h = bump * _random_trig(grid, rng)
        pairs.append((GridFunction(grid, g), GridFunction(grid, h)))
    return pairs


def bump_family(grid: Grid, count: int, seed: int = 0) -> list[GridFunction]:
    """``count`` radial degree-7 bumps with random centre, radius and sign,
    each supported at distance >= 0.1 (relative) from the boundary."""
    rng = np.random.default_rng(seed)
    dom = grid.domain
    lo = np.array([a for a, _ in dom.box])
    hi = np.array([b for _, b in dom.box])
    span = (hi - lo).min()
    out = []
    for _ in range(count):
        radius = span * rng.uniform(0.15, 0.3)
        centre = rng.uniform(lo + radius + 0.1 * span, hi - radius - 0.1 * span)
        r = np.linalg.norm(grid.nodes - centre, axis=1) / radius
        amp = rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 2.0)
        out.append(GridFunction(grid, amp * smoothstep7(2 * (1 - r))))
    return out


def sample(grid: Grid, fn) -> GridFunction:
    """Evaluate ``fn`` on the grid nodes (``fn`` receives one array per axis)."""
    return GridFunction(grid, fn(*grid.nodes.T))

"""Sphere quadrature, Herglotz waves ``u(x) = <T, exp(-i x . xi)>`` and the B* profile.

No ``(2 pi)^{-d}`` factor is applied in the synthesis; the density absorbs
every normalisation constant.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np
from scipy import special

from .bernstein import BernsteinFn
from .errors import BudgetExceeded, ConstantSymbol, DimensionMismatch, DomainError, UnsupportedOrder
from .testfn import BumpProfile

M_MAX = 64
DEGREE_MAX = 200
NODE_BUDGET = 50_000_000


# ---------------------------------------------------------------------------
# quadrature


@dataclass(frozen=True, eq=False)
class SphereQuadrature:
    d: int
    degree: int
    nodes: np.ndarray
    weights: np.ndarray

    def integrate(self, values) -> complex:
        return np.sum(self.weights * np.asarray(values), axis=-1)


def make_quadrature(d: int, degree: int) -> SphereQuadrature:
    """Product rule on ``S^{d-1}``, exact for spherical polynomials up to ``degree``.

    d = 2: ``degree + 1`` equispaced angles. d = 3: Gauss-Legendre in
    ``cos(theta)`` with ``ceil((degree + 1) / 2)`` nodes times ``degree + 1``
    equispaced longitudes.
    """
    degree = int(degree)
    if not 0 <= degree <= DEGREE_MAX:
        raise DomainError(f"degree must lie in [0, {DEGREE_MAX}]")
    if d == 2:
        m = degree + 1
        th = 2.0 * np.pi * np.arange(m) / m
        nodes = np.stack([np.cos(th), np.sin(th)], axis=-1)
        weights = np.full(m, 2.0 * np.pi / m)
    elif d == 3:
        n_th = (degree + 2) // 2
        n_ph = degree + 1
        ct, wt = np.polynomial.legendre.leggauss(n_th)
        st = np.sqrt(1.0 - ct * ct)
        ph = 2.0 * np.pi * np.arange(n_ph) / n_ph
        nodes = np.stack(
            [np.outer(st, np.cos(ph)), np.outer(st, np.sin(ph)), np.outer(ct, np.ones(n_ph))], axis=-1
        ).reshape(-1, 3)
        weights = np.outer(wt, np.full(n_ph, 2.0 * np.pi / n_ph)).ravel()
    else:
        raise DomainError(f"sphere quadrature only for d = 2 or 3, got {d}")
    return SphereQuadrature(d, degree, nodes, weights)


# ---------------------------------------------------------------------------
# densities


@dataclass(frozen=True, eq=False)
class PointMasses:
    d: int
    nodes: np.ndarray
    coeffs: np.ndarray
    kind = "point"

    def __post_init__(self):
        nodes = np.atleast_2d(np.asarray(self.nodes, dtype=float))
        coeffs = np.atleast_1d(np.asarray(self.coeffs, dtype=complex))
        if nodes.shape != (coeffs.size, self.d):
            raise DimensionMismatch(f"expected {coeffs.size} nodes in R^{self.d}, got {nodes.shape}")
        if np.any(np.abs(np.linalg.norm(nodes, axis=1) - 1.0) > 1e-14):
            raise DomainError("point-mass nodes must be unit vectors")
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "coeffs", coeffs)


@dataclass(frozen=True, eq=False)
class SmoothDensity:
    d: int
    func: Callable[[np.ndarray], np.ndarray]
    kind = "smooth"

    def __call__(self, xi):
        return np.asarray(self.func(np.asarray(xi, dtype=float)), dtype=complex)


@dataclass(frozen=True, eq=False)
class HarmonicCoeffs:
    """Band-limited density.

    d = 2: ``coeffs[m + M]`` multiplies ``exp(i m theta)``, ``|m| <= M``.
    d = 3: ``coeffs[l*l + l + m]`` multiplies the real spherical harmonic
    ``Y_lm``, ``l <= M``.
    """

    d: int
    coeffs: np.ndarray
    kind = "harmonic"

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex).ravel()
        object.__setattr__(self, "coeffs", c)
        if self.d == 2:
            if c.size % 2 != 1:
                raise DomainError("circle harmonics need 2M + 1 coefficients")
        elif self.d == 3:
            if int(round(np.sqrt(c.size))) ** 2 != c.size:
                raise DomainError("sphere harmonics need (M + 1)^2 coefficients")
        else:
            raise DomainError("harmonic densities only for d = 2 or 3")
        if self.order > M_MAX:
            raise DomainError(f"harmonic order {self.order} exceeds {M_MAX}")

    @property
    def order(self) -> int:
        if self.d == 2:
            return (self.coeffs.size - 1) // 2
        return int(round(np.sqrt(self.coeffs.size))) - 1

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        return harmonic_basis(self.d, self.order, xi) @ self.coeffs


SphereDensity = Union[PointMasses, SmoothDensity, HarmonicCoeffs]


def real_sph_harm(l: int, m: int, polar, azimuth):
    """Orthonormal real spherical harmonic ``Y_lm``."""
    if m == 0:
        return special.sph_harm_y(l, 0, polar, azimuth).real
    y = special.sph_harm_y(l, abs(m), polar, azimuth)
    part = y.real if m > 0 else y.imag
    return np.sqrt(2.0) * (-1) ** m * part


def harmonic_basis(d: int, order: int, xi) -> np.ndarray:
    """Basis matrix, shape ``(..., n_coeffs)``, evaluated at unit vectors ``xi``."""
    xi = np.asarray(xi, dtype=float)
    if d == 2:
        th = np.arctan2(xi[..., 1], xi[..., 0])
        m = np.arange(-order, order + 1)
        return np.exp(1j * th[..., None] * m)
    polar = np.arccos(np.clip(xi[..., 2], -1.0, 1.0))
    azim = np.arctan2(xi[..., 1], xi[..., 0])
    cols = [real_sph_harm(l, m, polar, azim) for l in range(order + 1) for m in range(-l, l + 1)]
    return np.stack(cols, axis=-1).astype(complex)


def uniform_density(d: int, value: complex = 1.0) -> SmoothDensity:
    return SmoothDensity(d, lambda xi, _v=value: np.full(np.shape(xi)[:-1], _v, dtype=complex))


def project_harmonics(density: SphereDensity, quad: SphereQuadrature, order: Optional[int] = None) -> HarmonicCoeffs:
    """Expand a smooth density in harmonics up to ``order`` (default ``quad.degree // 2``)."""
    if isinstance(density, HarmonicCoeffs):
        return density
    if not isinstance(density, SmoothDensity):
        raise DomainError("only smooth densities are projected")
    _check_dims(density, quad)
    order = quad.degree // 2 if order is None else order
    order = min(order, M_MAX)
    _budget(quad.nodes.shape[0] * ((order + 1) ** 2 if quad.d == 3 else 2 * order + 1))
    B = harmonic_basis(quad.d, order, quad.nodes)
    vals = density(quad.nodes)
    # orthonormal on S^2; on the circle exp(i m th) has squared norm 2 pi
    coeffs = (np.conj(B) * (quad.weights * vals)[:, None]).sum(axis=0)
    if quad.d == 2:
        coeffs = coeffs / (2.0 * np.pi)
    return HarmonicCoeffs(quad.d, coeffs)


def _check_dims(density, quad):
    if quad is not None and density.d != quad.d:
        raise DimensionMismatch(f"density in d={density.d}, quadrature in d={quad.d}")


# ---------------------------------------------------------------------------
# synthesis


def _points(x, d):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != d:
        raise DimensionMismatch(f"points must have last axis {d}")
    return x


def _layer_sum(density: SphereDensity, x, quad: Optional[SphereQuadrature], k: int):
    d = density.d
    x = _points(x, d)
    if isinstance(density, PointMasses):
        nodes, w = density.nodes, density.coeffs
    else:
        if quad is None:
            raise DomainError("a quadrature is needed for non-atomic densities")
        _check_dims(density, quad)
        nodes, w = quad.nodes, quad.weights * density(quad.nodes)
    phase = x @ nodes.T  # (..., J)
    kernel = np.exp(-1j * phase)
    if k:
        kernel = kernel * (-1j * phase) ** k
    return (-1) ** k * (kernel @ w)


def herglotz(density: SphereDensity, x, quad: Optional[SphereQuadrature] = None):
    """``u(x) = int Phi(xi) exp(-i x . xi) dsigma(xi)`` (exact sum for point masses)."""
    out = _layer_sum(density, x, quad, 0)
    return complex(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class LayerSpec:
    k: int
    density: SphereDensity

    def __post_init__(self):
        if not 0 <= self.k <= 2:
            raise UnsupportedOrder(f"only layer orders 0, 1, 2 are synthesised, got {self.k}")


def herglotz_layer(layer: LayerSpec, x, quad: Optional[SphereQuadrature] = None):
    """``(-1)^k <T, d_r^k e_x>`` where ``e_x(xi) = exp(-i x . xi)``.

    The normal derivative acts radially in ``xi``, so
    ``d_r^k e_x = (-i x . xi)^k e_x`` on the unit sphere.
    """
    if not 0 <= layer.k <= 2:
        raise UnsupportedOrder(f"layer order {layer.k} > 2")
    out = _layer_sum(layer.density, x, quad, layer.k)
    return complex(out) if np.ndim(out) == 0 else out


# ---------------------------------------------------------------------------
# multi-layer non-solution


@dataclass
class LayerResidualReport:
    ratio: float
    predicted: float
    max_abs_r_f: float
    max_abs_r_lap: float
    x: np.ndarray
    r_f: np.ndarray
    r_lap: np.ndarray


def _symbol_slope(func, h: float = 1e-5) -> float:
    """Derivative at xi = 1 of ``xi -> func(xi^2)``, by a fourth-order stencil."""
    xi = 1.0 + h * np.array([-2.0, -1.0, 1.0, 2.0])
    v = np.asarray(func(xi * xi), dtype=float)
    return float((v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h))


def _apply_to_polynomial_mode(func, x):
    """Apply the radial multiplier with symbol ``p(xi) = func(xi^2)`` to ``x exp(-i x)``.

    With ``x e^{-i x xi} = i d/dxi e^{-i x xi}`` one gets
    ``P[x e^{-ix}] = i p'(1) e^{-ix} + p(1) x e^{-ix}``.
    """
    p1 = float(func(1.0))
    slope = _symbol_slope(func)
    mode = np.exp(-1j * x)
    return 1j * slope * mode + p1 * x * mode, p1


def layer_residual_demo(f: BernsteinFn, k: int = 1, x=None) -> LayerResidualReport:
    """Residuals of the order-1 point layer ``u(x) = x e^{-ix}`` (1-D slice).

    ``r_lap = (-d^2 - 1) u`` and ``r_f = (f(-d^2) - f(1)) u``; the ratio of
    their sup norms is ``f'(1)`` and neither vanishes, so ``u`` solves neither
    equation.
    """
    if k != 1:
        raise UnsupportedOrder("layer_residual_demo is implemented for k = 1")
    if f.is_constant:
        raise ConstantSymbol("non-constant Bernstein function required")
    x = np.linspace(-20.0, 20.0, 801) if x is None else np.asarray(x, dtype=float)
    u = x * np.exp(-1j * x)
    pu_f, f1 = _apply_to_polynomial_mode(f.closed_eval, x)
    pu_l, l1 = _apply_to_polynomial_mode(lambda lam: np.asarray(lam, dtype=float), x)
    r_f = pu_f - f1 * u
    r_lap = pu_l - l1 * u
    mf, ml = float(np.max(np.abs(r_f))), float(np.max(np.abs(r_lap)))
    return LayerResidualReport(mf / ml, f.fprime1, mf, ml, x, r_f, r_lap)


# ---------------------------------------------------------------------------
# B* profile


@dataclass
class BStarResult:
    sup: float
    R: np.ndarray
    g: np.ndarray
    limit: Optional[float] = None


def _shell_energy(density: SphereDensity, r: np.ndarray, quad: Optional[SphereQuadrature]):
    """``int_{S^{d-1}} |u(r theta)|^2 dsigma(theta)`` for each radius in ``r``.

    The angular integral is done in closed form: for point masses through
    ``int e^{-i r theta . v} dsigma = 4 pi sinc`` (d = 3) or ``2 pi J_0`` (d = 2),
    for harmonic densities through the Bessel expansion of the plane wave.
    """
    d = density.d
    if isinstance(density, PointMasses):
        diff = density.nodes[:, None, :] - density.nodes[None, :, :]
        dist = np.linalg.norm(diff, axis=-1)
        cc = np.outer(density.coeffs, np.conj(density.coeffs))
        _budget(r.size * dist.size)
        s = r[:, None, None] * dist[None]
        if d == 3:
            kern = 4.0 * np.pi * np.sinc(s / np.pi)
        elif d == 2:
            kern = 2.0 * np.pi * special.j0(s)
        else:
            raise DomainError("B* profile needs d = 2 or 3")
        return np.real(np.sum(kern * cc[None], axis=(1, 2)))
    coeffs = project_harmonics(density, quad) if quad is not None or isinstance(density, HarmonicCoeffs) else None
    if coeffs is None:
        raise DomainError("a quadrature is needed to expand a smooth density")
    M = coeffs.order
    _budget(r.size * (M + 1))
    if d == 2:
        m = np.arange(-M, M + 1)
        jm = special.jv(np.abs(m)[None, :], r[:, None])
        return 8.0 * np.pi**3 * (jm**2 @ np.abs(coeffs.coeffs) ** 2)
    power = np.array([np.sum(np.abs(coeffs.coeffs[l * l : (l + 1) ** 2]) ** 2) for l in range(M + 1)])
    jl = special.spherical_jn(np.arange(M + 1)[None, :], r[:, None])
    return 16.0 * np.pi**2 * (jl**2 @ power)


def _budget(count: int, cap: int = NODE_BUDGET):
    if count > cap:
        raise BudgetExceeded(f"{count} evaluations exceed the budget of {cap}")


def _radial_rule(breaks: np.ndarray, panel_width: float = 1.0, order: int = 12):
    """Gauss-Legendre nodes on each ``[breaks[i], breaks[i+1]]`` split into pieces of width <= panel_width."""
    xg, wg = np.polynomial.legendre.leggauss(order)
    nodes, weights, owner = [], [], []
    for i, (a, b) in enumerate(zip(breaks[:-1], breaks[1:])):
        pieces = max(1, int(np.ceil((b - a) / panel_width)))
        edges = np.linspace(a, b, pieces + 1)
        for lo, hi in zip(edges[:-1], edges[1:]):
            nodes.append(0.5 * (hi - lo) * xg + 0.5 * (hi + lo))
            weights.append(0.5 * (hi - lo) * wg)
            owner.append(np.full(order, i))
    return np.concatenate(nodes), np.concatenate(weights), np.concatenate(owner)


def bstar_limit(density: SphereDensity, quad: Optional[SphereQuadrature] = None) -> float:
    """Large-R limit ``2 (2 pi)^{d-1} ||Phi||^2_{L^2(S^{d-1})}`` of the profile."""
    coeffs = project_harmonics(density, quad)
    c2 = float(np.sum(np.abs(coeffs.coeffs) ** 2))
    norm2 = 2.0 * np.pi * c2 if density.d == 2 else c2
    return 2.0 * (2.0 * np.pi) ** (density.d - 1) * norm2


def bstar_norm(
    density: SphereDensity,
    R_max: float,
    quad: Optional[SphereQuadrature] = None,
    num: int = 128,
    method: str = "bessel",
    x_degree: Optional[int] = None,
) -> BStarResult:
    """Profile ``g(R) = (1/R) int_{|x|<R} |u|^2 dx`` on a log grid of ``R`` in ``(1, R_max]``.

    ``method="bessel"`` integrates each spherical shell in closed form and
    the radius by composite Gauss-Legendre. ``method="direct"`` evaluates
    ``u`` on a radial x spherical product grid (costly; for cross-checks at
    moderate ``R_max``).
    """
    if density.d not in (2, 3):
        raise DomainError("B* profile needs d = 2 or 3")
    if not 1.0 < R_max <= 500.0:
        raise DomainError("R_max must lie in (1, 500]")
    R = np.geomspace(1.0, R_max, num + 1)[1:]
    breaks = np.concatenate([[0.0, 1.0], R])
    r, w, owner = _radial_rule(breaks)
    d = density.d
    if method == "bessel":
        shell = _shell_energy(density, r, quad)
    elif method == "direct":
        if quad is None and not isinstance(density, PointMasses):
            raise DomainError("the direct method needs a quadrature for non-atomic densities")
        xq = make_quadrature(d, x_degree if x_degree is not None else int(min(DEGREE_MAX, 2 * R_max + 20)))
        n_src = density.coeffs.size if isinstance(density, PointMasses) else quad.nodes.shape[0]
        _budget(r.size * xq.nodes.shape[0] * n_src)
        shell = np.empty(r.size)
        for i, ri in enumerate(r):
            u = herglotz(density, ri * xq.nodes, quad)
            shell[i] = np.sum(xq.weights * np.abs(u) ** 2)
    else:
        raise DomainError(f"unknown method {method!r}")
    panel = np.bincount(owner, weights=w * r ** (d - 1) * shell, minlength=breaks.size - 1)
    cumulative = np.cumsum(panel)[1:]
    g = cumulative / R
    limit = None
    if not isinstance(density, PointMasses):
        limit = bstar_limit(density, quad)
    return BStarResult(float(np.max(g)) if g.size else 0.0, R, g, limit)


# ---------------------------------------------------------------------------
# extension operator and the gamma quotient


def extension_operator(phi: Callable[[np.ndarray], np.ndarray], bump: BumpProfile):
    """Return ``x -> bump(|x|) * phi(x / |x|)``, zero off the bump's annulus."""

    def field(x):
        x = np.asarray(x, dtype=float)
        r = np.linalg.norm(x, axis=-1)
        rho = bump(r)
        live = rho != 0
        vals = np.asarray(phi(x[live] / r[live][:, None]))
        out = np.zeros(r.shape, dtype=np.result_type(vals, float))
        out[live] = rho[live] * vals
        return out

    return field


def gamma_quotient(phi_tilde, phi, xi):
    """``(phi_tilde(xi) - phi(xi/|xi|)) / (|xi|^2 - 1)`` off the unit sphere."""
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi, axis=-1)
    return (phi_tilde(xi) - phi(xi / r[..., None])) / (r * r - 1.0)


def gamma_leading_term(phi_tilde, xi, h: float = 1e-4):
    """``(1/(1+|xi|)) (xi/|xi|) . grad phi_tilde(xi/|xi|)``, gradient by central differences."""
    xi = np.asarray(xi, dtype=float)
    r = np.linalg.norm(xi, axis=-1)
    e = xi / r[..., None]
    # directional derivative along e at e, fourth order
    v = [phi_tilde(e * (1.0 + s * h)) for s in (-2.0, -1.0, 1.0, 2.0)]
    dd = (v[0] - 8.0 * v[1] + 8.0 * v[2] - v[3]) / (12.0 * h)
    return dd / (1.0 + r)

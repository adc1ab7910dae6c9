"""Annulus bumps, Fourier-side test functions vanishing near 0, and seminorm checks.

Derivatives are taken by repeated central differences. Everything that is
supported in an annulus ``r0 <= |x| <= r1`` evaluates to exactly 0 inside
``|x| < r0``; there is no tolerance on that.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .bernstein import BernsteinFn, deriv
from .errors import DomainError


def _glue(x):
    """``exp(-1/x)`` for x > 0, else 0."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def smoothstep(s):
    """C-infinity step: 0 for s <= 0, 1 for s >= 1."""
    a = _glue(s)
    return a / (a + _glue(1.0 - np.asarray(s, dtype=float)))


@dataclass(frozen=True)
class BumpProfile:
    """Radial profile equal to 1 on ``|r - 1| <= eps/4`` and 0 for ``|r - 1| >= eps/2``."""

    eps: float

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        q = self.eps / 4.0
        # distance past the plateau, in units of the transition width
        s = (np.abs(r - 1.0) - q) / q
        return 1.0 - smoothstep(s)

    @property
    def support(self) -> tuple[float, float]:
        return 1.0 - self.eps / 2.0, 1.0 + self.eps / 2.0

    @property
    def plateau(self) -> tuple[float, float]:
        return 1.0 - self.eps / 4.0, 1.0 + self.eps / 4.0


def make_bump(eps: float) -> BumpProfile:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}")
    return BumpProfile(eps)


@dataclass(frozen=True)
class ZTestFunction:
    """Fourier side ``scale * bump(|xi| / center) * factor(xi)`` in ``d`` dimensions.

    The support is the annulus ``center * (1 -+ eps/2)``; ``factor`` is any
    smooth function of ``xi`` with shape ``(..., d) -> (...)``.
    """

    d: int
    center: float
    bump: BumpProfile
    factor: Optional[Callable[[np.ndarray], np.ndarray]] = field(default=None, compare=False)
    scale: float = 1.0

    @classmethod
    def annulus(cls, d: int, r0: float, r1: float, factor=None, scale: float = 1.0):
        if not 0 < r0 < r1:
            raise DomainError("need 0 < r0 < r1")
        center = 0.5 * (r0 + r1)
        return cls(d, center, make_bump((r1 - r0) / center), factor, scale)

    @property
    def r0(self) -> float:
        return self.center * self.bump.support[0]

    @property
    def r1(self) -> float:
        return self.center * self.bump.support[1]

    def scaled(self, c: float) -> "ZTestFunction":
        return ZTestFunction(self.d, self.center, self.bump, self.factor, self.scale * c)

    def __call__(self, xi):
        xi = np.asarray(xi, dtype=float)
        if xi.shape[-1] != self.d:
            raise DomainError(f"expected points with last axis {self.d}")
        r = np.linalg.norm(xi, axis=-1)
        out = self.scale * self.bump(r / self.center)
        if self.factor is not None:
            out = out * self.factor(xi)
        return out


def zero_test_function(d: int) -> ZTestFunction:
    """The identically zero element, handy as a degenerate input."""
    return ZTestFunction.annulus(d, 0.5, 1.0, scale=0.0)


# ---------------------------------------------------------------------------
# finite differences


def multi_indices(d: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices in ``d`` variables with total degree ``order``."""
    out = []
    for combo in itertools.combinations_with_replacement(range(d), order):
        alpha = [0] * d
        for i in combo:
            alpha[i] += 1
        out.append(tuple(alpha))
    return out


def fd_partial(func, x, beta: Sequence[int], h: float):
    """``d^beta func`` at points ``x`` (shape ``(..., d)``) by nested central differences.

    Each first derivative is ``(g(x + h e_i) - g(x - h e_i)) / 2h``; for
    ``beta_i = k`` this gives the stencil ``sum_j (-1)^j C(k, j) g(x + (k - 2j) h e_i) / (2h)^k``.
    """
    x = np.asarray(x, dtype=float)
    beta = tuple(int(b) for b in beta)
    if sum(beta) == 0:
        return func(x)
    offsets, coeffs = [np.zeros(len(beta))], [1.0]
    for axis, k in enumerate(beta):
        if k == 0:
            continue
        steps = [(k - 2 * j) * h for j in range(k + 1)]
        cs = [(-1) ** j * _binom(k, j) / (2.0 * h) ** k for j in range(k + 1)]
        new_off, new_c = [], []
        for off, c in zip(offsets, coeffs):
            for st, cj in zip(steps, cs):
                o = off.copy()
                o[axis] += st
                new_off.append(o)
                new_c.append(c * cj)
        offsets, coeffs = new_off, new_c
    total = 0.0
    for off, c in zip(offsets, coeffs):
        total = total + c * func(x + off)
    return total


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def _fd_step(width: float) -> float:
    return width / 64.0


def _ball_points(d: int, radius: float, n_radial: int, r_lo: float = 0.0, r_hi: float = None):
    """Polar product grid of points with ``r_lo <= |x| <= min(r_hi, radius)``."""
    r_hi = radius if r_hi is None else min(r_hi, radius)
    r = np.linspace(r_lo, r_hi, n_radial)
    if d == 1:
        dirs = np.array([[-1.0], [1.0]])
    elif d == 2:
        th = np.linspace(0.0, 2.0 * np.pi, 4 * n_radial, endpoint=False)
        dirs = np.stack([np.cos(th), np.sin(th)], axis=-1)
    elif d == 3:
        n_th = n_radial
        th = np.linspace(0.0, np.pi, n_th)
        ph = np.linspace(0.0, 2.0 * np.pi, 2 * n_th, endpoint=False)
        T, P = np.meshgrid(th, ph, indexing="ij")
        dirs = np.stack([np.sin(T) * np.cos(P), np.sin(T) * np.sin(P), np.cos(T)], axis=-1).reshape(-1, 3)
    else:
        raise DomainError(f"dimension {d} not supported")
    return (r[:, None, None] * dirs[None, :, :]).reshape(-1, d)


def taylor_constant(phi: ZTestFunction, N: int, resolution: int = 96) -> float:
    """Grid estimate of ``max_{|alpha| = N} sup_{|y| <= 1} |d^alpha phi_hat(y)|``.

    Only the part of the unit ball meeting the support annulus is sampled;
    the derivatives vanish identically elsewhere.
    """
    if not 1 <= N <= 6:
        raise DomainError("taylor_constant supports 1 <= N <= 6")
    if phi.scale == 0.0 or phi.r0 >= 1.0:
        return 0.0
    width = phi.center * phi.bump.eps / 4.0
    h = _fd_step(width) * 4.0 / max(N, 1)
    pts = _ball_points(phi.d, 1.0, resolution, phi.r0, phi.r1)
    best = 0.0
    for alpha in multi_indices(phi.d, N):
        vals = np.abs(fd_partial(phi, pts, alpha, h))
        best = max(best, float(vals.max()))
    return best


@dataclass
class DecayTable:
    radii: np.ndarray
    values: np.ndarray
    exponent: float
    direction: np.ndarray


def _product(f: BernsteinFn, phi: ZTestFunction):
    def g(x):
        r2 = np.sum(np.asarray(x) ** 2, axis=-1)
        return np.asarray(f.closed_eval(r2), dtype=float) * phi(x)

    return g


def smooth_extension_check(
    f: BernsteinFn,
    phi: ZTestFunction,
    beta: Sequence[int],
    radii: Optional[Sequence[float]] = None,
    direction: Optional[Sequence[float]] = None,
) -> DecayTable:
    """Sample ``|d^beta (f(|x|^2) phi_hat(x))|`` along a ray towards the origin.

    The default radii are ``2**-k`` for ``k = 1..20``. ``exponent`` is the
    least-squares slope of ``log value`` against ``log r`` over the samples
    with ``r > r0`` and a nonzero value (nan if fewer than two).
    """
    beta = tuple(beta)
    if len(beta) != phi.d:
        raise DomainError("beta has the wrong length")
    if sum(beta) > 3:
        raise DomainError("|beta| <= 3 supported")
    radii = 2.0 ** -np.arange(1, 21) if radii is None else np.asarray(radii, dtype=float)
    e = np.ones(phi.d) if direction is None else np.asarray(direction, dtype=float)
    e = e / np.linalg.norm(e)
    g = _product(f, phi)
    vals = np.empty(radii.size)
    for i, r in enumerate(radii):
        h = min(_fd_step(phi.center * phi.bump.eps / 4.0), r / 8.0)
        vals[i] = abs(float(fd_partial(g, (r * e)[None, :], beta, h)[0]))
    mask = (radii > phi.r0) & (vals > 0)
    if mask.sum() >= 2:
        exponent = float(np.polyfit(np.log(radii[mask]), np.log(vals[mask]), 1)[0])
    else:
        exponent = float("nan")
    return DecayTable(radii, vals, exponent, e)


@dataclass
class SeminormReport:
    alpha: tuple[int, ...]
    beta: tuple[int, ...]
    value: float
    resolution: int


def seminorm_grid(phi: ZTestFunction, resolution: int):
    """Cartesian grid (points, spacing) covering the support of ``phi`` plus a margin."""
    width = phi.center * phi.bump.eps / 4.0
    r_cut = phi.r1 + 4.0 * width
    axis = np.linspace(-r_cut, r_cut, resolution)
    mesh = np.meshgrid(*([axis] * phi.d), indexing="ij")
    pts = np.stack(mesh, axis=-1)
    return pts, axis[1] - axis[0]


def seminorm(
    f: BernsteinFn,
    phi: ZTestFunction,
    alpha: Sequence[int],
    beta: Sequence[int],
    resolution: int = 256,
) -> SeminormReport:
    """Grid maximum of ``|x^alpha d^beta (f(|x|^2) phi_hat(x))|``.

    ``resolution`` points per axis span ``|x_i| <= R_cut`` where ``R_cut``
    clears the support of ``phi`` by four transition widths; outside the
    support the integrand is identically 0 so the truncation is exact.
    """
    alpha, beta = tuple(alpha), tuple(beta)
    if len(alpha) != phi.d or len(beta) != phi.d:
        raise DomainError("multi-index length must equal phi.d")
    if sum(alpha) > 3 or sum(beta) > 3:
        raise DomainError("|alpha|, |beta| <= 3 supported")
    pts, spacing = seminorm_grid(phi, resolution)
    r = np.linalg.norm(pts, axis=-1)
    keep = (r >= phi.r0 - 1e-12) & (r <= phi.r1 + 1e-12)
    x = pts[keep]
    if x.size == 0 or phi.scale == 0.0:
        return SeminormReport(alpha, beta, 0.0, resolution)
    h = _fd_step(phi.center * phi.bump.eps / 4.0)
    vals = fd_partial(_product(f, phi), x, beta, h)
    weight = np.prod(x ** np.array(alpha), axis=-1)
    return SeminormReport(alpha, beta, float(np.max(np.abs(weight * vals))), resolution)


def leibniz_first_order(f: BernsteinFn, phi: ZTestFunction, x, axis: int, h: float = 1e-5):
    """Return (finite difference of the product, product-rule value) for ``d/dx_axis``.

    The product rule side uses ``f'(|x|^2) * 2 x_i * phi_hat + f(|x|^2) * d_i phi_hat``
    with ``f'`` from :func:`bernstein.deriv`.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    beta = [0] * phi.d
    beta[axis] = 1
    direct = fd_partial(_product(f, phi), x, beta, h)
    r2 = np.sum(x**2, axis=-1)
    fprime = np.array([deriv(f, 1, v) for v in r2])
    dphi = fd_partial(phi, x, beta, h)
    rule = fprime * 2.0 * x[:, axis] * phi(x) + np.asarray(f.closed_eval(r2)) * dphi
    return direct, rule

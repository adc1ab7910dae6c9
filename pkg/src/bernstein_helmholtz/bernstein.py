"""Bernstein functions from Lévy triples, their derivatives and the quotient symbol.

A Bernstein function is stored twice: as a closed form that is cheap and
accurate everywhere on ``[0, inf)``, and (when known) as a Lévy triple
``(a, b, mu)`` with ``f(lam) = a + b*lam + int (1 - exp(-lam*t)) mu(dt)``.
Quadrature of the Lévy integrals lives here and is reused by the
subordination module.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, NamedTuple, Union

import numpy as np
from scipy import special

from .errors import DomainError, NearZeroSymbol, NonIntegrableMeasure, UnknownFunctionId

# Taylor seam for omega and the reciprocal gate, see README "Numerical choices".
OMEGA_SEAM = 1e-4
ZERO_TOL = 1e-12
# Cap on the discretised (1 ^ t) mass of a node measure.
MASS_CAP = 1e12
# Relative truncation level for t^n exp(-lam t) on the tail.
TAIL_LEVEL = 1e-18

_PANEL_ORDER = 20

__all__ = [
    "ClosedFamily",
    "QuadratureNodes",
    "LevyTriple",
    "BernsteinFn",
    "LevyNodes",
    "levy_nodes",
    "eval_from_triple",
    "deriv",
    "omega",
    "inv_omega",
    "lambda_pow_deriv_bound",
    "bernstein_fn",
    "fractional",
    "log1p",
    "sqrt_tanh_sqrt",
    "affine",
    "catalogue",
    "from_id",
]


# ---------------------------------------------------------------------------
# Lévy measures


_FAMILIES = ("fractional", "log1p")


@dataclass(frozen=True)
class ClosedFamily:
    """Lévy measure with density ``h(t) * t**(-1 - s)`` on ``(0, inf)``.

    ``fractional`` (one parameter ``sigma`` in (0, 1]) has
    ``h = sigma / Gamma(1 - sigma)`` and ``s = sigma``; it reproduces
    ``lam**sigma``. ``log1p`` (no parameters) has ``h = exp(-t)``, ``s = 0``.
    """

    family: str
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise DomainError(f"unknown measure family {self.family!r}")
        if self.family == "fractional":
            if len(self.params) != 1:
                raise DomainError("fractional family takes exactly one parameter")
            sigma = float(self.params[0])
            if not 0.0 < sigma <= 1.0:
                raise DomainError(f"fractional exponent must lie in (0, 1], got {sigma}")
            object.__setattr__(self, "params", (sigma,))
        elif self.params:
            raise DomainError("log1p family takes no parameters")

    @property
    def singular_exponent(self) -> float:
        return self.params[0] if self.family == "fractional" else 0.0

    def smooth_factor(self, t):
        t = np.asarray(t, dtype=float)
        if self.family == "fractional":
            sigma = self.params[0]
            return np.full_like(t, sigma * special.rgamma(1.0 - sigma))
        return np.exp(-t)

    def density(self, t):
        t = np.asarray(t, dtype=float)
        return self.smooth_factor(t) * t ** (-1.0 - self.singular_exponent)

    def tail_mass(self, cutoff: float) -> float:
        """``mu((cutoff, inf))`` in closed form."""
        if self.family == "fractional":
            sigma = self.params[0]
            if sigma == 1.0:
                return 0.0
            return cutoff ** (-sigma) * special.rgamma(1.0 - sigma)
        return float(special.exp1(cutoff))

    @property
    def is_zero(self) -> bool:
        return self.family == "fractional" and self.params[0] == 1.0


@dataclass(frozen=True, eq=False)
class QuadratureNodes:
    """Discrete measure ``sum_k w_k delta_{t_k}``."""

    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.nodes, dtype=float).ravel()
        w = np.asarray(self.weights, dtype=float).ravel()
        if t.shape != w.shape:
            raise DomainError("nodes and weights differ in length")
        if t.size and (np.any(t <= 0) or np.any(np.diff(t) <= 0)):
            raise DomainError("nodes must be positive and strictly increasing")
        if np.any(w < 0):
            raise DomainError("weights must be nonnegative")
        t.flags.writeable = False
        w.flags.writeable = False
        object.__setattr__(self, "nodes", t)
        object.__setattr__(self, "weights", w)
        mass = float(np.sum(np.minimum(t, 1.0) * w))
        if not np.isfinite(mass) or mass > MASS_CAP:
            raise NonIntegrableMeasure(f"(1 ^ t) mass {mass:g} exceeds cap {MASS_CAP:g}")

    @classmethod
    def zero(cls) -> "QuadratureNodes":
        return cls(np.empty(0), np.empty(0))

    @property
    def is_zero(self) -> bool:
        return not np.any(self.weights > 0)


MeasureSpec = Union[ClosedFamily, QuadratureNodes]


@dataclass(frozen=True)
class LevyTriple:
    a: float
    b: float
    measure: MeasureSpec = field(default_factory=QuadratureNodes.zero)

    def __post_init__(self):
        if not (self.a >= 0 and self.b >= 0):
            raise DomainError(f"Lévy triple needs a, b >= 0, got a={self.a}, b={self.b}")

    @property
    def is_constant(self) -> bool:
        return self.b == 0 and self.measure.is_zero


# ---------------------------------------------------------------------------
# Quadrature of Lévy integrals


@lru_cache(maxsize=None)
def _gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


@lru_cache(maxsize=None)
def _gauss_jacobi(n: int, beta: float):
    # weight (1 + x)**beta on [-1, 1]
    x, w = special.roots_jacobi(n, 0.0, beta)
    return x, w


class LevyNodes(NamedTuple):
    """Nodes/weights on ``(0, cutoff]`` plus the closed-form mass beyond."""

    nodes: np.ndarray
    weights: np.ndarray
    cutoff: float
    tail_mass: float


def _tail_cutoff(lam: float, power: int) -> float:
    """Smallest ``T`` past the peak where ``t**power e^{-lam t}`` drops below TAIL_LEVEL * peak."""
    drop = -math.log(TAIL_LEVEL)
    t_peak = max(1.0, power / lam)
    phi_peak = lam * t_peak - power * math.log(t_peak)

    def excess(t):
        return lam * t - power * math.log(t) - phi_peak - drop

    hi = t_peak + drop / lam
    while excess(hi) < 0:
        hi *= 2.0
    lo = t_peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if excess(mid) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


@lru_cache(maxsize=256)
def levy_nodes(measure: ClosedFamily, lam_min: float, lam_max: float, power: int = 0) -> LevyNodes:
    """Quadrature for ``int g(t) mu(dt)`` with ``g(t) = t**power * exp(-lam t)``-like integrands.

    The range is split at ``t = 1``. On ``(0, 1]`` the panels are geometric
    towards 0 and the innermost one uses Gauss-Jacobi with the weight
    ``t**(-s)``, which integrates ``g(t)/t * h(t)`` exactly for polynomials,
    so ``g`` must vanish at 0. On ``(1, T]`` panels are geometric in ``t``
    and, for large ``lam_max``, also geometric in ``t - 1`` so the fast decay
    right after ``t = 1`` is resolved. ``T`` is set from ``lam_min``.
    """
    if not (0 < lam_min <= lam_max):
        raise DomainError("need 0 < lam_min <= lam_max")
    s = measure.singular_exponent
    n = _PANEL_ORDER

    k_inner = max(10, int(math.ceil(math.log2(max(lam_max, 1.0)))) + 6)
    inner = 2.0 ** -np.arange(k_inner, -1, -1)

    cutoff = _tail_cutoff(lam_min, power)
    outer = {1.0, cutoff}
    j = 1
    while 2.0**j < cutoff:
        outer.add(2.0**j)
        j += 1
    delta = 0.25 / lam_max
    while delta < 1.0:
        if 1.0 + delta < cutoff:
            outer.add(1.0 + delta)
        delta *= 2.0
    outer = np.array(sorted(outer))

    xg, wg = _gauss_legendre(n)
    nodes, weights = [], []

    # innermost panel (0, eps]: Gauss-Jacobi in t**(-s)
    eps = inner[0]
    xj, wj = _gauss_jacobi(n, -s)
    t = eps * (1.0 + xj) / 2.0
    nodes.append(t)
    weights.append(eps ** (1.0 - s) * 2.0 ** (s - 1.0) * wj * measure.smooth_factor(t) / t)

    for lo, hi in zip(np.concatenate([inner, outer[1:-1]]), np.concatenate([inner[1:], outer[1:]])):
        t = 0.5 * (hi - lo) * xg + 0.5 * (hi + lo)
        nodes.append(t)
        weights.append(0.5 * (hi - lo) * wg * measure.density(t))

    t = np.concatenate(nodes)
    w = np.concatenate(weights)
    t.flags.writeable = False
    w.flags.writeable = False
    return LevyNodes(t, w, cutoff, measure.tail_mass(cutoff))


def _levy_integral(measure: MeasureSpec, lam: float) -> float:
    """``int (1 - exp(-lam t)) mu(dt)``."""
    if isinstance(measure, QuadratureNodes):
        return float(np.sum(measure.weights * -np.expm1(-lam * measure.nodes)))
    if measure.is_zero:
        return 0.0
    q = levy_nodes(measure, lam, lam, 0)
    body = np.sum(q.weights * -np.expm1(-lam * q.nodes))
    return float(body + q.tail_mass * -math.expm1(-lam * q.cutoff))


def _levy_moment(measure: MeasureSpec, power: int, lam: float) -> float:
    """``int t**power exp(-lam t) mu(dt)`` for ``power >= 1``."""
    if isinstance(measure, QuadratureNodes):
        t = measure.nodes
        return float(np.sum(measure.weights * t**power * np.exp(-lam * t)))
    if measure.is_zero:
        return 0.0
    q = levy_nodes(measure, lam, lam, power)
    return float(np.sum(q.weights * q.nodes**power * np.exp(-lam * q.nodes)))


def _check_lambda(lam) -> float:
    lam = float(lam)
    if not lam > 0:
        raise DomainError(f"lambda must be positive, got {lam}")
    return lam


def eval_from_triple(triple: LevyTriple, lam: float) -> float:
    """Evaluate ``a + b*lam + int (1 - e^{-lam t}) mu(dt)`` by quadrature."""
    lam = _check_lambda(lam)
    return triple.a + triple.b * lam + _levy_integral(triple.measure, lam)


# ---------------------------------------------------------------------------
# Bernstein functions


@dataclass(frozen=True)
class BernsteinFn:
    name: str
    closed_eval: Callable[[np.ndarray], np.ndarray] = field(repr=False)
    triple: LevyTriple | None
    f1: float
    fprime1: float
    # f'(1), f''(1), f'''(1) for the Taylor branch of omega
    taylor: tuple[float, float, float] = field(repr=False, default=(0.0, 0.0, 0.0))

    def __call__(self, lam):
        return self.closed_eval(lam)

    @property
    def is_constant(self) -> bool:
        if self.triple is not None:
            return self.triple.is_constant
        return self.fprime1 == 0.0


def bernstein_fn(name: str, closed_eval, triple: LevyTriple | None = None) -> BernsteinFn:
    """Assemble a :class:`BernsteinFn`, caching ``f(1)`` and derivatives at 1."""
    probe = BernsteinFn(name, closed_eval, triple, float(closed_eval(1.0)), 0.0)
    d = tuple(deriv(probe, k, 1.0) for k in (1, 2, 3))
    if abs(d[0]) < 1e-300:
        d = (0.0, 0.0, 0.0)
    return BernsteinFn(name, closed_eval, triple, probe.f1, d[0], d)


@lru_cache(maxsize=None)
def _central_weights(order: int, half_width: int) -> np.ndarray:
    offsets = np.arange(-half_width, half_width + 1, dtype=float)
    vander = np.vander(offsets, increasing=True).T
    rhs = np.zeros(offsets.size)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(vander, rhs)


def _fd_derivative(func, n: int, lam: float, ladder: int = 14) -> float:
    """Central-stencil derivative with the step picked from a halving ladder.

    The widest step keeps the stencil inside ``(0, inf)``; the estimate kept is
    the one where two consecutive steps agree best (truncation and round-off
    balance there).
    """
    m = 4 if n <= 2 else 5
    w = _central_weights(n, m)
    steps = (0.9 * lam / m) * 2.0 ** -np.arange(ladder)
    est = np.array([w @ np.asarray(func(lam + h * np.arange(-m, m + 1)), dtype=float) / h**n for h in steps])
    j = int(np.argmin(np.abs(np.diff(est))))
    return float(est[j + 1])


def deriv(f: BernsteinFn, n: int, lam: float, full_output: bool = False):
    """n-th derivative ``(-1)**(n-1) int t**n e^{-lam t} mu(dt) + b [n == 1]``.

    Without a Lévy triple the closed form is differentiated by an 8th-order
    central stencil and the result is marked approximate.

    Returns
    -------
    value : float
    info : dict, optional
        Only with ``full_output=True``: ``method`` and ``approximate``.
    """
    if int(n) != n or n < 1:
        raise DomainError(f"derivative order must be a positive integer, got {n}")
    n = int(n)
    lam = _check_lambda(lam)
    if f.triple is not None:
        value = (-1) ** (n - 1) * _levy_moment(f.triple.measure, n, lam)
        if n == 1:
            value += f.triple.b
        info = {"method": "levy", "approximate": False}
    else:
        value = _fd_derivative(f.closed_eval, n, lam)
        info = {"method": "finite-difference", "approximate": True}
    return (value, info) if full_output else value


def omega(f: BernsteinFn, lam):
    """Quotient symbol ``(f(lam) - f(1)) / (lam - 1)`` with ``omega(1) = f'(1)``.

    Within ``OMEGA_SEAM`` of 1 the three-term Taylor polynomial is used.
    Accepts scalars or arrays.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if np.any(~(lam_arr > 0)):
        raise DomainError("omega is defined for lambda > 0 only")
    h = lam_arr - 1.0
    near = np.abs(h) < OMEGA_SEAM
    d1, d2, d3 = f.taylor
    taylor = d1 + d2 * h / 2.0 + d3 * h * h / 6.0
    safe_h = np.where(near, 1.0, h)
    quotient = (np.asarray(f.closed_eval(lam_arr), dtype=float) - f.f1) / safe_h
    out = np.where(near, taylor, quotient)
    return float(out) if out.ndim == 0 else out


def inv_omega(f: BernsteinFn, lam):
    w = omega(f, lam)
    if np.any(np.asarray(w) <= ZERO_TOL):
        raise NearZeroSymbol(f"omega <= {ZERO_TOL:g} for {f.name}; 1/omega undefined here")
    return 1.0 / w


def lambda_pow_deriv_bound(f: BernsteinFn, n: int, num: int = 400) -> float:
    """Grid maximum of ``|lam**n f^(n)(lam)|`` over ``lam`` in ``[1e-8, 1]``."""
    if f.triple is None:
        raise DomainError(f"{f.name} has no Lévy triple")
    grid = np.logspace(-8.0, 0.0, num)
    if n == 0:
        vals = np.abs(np.asarray(f.closed_eval(grid), dtype=float))
    else:
        vals = np.array([abs(lam**n * deriv(f, n, lam)) for lam in grid])
    return float(vals.max())


# ---------------------------------------------------------------------------
# Catalogue


def fractional(sigma: float) -> BernsteinFn:
    """``lam**sigma``; sigma = 1 is the pure drift ``lam``."""
    sigma = float(sigma)
    if not 0.0 < sigma <= 1.0:
        raise DomainError(f"fractional exponent must lie in (0, 1], got {sigma}")
    if sigma == 1.0:
        triple = LevyTriple(0.0, 1.0)
    else:
        triple = LevyTriple(0.0, 0.0, ClosedFamily("fractional", (sigma,)))

    def closed(lam, _s=sigma):
        return np.power(np.asarray(lam, dtype=float), _s)

    return bernstein_fn(f"fractional:{sigma:g}", closed, triple)


def log1p() -> BernsteinFn:
    """``log(1 + lam)`` with Lévy density ``e^{-t}/t`` (Frullani)."""
    return bernstein_fn("log1p", np.log1p, LevyTriple(0.0, 0.0, ClosedFamily("log1p")))


def sqrt_tanh_sqrt() -> BernsteinFn:
    """``sqrt(lam) tanh(sqrt(lam))``; closed form only, no triple is shipped."""

    def closed(lam):
        r = np.sqrt(np.asarray(lam, dtype=float))
        return r * np.tanh(r)

    return bernstein_fn("sqrt-tanh-sqrt", closed, None)


def affine(a: float, b: float) -> BernsteinFn:
    a, b = float(a), float(b)
    triple = LevyTriple(a, b)

    def closed(lam, _a=a, _b=b):
        return _a + _b * np.asarray(lam, dtype=float)

    return bernstein_fn(f"affine:{a:g},{b:g}", closed, triple)


def catalogue() -> list[BernsteinFn]:
    return [
        fractional(0.25),
        fractional(0.5),
        fractional(0.75),
        fractional(1.0),
        log1p(),
        sqrt_tanh_sqrt(),
        affine(0.0, 1.0),
        affine(1.0, 2.0),
    ]


def from_id(ident: str) -> BernsteinFn:
    """Parse ``fractional:S``, ``log1p``, ``sqrt-tanh-sqrt`` or ``affine:A,B``."""
    head, _, rest = ident.strip().partition(":")
    try:
        if head == "fractional" and rest:
            return fractional(float(rest))
        if head == "log1p" and not rest:
            return log1p()
        if head == "sqrt-tanh-sqrt" and not rest:
            return sqrt_tanh_sqrt()
        if head == "affine" and rest:
            a, b = (float(v) for v in rest.split(","))
            return affine(a, b)
    except (ValueError, DomainError) as exc:
        raise UnknownFunctionId(f"bad function id {ident!r}: {exc}") from exc
    raise UnknownFunctionId(f"unknown function id {ident!r}")

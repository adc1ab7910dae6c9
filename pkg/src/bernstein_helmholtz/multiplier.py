"""Radial Fourier multipliers ``f(-Laplacian)`` on periodic grids.

The box is ``[0, box)^d`` with ``box = 2*pi*L``; the frequency lattice is
``Z^d / L``. Transforms are unitary (``norm="ortho"``) so norms are the same
on both sides.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from .bernstein import BernsteinFn, affine, omega
from .errors import ConstantSymbol, DomainError, LatticeUnreachable, SizeError, ZeroModeEnergy

RATIO_FLOOR = 1e-14
ZERO_MODE_TOL = 1e-14
L_MAX = 32


def _is_pow2(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Complex samples on ``n**d`` points of the periodic box ``[0, box)^d``."""

    d: int
    n: int
    box: float
    values: np.ndarray
    space: str = "physical"

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"d must be 1, 2 or 3, got {self.d}")
        if not _is_pow2(self.n):
            raise SizeError(f"samples per axis must be a power of two, got {self.n}")
        if not self.box > 0:
            raise DomainError("box length must be positive")
        vals = np.asarray(self.values, dtype=complex)
        if vals.size != self.n**self.d:
            raise SizeError(f"expected {self.n ** self.d} samples, got {vals.size}")
        object.__setattr__(self, "values", vals.reshape((self.n,) * self.d))

    @property
    def spacing(self) -> float:
        return self.box / self.n

    def coordinates(self) -> np.ndarray:
        """Physical points, shape ``(n,)*d + (d,)``."""
        axis = np.arange(self.n) * self.spacing
        return np.stack(np.meshgrid(*([axis] * self.d), indexing="ij"), axis=-1)

    def frequencies(self) -> np.ndarray:
        """Lattice frequency of each DFT bin, shape ``(n,)*d + (d,)``."""
        k = np.fft.fftfreq(self.n, d=self.spacing) * 2.0 * np.pi
        return np.stack(np.meshgrid(*([k] * self.d), indexing="ij"), axis=-1)

    def freq_norm2(self) -> np.ndarray:
        # integer arithmetic first so |xi|^2 is exact on the lattice
        m = np.fft.fftfreq(self.n, d=1.0 / self.n)
        grids = np.meshgrid(*([m] * self.d), indexing="ij")
        L = self.box / (2.0 * np.pi)
        return sum(g * g for g in grids) / (L * L)

    def norm(self) -> float:
        return float(np.linalg.norm(self.values))

    def with_values(self, values, space: Optional[str] = None) -> "GridFunction":
        return replace(self, values=values, space=self.space if space is None else space)


def grid_from_function(func, d: int, n: int, box: float = 2.0 * np.pi) -> GridFunction:
    """Sample ``func(points)`` (points shape ``(..., d)``) on the grid."""
    g = GridFunction(d, n, box, np.zeros((n,) * d))
    return g.with_values(func(g.coordinates()))


def plane_wave(d: int, n: int, box: float, xi0: Sequence[float]) -> GridFunction:
    """``exp(-i x . xi0)`` on the grid."""
    xi0 = np.asarray(xi0, dtype=float)
    return grid_from_function(lambda x: np.exp(-1j * (x @ xi0)), d, n, box)


def forward_transform(u: GridFunction) -> GridFunction:
    if u.space != "physical":
        raise DomainError("forward_transform expects a physical-space grid")
    return u.with_values(np.fft.fftn(u.values, norm="ortho"), "frequency")


def inverse_transform(u_hat: GridFunction) -> GridFunction:
    if u_hat.space != "frequency":
        raise DomainError("inverse_transform expects a frequency-space grid")
    return u_hat.with_values(np.fft.ifftn(u_hat.values, norm="ortho"), "physical")


@dataclass(frozen=True)
class MultiplierSymbol:
    f: BernsteinFn
    shift: Optional[float] = None

    def __call__(self, lam2):
        vals = np.asarray(self.f.closed_eval(lam2), dtype=float)
        return vals if self.shift is None else vals - self.shift

    @classmethod
    def residual(cls, f: BernsteinFn) -> "MultiplierSymbol":
        return cls(f, f.f1)


def apply_symbol(u: GridFunction, sym: MultiplierSymbol) -> GridFunction:
    """``F^{-1}(sym(|xi|^2) * F u)`` on the same grid."""
    u_hat = forward_transform(u)
    out = u_hat.values * sym(u.freq_norm2())
    return inverse_transform(u_hat.with_values(out))


@dataclass
class ResidualReport:
    res_f: float
    res_lap: float
    ratio: Optional[float]
    spectral_offsphere_energy: float


def _energy(u_hat: np.ndarray) -> np.ndarray:
    return np.abs(u_hat) ** 2


def spectral_support(u: GridFunction, delta: float = 0.1) -> float:
    """Fraction of Fourier energy on lattice points with ``||xi| - 1| >= delta``."""
    if not 0 < delta < 1:
        raise DomainError("delta must lie in (0, 1)")
    e = _energy(forward_transform(u).values)
    total = e.sum()
    if total == 0:
        raise DomainError("spectral_support of the zero field")
    off = np.abs(np.sqrt(u.freq_norm2()) - 1.0) >= delta
    return float(e[off].sum() / total)


def zero_mode_fraction(u: GridFunction) -> float:
    e = _energy(forward_transform(u).values)
    return float(e.flat[0] / e.sum())


def helmholtz_residual(u: GridFunction, f: BernsteinFn, delta: float = 0.1) -> ResidualReport:
    """Relative residuals of ``f(-Lap) u = f(1) u`` and ``-Lap u = u``.

    Raises :class:`ConstantSymbol` for constant ``f`` and
    :class:`ZeroModeEnergy` when the zero frequency carries energy.
    """
    if f.is_constant:
        raise ConstantSymbol("non-constant Bernstein function required")
    norm_u = u.norm()
    if norm_u == 0:
        raise DomainError("u must be nonzero")
    if zero_mode_fraction(u) > ZERO_MODE_TOL:
        raise ZeroModeEnergy("energy at xi = 0; the solution notion excludes 0 from supp u_hat")
    res_f = apply_symbol(u, MultiplierSymbol.residual(f)).norm() / norm_u
    res_lap = apply_symbol(u, MultiplierSymbol(affine(0.0, 1.0), 1.0)).norm() / norm_u
    ratio = res_f / res_lap if res_lap > RATIO_FLOOR else None
    return ResidualReport(res_f, res_lap, ratio, spectral_support(u, delta))


# ---------------------------------------------------------------------------
# lattice sweeps


def _sum_of_squares(target: int, d: int) -> Optional[tuple[int, ...]]:
    """Some integer vector with squared norm ``target`` (largest entry first), or None."""
    if d == 1:
        r = math.isqrt(target)
        return (r,) if r * r == target else None
    r = math.isqrt(target)
    for k in range(r, -1, -1):
        rest = _sum_of_squares(target - k * k, d - 1)
        if rest is not None:
            return (k,) + rest
    return None


def find_lattice_mode(lam: float, d: int = 2, l_max: int = L_MAX, tol: float = 1e-12):
    """Return ``(L, k)`` with integer ``k`` and ``|k|^2 / L^2 = lam``.

    Raises :class:`LatticeUnreachable` when no box ``L <= l_max`` works.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    for L in range(1, l_max + 1):
        target = lam * L * L
        m = round(target)
        if abs(target - m) > tol * max(1.0, target):
            continue
        k = _sum_of_squares(int(m), d)
        if k is not None:
            return L, k
    raise LatticeUnreachable(f"no lattice point with |xi|^2 = {lam} for d={d}, L <= {l_max}")


def grid_for_mode(k: Sequence[int]) -> int:
    need = 2 * max(abs(int(v)) for v in k) + 2
    n = 16
    while n < need:
        n *= 2
    return n


@dataclass
class SweepRow:
    lam: float
    res_f: float
    res_lap: float
    ratio: Optional[float]
    omega_pred: float
    box: float = float("nan")
    mode: tuple[int, ...] = ()
    note: str = ""


def omega_ratio_sweep(f: BernsteinFn, lambdas: Sequence[float], d: int = 2) -> list[SweepRow]:
    """Measure ``res_f / res_lap`` for single lattice modes and compare with ``omega``."""
    if f.is_constant:
        raise ConstantSymbol("non-constant Bernstein function required")
    rows = []
    for lam in lambdas:
        lam = float(lam)
        L, k = find_lattice_mode(lam, d)
        n = grid_for_mode(k)
        box = 2.0 * np.pi * L
        u = plane_wave(d, n, box, np.asarray(k, dtype=float) / L)
        rep = helmholtz_residual(u, f)
        note = "" if rep.ratio is not None else "eigen: ratio undefined"
        rows.append(SweepRow(lam, rep.res_f, rep.res_lap, rep.ratio, omega(f, lam), box, tuple(k), note))
    return rows


def on_sphere_modes(d: int) -> list[tuple[int, ...]]:
    """Lattice points of ``Z^d`` on the unit sphere: ``+-e_i``."""
    out = []
    for i in range(d):
        for s in (1, -1):
            v = [0] * d
            v[i] = s
            out.append(tuple(v))
    return out


def superpose_modes(d: int, n: int, box: float, modes, coeffs=None) -> GridFunction:
    """``sum_j c_j exp(-i x . xi_j)`` for frequency vectors ``xi_j``."""
    modes = np.asarray(modes, dtype=float)
    coeffs = np.ones(len(modes)) if coeffs is None else np.asarray(coeffs)
    g = GridFunction(d, n, box, np.zeros((n,) * d))
    x = g.coordinates()
    vals = np.zeros(x.shape[:-1], dtype=complex)
    for xi, c in zip(modes, coeffs):
        vals += c * np.exp(-1j * (x @ xi))
    return g.with_values(vals)


def random_field_in_shell(
    d: int, n: int, box: float, mask_fn, rng: np.random.Generator
) -> GridFunction:
    """Random Fourier coefficients on bins where ``mask_fn(|xi|) is True``."""
    g = GridFunction(d, n, box, np.zeros((n,) * d))
    r = np.sqrt(g.freq_norm2())
    mask = mask_fn(r)
    coef = (rng.standard_normal(r.shape) + 1j * rng.standard_normal(r.shape)) * mask
    return inverse_transform(g.with_values(coef, "frequency"))

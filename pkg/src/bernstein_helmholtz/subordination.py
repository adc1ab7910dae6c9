"""Phillips functional calculus ``f(A)`` for symmetric positive semidefinite matrices.

``f(A) u = a u + b A u + int (u - e^{-tA} u) mu(dt)`` with the semigroup
``e^{-tA}`` computed from the eigendecomposition of ``A``.
"""
from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .bernstein import BernsteinFn, QuadratureNodes, levy_nodes
from .errors import DomainError, NoUnitEigenvalue

SYM_TOL = 1e-12
EIG_TOL = 1e-12
UNIT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class MatrixGenerator:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @classmethod
    def from_matrix(cls, A) -> "MatrixGenerator":
        A = np.array(A, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise DomainError("generator must be a square matrix")
        if np.linalg.norm(A - A.T) > SYM_TOL * max(1.0, np.linalg.norm(A)):
            raise DomainError("generator must be symmetric")
        lam, V = np.linalg.eigh(A)
        if lam.size and lam[0] < -EIG_TOL * max(1.0, abs(lam[-1])):
            raise DomainError(f"generator must be positive semidefinite (min eigenvalue {lam[0]:g})")
        lam = np.clip(lam, 0.0, None)
        recon = (V * lam) @ V.T
        if np.linalg.norm(recon - A) > 1e-10 * max(1.0, np.linalg.norm(A)):
            raise DomainError("spectral reconstruction failed")
        A.flags.writeable = False
        return cls(A, lam, V)

    @property
    def m(self) -> int:
        return self.matrix.shape[0]


def semigroup(A: MatrixGenerator, t: float) -> np.ndarray:
    """``V diag(exp(-t lam)) V^T``."""
    if t < 0:
        raise DomainError("semigroup time must be nonnegative")
    V = A.eigenvectors
    return (V * np.exp(-t * A.eigenvalues)) @ V.T


def spectral_apply(A: MatrixGenerator, f: BernsteinFn, u) -> np.ndarray:
    """Reference ``V diag(f(lam)) V^T u`` from the closed form."""
    V = A.eigenvectors
    return V @ (np.asarray(f.closed_eval(A.eigenvalues), dtype=float) * (V.T @ np.asarray(u, dtype=float)))


def phillips_apply(A: MatrixGenerator, f: BernsteinFn, u, literal_drift_sign: bool = False) -> np.ndarray:
    """Subordinated ``f(A) u`` by quadrature of the Lévy integral.

    The tail beyond the quadrature cutoff ``T`` contributes
    ``mu((T, inf)) (u - e^{-TA} u)``; ``T`` is chosen from the smallest
    positive eigenvalue so ``e^{-TA}`` only retains the kernel of ``A``.
    ``literal_drift_sign=True`` uses ``b (-A u)`` for the drift term instead
    of ``b A u``.
    """
    if f.triple is None:
        raise DomainError(f"{f.name} has no Lévy triple")
    u = np.asarray(u, dtype=float)
    if u.shape != (A.m,):
        raise DomainError(f"vector of length {A.m} expected")
    a, b, measure = f.triple.a, f.triple.b, f.triple.measure
    drift = -b if literal_drift_sign else b
    out = a * u + drift * (A.matrix @ u)
    if measure.is_zero:
        return out
    if isinstance(measure, QuadratureNodes):
        for t, w in zip(measure.nodes, measure.weights):
            out += w * (u - semigroup(A, t) @ u)
        return out
    positive = A.eigenvalues[A.eigenvalues > EIG_TOL]
    if positive.size == 0:
        return out
    q = levy_nodes(measure, float(positive.min()), float(positive.max()), 0)
    V = A.eigenvectors
    c = V.T @ u
    # semigroup applied at every node: V diag(e^{-t_k lam}) V^T u, summed with weights
    decay = np.exp(-np.outer(q.nodes, A.eigenvalues))
    integral = q.weights.sum() * u - V @ ((q.weights @ decay) * c)
    tail = q.tail_mass * (u - semigroup(A, q.cutoff) @ u)
    return out + integral + tail


@dataclass
class EigenTransferReport:
    residual: float
    f1: float
    eigenvector: np.ndarray
    eigenvalue: float


def unit_eigenvector(A: MatrixGenerator, tol: float = UNIT_TOL) -> tuple[np.ndarray, float]:
    idx = np.argmin(np.abs(A.eigenvalues - 1.0))
    if abs(A.eigenvalues[idx] - 1.0) > tol:
        raise NoUnitEigenvalue("generator has no eigenvalue equal to 1")
    return A.eigenvectors[:, idx], float(A.eigenvalues[idx])


def eigen_transfer_check(A: MatrixGenerator, f: BernsteinFn) -> EigenTransferReport:
    """``||f(A) u - f(1) u|| / ||u||`` for an eigenvector with ``A u = u``."""
    u, lam = unit_eigenvector(A)
    res = np.linalg.norm(phillips_apply(A, f, u) - f.f1 * u) / np.linalg.norm(u)
    return EigenTransferReport(float(res), f.f1, u, lam)


def random_psd_with_unit_eigenvalue(m: int, rng: np.random.Generator, spread: float = 10.0) -> np.ndarray:
    """Symmetric PSD matrix with spectrum ``{1} U uniform(0, spread)``."""
    Q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    lam = rng.uniform(0.0, spread, m)
    lam[0] = 1.0
    A = (Q * lam) @ Q.T
    return 0.5 * (A + A.T)


def read_matrix(path) -> np.ndarray:
    """Plain text: ``m`` then ``m*m`` reals, row-major, whitespace separated."""
    tokens = Path(path).read_text().split()
    if not tokens:
        raise DomainError("empty matrix file")
    m = int(tokens[0])
    vals = np.array([float(t) for t in tokens[1:]])
    if vals.size != m * m:
        raise DomainError(f"expected {m * m} entries, found {vals.size}")
    return vals.reshape(m, m)


def write_matrix(path, A) -> None:
    A = np.asarray(A, dtype=float)
    lines = [str(A.shape[0])] + [" ".join(repr(float(v)) for v in row) for row in A]
    Path(path).write_text("\n".join(lines) + "\n")

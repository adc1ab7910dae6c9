"""Bernstein-function Fourier multipliers and the Helmholtz equation, numerically."""
from .bernstein import (
    BernsteinFn,
    ClosedFamily,
    LevyTriple,
    QuadratureNodes,
    affine,
    catalogue,
    deriv,
    eval_from_triple,
    fractional,
    from_id,
    inv_omega,
    log1p,
    omega,
    sqrt_tanh_sqrt,
)
from .errors import *  # noqa: F401,F403
from .multiplier import GridFunction, helmholtz_residual, omega_ratio_sweep
from .sphere import bstar_norm, herglotz, layer_residual_demo, make_quadrature
from .subordination import MatrixGenerator, eigen_transfer_check, phillips_apply

__version__ = "0.1.0"

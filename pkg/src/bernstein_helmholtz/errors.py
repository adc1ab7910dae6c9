"""Exception hierarchy shared by every module."""


class BernsteinHelmholtzError(Exception):
    """Base class for all library errors."""


class DomainError(BernsteinHelmholtzError, ValueError):
    pass


class NonIntegrableMeasure(BernsteinHelmholtzError, ValueError):
    pass


class NearZeroSymbol(BernsteinHelmholtzError, ArithmeticError):
    pass


class UnknownFunctionId(BernsteinHelmholtzError, ValueError):
    pass


class SizeError(BernsteinHelmholtzError, ValueError):
    pass


class ConstantSymbol(BernsteinHelmholtzError, ValueError):
    """Raised where a non-constant Bernstein function is required."""


class ZeroModeEnergy(BernsteinHelmholtzError, ValueError):
    pass


class LatticeUnreachable(BernsteinHelmholtzError, ValueError):
    pass


class DimensionMismatch(BernsteinHelmholtzError, ValueError):
    pass


class UnsupportedOrder(BernsteinHelmholtzError, ValueError):
    pass


class BudgetExceeded(BernsteinHelmholtzError, RuntimeError):
    pass


class NoUnitEigenvalue(BernsteinHelmholtzError, ValueError):
    pass

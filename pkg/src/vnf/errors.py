"""Exception hierarchy shared by all vnf modules."""


class VnfError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(VnfError, ValueError):
    """Malformed input: bad field spec, unparsable literal, invalid weight."""


class NonSquarefree(ConfigError):
    pass


class DisallowedD(ConfigError):
    pass


class ZeroIdeal(VnfError, ValueError):
    pass


class ZeroInput(VnfError, ValueError):
    pass


class NonIntegralIdeal(VnfError, ValueError):
    pass


class FactorizationOverflow(VnfError, OverflowError):
    pass


class RegionUnbounded(VnfError, ValueError):
    pass


class HenselFailure(VnfError, ArithmeticError):
    pass


class DomainError(VnfError, ValueError):
    pass


class OrderOutOfEnvelope(DomainError):
    pass


class PoleError(VnfError, ZeroDivisionError):
    """Evaluation requested at a pole (Gamma, zeta, gamma factors)."""


class BudgetExceeded(VnfError, RuntimeError):
    """A numerical budget (panel count, enumeration cap, radius) ran out."""


class TruncationBudgetExceeded(BudgetExceeded):
    def __init__(self, message, partial=None, bound=None):
        super().__init__(message)
        self.partial = partial
        self.bound = bound


class EnumerationCapExceeded(BudgetExceeded):
    pass

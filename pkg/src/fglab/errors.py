"""Exception hierarchy. Every error raised on purpose by fglab derives from FglabError."""


class FglabError(Exception):
    pass


class ConfigError(FglabError, ValueError):
    pass


class PrecisionExhausted(FglabError):
    pass


class DenominatorCapExceeded(FglabError):
    pass


class NonUnit(FglabError, ArithmeticError):
    pass


class UnsupportedRing(FglabError):
    pass


class NewtonHypothesisFailed(FglabError):
    pass


class InnerConstantTermNonzero(FglabError, ValueError):
    pass


class NonUnitDerivative(FglabError):
    pass


class InfiniteHeightAtCap(FglabError):
    pass


class DivergentEvaluation(FglabError):
    pass


class IntegralityFailure(FglabError):
    """A recursion step required dividing by p^k a coefficient that p^k does not divide.

    ``degree`` is the total degree of the failing correction term, ``exponent`` the
    first offending exponent vector.
    """

    def __init__(self, msg, degree=None, exponent=None):
        super().__init__(msg)
        self.degree = degree
        self.exponent = exponent


class NotStable(FglabError, ValueError):
    pass


class AxiomCheckFailed(FglabError):
    pass


class NotCommuting(FglabError):
    def __init__(self, msg, exponent=None):
        super().__init__(msg)
        self.exponent = exponent


class ReconstructionMismatch(FglabError):
    pass


class SchemaError(FglabError, ValueError):
    pass


class IdentityCheckFailed(FglabError):
    """A demo sub-check did not hold; ``identity`` names the failing statement."""

    def __init__(self, msg, identity=None):
        super().__init__(msg)
        self.identity = identity

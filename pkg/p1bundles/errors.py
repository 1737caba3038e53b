"""Exception hierarchy. Every error is a ValueError so callers can catch broadly."""


class P1BundleError(ValueError):
    """Root of all library errors."""


class ZeroConstantTerm(P1BundleError):
    pass


class SingularMatrix(P1BundleError):
    pass


class DegreeMismatch(P1BundleError):
    pass


class NotOverHirzebruch(P1BundleError):
    pass


class UnsupportedFamily(P1BundleError):
    pass


class RangeViolation(P1BundleError):
    pass


class InvalidDescriptor(P1BundleError):
    pass


class InvalidUmemura(InvalidDescriptor):
    pass


class NotInvertible(P1BundleError):
    pass


class NonUnitDeterminant(P1BundleError):
    pass


class NotNormalizedAtLambda(P1BundleError):
    pass


class UnresolvedJump(P1BundleError):
    """Raised when a jump candidate is an irreducible factor of degree > 1."""

    def __init__(self, factors):
        self.factors = list(factors)
        super().__init__(f"Jump points not rational, offending factors: {self.factors}")


class IllegalGenerator(P1BundleError):
    pass


class SpecializationPole(P1BundleError):
    pass


class InexactCoefficient(P1BundleError):
    pass


class NonTerminatingReduction(P1BundleError):
    pass

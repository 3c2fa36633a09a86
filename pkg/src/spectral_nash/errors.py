"""Exception hierarchy shared across the package."""


class SpectralNashError(Exception):
    """Base class for every error raised by this package."""


class InputError(SpectralNashError):
    """Malformed input data (bad shapes, unparsable files, bad flags)."""


class DimensionMismatch(InputError, ValueError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConstantMatrix(SpectralNashError, ValueError):
    """Normalization is undefined because every entry is equal."""


class ZeroBlock(SpectralNashError, ValueError):
    """One strategy block of a symmetric vector carries no probability mass."""


class NonPositiveConstant(SpectralNashError, ValueError):
    pass


class NumericalError(SpectralNashError):
    """Base for failures of the numerical kernels."""


class LpFailure(NumericalError):
    """A linear program did not return an optimal, certified solution."""


class NumericalFailure(LpFailure):
    """Pivoting exceeded its iteration cap or residuals failed certification."""


class InfeasibleRegion(LpFailure):
    pass


class NotDescent(SpectralNashError, ValueError):
    pass


class NotSymmetric(NumericalError, ValueError):
    pass


class ConvergenceFailure(NumericalError):
    pass


class EmptyPositiveSpectrum(SpectralNashError, ValueError):
    """The matrix has no positive eigenvalues, so the regret is convex."""


class TooLarge(SpectralNashError, ValueError):
    pass


class SearchError(SpectralNashError):
    pass


class AllRegionsFailed(SearchError):
    pass


class GenerationFailure(SpectralNashError):
    pass


class VerificationError(SpectralNashError):
    """Base for failed mathematical certificates."""


class CertificateViolation(VerificationError):
    def __init__(self, name, excess, witness=None):
        self.name = name
        self.excess = excess
        self.witness = witness
        super().__init__(f"{name} violated by {excess:.3e}")


class BoundViolation(VerificationError):
    def __init__(self, link, lhs, rhs):
        self.link = link
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(f"{link}: {lhs!r} > {rhs!r}")


class PerronViolation(VerificationError):
    pass

"""Exception taxonomy shared by all modules."""


class GaugeforgeError(Exception):
    """Base class for every domain error raised by this package."""


class DegeneracyError(GaugeforgeError):
    """Linearly dependent or affinely degenerate input."""


class FeasibilityError(GaugeforgeError):
    """A linear program has no feasible point (sample too sparse)."""


class IntegrandError(GaugeforgeError):
    """An integrand produced a nonpositive value or is misconfigured."""


class ConfigurationError(GaugeforgeError):
    """Missing configuration, e.g. an undeclared Lipschitz constant."""


class DecompositionError(GaugeforgeError):
    """A barycentric decomposition violates its defining identity."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class TestPairError(GaugeforgeError):
    """The pair of chains is not a valid flat-vs-competitor test pair."""


class ReductionUnsupportedError(GaugeforgeError):
    """Overlapping chain given in a dimension the overlay pass does not cover."""


class ConsistencyError(GaugeforgeError):
    """An internal exact identity failed; indicates a bug or bad input."""


class CertificateError(GaugeforgeError):
    """The contradiction certificate is invalid (margin <= 0)."""

    def __init__(self, message, certificate=None):
        super().__init__(message)
        self.certificate = certificate

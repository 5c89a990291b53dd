"""Shared exception types."""


class CutProjectError(Exception):
    """Base class for all library errors."""


class ContextMismatch(CutProjectError):
    """Operands belong to different generator contexts."""


class PrecisionExhausted(CutProjectError):
    """A sign/floor query could not be decided within the precision budget.

    Callers must treat this as failure, never as zero.
    """


class UnrepresentableProduct(CutProjectError):
    """Product (or quotient) leaves the rational module spanned by the context."""


class ParseError(CutProjectError):
    """Malformed scalar expression or config value."""


class SingularBasis(CutProjectError):
    """Lattice basis has zero determinant."""


class SingularMatrix(CutProjectError):
    """Exact linear solve hit a singular system."""


class DependenceDetected(CutProjectError):
    """Rational-independence condition fails symbolically."""


class MembershipUnknown(CutProjectError):
    """A group-membership query needed by a computation returned Unknown."""


class NotHeckeScheme(CutProjectError):
    """Operation requires a scheme built by make_hecke_scheme."""


class NotEnoughPoints(CutProjectError):
    """Statistic requires more sample points than available."""


class EmptySample(CutProjectError):
    """Operation requires a nonempty model-set sample."""


class NotInG(CutProjectError):
    """A shift vector is not certified to lie in the translation group."""


class MeasureMismatch(CutProjectError):
    """Source and target windows have different exact measure."""


class ResidualNonzero(CutProjectError):
    """Greedy partition left a nonempty residual; the shift set is insufficient."""

    def __init__(self, residual, shifts):
        self.residual = residual
        self.shifts = shifts
        super().__init__(f"greedy partition left residual {residual}")

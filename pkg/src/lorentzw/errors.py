"""Exception hierarchy shared by all lorentzw modules."""


class LorentzwError(Exception):
    """Base class for every error raised by the package."""


class ExprSyntaxError(LorentzwError, ValueError):
    """Malformed expression text.

    Attributes:
        offset: byte offset of the offending token in the input.
        expected: sorted tuple of token descriptions that would have been accepted.
    """

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(expected))
        detail = f"{message} at offset {offset}"
        if self.expected:
            detail += f" (expected one of: {', '.join(self.expected)})"
        super().__init__(detail)


class UnknownIdentifier(ExprSyntaxError):
    """A name that is neither ``t`` nor a known function."""


class DomainError(LorentzwError, ArithmeticError):
    """Evaluation left the natural domain of an expression or curve."""

    def __init__(self, message, subexpr=None, value=None):
        self.subexpr = subexpr
        self.value = value
        super().__init__(message)


class ConstructionError(LorentzwError, ValueError):
    """Generating data violates a precondition on the sampled domain."""


class QuadratureError(LorentzwError):
    pass


class SingularPointError(LorentzwError):
    """The first fundamental form degenerates (E = 0) at the point."""


class NotCanonicalError(LorentzwError):
    pass


class NegativeProductError(LorentzwError):
    """g1' g2' h1' h2' is not positive, so the surface is not of general type."""


class DegenerateNormalError(LorentzwError):
    """A second fundamental tensor value is null and cannot be normalized."""


class RankError(LorentzwError):
    """The first normal space has dimension below two."""


class PreconditionError(LorentzwError):
    """The reparametrization ODE reached a zero of f or of g'h'."""


class StiffnessError(LorentzwError):
    """Step control drove the ODE step below its floor."""


class MaskError(LorentzwError):
    """Too few unmasked nodes remain for a stencil computation."""


class ConfigError(LorentzwError, ValueError):
    """A configuration document is malformed or fails its schema."""

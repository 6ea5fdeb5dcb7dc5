"""
Exception hierarchy for DualGraphLens
"""


class DualGraphError(Exception):
    """Base class for every error raised by the library"""


# Graph structure


class UnknownVertexError(DualGraphError, KeyError):
    def __init__(self, vertex: str) -> None:
        super().__init__(f"unknown vertex: {vertex}")
        self.vertex = vertex

    def __str__(self) -> str:
        return str(self.args[0])


class UnknownEdgeError(DualGraphError, KeyError):
    def __init__(self, description: str) -> None:
        super().__init__(f"unknown edge: {description}")

    def __str__(self) -> str:
        return str(self.args[0])


class DisconnectedGraphError(DualGraphError, ValueError):
    pass


class EmptyGraphError(DualGraphError, ValueError):
    pass


class GraphTooLargeError(DualGraphError, ValueError):
    pass


# Modifications and certificates


class DanglingReferenceError(DualGraphError, ValueError):
    pass


class FreshIdentifierError(DualGraphError, ValueError):
    pass


class MalformedCertificateError(DualGraphError, ValueError):
    """A certificate step could not be replayed"""

    def __init__(self, side: int, step: int, reason: str) -> None:
        super().__init__(f"certificate sequence {side}, step {step}: {reason}")
        self.side = side
        self.step = step


# Resolution graphs


class DualGraphInvariantError(DualGraphError, ValueError):
    pass


# Valuations


class ArityMismatchError(DualGraphError, ValueError):
    pass


class VariableIndexError(DualGraphError, ValueError):
    pass


class NotNormalizableError(DualGraphError, ValueError):
    """Ideal value is 0 or +inf, so the semivaluation is not in L(A,m)"""


class CenterNotMaximalError(DualGraphError, ValueError):
    pass


class NormalizationError(DualGraphError, ValueError):
    pass


class SkeletonParameterError(DualGraphError, ValueError):
    pass


class InvalidWeightsError(DualGraphError, ValueError):
    pass


class EmptyIdealError(DualGraphError, ValueError):
    """An ideal was given by an empty generating set"""


class NotDivisibleError(DualGraphError, ValueError):
    pass


# Input formats


class GraphSyntaxError(DualGraphError, ValueError):
    def __init__(self, line: int, message: str) -> None:
        super().__init__(f"line {line}: {message}")
        self.line = line


class DuplicateIdentifierError(GraphSyntaxError):
    pass


class PolynomialSyntaxError(DualGraphError, ValueError):
    pass


class ScriptSyntaxError(GraphSyntaxError):
    pass


class CertificateSyntaxError(DualGraphError, ValueError):
    """Certificate document does not match the certificate schema"""


class DartNamingError(DualGraphError, ValueError):
    """Darts do not follow the <edge>+ / <edge>- naming the formats rely on"""


# Fixture corpus and acceptance suite


class FixtureError(DualGraphError, ValueError):
    pass


class UnknownCriterionError(DualGraphError, ValueError):
    pass

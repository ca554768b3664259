"""Exception types shared across the package."""


class PwssError(Exception):
    """Base class for all package errors."""


class QuotientNotContained(PwssError):
    """quotient(V, W) called with W not contained in V."""


class NotContained(PwssError):
    """complement(W, V) called with W not contained in V."""


class DegeneratePairing(PwssError):
    """A pairing matrix required to be nondegenerate is singular."""


class BadBound(PwssError):
    """Interval extension requested with t-bound < 1."""


class InvalidCDGA(PwssError):
    """A cdga axiom fails; carries the validation report."""

    def __init__(self, report):
        self.report = report
        super().__init__(str(report))


class InvalidPerverseCDGA(PwssError):
    """A perverse cdga compatibility check fails."""


class StabilizationFailure(PwssError):
    """A bounded-interval computation did not stabilize between N and N+1,
    or an operation needed a product beyond the truncation bound."""


class DimensionMismatch(PwssError):
    """Perversities from different complex dimensions combined."""


class SchemaError(PwssError):
    """Datum file does not match the JSON schema."""


class InvariantViolation(PwssError):
    """Datum violates structural invariants; carries the full list."""

    def __init__(self, failures):
        self.failures = list(failures)
        super().__init__("; ".join(self.failures))


class DegenerateHyperplaneClass(PwssError):
    """cone_datum called with w·w = 0."""


class LemmaPreconditionFailed(PwssError):
    """Witness construction attempted on a datum failing the link lemmas."""


class WitnessVerificationFailed(PwssError):
    """A formality witness failed verification; names the cell or pair."""


class NotDefined(PwssError):
    """Massey triple requested for classes with xy != 0 or yz != 0."""


class NonCommutingSquare(PwssError):
    """A page morphism fails to commute with differentials."""

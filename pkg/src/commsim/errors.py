"""Exception hierarchy shared by every module."""


class SimulationError(Exception):
    """Base class for all errors raised by commsim."""


class ValidationError(SimulationError, ValueError):
    """Input failed a structural or numerical precondition."""


class InvalidMatrix(ValidationError):
    pass


class ShapeMismatch(ValidationError):
    pass


class NotNormalized(ValidationError):
    pass


class NotIsometry(ValidationError):
    pass


class InvalidParameter(ValidationError):
    pass


class SizeLimit(ValidationError):
    pass


class InvalidDecomposition(ValidationError):
    pass


class InvalidWitness(ValidationError):
    pass


class InvalidScenario(ValidationError):
    pass


class InvalidProtocol(ValidationError):
    pass


class MalformedProtocol(ValidationError):
    pass


class UnknownMeasurement(ValidationError):
    pass


class DegenerateVector(ValidationError):
    pass


class CapExceeded(SimulationError):
    """A party's vector norm exceeded the plan's cap C.

    This means the diamond-norm bound used to size the plan was wrong.
    """


class EstimationFailure(SimulationError):
    """Estimated outcome probabilities were too far off to renormalize."""


class SchemaError(ValidationError):
    """A JSON document is missing fields or carries an unsupported schema_version."""

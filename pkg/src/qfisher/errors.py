"""Exception hierarchy.

Every error carries a stable ``code`` string; the command line front end
prints it in its error report.
"""


class QFisherError(ValueError):
    code = "QFISHER_ERROR"


class DimMismatch(QFisherError):
    code = "DIM_MISMATCH"


class NotHermitian(QFisherError):
    code = "NOT_HERMITIAN"


class TraceNotOne(QFisherError):
    code = "TRACE_NOT_ONE"


class NotPsd(QFisherError):
    code = "NOT_PSD"


class ConvergenceFailure(QFisherError):
    code = "CONVERGENCE_FAILURE"


class NegativeInput(QFisherError):
    code = "NEGATIVE_INPUT"


class ParamOutOfRange(QFisherError):
    code = "PARAM_OUT_OF_RANGE"


class SingularState(QFisherError):
    code = "SINGULAR_STATE"


class UnsupportedTangent(QFisherError):
    code = "UNSUPPORTED_TANGENT"


class NotLocallyUnbiased(QFisherError):
    code = "NOT_LOCALLY_UNBIASED"


class NotCentered(QFisherError):
    code = "NOT_CENTERED"


class PositivityConditionViolated(QFisherError):
    code = "POSITIVITY_CONDITION_VIOLATED"


class NotTracePreserving(QFisherError):
    code = "NOT_TRACE_PRESERVING"


class NotProjective(QFisherError):
    code = "NOT_PROJECTIVE"


class InvalidPovm(QFisherError):
    code = "INVALID_POVM"


class BadParams(QFisherError):
    code = "BAD_PARAMS"


class ZeroProbabilityOutcomeWithSignal(QFisherError):
    code = "ZERO_PROBABILITY_OUTCOME_WITH_SIGNAL"


class ParseError(QFisherError):
    code = "PARSE_ERROR"


class BadFlag(QFisherError):
    code = "BAD_FLAG"

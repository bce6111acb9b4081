from typing import Optional


class CaseParseError(ValueError):
    """
    Raised when a MATPOWER case can not be read
    :param str message: what went wrong
    :param int lineno: 1-based line number of the offending statement, if known
    """

    def __init__(self, message: str, lineno: Optional[int] = None):
        self.lineno = lineno
        super().__init__("line {}: {}".format(lineno, message) if lineno else message)


class CaseSyntaxError(CaseParseError):
    pass


class MissingTableError(CaseParseError):
    pass


class UnsupportedCostModelError(CaseParseError):
    pass


class CaseFormatError(CaseParseError):
    """Syntactically fine, but the tables do not describe a usable case"""


class NetworkBuildError(ValueError):
    pass


class PowerFlowError(RuntimeError):
    def __init__(self, message: str, iteration: int):
        self.iteration = iteration
        super().__init__("{} (iteration {})".format(message, iteration))


class NonConvergenceError(PowerFlowError):
    pass


class SingularJacobianError(PowerFlowError):
    pass


class NlpDimensionError(ValueError):
    pass


class ReferenceOpfError(RuntimeError):
    pass


class EnumerationLimitError(ValueError):
    pass


class ZeroReferenceCostError(ValueError):
    pass


class StateFormatError(ValueError):
    pass


class MissingReferenceError(ValueError):
    pass

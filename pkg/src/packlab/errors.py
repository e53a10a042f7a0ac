"""Exception types shared across packlab.

Each class carries the CLI exit code it maps to.
"""


class PacklabError(Exception):
    exit_code = 1


class InvalidInput(PacklabError, ValueError):
    exit_code = 2


class InvalidRoot(InvalidInput):
    pass


class UnboundedRoot(InvalidInput):
    pass


class ZeroCurvature(InvalidInput):
    pass


class MismatchedPairing(InvalidInput):
    pass


class PackingOverflow(PacklabError, OverflowError):
    exit_code = 3


class DegenerateData(PacklabError):
    exit_code = 4


class DegenerateQuadruple(DegenerateData, ValueError):
    pass


class NoLoxodromics(DegenerateData):
    pass


class NotLoxodromic(DegenerateData):
    pass


class InsufficientConcyclic(DegenerateData):
    pass


class EmptyDenominator(DegenerateData, ZeroDivisionError):
    pass


class InsufficientData(PacklabError):
    exit_code = 5


class InsufficientResolution(InsufficientData):
    pass


class FrontierOverflow(InsufficientData):
    pass

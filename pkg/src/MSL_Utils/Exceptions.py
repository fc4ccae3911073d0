#-----------------------------------------------------------------------
# Purpose: Error hierarchy shared by the numerical core and the command line
# Programmer: Shanqin Jin
# Email: sjin@mun.ca
# Date: 2026-02-10
#-----------------------------------------------------------------------

# Exit code convention used by Main.dispatch:
#   InputError       -> 1  (bad input, bad JSON, violated precondition)
#   CertificateError -> 2  (a numerical check failed)


class MSLError(Exception):
    """Base class for every error raised by the lab."""
    exit_code = 1


#-----------------------------------------------------------------------
# Input errors
#-----------------------------------------------------------------------
class InputError(MSLError, ValueError):
    exit_code = 1


class ConfigError(InputError):
    pass


class CommandLineError(InputError):
    pass


class DescriptorError(InputError):
    """
    Malformed JSON or an unknown descriptor kind.
    Carries the file position when the JSON parser reported one.
    """

    def __init__(self, message, path=None, line=None, column=None):
        self.path = path
        self.line = line
        self.column = column
        if path is not None and line is not None:
            message = f"{path}:{line}:{column}: {message}"
        super().__init__(message)


class DuplicateZeroError(InputError):
    pass


class EvaluationSingularityError(InputError):
    pass


class ZeroModulusError(InputError):
    pass


class ZeroMeasureError(InputError):
    pass


class DegenerateColumnError(InputError):
    pass


class NotAContractionError(InputError):
    pass


class CarlesonViolationError(InputError):
    pass


class UnsupportedEntryError(InputError):
    pass


class PreconditionError(InputError):
    pass


#-----------------------------------------------------------------------
# Certificate errors
#-----------------------------------------------------------------------
class CertificateError(MSLError):
    exit_code = 2


class ResolutionError(CertificateError):
    pass


class BoundViolationError(CertificateError):

    def __init__(self, message, point=None):
        self.point = point
        super().__init__(message)


class ResolventError(CertificateError):
    pass


class NonDiagonalizableError(CertificateError):
    pass


class AnnihilationError(CertificateError):
    pass


class UnsolvableLiftError(CertificateError):

    def __init__(self, message, residual=None):
        self.residual = residual
        super().__init__(message)


class LowerBoundViolationError(CertificateError):
    pass


class IllConditionedError(CertificateError):
    pass


class RankDeficientError(CertificateError):
    pass

"""Exception hierarchy.

Every error raised on bad input derives from :class:`NpChunkerError`.  The
``code`` and ``exit_status`` attributes are what the command line reports.
"""


class NpChunkerError(Exception):
    code = "ERROR"
    exit_status = 3


class DataError(NpChunkerError):
    """Input data could not be read or is inconsistent."""
    code = "DATA_ERROR"


class ParseError(DataError):
    """A line of input does not have the expected shape."""
    code = "PARSE_ERROR"

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = "line %d: %s" % (lineno, message)
        super().__init__(message)
        self.lineno = lineno


class FormatError(DataError):
    code = "FORMAT_ERROR"


class StructuralError(DataError):
    """Brackets in a parse field do not nest."""
    code = "STRUCTURE_ERROR"


class UnknownTagError(DataError):
    code = "UNKNOWN_TAG"

    def __init__(self, tag):
        super().__init__("tag %r is not in the tag map" % tag)
        self.tag = tag


class ModelFormatError(DataError):
    code = "MODEL_ERROR"


class ValidationError(NpChunkerError):
    """A configuration, table or machine definition is invalid."""
    code = "VALIDATION_ERROR"
    exit_status = 4


class DomainError(NpChunkerError, ValueError):
    """An argument lies outside the domain of an operation."""
    code = "DOMAIN_ERROR"


class UsageError(NpChunkerError):
    """The command line is incomplete or ambiguous."""
    code = "USAGE_ERROR"
    exit_status = 2

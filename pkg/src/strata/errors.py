"""Exception hierarchy shared by every module."""


class StrataError(Exception):
    """Base class; ``code`` names the failure kind, ``witness`` carries data."""

    code = "error"

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness if witness is not None else {}


class UnknownIdentifier(StrataError):
    code = "unknown-identifier"


class ShapeMismatch(StrataError):
    code = "shape-mismatch"


class SizeCapExceeded(StrataError):
    code = "size-cap-exceeded"


class ConeIncoherent(StrataError):
    code = "cone-incoherent"


class NonMonotoneMap(StrataError):
    code = "non-monotone-map"


class NotUpClosed(StrataError):
    code = "V-not-up-closed"


class LevelMismatch(StrataError):
    code = "level-mismatch"


class IllTypedWord(StrataError):
    code = "ill-typed-word"


class EndpointMismatch(StrataError):
    code = "endpoint-mismatch"


class BundleIncoherent(StrataError):
    code = "bundle-incoherent"


class InvalidData(StrataError):
    """Raised when a value that must be valid fails its own validator."""

    code = "invalid"


class ParseError(StrataError):
    code = "parse-error"


class DanglingReference(StrataError):
    code = "dangling-reference"

"""Exception types shared across the package."""


class ClaraprintError(Exception):
    """Base class for all errors raised by this package."""


class DegenerateFingerprintError(ClaraprintError):
    """A fingerprint is too short to produce any shingle (fewer than 2 letters)."""


class DuplicateDocIdError(ClaraprintError):
    """Two documents with the same doc_id were handed to the index."""


class UnknownDocIdError(ClaraprintError):
    """A doc_id was requested that the index does not contain."""


class ParseError(ClaraprintError):
    """An input file (annotation or snapshot) is not valid JSON."""


class SchemaError(ClaraprintError):
    """An input file is valid JSON but violates the expected schema."""


class SnapshotVersionError(ClaraprintError):
    """A snapshot file was written by an incompatible format version."""


class ProtocolError(ClaraprintError):
    """An evaluation protocol precondition does not hold (e.g. clique too small)."""


class MissingSourceError(ClaraprintError):
    """A recording lacks a fingerprint for a source required by a combination."""

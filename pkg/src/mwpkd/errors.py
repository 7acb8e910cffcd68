"""Exception hierarchy shared by every subpackage.

All library errors derive from MwpkdError so callers (and the CLI exit-code
mapper) can distinguish usage, data, and numerical failures.
"""


class MwpkdError(Exception):
    """Base class for all library errors."""


# -- usage / configuration ------------------------------------------------

class ParamError(MwpkdError):
    """An argument value is out of its documented range."""


class ConfigError(MwpkdError):
    """A configuration object violates its invariants."""


class UnsupportedError(MwpkdError):
    """The requested operation is not defined for this object."""


# -- data / validation ----------------------------------------------------

class SchemaError(MwpkdError):
    """A record is missing a field, has an extra field, or a wrong type."""


class ValidationError(MwpkdError):
    """A structurally well-formed record violates a semantic invariant."""


class FormatError(MwpkdError):
    """A binary file is malformed; the message carries the byte offset."""


class ShapeError(MwpkdError):
    """Array shapes are not congruent with the operation's contract."""


class DimMismatchError(MwpkdError):
    """Embedding / compressor / model widths disagree."""


class LabelError(MwpkdError):
    """Required task labels are absent or malformed."""


class AlignmentError(MwpkdError):
    """Problem ids do not line up between two collections."""


class TokenRangeError(MwpkdError):
    """A token id is outside the model vocabulary."""


class LengthError(MwpkdError):
    """A sequence exceeds the model's maximum length."""


class IndexRangeError(MwpkdError, IndexError):
    """A positional index is out of bounds."""


class EmptyQuantityError(MwpkdError):
    """A problem exposes no quantity tokens where at least one is required."""


class NeighborError(MwpkdError):
    """A neighbor count is incompatible with the sample count."""


class GraphError(MwpkdError):
    """A neighbor graph is disconnected; the message reports components."""


class ZeroVectorError(MwpkdError):
    """Cosine similarity requested on an all-zero row."""


class DecodeError(MwpkdError):
    """Tree decoding found no valid candidate to emit."""


class IoError(MwpkdError):
    """A file could not be written or read back."""


# -- numerics --------------------------------------------------------------

class NumericalError(MwpkdError):
    """An eigensolver or optimizer failed to converge."""


class NonFiniteError(MwpkdError):
    """NaN or Inf appeared in a tensor; the message names it."""


class DivZeroError(MwpkdError):
    """Expression evaluation divided by a (near-)zero denominator."""


class DomainError(MwpkdError):
    """Expression evaluation left the real domain (e.g. 0 ** negative)."""

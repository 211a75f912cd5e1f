"""Exception hierarchy shared by the library and the command line."""


class LoewnerMorphError(Exception):
    """Base class for errors raised by loewner_morph."""


class DomainError(LoewnerMorphError, ValueError):
    """A numeric argument lies outside the domain of an operation.

    Examples are the logarithm of a matrix that is not positive definite or a
    matrix power of an indefinite matrix.
    """


class ImageFormatError(LoewnerMorphError, OSError):
    """An image file is malformed, truncated or in an unsupported format."""

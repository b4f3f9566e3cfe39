"""Common exception base for the package.

Every domain error raised by cvmkit derives from :class:`CvmError` so callers
(and the command-line layer) can catch one type and translate it into a
diagnostic plus a nonzero exit status.
"""


class CvmError(Exception):
    """Base class for all cvmkit domain errors."""

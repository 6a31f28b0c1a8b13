"""Exception hierarchy."""


class GCGeomError(Exception):
    """Base class for all library errors."""


class InputError(GCGeomError, ValueError):
    """Malformed user input (syntax, out-of-range indices, wrong degree)."""


class ValidationError(GCGeomError, ValueError):
    """A mathematical precondition failed (d^2 != 0, non-isotropic frame, ...)."""


class UnsupportedError(GCGeomError):
    """The requested computation is not available on this backend."""

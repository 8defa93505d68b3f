"""Exception types raised by webhol."""


class WebholError(Exception):
    """Base class for all library errors."""


class ArityError(WebholError, ValueError):
    """Type vectors or tuples with incompatible or undefined arity."""


class CapExceeded(WebholError):
    """An enumeration would exceed a configured size cap."""


class NotASubgroup(WebholError, ValueError):
    pass


class NotNormal(WebholError, ValueError):
    pass


class NotPerfect(WebholError, ValueError):
    """The group does not equal its commutator subgroup."""


class NotRich(WebholError, ValueError):
    pass


class NotInCommutatorSubgroup(WebholError, ValueError):
    pass


class WebError(WebholError, ValueError):
    """Malformed web encoding or unmet analysis precondition."""

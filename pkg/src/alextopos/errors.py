"""Exception hierarchy shared by all modules."""


class AlexToposError(Exception):
    pass


class UsageError(AlexToposError, ValueError):
    """Bad input: mismatched groups, malformed words, non-members."""


class WindowError(AlexToposError):
    """A computation left the finite window it was given.

    Raised instead of silently truncating. The usual fix is a larger radius
    or margin.
    """


class ResourceError(AlexToposError):
    """An enumeration would exceed the configured element cap."""


class ConfigurationError(AlexToposError):
    """An M-set or spec file cannot express a required action."""


class NotAnArrow(UsageError):
    pass


class WindowWarning(UserWarning):
    pass

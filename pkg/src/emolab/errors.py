"""Exception hierarchy.

Everything raised on bad data derives from :class:`EmoLabError` so callers
(the CLI in particular) can separate data errors from programming errors.
"""


class EmoLabError(Exception):
    """Base class for all data/config errors raised by the package."""


class ConfigError(EmoLabError, ValueError):
    pass


class MissingPlacement(EmoLabError, KeyError):
    """A non-neutral label has no position on the wheel."""

    def __str__(self):
        return Exception.__str__(self)


class NeutralAngleQuery(EmoLabError, ValueError):
    """An angle was requested for the neutral label, which sits off-wheel."""


class LabelNotInSet(EmoLabError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class UnknownGoldLabel(LabelNotInSet):
    pass


class InvalidSchedule(ConfigError):
    pass


class NonFiniteLoss(EmoLabError, FloatingPointError):
    pass


class EmptyMatrix(EmoLabError, ValueError):
    pass


class UnknownRun(EmoLabError, KeyError):
    def __str__(self):
        return Exception.__str__(self)

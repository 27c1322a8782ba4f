"""Error types shared by all OrderForge services."""


class OrderForgeError(Exception):
    """Base class for errors raised by OrderForge."""

    pass


class InvalidInputError(OrderForgeError):
    """
    Input data is malformed or references unknown objects.

    `location` is the key path of the offending entry inside the input
    document, when the validator knows it.
    """

    def __init__(self, message: str, location: tuple = ()):
        super().__init__(message)
        self.location = tuple(location)


class PreconditionError(OrderForgeError):
    """An operation was called outside the inputs it is defined for."""

    pass


class SizeLimitError(OrderForgeError):
    """A brute-force operation was asked to exceed its configured bound."""

    pass


class UnsupportedInputError(OrderForgeError):
    """Input lies outside the families an operation knows how to handle."""

    pass


class DegenerateParameterError(OrderForgeError):
    """A parameter sits where the construction degenerates (e.g. xi = 1)."""

    pass


class DegenerateInputError(OrderForgeError):
    """Input data is degenerate (e.g. an identically vanishing polynomial)."""

    pass

"""Exception hierarchy shared by every stage of the engine."""

from __future__ import annotations


class WLError(Exception):
    """Base class for all engine errors."""


class ParseError(WLError):
    def __init__(self, line: int, column: int, message: str, expected: frozenset[str] = frozenset()):
        self.line = line
        self.column = column
        self.message = message
        self.expected = frozenset(expected)
        text = f"{line}:{column}: {message}"
        if self.expected:
            text += " (expected " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(text)

    @property
    def position(self) -> tuple[int, int]:
        return (self.line, self.column)


class BoundExceeded(WLError):
    """A subject is too wide for exhaustive enumeration."""


class MalformedLhs(WLError):
    pass


class BudgetExhausted(WLError):
    """The rewrite budget ran out; the program probably does not terminate."""


class MalformedDo(WLError):
    pass


class UnknownMonad(MalformedDo):
    pass


class DuplicateMonad(WLError):
    pass


class MonadTypeError(WLError):
    SITES = ("return", "bind-input", "bind-output", "do-final")

    def __init__(self, monad: str, value: str, expected: str, site: str):
        if site not in self.SITES:
            raise ValueError(f"unknown site {site!r}")
        self.monad = monad
        self.value = value
        self.expected = expected
        self.site = site
        super().__init__(f"{site}: value {value} does not match pattern[{monad}] = {expected}")


class NoSuchPole(WLError):
    pass

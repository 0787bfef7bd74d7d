"""Exception types raised by the tokenizer pipeline."""


class TrajTokError(Exception):
    """Base class for all library errors."""


class LengthMismatch(TrajTokError, ValueError):
    pass


class NonFinite(TrajTokError, ValueError):
    pass


class AlreadyAugmented(TrajTokError, ValueError):
    pass


class DegenerateGrid(TrajTokError, ValueError):
    pass


class EmptyDataset(TrajTokError, ValueError):
    pass


class BadThresholds(TrajTokError, ValueError):
    pass


class EmptyCell(TrajTokError, ValueError):
    pass


class EmptyVocabulary(TrajTokError, ValueError):
    pass


class AgentTypeMismatch(TrajTokError, ValueError):
    pass


class IndexOutOfRange(TrajTokError, IndexError):
    pass


class BadEpsilon(TrajTokError, ValueError):
    pass


class BadIndex(TrajTokError, IndexError):
    pass


class ParseError(TrajTokError, ValueError):
    """Malformed record in a text file; ``line`` is 1-based."""

    def __init__(self, message: str, line: int | None = None, path: str | None = None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"{line}: "
        elif where:
            where += " "
        super().__init__(f"{where}{message}")


class DegenerateEndpointWarning(UserWarning):
    """Interpolation target too close to the origin to define a curve."""


class NotAugmentedWarning(UserWarning):
    """Occupancy built from a dataset that was never flip-augmented."""

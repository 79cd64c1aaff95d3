"""Exception types shared across the toolkit."""


class KairosisError(Exception):
    """Base class for every library-specific error."""


class EmptyStream(KairosisError):
    """A forecast stream was constructed from zero forecasts."""


class ParseError(KairosisError):
    """A row of an input file failed strict parsing."""

    def __init__(self, line, reason):
        self.line = line
        self.reason = reason
        where = f"line {line}: " if line is not None else ""
        Exception.__init__(self, f"{where}{reason}")


class ProbabilityOutOfRange(ParseError):
    """A probability lies outside the closed unit interval."""

    def __init__(self, value, line=None):
        self.value = value
        super().__init__(line, f"probability {value!r} not in [0, 1]")


class TimestampOutOfWindow(KairosisError):
    """A forecast timestamp falls outside the question window."""

    def __init__(self, value, open_time=None, close_time=None):
        self.value = value
        super().__init__(
            f"timestamp {value} outside window [{open_time}, {close_time}]"
        )


class NonPositiveAlpha(KairosisError):
    """A Dirichlet pseudo-count is zero or negative."""


class EmptyCounts(KairosisError):
    """Bin counts sum to zero where a non-empty tally is required."""


class LengthMismatch(KairosisError):
    """Paired vectors have different lengths."""


class UnnormalizedWeights(KairosisError):
    """Aggregation weights do not sum to one."""


class NoForecastsYet(KairosisError):
    """No forecasts exist at or before the requested cutoff."""


class EmptyWindow(KairosisError):
    """A question window has non-positive calendar length."""


class DegenerateBenchmark(KairosisError):
    """The benchmark forecast already attains the optimal score."""


class UnresolvedQuestion(KairosisError):
    """Scoring was requested for a question without a binary resolution."""


class InvalidSpec(KairosisError):
    """A synthetic stream specification is malformed."""


class MissingHeader(KairosisError):
    """An input CSV lacks the required header columns."""


class DuplicateQuestionId(KairosisError):
    """The same question id appears twice in a question table."""

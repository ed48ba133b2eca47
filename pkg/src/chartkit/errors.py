"""Exception types shared across the package."""


class ChartKitError(Exception):
    """Base class for every package-specific error."""


class RaggedInput(ChartKitError):
    """Input rows do not all have the same number of cells."""


class EmptyTable(ChartKitError):
    """No data rows survived parsing or filtering."""


class NoNumericColumn(ChartKitError):
    pass


class NoCategoricalColumn(ChartKitError):
    pass


class CanvasTooSmall(ChartKitError):
    """The canvas leaves less than the minimum usable plot area."""


class MalformedSvg(ChartKitError):
    pass


class NoMarksFound(ChartKitError):
    """No element in the document matched a mark selector."""


class InsufficientTicks(ChartKitError):
    """Fewer than two axis ticks carry numeric labels."""


class NonLinearAxis(ChartKitError):
    """Tick labels cannot be explained by a linear pixel-to-value map."""


class ScaleRequired(ChartKitError):
    """Marks carry no value labels and no axis scale is available."""


class UnsupportedChartType(ChartKitError):
    pass


class MissingSummary(ChartKitError):
    """One or more chart ids have no usable summary text."""

    def __init__(self, ids):
        self.ids = sorted(ids)
        super().__init__("no summary for: " + ", ".join(self.ids))


class AnswerNotInSummary(ChartKitError):
    """Answer sentences that are not substrings of their chart's summary."""

    def __init__(self, pairs):
        self.pairs = list(pairs)
        ids = ", ".join(p[0] for p in self.pairs)
        super().__init__(f"answer not found in summary for: {ids}")


class BackendTimeout(ChartKitError):
    pass


class RateLimited(ChartKitError):
    pass


class ParseFailure(ChartKitError):
    pass


class LengthMismatch(ChartKitError):
    pass


class InvalidConfig(ChartKitError):
    pass

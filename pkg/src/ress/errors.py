"""Exception hierarchy. Each class carries the CLI exit code it maps to."""


class RessError(Exception):
    exit_code = 1


class ParameterError(RessError, ValueError):
    """Invalid argument value (alpha outside (0, 1), negative counts, ...)."""

    exit_code = 1


class ConfigError(ParameterError):
    """Invalid simulation config; ``field`` holds the dotted path of the offender."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")


class DataError(RessError, ValueError):
    exit_code = 2


class ShapeError(DataError):
    pass


class ParseError(DataError):
    """Malformed input file. ``row``/``column`` are 1-based file coordinates."""

    def __init__(self, message, row=None, column=None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class DegenerateSampleError(RessError, ValueError):
    exit_code = 3


class TooFewObservationsError(DegenerateSampleError):
    pass


class ZeroVarianceError(DegenerateSampleError):
    def __init__(self, columns, message=None):
        self.columns = [int(c) for c in columns]
        shown = ", ".join(str(c) for c in self.columns[:20])
        if len(self.columns) > 20:
            shown += f", ... ({len(self.columns)} total)"
        super().__init__(message or f"zero sample variance in column(s) {shown}")


class OddSampleWarning(UserWarning):
    """An odd number of observations forced one row out of the split."""

class UnsupportedSize(ValueError):
    """An input exceeds the size bound of an exhaustive or brute-force routine."""


class AdditionTheoremViolation(RuntimeError):
    """A composition-table cell received two different amalgam types.

    This can only mean a bug in the type machinery; it is never caught.
    """

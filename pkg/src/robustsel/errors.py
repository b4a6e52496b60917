"""Exception types shared across the package."""


class InstanceFormatError(ValueError):
    """An instance document failed validation; the message names the field."""

    def __init__(self, field, message):
        self.field = field
        super().__init__(f"instance field '{field}': {message}")


class CapExceededError(RuntimeError):
    """An exact computation would exceed its enumeration cap."""


class SolverError(RuntimeError):
    """A numerical solve failed to meet its contract."""

class InputError(ValueError):
    """Raised for malformed or inconsistent input data.

    The CLI maps this to exit code 2.
    """


class RefusalError(InputError):
    """Raised when a construction's preconditions fail validation."""

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report

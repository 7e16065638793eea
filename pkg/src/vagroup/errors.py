"""Exception types shared across the package."""


class DomainError(Exception):
    """A well-formed request that has no answer (bad element, unmet precondition)."""


class ResourceLimitError(Exception):
    """A configured budget (pieces, steps, ball size) was exceeded."""


class ParseError(DomainError):
    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column

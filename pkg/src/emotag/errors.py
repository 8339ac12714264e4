"""Exception hierarchy shared across the package.

Every error carries a machine-readable ``category`` that the CLI prints as
``error:<category>: <message>`` so scripts can branch on failures without
parsing prose.
"""


class EmotagError(Exception):
    category = "error"


class InvalidConfig(EmotagError):
    """A precondition on parameters or configuration was violated."""

    category = "invalid_config"


class FormatError(EmotagError):
    """An input file does not conform to its documented layout."""

    category = "format"

    def __init__(self, message, path=None, line=None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line

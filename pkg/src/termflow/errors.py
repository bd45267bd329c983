"""Shared error base: every domain error carries a stable machine code."""


class TermflowError(Exception):
    """Base class for all domain errors raised by this package."""

    @property
    def code(self) -> str:
        """Machine-readable code such as ``corpus.DuplicateId``."""
        module = type(self).__module__.rsplit(".", 1)[-1]
        return f"{module}.{type(self).__name__}"

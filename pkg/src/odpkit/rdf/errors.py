"""Errors raised while reading RDF documents."""
from __future__ import annotations


class RdfError(Exception):
    """Base class for all RDF reading/writing failures."""


class ParseError(RdfError):
    """Syntax error in an RDF document, carrying a 1-based line/column."""

    def __init__(self, message: str, line: int, column: int) -> None:
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UndefinedPrefixError(ParseError):
    """A prefixed name used a prefix that was never declared."""


class InvalidIriError(RdfError):
    """An IRI is relative or contains characters an IRI may not contain."""


class EncodingError(RdfError):
    """Input bytes are not valid UTF-8."""

"""Command-line front end: the ``.sb`` input language, JSON reports and the
subcommand driver."""

from .dsl import DSLError, Document, Settings, parse, parse_vector, print_document
from .main import COMMANDS, main

__all__ = ["DSLError", "Document", "Settings", "parse", "parse_vector", "print_document", "COMMANDS", "main"]

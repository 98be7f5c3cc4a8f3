"""Bibliographic networks from field-tagged records."""

__version__ = "0.1.0"

"""Command modules for the hgsa CLI."""

from . import analyze, search_tesa, tables, verify

__all__ = ["analyze", "verify", "tables", "search_tesa"]

"""HTTP service wrapping the search, verification, oracle, and analysis APIs."""

from .app import app, create_app

__all__ = ["app", "create_app"]

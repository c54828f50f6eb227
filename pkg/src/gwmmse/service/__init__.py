"""HTTP service exposing the testbed: codes, delay tables, sweeps, gains."""

from .app import app

__all__ = ["app"]

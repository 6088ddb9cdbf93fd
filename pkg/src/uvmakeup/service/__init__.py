"""HTTP service: a FastAPI facade over the transfer pipeline plus a
persisted style library with upload-time precomputation."""

from .app import create_app
from .library import StyleLibrary

__all__ = ["StyleLibrary", "create_app"]

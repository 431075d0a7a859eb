"""FastAPI service wrapping the archive, encoder, and retrieval stack."""

from .app import ServiceState, create_app

__all__ = ["ServiceState", "create_app"]

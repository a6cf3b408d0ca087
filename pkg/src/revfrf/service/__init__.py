"""FastAPI service exposing the federation over HTTP."""

from revfrf.service.app import create_app

__all__ = ["create_app"]

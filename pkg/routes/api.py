"""
Central API route registration. All HTTP controllers are mounted here with /api prefix.
"""
import logging
from fastapi import FastAPI

from app.http.controllers import hulls, lusky, sequences

logger = logging.getLogger(__name__)


def register_routes(app: FastAPI, settings) -> None:
    """Register all API routers. Call from main.py after creating the FastAPI app."""
    app.include_router(sequences.router, prefix=f"{settings.API_PREFIX}/sequences", tags=["sequences"])
    app.include_router(lusky.router, prefix=f"{settings.API_PREFIX}/lusky", tags=["lusky"])
    app.include_router(hulls.router, prefix=f"{settings.API_PREFIX}/hulls", tags=["hulls"])
    logger.info("Registered routes under %s", settings.API_PREFIX)

# Mounts the sequence, Lusky and hull routers under settings.API_PREFIX.
from routes.api import register_routes

__all__ = ["register_routes"]

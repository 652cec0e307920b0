# HTTP Controllers (request handlers). Re-export routers for route registration.
from app.http.controllers import hulls, lusky, sequences

__all__ = ["hulls", "lusky", "sequences"]

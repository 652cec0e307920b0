"""
Application configuration: numeric tolerances, horizon caps and verdict thresholds.
"""
import os
from dotenv import load_dotenv

load_dotenv()


class Settings:
    """Application settings read from the environment"""

    # Environment detection
    ENV = os.getenv("ENV", "DEV").upper()
    IS_PRODUCTION = ENV == "PROD" or ENV == "PRODUCTION"
    IS_DEVELOPMENT = not IS_PRODUCTION

    # Server configuration (HTTP surface only)
    HOST = os.getenv("HOST", "127.0.0.1")
    PORT = int(os.getenv("PORT", 8000))

    # Horizons
    MAX_HORIZON = int(os.getenv("MAX_HORIZON", 2_000_000))

    # Tolerances: EXACT_TOL between two exact log-domain paths, GRID_TOL for sampled weights
    EXACT_TOL = float(os.getenv("EXACT_TOL", "1e-9"))
    GRID_TOL = float(os.getenv("GRID_TOL", "1e-6"))
    GOLDEN_TOL = float(os.getenv("GOLDEN_TOL", "1e-10"))

    # Lusky-number search
    GAP_MAX = int(os.getenv("GAP_MAX", 64))

    # Finite-horizon verdicts
    TAIL_FRACTION = float(os.getenv("TAIL_FRACTION", "0.5"))
    BOUNDED_SLACK = float(os.getenv("BOUNDED_SLACK", "0.01"))  # nats of last-decile growth
    TAIL_SLOPE_THRESHOLD = float(os.getenv("TAIL_SLOPE_THRESHOLD", "0.01"))  # nats per block
    INCONCLUSIVE_BAND = float(os.getenv("INCONCLUSIVE_BAND", "0.1"))

    # Above this λ, μ - 1 is taken as μ (exp overflows near 709)
    OVERFLOW_LOG = float(os.getenv("OVERFLOW_LOG", "700"))

    # Logging
    LOG_LEVEL = os.getenv("LOG_LEVEL", "INFO").upper()

    # API Configuration
    API_PREFIX = "/api"

    def __str__(self):
        return (
            f"Settings(ENV={self.ENV}, MAX_HORIZON={self.MAX_HORIZON}, "
            f"EXACT_TOL={self.EXACT_TOL}, GRID_TOL={self.GRID_TOL}, GAP_MAX={self.GAP_MAX})"
        )


# Global settings instance
settings = Settings()

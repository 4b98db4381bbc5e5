# /strongconverse/__init__.py
# Inicializa el paquete: configuración desde el entorno y logging.

import logging
import os

from dotenv import load_dotenv

__version__ = "1.0.0"

# Cargar variables de entorno desde el archivo .env
load_dotenv()

# --- Configuración de cómputo ---
THREADS = max(1, int(os.getenv("STRONGCONVERSE_THREADS", "1")))
EIGH_METHOD = os.getenv("STRONGCONVERSE_EIGH", "lapack").lower()
DEFAULT_SEED = int(os.getenv("STRONGCONVERSE_SEED", "42"))
DEFAULT_BUDGET = int(os.getenv("STRONGCONVERSE_BUDGET", "20"))

# --- Logging ---
LOG_LEVEL = os.getenv("STRONGCONVERSE_LOG_LEVEL", "WARNING").upper()


def setup_logging(level=None):
    """Configura el logger raíz del paquete una sola vez."""
    logger = logging.getLogger(__name__)
    if not logger.handlers:
        handler = logging.StreamHandler()
        handler.setFormatter(logging.Formatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
        logger.addHandler(handler)
    logger.setLevel(level or LOG_LEVEL)
    return logger


setup_logging()

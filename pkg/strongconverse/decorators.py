# /strongconverse/decorators.py
# Registro de suites de verificación.

import logging
import time
from functools import wraps

logger = logging.getLogger(__name__)

SUITES = {}


def suite(name, cases):
    """Registra una suite con su número de casos por defecto.

    La función decorada recibe (seed, budget, cases) y devuelve un dict con
    "cases" y "failures"; el envoltorio acota cases y registra el tiempo.
    """
    def register(f):
        @wraps(f)
        def decorated_function(seed, budget, n_cases=None):
            n = cases if n_cases is None else max(1, min(int(n_cases), cases))
            start = time.perf_counter()
            result = f(seed, budget, n)
            result.setdefault("suite", name)
            logger.info(
                "[suite] %s: %d casos, %d fallos (%.1f s)",
                name, result["cases"], len(result["failures"]), time.perf_counter() - start,
            )
            return result

        decorated_function.default_cases = cases
        SUITES[name] = decorated_function
        return decorated_function
    return register

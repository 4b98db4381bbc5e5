# /strongconverse/errors.py
# Jerarquía de errores del paquete. Los errores de validación también son ValueError.


class StrongConverseError(Exception):
    """Error base de todas las operaciones del paquete."""


class NonSquare(StrongConverseError, ValueError):
    pass


class NonHermitian(StrongConverseError, ValueError):
    pass


class NegativeEigenvalue(StrongConverseError, ValueError):
    pass


class InvalidOrder(StrongConverseError, ValueError):
    """Orden α fuera del rango permitido por la operación."""


class DimensionMismatch(StrongConverseError, ValueError):
    pass


class InvalidParameter(StrongConverseError, ValueError):
    pass


class InvalidProbability(StrongConverseError, ValueError):
    pass


class StateInvalid(StrongConverseError, ValueError):
    """El operador no es un estado (traza o positividad fuera de tolerancia)."""


class NotCPTP(StrongConverseError, ValueError):
    """El mapa no es completamente positivo y preservador de traza."""


class NotSeparableInput(StrongConverseError, ValueError):
    pass


class NotEntanglementBreaking(StrongConverseError):
    """El canal no rompe entrelazamiento y el protocolo no declara entradas separables."""


class DimensionCap(StrongConverseError, ValueError):
    pass


class BudgetExhausted(StrongConverseError):
    """El optimizador agotó su presupuesto sin converger."""

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class IoError(StrongConverseError, OSError):
    pass


class SingularGramFallback(UserWarning):
    """La matriz de Gram de la PGM es singular; se completa el POVM uniformemente."""

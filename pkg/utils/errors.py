"""
Excepciones del motor de invariantes.

Todas heredan de InvariantEngineError para que la CLI pueda atraparlas en un
solo lugar y devolver el código de salida 2.
"""


class InvariantEngineError(Exception):
    """Error base del motor"""


class InvalidSize(InvariantEngineError, ValueError):
    """Tamaño de matriz M fuera del rango admitido"""


class RangeError(InvariantEngineError, ValueError):
    """Índice mu / rho fuera de rango"""


class ShapeMismatch(InvariantEngineError, ValueError):
    """Matrices de forma incompatible"""


class UniverseMismatch(InvariantEngineError, ValueError):
    """Operandos que viven en universos de variables distintos"""


class DenominatorVanishes(InvariantEngineError, ZeroDivisionError):
    """Un denominador o argumento de logaritmo se anula en el punto evaluado"""


class NonRationalValue(InvariantEngineError):
    """El valor exacto no es racional (logaritmo o exponente fraccionario)"""


class ExpressionSyntaxError(InvariantEngineError, ValueError):
    def __init__(self, message, position=None, text=None):
        self.position = position
        self.text = text
        if position is not None:
            message = f"{message} (posición {position})"
        super().__init__(message)


class AlgebraFormatError(InvariantEngineError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (línea {line}, columna {column})"
        super().__init__(message)


class CanonicalFormViolation(InvariantEngineError):
    """
    La especificación de matrices características no está en forma canónica.

    Args:
        constraint: nombre corto de la restricción que falla
        indices: índices involucrados (alfa, filas, columnas)
    """

    def __init__(self, constraint, message, indices=None):
        self.constraint = constraint
        self.indices = indices
        detail = f"{constraint}: {message}"
        if indices is not None:
            detail += f" {indices}"
        super().__init__(detail)


class NilindependenceViolation(CanonicalFormViolation):
    def __init__(self, message, indices=None):
        super().__init__("nilindependence", message, indices)


class JacobiViolation(InvariantEngineError):
    def __init__(self, triple, residual):
        self.triple = triple
        self.residual = residual
        super().__init__(f"la identidad de Jacobi falla en {triple}: {residual}")


class ConditionViolated(InvariantEngineError):
    def __init__(self, condition, message):
        self.condition = condition
        super().__init__(f"{condition}: {message}")


class DegenerateExponent(InvariantEngineError):
    def __init__(self, mu, message):
        self.mu = mu
        super().__init__(f"mu={mu}: {message}")


class ResidualNDerivative(InvariantEngineError):
    """Ẑ_mu conserva derivadas respecto a variables n; el residuo se guarda tal cual"""

    def __init__(self, mu, residual):
        self.mu = mu
        self.residual = residual
        super().__init__(f"Z^_{mu} conserva derivadas en n: {residual.to_text()}")


class OddRankError(InvariantEngineError):
    def __init__(self, rank, trial):
        self.rank = rank
        self.trial = trial
        super().__init__(f"rango impar {rank} en el ensayo {trial} de una matriz antisimétrica")


class SamplingExhausted(InvariantEngineError):
    def __init__(self, attempts, reason="anularon un denominador"):
        self.attempts = attempts
        super().__init__(f"{attempts} sorteos consecutivos {reason}")

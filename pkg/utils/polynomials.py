"""
Núcleo polinomial exacto: universo de variables n_ik, x^a, polinomios
dispersos con coeficientes racionales y determinantes.

Los polinomios son elementos de un PolyRing de sympy sobre QQ con orden
grlex. Son diccionarios mutables por herencia, así que en todo el paquete se
tratan como inmutables: nunca se modifican en sitio.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from sympy import QQ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.orderings import grlex
from sympy.polys.rings import PolyElement, PolyRing

from utils.errors import InvalidSize, RangeError, ShapeMismatch, UniverseMismatch

logger = logging.getLogger(__name__)

# Límite para la expansión por cofactores; por encima se usa Bareiss
COFACTOR_LIMIT = 4


@dataclass(frozen=True, order=True)
class VarId:
    """Variable del espacio dual: n_ik (kind='n') o x^a (kind='x', i=a)"""
    kind: str
    i: int
    k: int = 0

    @classmethod
    def n(cls, i, k):
        return cls('n', i, k)

    @classmethod
    def x(cls, alpha):
        return cls('x', alpha, 0)

    @property
    def name(self):
        if self.kind == 'n':
            return f"n_{self.i}_{self.k}"
        return f"x_{self.i}"

    @property
    def label(self):
        """Etiqueta del elemento de base asociado (N_i_k o X_a)"""
        if self.kind == 'n':
            return f"N_{self.i}_{self.k}"
        return f"X_{self.i}"


def n_pairs(M):
    """Pares (i, k) en el orden canónico: primero la superdiagonal, luego las siguientes"""
    return [(i, i + d) for d in range(1, M) for i in range(1, M - d + 1)]


class Universe:
    """
    Conjunto ordenado de variables para un par (M, f).

    El orden es n_{i,i+1} para i=1..M-1, luego n_{i,i+2}, ..., n_{1M}, y al
    final x_1..x_f. El índice canónico de cada variable coincide con el
    índice del generador en el anillo.
    """

    def __init__(self, M, f=0):
        if M < 2:
            raise InvalidSize(f"M debe ser al menos 2, se recibió {M}")
        if f < 0:
            raise InvalidSize(f"f no puede ser negativo, se recibió {f}")
        self.M = M
        self.f = f
        variables = [VarId.n(i, k) for i, k in n_pairs(M)]
        variables += [VarId.x(alpha) for alpha in range(1, f + 1)]
        self.variables = tuple(variables)
        self._index = {var: idx for idx, var in enumerate(self.variables)}
        self._by_name = {var.name: var for var in self.variables}
        self.ring = PolyRing([var.name for var in self.variables], QQ, grlex)
        self.field = self.ring.to_field()
        self.domain = self.ring.to_domain()

    def __repr__(self):
        return f"Universe(M={self.M}, f={self.f})"

    def __eq__(self, other):
        return isinstance(other, Universe) and (self.M, self.f) == (other.M, other.f)

    def __hash__(self):
        return hash(('Universe', self.M, self.f))

    @property
    def r(self):
        """Número de variables n_ik"""
        return self.M * (self.M - 1) // 2

    @property
    def size(self):
        return len(self.variables)

    def index(self, var):
        try:
            return self._index[var]
        except KeyError:
            raise RangeError(f"{var.name} no pertenece a {self!r}") from None

    def contains(self, var):
        return var in self._index

    def var_by_name(self, name):
        try:
            return self._by_name[name]
        except KeyError:
            raise RangeError(f"variable desconocida {name!r} en {self!r}") from None

    def index_of_n(self, i, k):
        return self.index(VarId.n(i, k))

    def gen(self, var):
        return self.ring.gens[self.index(var)]

    def n(self, i, k):
        return self.gen(VarId.n(i, k))

    def x(self, alpha):
        return self.gen(VarId.x(alpha))

    def constant(self, value):
        return self.ring.ground_new(to_qq(value))

    def embed(self, p):
        """Lleva un polinomio de otro universo con el mismo M a este"""
        if p.ring == self.ring:
            return p
        missing = set(p.ring.symbols) - set(self.ring.symbols)
        used = {p.ring.symbols[idx] for monom in p.keys() for idx, e in enumerate(monom) if e}
        if missing & used:
            raise UniverseMismatch(f"no se puede llevar {p} a {self!r}")
        return p.set_ring(self.ring)

    def embed_rational(self, value):
        if value.field == self.field:
            return value
        return self.field.new(self.embed(value.numer), self.embed(value.denom))


@lru_cache(maxsize=None)
def universe(M, f=0):
    """Universo compartido para (M, f); los anillos de sympy también se cachean"""
    return Universe(M, f)


def to_qq(value):
    """Convierte int, Fraction, str 'p/q' o un racional de sympy a QQ"""
    if QQ.of_type(value):
        return value
    if isinstance(value, bool):
        raise TypeError("no se admite bool como coeficiente")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, str):
        value = Fraction(value.strip())
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if hasattr(value, 'numerator') and hasattr(value, 'denominator'):
        return QQ(int(value.numerator), int(value.denominator))
    raise TypeError(f"no se puede convertir {value!r} a racional exacto")


def to_fraction(value):
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value.strip())
    return Fraction(int(value.numerator), int(value.denominator))


def format_rational(value):
    value = to_fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _check_same_ring(*polys):
    rings = {p.ring for p in polys}
    if len(rings) > 1:
        raise UniverseMismatch("los polinomios pertenecen a universos distintos")


def poly_arith(a, b, op):
    """Suma, resta o producto exacto de dos polinomios del mismo universo"""
    _check_same_ring(a, b)
    if op == 'add':
        return a + b
    if op == 'sub':
        return a - b
    if op == 'mul':
        return a * b
    raise ValueError(f"operación desconocida {op!r}")


def total_degree(p):
    if not p:
        return -1
    return max(sum(monom) for monom in p.keys())


def is_homogeneous(p, degree):
    return all(sum(monom) == degree for monom in p.keys())


def poly_to_text(p):
    """
    Forma canónica de texto: términos en orden grlex, variables n_i_k y x_a,
    coeficientes p/q. El coeficiente 1 se omite delante de un monomio.
    """
    if not p:
        return "0"
    names = [str(symbol) for symbol in p.ring.symbols]
    pieces = []
    for monom, coeff in p.terms(grlex):
        factors = []
        for idx, exponent in enumerate(monom):
            if exponent == 1:
                factors.append(names[idx])
            elif exponent > 1:
                factors.append(f"{names[idx]}^{exponent}")
        negative = coeff < 0
        magnitude = -coeff if negative else coeff
        if not factors:
            body = format_rational(magnitude)
        elif magnitude == 1:
            body = "*".join(factors)
        else:
            body = format_rational(magnitude) + "*" + "*".join(factors)
        if not pieces:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def point_values(ring, point):
    """
    Traduce un punto {VarId|nombre: racional} a la lista de valores QQ por
    índice de generador. Todas las variables del anillo deben tener valor.
    """
    names = [str(symbol) for symbol in ring.symbols]
    positions = {name: idx for idx, name in enumerate(names)}
    values = [None] * len(names)
    for key, value in point.items():
        name = key if isinstance(key, str) else key.name
        if name not in positions:
            raise UniverseMismatch(f"la variable {name} no pertenece al universo")
        values[positions[name]] = to_qq(value)
    missing = [names[idx] for idx, value in enumerate(values) if value is None]
    if missing:
        raise UniverseMismatch(f"faltan valores para {', '.join(missing)}")
    return values


def eval_poly(p, values):
    """Evalúa p en la lista de valores QQ (uno por generador) de forma exacta"""
    total = QQ.zero
    for monom, coeff in p.items():
        term = coeff
        for idx, exponent in enumerate(monom):
            if exponent:
                term *= values[idx] ** exponent
        total += term
    return total


def _as_ring_element(entry, ring):
    if isinstance(entry, PolyElement):
        if entry.ring != ring:
            raise UniverseMismatch("entradas de la matriz en universos distintos")
        return entry
    return ring.ground_new(to_qq(entry))


def _square_rows(matrix, ring=None):
    rows = [list(row) for row in matrix]
    size = len(rows)
    if any(len(row) != size for row in rows):
        raise ShapeMismatch(f"la matriz no es cuadrada: {[len(row) for row in rows]}")
    if ring is None:
        ring = next((entry.ring for row in rows for entry in row if isinstance(entry, PolyElement)), None)
        if ring is None:
            raise ShapeMismatch("no se puede inferir el universo de una matriz sin polinomios")
    return [[_as_ring_element(entry, ring) for entry in row] for row in rows], ring


def cofactor_determinant(matrix, ring=None):
    """Determinante por expansión de Laplace a lo largo de la primera fila"""
    rows, ring = _square_rows(matrix, ring)
    return _laplace(rows, ring)


def _laplace(rows, ring):
    size = len(rows)
    if size == 0:
        return ring.one
    if size == 1:
        return rows[0][0]
    if size == 2:
        return rows[0][0] * rows[1][1] - rows[0][1] * rows[1][0]
    total = ring.zero
    for col, entry in enumerate(rows[0]):
        if not entry:
            continue
        minor = [row[:col] + row[col + 1:] for row in rows[1:]]
        term = entry * _laplace(minor, ring)
        total = total + term if col % 2 == 0 else total - term
    return total


def determinant(matrix, ring=None):
    """
    Determinante exacto de una matriz cuadrada de polinomios.

    Para tamaño <= 4 se expande por cofactores; por encima se usa la
    eliminación de Bareiss (libre de fracciones) de DomainMatrix sobre el
    anillo de polinomios.
    """
    rows, ring = _square_rows(matrix, ring)
    if len(rows) <= COFACTOR_LIMIT:
        return _laplace(rows, ring)
    return _bareiss(rows, ring)


def bareiss_determinant(matrix, ring=None):
    """Determinante por eliminación de Bareiss, sea cual sea el tamaño"""
    rows, ring = _square_rows(matrix, ring)
    return _bareiss(rows, ring)


def _bareiss(rows, ring):
    size = len(rows)
    if size == 0:
        return ring.one
    dm = DomainMatrix(rows, (size, size), ring.to_domain()).to_dense()
    return dm.det()

"""
Expresiones de invariantes y campos vectoriales.

Una InvariantExpr es una suma finita de términos c * prod(p_i^e_i) * [ln q]
donde c es una función racional exacta. Los productos de potencias y los
logaritmos son símbolos formales: la prueba de nulidad se hace coeficiente
a coeficiente, suponiendo independencia multiplicativa de las bases.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction

from sympy import QQ
from sympy.polys.fields import FracElement
from sympy.polys.rings import PolyElement

from utils.errors import DenominatorVanishes, NonRationalValue, UniverseMismatch
from utils.polynomials import eval_poly, format_rational, point_values, poly_to_text, to_fraction, to_qq

logger = logging.getLogger(__name__)


def _text_key(p):
    return poly_to_text(p)


@dataclass(frozen=True)
class TermKey:
    """Parte trascendente de un término: producto de potencias y logaritmo opcional"""
    powers: tuple = ()
    log: PolyElement = None

    @property
    def is_unit(self):
        return not self.powers and self.log is None

    def sort_key(self):
        return (
            self.log is not None,
            len(self.powers),
            tuple((_text_key(p), e) for p, e in self.powers),
            _text_key(self.log) if self.log is not None else "",
        )

    def to_text(self):
        factors = [f"({poly_to_text(p)})^({format_rational(e)})" for p, e in self.powers]
        if self.log is not None:
            factors.append(f"ln({poly_to_text(self.log)})")
        return "*".join(factors)


UNIT_KEY = TermKey()


def normalize_powers(powers, field):
    """
    Normaliza una lista de (base, exponente) sobre el cuerpo field.

    Las bases iguales se combinan y toda potencia de exponente total entero
    pasa al coeficiente racional: solo quedan como símbolo las potencias de
    exponente no entero. Devuelve (factor FracElement, tupla ordenada).

    Raises:
        ValueError: si alguna base es el polinomio cero
    """
    merged = {}
    for base, exponent in powers:
        exponent = to_fraction(exponent)
        if exponent == 0:
            continue
        if not base:
            raise ValueError("la base de una potencia no puede ser cero")
        merged[base] = merged.get(base, Fraction(0)) + exponent
    factor = field.one
    items = []
    for base, exponent in merged.items():
        if exponent.denominator != 1:
            items.append((base, exponent))
        elif exponent > 0:
            factor *= field.new(base ** exponent.numerator)
        elif exponent < 0:
            factor *= field.new(field.ring.one, base ** -exponent.numerator)
    items.sort(key=lambda item: _text_key(item[0]))
    return factor, tuple(items)


class InvariantExpr:
    """
    Expresión cerrada de un invariante sobre el cuerpo de funciones racionales
    de un universo. Inmutable; todas las operaciones devuelven objetos nuevos.
    """

    __slots__ = ('field', '_terms')

    def __init__(self, field, terms=None):
        self.field = field
        clean = {}
        for key, coeff in (terms or {}).items():
            coeff = self._coerce(coeff)
            if coeff:
                clean[key] = coeff
        self._terms = clean

    # -- construcción -------------------------------------------------------

    def _coerce(self, value):
        field = self.field
        if isinstance(value, FracElement):
            if value.field != field:
                raise UniverseMismatch("coeficiente en otro universo")
            return value
        if isinstance(value, PolyElement):
            if value.ring != field.ring:
                raise UniverseMismatch("coeficiente en otro universo")
            return field.new(value)
        return field.ground_new(to_qq(value))

    @classmethod
    def zero(cls, field):
        return cls(field)

    @classmethod
    def constant(cls, field, value):
        return cls(field, {UNIT_KEY: value})

    @classmethod
    def from_poly(cls, p):
        field = p.ring.to_field()
        return cls(field, {UNIT_KEY: field.new(p)})

    @classmethod
    def from_rational(cls, r):
        return cls(r.field, {UNIT_KEY: r})

    @classmethod
    def power_product(cls, factors, coeff=1, field=None):
        """coeff * prod(p^e) con exponentes racionales exactos"""
        factors = list(factors)
        if field is None:
            field = factors[0][0].ring.to_field()
        factor, powers = normalize_powers(factors, field)
        expr = cls(field)
        coeff = expr._coerce(coeff) * factor
        return cls(field, {TermKey(powers, None): coeff})

    @classmethod
    def log(cls, q, coeff=1):
        """coeff * ln(q) para un polinomio q no constante"""
        if not q or q.is_ground:
            raise ValueError("el argumento del logaritmo debe ser un polinomio no constante")
        field = q.ring.to_field()
        return cls(field, {TermKey((), q): coeff})

    @classmethod
    def build(cls, base, power_factors=(), log_terms=()):
        """
        Forma base * prod(p_i^e_i) + sum(r_j * ln q_j), la forma de los
        invariantes del catálogo.
        """
        field = base.field if isinstance(base, FracElement) else base.ring.to_field()
        if power_factors:
            expr = cls.power_product(power_factors, coeff=base, field=field)
        else:
            expr = cls(field, {UNIT_KEY: base})
        for r, q in log_terms:
            expr = expr + cls.log(q, coeff=r)
        return expr

    # -- vistas -------------------------------------------------------------

    @property
    def ring(self):
        return self.field.ring

    def terms(self):
        """Términos en orden determinista: racional, potencias, logaritmos"""
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key())

    def coefficient(self, key):
        return self._terms.get(key, self.field.zero)

    @property
    def is_rational(self):
        return all(key.is_unit for key in self._terms)

    @property
    def rational(self):
        if not self.is_rational:
            raise NonRationalValue("la expresión tiene partes trascendentes")
        return self.coefficient(UNIT_KEY)

    @property
    def is_polynomial(self):
        return self.is_rational and self.coefficient(UNIT_KEY).denom.is_ground

    def to_polynomial(self):
        if not self.is_polynomial:
            raise NonRationalValue("la expresión no es un polinomio")
        return polynomial_part(self.coefficient(UNIT_KEY))

    @property
    def base(self):
        """Coeficiente del único producto de potencias (o la parte racional)"""
        keys = [key for key in self._terms if key.log is None]
        if len(keys) > 1:
            raise ValueError("la expresión tiene varios productos de potencias distintos")
        return self._terms[keys[0]] if keys else self.field.zero

    @property
    def power_factors(self):
        keys = [key for key in self._terms if key.log is None]
        if len(keys) > 1:
            raise ValueError("la expresión tiene varios productos de potencias distintos")
        return list(keys[0].powers) if keys else []

    @property
    def log_terms(self):
        """Lista de (r_j, q_j); solo logaritmos sin producto de potencias"""
        items = []
        for key, coeff in self.terms():
            if key.log is not None:
                if key.powers:
                    raise ValueError("término logarítmico multiplicado por potencias")
                items.append((coeff, key.log))
        return items

    def log_arguments(self):
        return [key.log for key, _ in self.terms() if key.log is not None]

    def shared_log_factors(self):
        """Pares de argumentos logarítmicos con un factor común no trivial"""
        args = []
        for q in self.log_arguments():
            if q not in args:
                args.append(q)
        shared = []
        for a_idx, qa in enumerate(args):
            for qb in args[a_idx + 1:]:
                common = qa.gcd(qb)
                if not common.is_ground:
                    shared.append((qa, qb, common))
        return shared

    # -- aritmética ---------------------------------------------------------

    def _lift(self, other):
        if isinstance(other, InvariantExpr):
            if other.field != self.field:
                raise UniverseMismatch("expresiones en universos distintos")
            return other
        return InvariantExpr(self.field, {UNIT_KEY: self._coerce(other)})

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self._terms)
        for key, coeff in other._terms.items():
            terms[key] = terms[key] + coeff if key in terms else coeff
        return InvariantExpr(self.field, terms)

    __radd__ = __add__

    def __neg__(self):
        return InvariantExpr(self.field, {key: -coeff for key, coeff in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        other = self._lift(other)
        terms = {}
        for key_a, coeff_a in self._terms.items():
            for key_b, coeff_b in other._terms.items():
                if key_a.log is not None and key_b.log is not None:
                    raise ValueError("el producto de dos logaritmos no es representable")
                factor, powers = normalize_powers(list(key_a.powers) + list(key_b.powers), self.field)
                key = TermKey(powers, key_a.log if key_a.log is not None else key_b.log)
                coeff = coeff_a * coeff_b * factor
                terms[key] = terms[key] + coeff if key in terms else coeff
        return InvariantExpr(self.field, terms)

    __rmul__ = __mul__

    def inverse(self):
        """Inverso de un único término sin logaritmo"""
        if len(self._terms) != 1:
            raise ValueError("solo se invierten expresiones de un término")
        (key, coeff), = self._terms.items()
        if key.log is not None:
            raise ValueError("no se invierte un término logarítmico")
        powers = tuple((p, -e) for p, e in key.powers)
        return InvariantExpr(self.field, {TermKey(powers, None): 1 / coeff})

    def __truediv__(self, other):
        other = self._lift(other)
        if not other._terms:
            raise ZeroDivisionError("división por la expresión cero")
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self._lift(other) / self

    def __pow__(self, n):
        if not isinstance(n, int):
            raise TypeError("solo potencias enteras; use power_product para exponentes racionales")
        if n == 0:
            return InvariantExpr.constant(self.field, 1)
        if self.is_rational:
            power = self.rational ** n
            return InvariantExpr(self.field, {UNIT_KEY: self.field.new(power.numer, power.denom)})
        if len(self._terms) == 1:
            (key, coeff), = self._terms.items()
            if key.log is None:
                factor, powers = normalize_powers([(p, e * n) for p, e in key.powers], self.field)
                return InvariantExpr(self.field, {TermKey(powers, None): coeff ** n * factor})
        raise ValueError("potencia entera de una expresión trascendente con varios términos")

    def __eq__(self, other):
        if isinstance(other, InvariantExpr):
            return self.field == other.field and self._terms == other._terms
        try:
            return self == self._lift(other)
        except (TypeError, UniverseMismatch):
            return NotImplemented

    def __hash__(self):
        return hash((self.field, frozenset(self._terms.items())))

    def __bool__(self):
        return bool(self._terms)

    def __repr__(self):
        return f"InvariantExpr({self.to_text()!r})"

    def to_text(self):
        """Texto canónico, legible por utils.expression_parser"""
        if not self._terms:
            return "0"
        pieces = []
        for key, coeff in self.terms():
            pieces.append(_term_text(key, coeff))
        return " + ".join(pieces)


def polynomial_part(r):
    """Numerador entre denominador constante; sympy deja constantes enteras abajo"""
    if r.denom == 1:
        return r.numer
    return r.numer.quo_ground(r.denom.LC)


def rational_to_text(r):
    if r.denom.is_ground:
        return poly_to_text(polynomial_part(r))
    return f"({poly_to_text(r.numer)})/({poly_to_text(r.denom)})"


def _term_text(key, coeff):
    if key.is_unit:
        return rational_to_text(coeff)
    factors = key.to_text()
    if coeff == 1:
        return factors
    if coeff.denom.is_ground:
        return f"({poly_to_text(polynomial_part(coeff))})*{factors}"
    return f"({poly_to_text(coeff.numer)})/({poly_to_text(coeff.denom)})*{factors}"


def as_expr(value):
    """Acepta PolyElement, FracElement o InvariantExpr y devuelve InvariantExpr"""
    if isinstance(value, InvariantExpr):
        return value
    if isinstance(value, FracElement):
        return InvariantExpr.from_rational(value)
    if isinstance(value, PolyElement):
        return InvariantExpr.from_poly(value)
    raise TypeError(f"no es una expresión: {value!r}")


class VectorField:
    """
    Derivación de primer orden sum_j c_j * d/dy_j con coeficientes
    polinomiales, indexada por el índice del generador en el anillo.
    """

    __slots__ = ('ring', '_coeffs')

    def __init__(self, ring, coeffs=None):
        self.ring = ring
        clean = {}
        for idx, coeff in (coeffs or {}).items():
            if not 0 <= idx < ring.ngens:
                raise UniverseMismatch(f"índice de variable {idx} fuera del universo")
            if not isinstance(coeff, PolyElement):
                coeff = ring.ground_new(to_qq(coeff))
            elif coeff.ring != ring:
                raise UniverseMismatch("coeficiente de campo en otro universo")
            if coeff:
                clean[idx] = coeff
        self._coeffs = clean

    @classmethod
    def from_variables(cls, uni, coeffs):
        return cls(uni.ring, {uni.index(var): coeff for var, coeff in coeffs.items()})

    def coeff(self, idx):
        return self._coeffs.get(idx, self.ring.zero)

    def items(self):
        return sorted(self._coeffs.items())

    def names(self):
        return [str(symbol) for symbol in self.ring.symbols]

    @property
    def is_zero(self):
        return not self._coeffs

    def restrict(self, prefix):
        """Conserva solo las componentes cuyas variables empiezan por prefix ('n_' o 'x_')"""
        names = self.names()
        return VectorField(self.ring, {idx: c for idx, c in self._coeffs.items() if names[idx].startswith(prefix)})

    def n_part(self):
        return self.restrict('n_')

    def x_part(self):
        return self.restrict('x_')

    def apply_poly(self, p):
        if p.ring != self.ring:
            raise UniverseMismatch("campo y polinomio en universos distintos")
        result = self.ring.zero
        gens = self.ring.gens
        for idx, coeff in self._coeffs.items():
            partial = p.diff(gens[idx])
            if partial:
                result += coeff * partial
        return result

    def apply_rational(self, r):
        numer, denom = r.numer, r.denom
        d_numer = self.apply_poly(numer)
        if denom.is_ground:
            return r.field.new(d_numer, denom)
        d_denom = self.apply_poly(denom)
        return r.field.new(d_numer * denom - numer * d_denom, denom ** 2)

    def apply(self, value):
        return apply_field(self, value)

    def commutator(self, other):
        """[self, other] como conmutador de derivaciones"""
        if other.ring != self.ring:
            raise UniverseMismatch("campos en universos distintos")
        coeffs = {}
        for idx in set(self._coeffs) | set(other._coeffs):
            coeffs[idx] = self.apply_poly(other.coeff(idx)) - other.apply_poly(self.coeff(idx))
        return VectorField(self.ring, coeffs)

    def __add__(self, other):
        coeffs = dict(self._coeffs)
        for idx, coeff in other._coeffs.items():
            coeffs[idx] = coeffs[idx] + coeff if idx in coeffs else coeff
        return VectorField(self.ring, coeffs)

    def __neg__(self):
        return VectorField(self.ring, {idx: -c for idx, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, factor):
        """Multiplica todos los coeficientes por un polinomio o un racional"""
        if not isinstance(factor, PolyElement):
            factor = self.ring.ground_new(to_qq(factor))
        return VectorField(self.ring, {idx: c * factor for idx, c in self._coeffs.items()})

    def __eq__(self, other):
        return isinstance(other, VectorField) and self.ring == other.ring and self._coeffs == other._coeffs

    def __hash__(self):
        return hash((self.ring, frozenset(self._coeffs.items())))

    def __repr__(self):
        return f"VectorField({self.to_text()!r})"

    def to_text(self):
        if not self._coeffs:
            return "0"
        names = self.names()
        return " + ".join(f"({poly_to_text(c)})*d/d{names[idx]}" for idx, c in self.items())


def apply_field(v, e):
    """
    Aplica la derivación v a e.

    Para un término c*P*ln(q): (v c + c * sum e_i v(p_i)/p_i) * P * ln(q) + c * v(q)/q * P.
    Un polinomio o una función racional devuelven el mismo tipo.
    """
    if isinstance(e, PolyElement):
        return v.apply_poly(e)
    if isinstance(e, FracElement):
        return v.apply_rational(e)
    if e.ring != v.ring:
        raise UniverseMismatch("campo y expresión en universos distintos")
    field = e.field
    terms = {}

    def accumulate(key, value):
        if value:
            terms[key] = terms[key] + value if key in terms else value

    for key, coeff in e.terms():
        derived = v.apply_rational(coeff)
        if key.powers:
            log_derivative = field.zero
            for base, exponent in key.powers:
                d_base = v.apply_poly(base)
                if d_base:
                    log_derivative += field.new(d_base * to_qq(exponent), base)
            derived = derived + coeff * log_derivative
        accumulate(key, derived)
        if key.log is not None:
            d_log = v.apply_poly(key.log)
            if d_log:
                accumulate(TermKey(key.powers, None), coeff * field.new(d_log, key.log))
    return InvariantExpr(field, terms)


def is_zero(e):
    """Nulidad exacta, coeficiente a coeficiente"""
    if isinstance(e, (PolyElement, FracElement)):
        return not e
    return not e._terms


def _eval_rational(r, values):
    denom = eval_poly(r.denom, values)
    if not denom:
        raise DenominatorVanishes("el denominador se anula en el punto")
    return eval_poly(r.numer, values) / denom


def eval_at(e, point):
    """
    Valor racional exacto de e en un punto que asigna todas las variables.

    Raises:
        DenominatorVanishes: si un denominador, una base con exponente
            negativo o un argumento logarítmico se anula
        NonRationalValue: si aparecen logaritmos o exponentes fraccionarios
    """
    if isinstance(e, PolyElement):
        return to_fraction(eval_poly(e, point_values(e.ring, point)))
    if isinstance(e, FracElement):
        return to_fraction(_eval_rational(e, point_values(e.ring, point)))
    values = point_values(e.ring, point)
    for key, coeff in e.terms():
        if not eval_poly(coeff.denom, values):
            raise DenominatorVanishes("el denominador se anula en el punto")
        if key.log is not None and not eval_poly(key.log, values):
            raise DenominatorVanishes("el argumento del logaritmo se anula en el punto")
        for base, exponent in key.powers:
            if exponent < 0 and not eval_poly(base, values):
                raise DenominatorVanishes("una base con exponente negativo se anula en el punto")
    total = QQ.zero
    for key, coeff in e.terms():
        if key.log is not None:
            raise NonRationalValue("los logaritmos solo se evalúan en modo gradiente")
        value = _eval_rational(coeff, values)
        for base, exponent in key.powers:
            if exponent.denominator != 1:
                raise NonRationalValue("exponente fraccionario sin valor racional garantizado")
            value *= eval_poly(base, values) ** exponent.numerator
        total += value
    return to_fraction(total)


class GradientEvaluator:
    """
    Evalúa gradientes exactos de una expresión.

    Los productos de potencias se diferencian por derivada logarítmica y su
    valor se toma como la unidad formal 1; cada ln(q) toma el valor que se le
    asigne en log_values (por defecto 1).
    """

    def __init__(self, e):
        self.expr = as_expr(e)
        self._partials = {}

    def _partial_list(self, p):
        cached = self._partials.get(p)
        if cached is None:
            cached = [p.diff(gen) for gen in p.ring.gens]
            self._partials[p] = cached
        return cached

    def gradient(self, values, log_values=None):
        log_values = log_values or {}
        size = len(values)
        gradient = [QQ.zero] * size
        for key, coeff in self.expr.terms():
            numer_value = eval_poly(coeff.numer, values)
            denom_value = eval_poly(coeff.denom, values)
            if not denom_value:
                raise DenominatorVanishes("el denominador se anula en el punto")
            value = numer_value / denom_value
            numer_partials = self._partial_list(coeff.numer)
            denom_partials = self._partial_list(coeff.denom)
            factor_data = []
            for base, exponent in key.powers:
                base_value = eval_poly(base, values)
                if not base_value:
                    raise DenominatorVanishes("una base de potencia se anula en el punto")
                factor_data.append((to_qq(exponent), base_value, self._partial_list(base)))
            if key.log is not None:
                log_arg = eval_poly(key.log, values)
                if not log_arg:
                    raise DenominatorVanishes("el argumento del logaritmo se anula en el punto")
                log_value = to_qq(log_values.get(key.log, 1))
                log_partials = self._partial_list(key.log)
            else:
                log_value = QQ.one
            for j in range(size):
                d_coeff = (eval_poly(numer_partials[j], values) * denom_value
                           - numer_value * eval_poly(denom_partials[j], values)) / denom_value ** 2
                d_log_power = QQ.zero
                for exponent, base_value, partials in factor_data:
                    if partials[j]:
                        d_log_power += exponent * eval_poly(partials[j], values) / base_value
                entry = (d_coeff + value * d_log_power) * log_value
                if key.log is not None and log_partials[j]:
                    entry += value * eval_poly(log_partials[j], values) / log_arg
                gradient[j] += entry
        return gradient

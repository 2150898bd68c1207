"""
Catálogo de invariantes en forma cerrada.

Incluye los determinantes Z_mu y W_rho^(mu), los operadores combinados
Z^_mu y cada familia de invariantes de T(M), L(4,f), L(M,M-1) y L(M,1)
diagonal. Cada entrada lleva su álgebra, de modo que puede verificarse
directamente con utils.verification.verify_invariant.
"""
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction

from utils.errors import ConditionViolated, DegenerateExponent, InvalidSize, RangeError, ResidualNDerivative
from utils.expressions import InvariantExpr, VectorField
from utils.lie_algebras import build_diagonal_L, build_L41, build_L42, build_L_full_rank, build_T
from utils.polynomials import determinant, format_rational, to_fraction, to_qq, universe

logger = logging.getLogger(__name__)


class Family(str, Enum):
    NILPOTENT = "nilpotent"
    L41_POLYNOMIAL = "l41-polynomial"
    L41_POWER = "l41-power"
    L41_LOG = "l41-log"
    L42_LOG = "l42-log"
    L42_POWER = "l42-power"
    L42_POWER_FREE = "l42-power-free"
    L42_POWER_UNIT = "l42-power-unit"
    L42_SIGMA = "l42-sigma"
    L43 = "l43"
    FULL_RANK = "full-rank"
    DIAGONAL_RESONANT = "diagonal-resonant"
    DIAGONAL_GENERIC = "diagonal-generic"


@dataclass(frozen=True, eq=False)
class CatalogEntry:
    family: Family
    M: int
    f: int
    parameters: dict
    algebra: object = field(repr=False)
    invariants: tuple = field(repr=False)
    expected_count: int = 0
    notes: str = ""

    def to_dict(self):
        return {
            'family': self.family.value,
            'M': self.M,
            'f': self.f,
            'parameters': {key: format_rational(value) for key, value in self.parameters.items()},
            'algebra': self.algebra.name,
            'expected_count': self.expected_count,
            'invariants': [expr.to_text() for expr in self.invariants],
            'notes': self.notes,
        }


# -- determinantes ----------------------------------------------------------

def corner_matrix(uni, mu):
    """Esquina superior derecha mu x mu de la matriz de variables n_ik"""
    M = uni.M
    return [[uni.n(a, c) for c in range(M - mu + 1, M + 1)] for a in range(1, mu + 1)]


def Z(M, mu, f=0):
    """Determinante de la esquina superior derecha mu x mu; homogéneo de grado mu"""
    if M < 2:
        raise InvalidSize(f"M debe ser al menos 2, se recibió {M}")
    if not 1 <= mu <= M // 2:
        raise RangeError(f"mu debe estar en 1..{M // 2}, se recibió {mu}")
    uni = universe(M, f)
    return determinant(corner_matrix(uni, mu), uni.ring)


def W(M, mu, rho, f=0):
    """
    Determinante orlado (mu+1) x (mu+1):

        | n_{1,rho+mu}   n_{1,M-mu+1}        ...  n_{1M}        |
        | ...                                                   |
        | n_{mu,rho+mu}  n_{mu,M-mu+1}       ...  n_{mu,M}      |
        | 0              n_{rho+mu,M-mu+1}   ...  n_{rho+mu,M}  |
    """
    if M < 3:
        raise InvalidSize(f"M debe ser al menos 3, se recibió {M}")
    if not 1 <= mu <= (M - 1) // 2:
        raise RangeError(f"mu debe estar en 1..{(M - 1) // 2}, se recibió {mu}")
    if not 1 <= rho <= M - 2 * mu:
        raise RangeError(f"rho debe estar en 1..{M - 2 * mu}, se recibió {rho}")
    uni = universe(M, f)
    pivot = rho + mu
    columns = range(M - mu + 1, M + 1)
    rows = [[uni.n(a, pivot)] + [uni.n(a, c) for c in columns] for a in range(1, mu + 1)]
    rows.append([uni.ring.zero] + [uni.n(pivot, c) for c in columns])
    return determinant(rows, uni.ring)


def theorem1_basis(M, f=0):
    """[Z_1, ..., Z_[M/2]] como expresiones"""
    if M < 2:
        raise InvalidSize(f"M debe ser al menos 2, se recibió {M}")
    return [InvariantExpr.from_poly(Z(M, mu, f)) for mu in range(1, M // 2 + 1)]


def cofactors(matrix, ring):
    """Matriz de cofactores C_aj = (-1)^(a+j) det(menor)"""
    size = len(matrix)
    if size == 1:
        return [[ring.one]]
    result = []
    for a in range(size):
        row = []
        for j in range(size):
            minor = [r[:j] + r[j + 1:] for idx, r in enumerate(matrix) if idx != a]
            value = determinant(minor, ring)
            row.append(value if (a + j) % 2 == 0 else -value)
        result.append(row)
    return result


# -- operadores combinados --------------------------------------------------

def zhat_operator(alg, mu):
    """
    Z^_mu: el determinante Z_mu con una columna de escalares sustituida por
    los operadores N^ correspondientes, expandido por cofactores.

    Raises:
        ResidualNDerivative: si sobreviven derivadas respecto a las n_ik
    """
    M = alg.M
    if not 1 <= mu <= M // 2:
        raise RangeError(f"mu debe estar en 1..{M // 2}, se recibió {mu}")
    uni = alg.universe
    cof = cofactors(corner_matrix(uni, mu), uni.ring)
    result = VectorField(uni.ring)
    for a in range(1, mu + 1):
        for j in range(1, mu + 1):
            column = M - mu + j
            operator = alg.field_for(f"N_{a}_{column}")
            result = result + operator.scale(cof[a - 1][j - 1])
    residual = result.n_part()
    if not residual.is_zero:
        raise ResidualNDerivative(mu, residual)
    return result


def zhat_closed_form(alg, mu):
    """
    Forma cerrada de Z^_mu:

        -Z_mu * sum_alpha (sum_{k<=mu} a^alpha_{k(M+1-k)}) d/dx^alpha

    más las correcciones de las entradas fuera de la diagonal de las filas
    que aparecen en la expansión (solo para M par y mu = M/2).
    """
    M = alg.M
    spec = alg.char_spec
    uni = alg.universe
    if spec is None:
        return VectorField(uni.ring)
    z_mu = Z(M, mu, alg.f)
    cof = cofactors(corner_matrix(uni, mu), uni.ring)
    coeffs = {}
    for alpha in range(1, alg.f + 1):
        weight = sum((spec.diagonal_entry(alpha, k, M + 1 - k) for k in range(1, mu + 1)), Fraction(0))
        coeff = -z_mu * to_qq(weight)
        for a in range(1, mu + 1):
            for j in range(1, mu + 1):
                for col, value in spec.off_diagonal_row(alpha, (a, M - mu + j)):
                    coeff -= cof[a - 1][j - 1] * uni.n(*col) * to_qq(value)
        coeffs[uni.r + alpha - 1] = coeff
    return VectorField(uni.ring, coeffs)


# -- utilidades -------------------------------------------------------------

def coprime_exponents(values):
    """
    Escala un vector racional a enteros coprimos con el primer elemento no
    nulo positivo.
    """
    values = [to_fraction(value) for value in values]
    if all(value == 0 for value in values):
        raise ValueError("el vector de exponentes es nulo")
    scale = 1
    for value in values:
        scale = scale * value.denominator // math.gcd(scale, value.denominator)
    ints = [int(value * scale) for value in values]
    common = 0
    for value in ints:
        common = math.gcd(common, value)
    ints = [value // common for value in ints]
    leading = next(value for value in ints if value != 0)
    if leading < 0:
        ints = [-value for value in ints]
    return tuple(ints)


def _quadratic(uni):
    """n12 n24 + n13 n34, la parte cuadrática común a las familias de L(4,f)"""
    return uni.n(1, 2) * uni.n(2, 4) + uni.n(1, 3) * uni.n(3, 4)


def _power_ratio(z_high, z_low, exponents, target):
    e_high, e_low = exponents
    return InvariantExpr.power_product([(z_high, e_high), (z_low, e_low)], field=target)


def _fractions(**params):
    return {key: to_fraction(value) for key, value in params.items()}


# -- T(M) -------------------------------------------------------------------

def nilpotent_invariants(M):
    alg = build_T(M)
    return CatalogEntry(
        family=Family.NILPOTENT, M=M, f=0, parameters={}, algebra=alg,
        invariants=tuple(theorem1_basis(M)), expected_count=M // 2,
    )


# -- L(4,1) -----------------------------------------------------------------

def l41_polynomial(a12=1):
    t = to_fraction(a12)
    if t == 0:
        raise ConditionViolated("a12 != 0", "con a12 = -a34 = 0 el álgebra es nilpotente")
    alg = build_L41(t, 0, -t)
    uni = alg.universe
    z1, z2 = Z(4, 1, 1), Z(4, 2, 1)
    third = _quadratic(uni) + z1 * uni.x(1) * to_qq(1 / t)
    return CatalogEntry(
        family=Family.L41_POLYNOMIAL, M=4, f=1, parameters=_fractions(a12=t, a23=0, a34=-t),
        algebra=alg, invariants=tuple(InvariantExpr.from_poly(p) for p in (z1, z2, third)),
        expected_count=3,
        notes="el tercer invariante es Z_1 por la forma Q/Z_1 + x/a12",
    )


def l41_power(a12=1, a23=1, a34=0, l1=0, l3=0):
    a12, a23, a34 = (to_fraction(v) for v in (a12, a23, a34))
    if a12 + a34 == 0 and a23 == 0:
        raise ConditionViolated("(a12+a34, a23) != (0,0)", "el caso de tres invariantes no admite producto de potencias")
    alg = build_L41(a12, a23, a34, l1, 0, l3)
    a14 = a12 + a23 + a34
    exponents = coprime_exponents([a14, -(a14 + a23)])
    invariant = _power_ratio(Z(4, 2, 1), Z(4, 1, 1), exponents, alg.universe.field)
    return CatalogEntry(
        family=Family.L41_POWER, M=4, f=1,
        parameters=_fractions(a12=a12, a23=a23, a34=a34, l1=l1, l3=l3),
        algebra=alg, invariants=(invariant,), expected_count=1,
        notes=f"exponentes coprimos {exponents}",
    )


def l41_log(a23=1, a12=1, l2=-1):
    """
    a23 Z_2/Z_1^2 + l2 ln Z_1 con a12 + a34 = 0. Con l2 = -1 se obtiene la
    forma a23 Z_2/Z_1^2 - ln Z_1.
    """
    a23, a12, l2 = (to_fraction(v) for v in (a23, a12, l2))
    if l2 == 0:
        raise ConditionViolated("lambda2 != 0", "sin lambda2 el invariante es un producto de potencias")
    alg = build_L41(a12, a23, -a12, 0, l2, 0)
    field_ = alg.universe.field
    z1, z2 = Z(4, 1, 1), Z(4, 2, 1)
    rational = field_.new(z2 * to_qq(a23), z1 ** 2)
    invariant = InvariantExpr.build(rational, log_terms=[(field_.ground_new(to_qq(l2)), z1)])
    return CatalogEntry(
        family=Family.L41_LOG, M=4, f=1, parameters=_fractions(a12=a12, a23=a23, a34=-a12, l2=l2),
        algebra=alg, invariants=(invariant,), expected_count=1,
    )


# -- L(4,2) -----------------------------------------------------------------

def _l42_general_form(alg, a, b):
    """I_1 por la fila no nula de (c14, c14+c23) e I_2 = K Q/n14 + a14 x^2 - b14 x^1"""
    uni = alg.universe
    a12, a23, a34 = a
    b12, b23, b34 = b
    a13, a14 = a12 + a23, a12 + a23 + a34
    b13, b14 = b12 + b23, b12 + b23 + b34
    if (a14, a14 + a23) != (0, 0):
        exponents = coprime_exponents([a14, -(a14 + a23)])
    else:
        exponents = coprime_exponents([b14, -(b14 + b23)])
    first = _power_ratio(Z(4, 2, 2), Z(4, 1, 2), exponents, uni.field)
    k_factor = a34 * b13 - b34 * a13
    rational = uni.field.new(_quadratic(uni) * to_qq(k_factor), uni.n(1, 4))
    rational = rational + uni.field.new(uni.x(2) * to_qq(a14) - uni.x(1) * to_qq(b14))
    return first, InvariantExpr.from_rational(rational), exponents


def l42_log(l2=1):
    l2 = to_fraction(l2)
    if l2 == 0:
        raise ConditionViolated("lambda2 != 0", "la forma logarítmica necesita lambda2")
    alg = build_L42((1, 0, -1), (0, 1, 0), (0, l2, 0), 0)
    uni = alg.universe
    z1, z2 = Z(4, 1, 2), Z(4, 2, 2)
    first = InvariantExpr.build(uni.field.new(z2, z1 ** 2), log_terms=[(uni.field.ground_new(to_qq(l2)), z1)])
    second = InvariantExpr.from_rational(uni.field.new(_quadratic(uni), uni.n(1, 4)) + uni.field.new(uni.x(1)))
    return CatalogEntry(
        family=Family.L42_LOG, M=4, f=2, parameters=_fractions(l2=l2),
        algebra=alg, invariants=(first, second), expected_count=2,
    )


def l42_power_free(b34=2):
    t = to_fraction(b34)
    if t == -1:
        raise ConditionViolated("b34 != -1", "con b34 = -1 se anulan a14 y b14")
    a, b = (Fraction(1), Fraction(0), Fraction(-1)), (Fraction(0), Fraction(1), t)
    alg = build_L42(a, b)
    first, second, exponents = _l42_general_form(alg, a, b)
    return CatalogEntry(
        family=Family.L42_POWER_FREE, M=4, f=2, parameters=_fractions(b34=t),
        algebra=alg, invariants=(first, second), expected_count=2,
        notes=f"exponentes coprimos {exponents}",
    )


def l42_power_unit():
    a, b = (Fraction(1), Fraction(0), Fraction(0)), (Fraction(0), Fraction(0), Fraction(1))
    alg = build_L42(a, b)
    first, second, exponents = _l42_general_form(alg, a, b)
    return CatalogEntry(
        family=Family.L42_POWER_UNIT, M=4, f=2, parameters={},
        algebra=alg, invariants=(first, second), expected_count=2,
    )


def l42_sigma(sigma=1):
    sigma = to_fraction(sigma)
    alg = build_L42((1, 0, -1), (0, 1, -1), (0, 0, 0), sigma)
    uni = alg.universe
    z1, z2 = Z(4, 1, 2), Z(4, 2, 2)
    base = _quadratic(uni) + z1 * uni.x(1)
    second = InvariantExpr.build(uni.field.new(base), log_terms=[(uni.field.new(z1 ** 2 * to_qq(sigma)), z2)])
    return CatalogEntry(
        family=Family.L42_SIGMA, M=4, f=2, parameters=_fractions(sigma=sigma),
        algebra=alg, invariants=(InvariantExpr.from_poly(z1), second), expected_count=2,
    )


def l42_invariants(a, b, l2=0, sigma=0):
    """
    L(4,2) general. Existen dos invariantes si y solo si
    b23(a12+a34) - a23(b12+b34) = 0 y a14*lambda2 = 0.

    Con lambda2 = sigma = 0 y (a14, b14) != (0,0) se devuelve la forma
    general; con lambda2 o sigma no nulos solo se aceptan las formas
    normalizadas.
    """
    a = tuple(to_fraction(v) for v in a)
    b = tuple(to_fraction(v) for v in b)
    l2, sigma = to_fraction(l2), to_fraction(sigma)
    a12, a23, a34 = a
    b12, b23, b34 = b
    a14, b14 = sum(a, Fraction(0)), sum(b, Fraction(0))
    if b23 * (a12 + a34) - a23 * (b12 + b34) != 0:
        raise ConditionViolated("b23(a12+a34) - a23(b12+b34) = 0", "no hay invariantes")
    if a14 * l2 != 0:
        raise ConditionViolated("a14*lambda2 = 0", "no hay invariantes")
    if l2 == 0 and sigma == 0 and (a14, b14) != (0, 0):
        alg = build_L42(a, b)
        first, second, exponents = _l42_general_form(alg, a, b)
        return CatalogEntry(
            family=Family.L42_POWER, M=4, f=2,
            parameters=_fractions(a12=a12, a23=a23, a34=a34, b12=b12, b23=b23, b34=b34),
            algebra=alg, invariants=(first, second), expected_count=2,
            notes=f"exponentes coprimos {exponents}",
        )
    if a == (1, 0, -1) and b == (0, 1, 0) and sigma == 0:
        return l42_log(l2)
    if a == (1, 0, -1) and b == (0, 1, -1) and l2 == 0:
        return l42_sigma(sigma)
    raise ConditionViolated("normalization", "solo se catalogan las formas normalizadas con lambda2 o sigma no nulos")


# -- L(4,3) y familias generales ---------------------------------------------

def l43_invariants():
    alg = build_L_full_rank(4)
    uni = alg.universe
    rational = uni.field.new(_quadratic(uni), uni.n(1, 4)) + uni.field.new(uni.x(1) - uni.x(3))
    return CatalogEntry(
        family=Family.L43, M=4, f=3, parameters={}, algebra=alg,
        invariants=(InvariantExpr.from_rational(rational),), expected_count=1,
    )


def prop1_invariants(M):
    """I_mu = (-1)^(mu+1) sum_rho W_rho^(mu) / Z_mu + x^mu - x^(M-mu) para L(M,M-1)"""
    if M < 3:
        raise InvalidSize(f"L(M,M-1) necesita M >= 3, se recibió {M}")
    alg = build_L_full_rank(M)
    uni = alg.universe
    f = M - 1
    invariants = []
    for mu in range(1, (M - 1) // 2 + 1):
        total = uni.ring.zero
        for rho in range(1, M - 2 * mu + 1):
            total += W(M, mu, rho, f)
        sign = 1 if mu % 2 == 1 else -1
        rational = uni.field.new(total * sign, Z(M, mu, f)) + uni.field.new(uni.x(mu) - uni.x(M - mu))
        invariants.append(InvariantExpr.from_rational(rational))
    return CatalogEntry(
        family=Family.FULL_RANK, M=M, f=f, parameters={}, algebra=alg,
        invariants=tuple(invariants), expected_count=(M - 1) // 2,
    )


def is_resonant_diagonal(M, a):
    """a_{i(i+1)} + a_{(M-i)(M-i+1)} = 0 para i = 1..[M/2]"""
    a = [to_fraction(v) for v in a]
    return all(a[i - 1] + a[M - i - 1] == 0 for i in range(1, M // 2 + 1))


def prop2_invariants(M, a):
    """
    L(M,1) con matriz característica diagonal de entradas libres a.

    Caso resonante: Z_1..Z_[M/2] y sum (-1)^(mu+1) a_mu W/Z_mu + x.
    Caso genérico: Z_{mu+1}^alpha / Z_1^beta con alpha/beta = s_1/s_{mu+1}.
    """
    if M < 3:
        raise InvalidSize(f"L(M,1) diagonal necesita M >= 3, se recibió {M}")
    a = [to_fraction(v) for v in a]
    alg = build_diagonal_L(M, a)
    uni = alg.universe
    params = {f"a{i}{i + 1}": value for i, value in enumerate(a, start=1)}
    if is_resonant_diagonal(M, a):
        invariants = [InvariantExpr.from_poly(Z(M, mu, 1)) for mu in range(1, M // 2 + 1)]
        mixed = uni.field.new(uni.x(1))
        for mu in range(1, (M - 1) // 2 + 1):
            if a[mu - 1] == 0:
                continue
            total = uni.ring.zero
            for rho in range(1, M - 2 * mu + 1):
                total += W(M, mu, rho, 1)
            sign = 1 if mu % 2 == 1 else -1
            mixed = mixed + uni.field.new(total * to_qq(a[mu - 1] * sign), Z(M, mu, 1))
        invariants.append(InvariantExpr.from_rational(mixed))
        return CatalogEntry(
            family=Family.DIAGONAL_RESONANT, M=M, f=1, parameters=params, algebra=alg,
            invariants=tuple(invariants), expected_count=M // 2 + 1,
        )
    spec = alg.char_spec
    partial_sums = []
    running = Fraction(0)
    for k in range(1, M // 2 + 1):
        running += spec.diagonal_entry(1, k, M + 1 - k)
        partial_sums.append(running)
    s1 = partial_sums[0]
    invariants = []
    for mu in range(1, M // 2):
        s_next = partial_sums[mu]
        if s_next == 0:
            raise DegenerateExponent(mu, f"sum_k<= {mu + 1} a_k(M+1-k) = 0, el cociente de exponentes no está definido")
        if s1 == 0:
            raise DegenerateExponent(mu, "a_1M = 0 reduce todos los cocientes a potencias de Z_1")
        exponents = coprime_exponents([s1, -s_next])
        invariants.append(_power_ratio(Z(M, mu + 1, 1), Z(M, 1, 1), exponents, uni.field))
    return CatalogEntry(
        family=Family.DIAGONAL_GENERIC, M=M, f=1, parameters=params, algebra=alg,
        invariants=tuple(invariants), expected_count=M // 2 - 1,
    )


FAMILY_BUILDERS = {
    Family.L41_POLYNOMIAL: l41_polynomial,
    Family.L41_POWER: l41_power,
    Family.L41_LOG: l41_log,
    Family.L42_LOG: l42_log,
    Family.L42_POWER: l42_invariants,
    Family.L42_POWER_FREE: l42_power_free,
    Family.L42_POWER_UNIT: l42_power_unit,
    Family.L42_SIGMA: l42_sigma,
    Family.L43: l43_invariants,
}


def lemma_invariants(which, **params):
    """
    Entrada de catálogo de una familia de L(4,f).

    Args:
        which: Family o su identificador de texto, por ejemplo 'l41-log'
        params: parámetros de la familia (a12, a23, a34, l2, b34, sigma...)
    """
    family = Family(which)
    if family not in FAMILY_BUILDERS:
        raise ValueError(f"{family.value} no es una familia de L(4,f)")
    return FAMILY_BUILDERS[family](**params)


def catalog(max_full_rank=5):
    """Todas las familias en sus parámetros por defecto"""
    entries = [nilpotent_invariants(4)]
    entries += [builder() for family, builder in FAMILY_BUILDERS.items() if family is not Family.L42_POWER]
    entries.append(l42_invariants((1, 1, 0), (0, 1, 1)))
    entries += [prop1_invariants(M) for M in range(3, max_full_rank + 1)]
    entries.append(prop2_invariants(4, (1, 0, -1)))
    entries.append(prop2_invariants(5, (1, 1, 1, 1)))
    return entries


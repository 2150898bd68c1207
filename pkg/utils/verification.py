"""
Verificación de invariantes.

- verify_invariant: aplica cada operador de la representación coadjunta y
  comprueba la nulidad exacta del resultado.
- jacobian_rank: independencia funcional por el rango del jacobiano en
  puntos aleatorios.
- cofactor_annihilation_check: comprobación por cofactores de que los
  operadores reducidos de T(M) anulan cada Z_beta.
- certify_all: ejecuta todas las comprobaciones y devuelve una tabla.
"""
import json
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from utils.config import DEFAULT_SETTINGS
from utils.errors import (
    ConditionViolated,
    DegenerateExponent,
    DenominatorVanishes,
    InvalidSize,
    NilindependenceViolation,
    ResidualNDerivative,
    SamplingExhausted,
    UniverseMismatch,
)
from utils.expressions import (
    apply_field,
    as_expr,
    GradientEvaluator,
    InvariantExpr,
    is_zero,
    TermKey,
    VectorField,
)
from utils.invariant_catalog import (
    catalog,
    corner_matrix,
    Family,
    is_resonant_diagonal,
    l42_invariants,
    prop1_invariants,
    prop2_invariants,
    theorem1_basis,
    Z,
    zhat_closed_form,
    zhat_operator,
)
from utils.lie_algebras import build_L41, build_L42, build_L_full_rank, build_T
from utils.polynomials import determinant, poly_to_text, universe
from utils.property_checks import property_suite
from utils.rank_calculations import matrix_rank, rank_report, rank_table_L41, sample_point, trial_generators

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorCheck:
    generator: str
    zero: bool
    residual: str = None


@dataclass(frozen=True)
class Certificate:
    """Resultado de aplicar todos los operadores de un álgebra a una expresión"""
    algebra: str
    invariant: str
    checks: tuple = field(default=())

    @property
    def passed(self):
        return all(check.zero for check in self.checks)

    @property
    def failures(self):
        return [check for check in self.checks if not check.zero]

    def to_dict(self):
        return {
            'algebra': self.algebra,
            'invariant': self.invariant,
            'per_generator': [
                {'generator': check.generator, 'zero': check.zero, 'residual': check.residual}
                for check in self.checks
            ],
            'pass': self.passed,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), ensure_ascii=False, indent=2)


def embed_expr(uni, e):
    """Lleva una expresión construida con menos variables x al universo uni"""
    e = as_expr(e)
    if e.field == uni.field:
        return e
    terms = {}
    for key, coeff in e.terms():
        powers = tuple((uni.embed(base), exponent) for base, exponent in key.powers)
        log = uni.embed(key.log) if key.log is not None else None
        terms[TermKey(powers, log)] = uni.embed_rational(coeff)
    return InvariantExpr(uni.field, terms)


def verify_invariant(alg, e):
    """
    Aplica cada operador N^_ik y X^^alpha del álgebra a e.

    Returns:
        Certificate con el residuo de cada generador que no anula e
    """
    expr = embed_expr(alg.universe, e)
    for qa, qb, common in expr.shared_log_factors():
        logger.warning("ln(%s) y ln(%s) comparten el factor %s; la nulidad puede no detectarse",
                       poly_to_text(qa), poly_to_text(qb), poly_to_text(common))
    checks = []
    for label, operator in zip(alg.basis, alg.fields):
        residual = apply_field(operator, expr)
        zero = is_zero(residual)
        checks.append(GeneratorCheck(label, zero, None if zero else residual.to_text()))
        if not zero:
            logger.info("%s: %s no anula %s", alg.name, label, expr.to_text())
    return Certificate(alg.name, expr.to_text(), tuple(checks))


def jacobian_rank(invariants, sampler=None, trials=None, seed=None, settings=None):
    """
    Rango genérico de la matriz de gradientes de las invariantes.

    Los productos de potencias valen 1 y cada ln(q) toma un valor racional
    muestreado; si algún denominador se anula se vuelve a muestrear.

    Args:
        sampler: callable(rng, size) -> lista de QQ; por defecto enteros
            uniformes en [-sample_bound, sample_bound]

    Raises:
        SamplingExhausted: tras max_bad_samples puntos malos consecutivos
    """
    settings = settings or DEFAULT_SETTINGS
    trials = settings.trials if trials is None else trials
    if trials < 1:
        raise ValueError(f"trials debe ser al menos 1, se recibió {trials}")
    seed = settings.seed if seed is None else seed
    exprs = [as_expr(e) for e in invariants]
    if not exprs:
        return 0
    fields = {e.field for e in exprs}
    if len(fields) > 1:
        raise UniverseMismatch("las invariantes pertenecen a universos distintos")
    size = exprs[0].ring.ngens
    if sampler is None:
        def sampler(rng, n):
            return sample_point(rng, n, settings.sample_bound)
    evaluators = [GradientEvaluator(e) for e in exprs]
    log_args = []
    for e in exprs:
        for q in e.log_arguments():
            if q not in log_args:
                log_args.append(q)
    best = 0
    for trial, rng in enumerate(trial_generators(seed, trials)):
        bad = 0
        while True:
            values = sampler(rng, size)
            log_values = {q: QQ(int(rng.integers(1, settings.sample_bound, endpoint=True))) for q in log_args}
            try:
                rows = [evaluator.gradient(values, log_values) for evaluator in evaluators]
                break
            except DenominatorVanishes:
                bad += 1
                logger.debug("ensayo %d: denominador nulo, se vuelve a muestrear (%d)", trial, bad)
                if bad >= settings.max_bad_samples:
                    raise SamplingExhausted(bad) from None
        rank = matrix_rank(DomainMatrix(rows, (len(rows), size), QQ))
        best = max(best, rank)
        if best == len(exprs):
            break
    return best


# -- comprobación por cofactores ----------------------------------------------

@dataclass(frozen=True, eq=False)
class CofactorReport:
    M: int
    table: pd.DataFrame = field(repr=False)

    @property
    def passed(self):
        return bool(self.table['applied_zero'].all() and self.table['matches_replacement'].all())


def _reduced_row_operator(uni, i, k, first_column):
    """sum_{b=c0}^{M} n_ib d/dn_kb"""
    coeffs = {uni.index_of_n(k, b): uni.n(i, b) for b in range(first_column, uni.M + 1)}
    return VectorField(uni.ring, coeffs)


def _reduced_column_operator(uni, i, k, last_row):
    """-sum_{a=1}^{p} n_ak d/dn_ai"""
    coeffs = {uni.index_of_n(a, i): -uni.n(a, k) for a in range(1, last_row + 1)}
    return VectorField(uni.ring, coeffs)


def cofactor_annihilation_check(M):
    """
    Operadores reducidos de T(M) sobre cada Z_beta.

    Un operador de filas equivale al determinante de Z_beta con la fila k
    sustituida por la fila i (dos filas iguales); uno de columnas, al de Z_beta
    con la columna i sustituida por la k. En ambos casos el resultado es 0, o
    bien Z_beta no contiene las variables derivadas.
    """
    if M < 4:
        raise InvalidSize(f"la comprobación por cofactores necesita M >= 4, se recibió {M}")
    uni = universe(M)
    p = M // 2
    c0 = M - p + 1
    rows = []
    targets = {beta: Z(M, beta) for beta in range(1, p + 1)}
    for beta, z_beta in targets.items():
        corner = corner_matrix(uni, beta)
        columns = list(range(M - beta + 1, M + 1))
        for i in range(1, p + 1):
            for k in range(i + 1, p + 1):
                applied = _reduced_row_operator(uni, i, k, c0).apply_poly(z_beta)
                if k <= beta:
                    replaced = [list(r) for r in corner]
                    replaced[k - 1] = list(corner[i - 1])
                    expected = determinant(replaced, uni.ring)
                    mechanism = 'filas repetidas'
                else:
                    expected = uni.ring.zero
                    mechanism = 'variables ausentes'
                rows.append(_cofactor_row(beta, f"Na({i},{k})", mechanism, applied, expected))
        for i in range(c0, M + 1):
            for k in range(i + 1, M + 1):
                applied = _reduced_column_operator(uni, i, k, p).apply_poly(z_beta)
                if i in columns:
                    col_i, col_k = columns.index(i), columns.index(k)
                    replaced = [list(r) for r in corner]
                    for r in replaced:
                        r[col_i] = r[col_k]
                    expected = -determinant(replaced, uni.ring)
                    mechanism = 'columnas repetidas'
                else:
                    expected = uni.ring.zero
                    mechanism = 'variables ausentes'
                rows.append(_cofactor_row(beta, f"Nb({i},{k})", mechanism, applied, expected))
    table = pd.DataFrame(rows, columns=['target', 'operator', 'mechanism', 'applied_zero', 'matches_replacement'])
    return CofactorReport(M, table)


def _cofactor_row(beta, operator, mechanism, applied, expected):
    return {
        'target': f"Z_{beta}",
        'operator': operator,
        'mechanism': mechanism,
        'applied_zero': not applied,
        'matches_replacement': applied == expected,
    }


# -- certificación completa ---------------------------------------------------

def _row(claim, target, expected, observed):
    return {
        'claim': claim,
        'target': target,
        'expected': str(expected),
        'observed': str(observed),
        'passed': expected == observed,
    }


def count_certified(alg, invariants, settings):
    """
    Cota exacta del número de invariantes: el rango muestreado acota el rango
    genérico por abajo y las invariantes verificadas e independientes lo
    acotan por arriba. Devuelve el número si ambas cotas coinciden, o None.
    """
    report = rank_report(alg, settings=settings, confirm=False)
    independent = jacobian_rank(invariants, settings=settings)
    if all(verify_invariant(alg, e).passed for e in invariants) and report.n_invariants == independent:
        return independent
    return None


def _entry_rows(entry, settings):
    alg = entry.algebra
    target = f"{entry.family.value} {alg.name}"
    verified = sum(verify_invariant(alg, e).passed for e in entry.invariants)
    independent = jacobian_rank(entry.invariants, settings=settings) if entry.invariants else 0
    count = rank_report(alg, settings=settings, confirm=False).n_invariants
    return [
        _row("invariantes verificadas", target, len(entry.invariants), verified),
        _row("invariantes independientes", target, entry.expected_count, independent),
        _row("número de invariantes", target, entry.expected_count, count),
    ] + (_zhat_rows(alg) if alg.f else [])


def sample_diagonal_entries(M, draws, rng, bound=5, max_attempts=None):
    """
    Entradas del catálogo de L(M,1) diagonal: `draws` vectores no resonantes
    con exponentes definidos y un vector resonante. Los vectores que el
    catálogo rechaza se sustituyen por otro sorteo.

    Raises:
        SamplingExhausted: si se superan max_attempts sorteos (por defecto 50 por vector)
    """
    max_attempts = max_attempts or 50 * (draws + 1)
    attempts = 0

    def attempt(a):
        nonlocal attempts
        attempts += 1
        if attempts > max_attempts:
            raise SamplingExhausted(max_attempts, f"sin vector diagonal utilizable para L({M},1)")
        try:
            return prop2_invariants(M, a)
        except (DegenerateExponent, NilindependenceViolation) as exc:
            logger.debug("L(%d,1) con a=%s se vuelve a sortear: %s", M, a, exc)
            return None

    entries = []
    while len(entries) < draws:
        a = [int(value) for value in rng.integers(-bound, bound, size=M - 1, endpoint=True)]
        if not any(a) or is_resonant_diagonal(M, a):
            continue
        entry = attempt(a)
        if entry is not None:
            entries.append(entry)
    resonant_entry = None
    while resonant_entry is None:
        half = [int(value) for value in rng.integers(-bound, bound, size=(M - 1) // 2, endpoint=True)]
        resonant = half + ([0] if M % 2 == 0 else []) + [-value for value in reversed(half)]
        if any(resonant):
            resonant_entry = attempt(resonant)
    entries.append(resonant_entry)
    return entries


def _diagonal_rows(M, draws, rng, settings):
    entries = sample_diagonal_entries(M, draws, rng)
    generic = sum(entry.family is Family.DIAGONAL_GENERIC for entry in entries)
    resonant = sum(entry.family is Family.DIAGONAL_RESONANT for entry in entries)
    rows = [
        _row("vectores diagonales genéricos", f"L({M},1)", draws, generic),
        _row("vectores diagonales resonantes", f"L({M},1)", 1, resonant),
    ]
    for entry in entries:
        rows.extend(_entry_rows(entry, settings))
    return rows


def _zhat_rows(alg):
    rows = []
    for mu in range(1, alg.M // 2 + 1):
        try:
            operator = zhat_operator(alg, mu)
        except ResidualNDerivative as exc:
            logger.warning("%s: %s", alg.name, exc)
            rows.append(_row(f"Z^_{mu} sin derivadas en n", alg.name, True, False))
            continue
        rows.append(_row(f"Z^_{mu} sin derivadas en n", alg.name, True, operator.n_part().is_zero))
        rows.append(_row(f"Z^_{mu} forma cerrada", alg.name, True, operator == zhat_closed_form(alg, mu)))
    return rows


SUMMARY_SHEET = "Resumen"
L41_SHEET = "Rangos L(4,1)"


def certify_all(settings=None, m_max=9, extended=False, prop2_draws=20, property_cases=1000):
    """Tabla resumen de certification_tables"""
    return certification_tables(settings, m_max, extended, prop2_draws, property_cases)[SUMMARY_SHEET]


def certification_tables(settings=None, m_max=9, extended=False, prop2_draws=20, property_cases=1000):
    """
    Ejecuta todas las comprobaciones de aceptación.

    Args:
        m_max: mayor M para T(M), L(M,M-1) y, hasta 8, L(M,1) diagonal
        extended: añade los recuentos de L(M,M-1) para M = 10..13
        prop2_draws: vectores diagonales aleatorios por cada M
        property_cases: casos aleatorios de cada propiedad algebraica

    Returns:
        {SUMMARY_SHEET: DataFrame con columnas claim, target, expected,
        observed, passed; L41_SHEET: tabla de rangos de L(4,1)}
    """
    settings = settings or DEFAULT_SETTINGS
    rows = []

    for M in range(3, m_max + 1):
        alg = build_T(M, settings)
        basis = theorem1_basis(M)
        logger.info("certificando %s", alg.name)
        report = rank_report(alg, settings=settings)
        rows.append(_row("número de invariantes", alg.name, M // 2, report.n_invariants))
        rows.append(_row("Z_mu verificadas", alg.name, len(basis),
                         sum(verify_invariant(alg, e).passed for e in basis)))
        rows.append(_row("número certificado", alg.name, M // 2, count_certified(alg, basis, settings)))
        if M >= 4:
            rows.append(_row("cofactores", alg.name, True, cofactor_annihilation_check(M).passed))

    table = rank_table_L41(seed=settings.seed, settings=settings)
    rows.append(_row("rangos de L(4,1)", "L(4,1)", len(table), int(table['passed'].sum())))
    for record in table.itertuples():
        rows.extend(_zhat_rows(build_L41(int(record.a12), int(record.a23), int(record.a34), settings=settings)))

    for entry in catalog():
        rows.extend(_entry_rows(entry, settings))

    negative = build_L42((1, 0, 0), (0, 1, 0), settings=settings)
    rows.append(_row("número de invariantes", "L(4,2) a=(1,0,0) b=(0,1,0)", 0,
                     rank_report(negative, settings=settings, confirm=False).n_invariants))
    try:
        l42_invariants((1, 0, 0), (0, 1, 0))
        rejected = False
    except ConditionViolated:
        rejected = True
    rows.append(_row("condición rechazada", "L(4,2) a=(1,0,0) b=(0,1,0)", True, rejected))

    for M in range(4, m_max + 1):
        rows.extend(_entry_rows(prop1_invariants(M), settings))

    rng = np.random.default_rng(settings.seed)
    for M in range(4, min(m_max, 8) + 1):
        rows.extend(_diagonal_rows(M, prop2_draws, rng, settings))

    rows.extend(property_suite(property_cases, settings.seed))

    if extended:
        for M in range(10, 14):
            alg = build_L_full_rank(M, settings)
            count = rank_report(alg, settings=settings, confirm=False).n_invariants
            rows.append(_row("número de invariantes", alg.name, (M - 1) // 2, count))

    result = pd.DataFrame(rows, columns=['claim', 'target', 'expected', 'observed', 'passed'])
    logger.info("certificación: %d de %d comprobaciones correctas", int(result['passed'].sum()), len(result))
    return {SUMMARY_SHEET: result, L41_SHEET: table}

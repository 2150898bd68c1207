"""
Comprobaciones aleatorias de propiedades algebraicas del motor.

Cada función devuelve el número de casos que fallan; property_suite las
agrupa en filas con el mismo formato que certify_all.
"""
import logging

import numpy as np

from utils.expressions import VectorField
from utils.lie_algebras import build_L41, build_T, structure_matrix
from utils.polynomials import bareiss_determinant, cofactor_determinant, universe
from utils.rank_calculations import matrix_rank, sample_point

logger = logging.getLogger(__name__)


def random_poly(rng, ring, terms=3, max_degree=2, bound=5):
    """Polinomio con `terms` monomios aleatorios y coeficientes enteros pequeños"""
    result = ring.zero
    gens = ring.gens
    for _ in range(terms):
        coeff = int(rng.integers(-bound, bound, endpoint=True))
        monom = ring.ground_new(coeff)
        for _ in range(int(rng.integers(0, max_degree, endpoint=True))):
            monom *= gens[int(rng.integers(0, len(gens)))]
        result += monom
    return result


def random_field(rng, ring, size=3):
    indices = rng.choice(ring.ngens, size=min(size, ring.ngens), replace=False)
    return VectorField(ring, {int(idx): random_poly(rng, ring) for idx in indices})


def derivation_failures(cases, seed=0):
    """v(pq) = v(p) q + p v(q) sobre el universo de L(4,1)"""
    rng = np.random.default_rng(seed)
    ring = universe(4, 1).ring
    failures = 0
    for _ in range(cases):
        v = random_field(rng, ring)
        p, q = random_poly(rng, ring), random_poly(rng, ring)
        if v.apply_poly(p * q) != v.apply_poly(p) * q + p * v.apply_poly(q):
            failures += 1
    return failures


def _random_algebra(rng):
    if rng.random() < 0.5:
        return build_T(int(rng.integers(3, 5, endpoint=True)))
    while True:
        a12, a23, a34 = (int(value) for value in rng.integers(-3, 3, size=3, endpoint=True))
        if a12 or a23 or a34:
            return build_L41(a12, a23, a34)


def bracket_failures(cases, seed=0):
    """[Y_i, Y_j] = sum_k C_ij^k Y_k en pares aleatorios"""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        alg = _random_algebra(rng)
        i, j = (int(value) for value in rng.choice(alg.dim, size=2, replace=False))
        fields = alg.fields
        expected = VectorField(alg.universe.ring)
        for k, c in alg.bracket(i, j).items():
            expected = expected + fields[k].scale(c)
        if fields[i].commutator(fields[j]) != expected:
            failures += 1
    return failures


def structure_failures(cases, seed=0, bound=20):
    """S antisimétrica y de rango par en puntos aleatorios"""
    rng = np.random.default_rng(seed)
    failures = 0
    for _ in range(cases):
        alg = _random_algebra(rng)
        smatrix = structure_matrix(alg)
        evaluated = smatrix.evaluate(sample_point(rng, alg.dim, bound))
        antisymmetric = evaluated == -evaluated.transpose()
        if not antisymmetric or matrix_rank(evaluated) % 2:
            failures += 1
    return failures


def determinant_failures(cases, seed=0):
    """Laplace frente a Bareiss en matrices polinomiales de tamaño 1 a 4"""
    rng = np.random.default_rng(seed)
    ring = universe(3).ring
    failures = 0
    for _ in range(cases):
        size = int(rng.integers(1, 4, endpoint=True))
        matrix = [[random_poly(rng, ring, terms=2, max_degree=1) for _ in range(size)] for _ in range(size)]
        if cofactor_determinant(matrix, ring) != bareiss_determinant(matrix, ring):
            failures += 1
    return failures


def property_suite(cases=1000, seed=0):
    checks = [
        ("regla de Leibniz", derivation_failures),
        ("corchetes de los campos", bracket_failures),
        ("S antisimétrica y de rango par", structure_failures),
        ("determinante Laplace/Bareiss", determinant_failures),
    ]
    rows = []
    for claim, check in checks:
        failed = check(cases, seed)
        logger.info("%s: %d fallos en %d casos", claim, failed, cases)
        rows.append({
            'claim': claim,
            'target': f"{cases} casos aleatorios",
            'expected': '0',
            'observed': str(failed),
            'passed': failed == 0,
        })
    return rows

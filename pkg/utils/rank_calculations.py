"""
Rango genérico de la matriz de estructura y número de invariantes.

El rango genérico se estima evaluando S en puntos enteros aleatorios y
tomando el máximo de los rangos exactos; cada ensayo usa su propio flujo
aleatorio derivado de una única semilla. Para dimensiones pequeñas se
confirma con eliminación libre de fracciones sobre el anillo de polinomios.
"""
import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd
from sympy import QQ

from utils.config import DEFAULT_SETTINGS
from utils.errors import OddRankError
from utils.lie_algebras import build_L41, structure_matrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class RankReport:
    algebra: str
    dim: int
    rank: int
    trial_ranks: tuple
    symbolic_rank: int = None

    @property
    def n_invariants(self):
        return self.dim - self.rank

    def summary(self):
        return f"n_I = {self.n_invariants} (dim {self.dim}, rank {self.rank})"

    def to_dict(self):
        return {
            'algebra': self.algebra,
            'dim': self.dim,
            'rank': self.rank,
            'n_I': self.n_invariants,
            'trial_ranks': list(self.trial_ranks),
            'symbolic_rank': self.symbolic_rank,
        }


def trial_generators(seed, trials):
    """Generadores numpy independientes, uno por ensayo"""
    children = np.random.SeedSequence(seed).spawn(trials)
    return [np.random.default_rng(child) for child in children]


def sample_point(rng, size, bound):
    """Punto entero uniforme en [-bound, bound]^size como lista de QQ"""
    raw = rng.integers(-bound, bound, size=size, endpoint=True)
    return [QQ(int(value)) for value in raw]


def matrix_rank(matrix):
    """Rango exacto por eliminación de Gauss-Jordan libre de fracciones"""
    if matrix.shape[0] == 0 or matrix.shape[1] == 0:
        return 0
    _, _, pivots = matrix.rref_den(method='FF')
    return len(pivots)


def generic_rank(alg, trials=None, seed=None, settings=None):
    """
    Máximo del rango de S sobre `trials` evaluaciones exactas.

    Returns:
        (rango, tupla de rangos por ensayo)
    """
    settings = settings or DEFAULT_SETTINGS
    trials = settings.trials if trials is None else trials
    if trials < 1:
        raise ValueError(f"trials debe ser al menos 1, se recibió {trials}")
    seed = settings.seed if seed is None else seed
    smatrix = structure_matrix(alg)
    ranks = []
    for trial, rng in enumerate(trial_generators(seed, trials)):
        values = sample_point(rng, alg.dim, settings.sample_bound)
        rank = matrix_rank(smatrix.evaluate(values))
        if rank % 2:
            raise OddRankError(rank, trial)
        ranks.append(rank)
        logger.debug("%s: ensayo %d rango %d", alg.name, trial, rank)
    return max(ranks), tuple(ranks)


def symbolic_rank(alg):
    """Rango sobre el cuerpo de funciones racionales, por eliminación sobre QQ[y]"""
    return matrix_rank(structure_matrix(alg).to_domain_matrix())


def rank_report(alg, trials=None, seed=None, settings=None, confirm=None):
    """
    Informe completo de rango.

    Args:
        confirm: True fuerza la confirmación simbólica, False la omite y None
            la aplica cuando dim <= symbolic_rank_limit
    """
    settings = settings or DEFAULT_SETTINGS
    rank, ranks = generic_rank(alg, trials, seed, settings)
    if confirm is None:
        confirm = alg.dim <= settings.symbolic_rank_limit
    exact = None
    if confirm:
        exact = symbolic_rank(alg)
        if exact < rank:
            raise AssertionError(f"{alg.name}: rango simbólico {exact} menor que el numérico {rank}")
        if exact > rank:
            logger.warning("%s: el rango simbólico %d supera al muestreado %d", alg.name, exact, rank)
            rank = exact
    return RankReport(alg.name, alg.dim, rank, ranks, exact)


def invariant_count(alg, trials=None, seed=None, settings=None, confirm=None):
    """Número de invariantes funcionalmente independientes: dim - rango genérico de S"""
    return rank_report(alg, trials, seed, settings, confirm).n_invariants


def rank_table_L41(draws=20, seed=0, settings=None, bound=9):
    """
    Tabla de rangos de L(4,1) con lambdas nulos: el caso a14 = a23 = 0 y
    `draws` parámetros genéricos aleatorios.
    """
    settings = settings or DEFAULT_SETTINGS
    rng = np.random.default_rng(seed)
    rows = []
    cases = [((1, 0, -1), 4)]
    while len(cases) < draws + 1:
        a12, a23, a34 = (int(value) for value in rng.integers(-bound, bound, size=3, endpoint=True))
        if a12 + a23 + a34 == 0 and a23 == 0:
            continue
        cases.append(((a12, a23, a34), 6))
    for (a12, a23, a34), expected in cases:
        alg = build_L41(a12, a23, a34, settings=settings)
        report = rank_report(alg, seed=seed, settings=settings, confirm=False)
        rows.append({
            'a12': a12,
            'a23': a23,
            'a34': a34,
            'a14': a12 + a23 + a34,
            'rank': report.rank,
            'n_I': report.n_invariants,
            'expected_rank': expected,
            'passed': report.rank == expected,
        })
    return pd.DataFrame(rows)


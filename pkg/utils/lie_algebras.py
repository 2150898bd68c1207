"""
Álgebras de Lie triangulares T(M) y sus extensiones resolubles L(M,f).

La base sigue siempre el orden canónico de las variables: N_{i,i+1}, N_{i,i+2},
..., N_{1M}, seguidos de X_1..X_f. Las constantes de estructura se guardan
de forma dispersa solo para i < j.
"""
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from utils.config import DEFAULT_SETTINGS
from utils.errors import (
    CanonicalFormViolation,
    InvalidSize,
    JacobiViolation,
    NilindependenceViolation,
    ShapeMismatch,
)
from utils.expressions import VectorField
from utils.polynomials import n_pairs, to_fraction, to_qq, universe

logger = logging.getLogger(__name__)


def allowed_slots(M):
    """
    Posiciones fuera de la diagonal que la forma canónica permite en A^alpha:
    A_{12,2M}, A_{j(j+1),1M} para 2 <= j <= M-2 y A_{(M-1)M,1(M-1)}.
    Solo se conservan las que quedan por encima de la diagonal en el orden
    canónico.
    """
    if M < 3:
        return []
    order = {pair: idx for idx, pair in enumerate(n_pairs(M))}
    candidates = [((1, 2), (2, M))]
    candidates += [((j, j + 1), (1, M)) for j in range(2, M - 1)]
    candidates.append(((M - 1, M), (1, M - 1)))
    slots = []
    for row, col in candidates:
        if order[col] > order[row] and (row, col) not in slots:
            slots.append((row, col))
    return slots


@dataclass(frozen=True)
class CharMatrixSpec:
    """
    Matrices características A^alpha de un miembro de L(M,f).

    diagonals[alpha-1] contiene las M-1 entradas libres a^alpha_{i(i+1)}; el
    resto de la diagonal sale de la regla de suma. off_diagonal guarda
    (alpha, fila, columna, valor) solo para los huecos permitidos.
    """
    M: int
    diagonals: tuple
    off_diagonal: tuple = ()
    sigma: tuple = ()

    @classmethod
    def create(cls, M, diagonals, off_diagonal=None, sigma=None):
        diagonals = tuple(tuple(to_fraction(value) for value in row) for row in diagonals)
        entries = []
        for (alpha, row, col), value in sorted((off_diagonal or {}).items()):
            value = to_fraction(value)
            if value != 0:
                entries.append((alpha, tuple(row), tuple(col), value))
        f = len(diagonals)
        if sigma is None:
            sigma_rows = tuple(tuple(Fraction(0) for _ in range(f)) for _ in range(f))
        else:
            sigma_rows = tuple(tuple(to_fraction(value) for value in row) for row in sigma)
        return cls(M=M, diagonals=diagonals, off_diagonal=tuple(entries), sigma=sigma_rows)

    @property
    def f(self):
        return len(self.diagonals)

    def diagonal_entry(self, alpha, i, k):
        """a^alpha_{ik} = suma de a^alpha_{p(p+1)} para p = i..k-1"""
        row = self.diagonals[alpha - 1]
        return sum(row[i - 1:k - 1], Fraction(0))

    def diagonal_vector(self, alpha):
        return [self.diagonal_entry(alpha, i, k) for i, k in n_pairs(self.M)]

    def sigma_entry(self, alpha, beta):
        if not self.sigma:
            return Fraction(0)
        return self.sigma[alpha - 1][beta - 1]

    def off_diagonal_row(self, alpha, pair):
        """Entradas fuera de la diagonal de la fila (i,k) de A^alpha"""
        return [(col, value) for a, row, col, value in self.off_diagonal if a == alpha and row == pair]

    def matrix(self, alpha):
        """A^alpha dispersa como {(fila, columna): valor} con pares (i,k) como índices"""
        entries = {}
        for pair in n_pairs(self.M):
            value = self.diagonal_entry(alpha, *pair)
            if value != 0:
                entries[(pair, pair)] = value
        for a, row, col, value in self.off_diagonal:
            if a == alpha:
                entries[(row, col)] = value
        return entries

    def dense_matrix(self, alpha):
        pairs = n_pairs(self.M)
        sparse = self.matrix(alpha)
        return [[sparse.get((row, col), Fraction(0)) for col in pairs] for row in pairs]

    @property
    def is_diagonal(self):
        return not self.off_diagonal

    def validate(self):
        """
        Comprueba la forma canónica en este orden: tamaños, sigma
        antisimétrica, huecos permitidos, resonancia, regla de sigma,
        conmutación y nilindependencia.
        """
        M, f = self.M, self.f
        if M < 2:
            raise InvalidSize(f"M debe ser al menos 2, se recibió {M}")
        if f < 1:
            raise CanonicalFormViolation("shape", "se necesita al menos una matriz característica")
        if f > M - 1:
            raise CanonicalFormViolation("shape", f"a lo sumo {M - 1} matrices características, se recibieron {f}")
        for alpha, row in enumerate(self.diagonals, start=1):
            if len(row) != M - 1:
                raise CanonicalFormViolation("shape", f"se esperaban {M - 1} entradas diagonales libres", (alpha,))
        if self.sigma:
            if len(self.sigma) != f or any(len(row) != f for row in self.sigma):
                raise CanonicalFormViolation("shape", f"sigma debe ser {f}x{f}")
            for alpha in range(1, f + 1):
                for beta in range(alpha, f + 1):
                    if self.sigma_entry(alpha, beta) != -self.sigma_entry(beta, alpha):
                        raise CanonicalFormViolation("sigma-antisymmetry", "sigma no es antisimétrica", (alpha, beta))

        slots = allowed_slots(M)
        for alpha, row, col, value in self.off_diagonal:
            if not 1 <= alpha <= f:
                raise CanonicalFormViolation("shape", "alfa fuera de rango", (alpha,))
            if (row, col) not in slots:
                raise CanonicalFormViolation("off-diagonal-slot", "entrada fuera de los huecos permitidos", (alpha, row, col))
            for beta in range(1, f + 1):
                if self.diagonal_entry(beta, *row) != self.diagonal_entry(beta, *col):
                    raise CanonicalFormViolation(
                        "resonance",
                        f"a^{beta}_{row} != a^{beta}_{col} con la entrada fuera de la diagonal no nula",
                        (alpha, row, col),
                    )

        if any(value != 0 for row in self.sigma for value in row):
            for gamma in range(1, f + 1):
                if self.diagonal_entry(gamma, 1, M) != 0:
                    raise CanonicalFormViolation("sigma", f"sigma no nula exige a^{gamma}_1M = 0", (gamma,))

        for alpha, beta in itertools.combinations(range(1, f + 1), 2):
            if not _matrices_commute(self.matrix(alpha), self.matrix(beta)):
                raise CanonicalFormViolation("commutation", "las matrices características no conmutan", (alpha, beta))

        if not _diagonals_independent([self.diagonal_vector(alpha) for alpha in range(1, f + 1)]):
            raise NilindependenceViolation("alguna combinación lineal de las A^alpha es nilpotente")
        return self


def _sparse_product(a, b):
    result = {}
    for (row, mid), value in a.items():
        for (mid_b, col), value_b in b.items():
            if mid == mid_b:
                result[(row, col)] = result.get((row, col), Fraction(0)) + value * value_b
    return {key: value for key, value in result.items() if value != 0}


def _matrices_commute(a, b):
    return _sparse_product(a, b) == _sparse_product(b, a)


def _exact_rank(rows):
    if not rows or not rows[0]:
        return 0
    matrix = DomainMatrix([[to_qq(value) for value in row] for row in rows], (len(rows), len(rows[0])), QQ)
    return matrix.rank()


def _diagonals_independent(vectors):
    return _exact_rank(vectors) == len(vectors)


def nilindependent(mats):
    """
    True si ninguna combinación lineal no trivial de las matrices es nilpotente.

    Para matrices triangulares superiores equivale a la independencia lineal
    de sus diagonales.
    """
    if not mats:
        return True
    size = len(mats[0])
    diagonals = []
    for index, mat in enumerate(mats):
        if len(mat) != size or any(len(row) != size for row in mat):
            raise ShapeMismatch(f"la matriz {index} no es cuadrada de tamaño {size}")
        for r in range(size):
            for c in range(r):
                if to_fraction(mat[r][c]) != 0:
                    raise ShapeMismatch(f"la matriz {index} no es triangular superior")
        diagonals.append([to_fraction(mat[r][r]) for r in range(size)])
    return _diagonals_independent(diagonals)


@dataclass(frozen=True, eq=False)
class LieAlgebra:
    """
    Álgebra de Lie con constantes de estructura exactas.

    structure: {(i, j): ((k, C_ij^k), ...)} para i < j, solo términos no nulos
    """
    M: int
    f: int
    name: str
    structure: dict = field(repr=False)
    char_spec: CharMatrixSpec = None

    @property
    def universe(self):
        return universe(self.M, self.f)

    @property
    def dim(self):
        return self.M * (self.M - 1) // 2 + self.f

    @property
    def variables(self):
        return self.universe.variables

    @property
    def basis(self):
        return [var.label for var in self.variables]

    def label_index(self, label):
        try:
            return self.basis.index(label)
        except ValueError:
            raise ShapeMismatch(f"{label!r} no es un elemento de la base de {self.name}") from None

    def bracket(self, i, j):
        """[e_i, e_j] como diccionario {k: coeficiente}"""
        if i == j:
            return {}
        if i < j:
            return dict(self.structure.get((i, j), ()))
        return {k: -c for k, c in self.structure.get((j, i), ())}

    def bracket_vectors(self, u, v):
        result = {}
        for i, cu in u.items():
            for j, cv in v.items():
                for k, c in self.bracket(i, j).items():
                    result[k] = result.get(k, Fraction(0)) + cu * cv * c
        return {k: c for k, c in result.items() if c != 0}

    def jacobiator(self, i, j, k):
        ei, ej, ek = {i: Fraction(1)}, {j: Fraction(1)}, {k: Fraction(1)}
        total = {}
        for a, b, c in ((ei, ej, ek), (ej, ek, ei), (ek, ei, ej)):
            for idx, value in self.bracket_vectors(self.bracket_vectors(a, b), c).items():
                total[idx] = total.get(idx, Fraction(0)) + value
        return {idx: value for idx, value in total.items() if value != 0}

    def validate_jacobi(self, settings=None):
        """Triples exhaustivos hasta jacobi_exhaustive_limit, aleatorios por encima"""
        settings = settings or DEFAULT_SETTINGS
        dim = self.dim
        if dim < 3:
            return self
        if dim <= settings.jacobi_exhaustive_limit:
            triples = itertools.combinations(range(dim), 3)
        else:
            rng = np.random.default_rng(settings.seed)
            triples = [tuple(sorted(rng.choice(dim, size=3, replace=False).tolist()))
                       for _ in range(settings.jacobi_random_triples)]
            logger.debug("%s: Jacobi sobre %d triples aleatorios", self.name, len(triples))
        for triple in triples:
            residual = self.jacobiator(*triple)
            if residual:
                labels = tuple(self.basis[idx] for idx in triple)
                raise JacobiViolation(labels, {self.basis[k]: str(v) for k, v in residual.items()})
        return self

    @cached_property
    def fields(self):
        return coadjoint_fields(self)

    def field_for(self, label):
        return self.fields[self.label_index(label)]


def _t_brackets(M):
    """Corchetes [N_ik, N_ab] = delta_ka N_ib - delta_bi N_ak en índices canónicos"""
    pairs = n_pairs(M)
    index = {pair: idx for idx, pair in enumerate(pairs)}
    structure = {}
    for (i, k), (a, b) in itertools.combinations(pairs, 2):
        terms = {}
        if k == a:
            terms[index[(i, b)]] = terms.get(index[(i, b)], Fraction(0)) + 1
        if b == i:
            terms[index[(a, k)]] = terms.get(index[(a, k)], Fraction(0)) - 1
        terms = {key: value for key, value in terms.items() if value != 0}
        if terms:
            structure[(index[(i, k)], index[(a, b)])] = tuple(sorted(terms.items()))
    return structure


def build_T(M, settings=None):
    """Álgebra nilpotente de matrices triangulares estrictas M x M"""
    if M < 2:
        raise InvalidSize(f"T(M) necesita M >= 2, se recibió {M}")
    alg = LieAlgebra(M=M, f=0, name=f"T({M})", structure=_t_brackets(M))
    return alg.validate_jacobi(settings)


def build_L(M, spec, settings=None, name=None):
    """
    Extensión resoluble L(M,f) con [X^a, N] = A^a N y [X^a, X^b] = sigma^{ab} N_1M.
    """
    if M < 2:
        raise InvalidSize(f"L(M,f) necesita M >= 2, se recibió {M}")
    if spec.M != M:
        raise CanonicalFormViolation("shape", f"la especificación es para M={spec.M}, no {M}")
    spec.validate()
    f = spec.f
    pairs = n_pairs(M)
    index = {pair: idx for idx, pair in enumerate(pairs)}
    r = len(pairs)
    structure = dict(_t_brackets(M))
    for alpha in range(1, f + 1):
        x_index = r + alpha - 1
        rows = {}
        for (row, col), value in spec.matrix(alpha).items():
            rows.setdefault(row, []).append((index[col], -value))
        for row, terms in rows.items():
            structure[(index[row], x_index)] = tuple(sorted(terms))
    top = index[(1, M)]
    for alpha, beta in itertools.combinations(range(1, f + 1), 2):
        value = spec.sigma_entry(alpha, beta)
        if value != 0:
            structure[(r + alpha - 1, r + beta - 1)] = ((top, value),)
    alg = LieAlgebra(M=M, f=f, name=name or f"L({M},{f})", structure=structure, char_spec=spec)
    return alg.validate_jacobi(settings)


def full_rank_spec(M):
    """a^alpha_{p(p+1)} = delta_{alpha,p}: las M-1 matrices diagonales de rango máximo"""
    diagonals = [[1 if p == alpha else 0 for p in range(1, M)] for alpha in range(1, M)]
    return CharMatrixSpec.create(M, diagonals)


def build_L_full_rank(M, settings=None):
    if M < 3:
        raise InvalidSize(f"L(M,M-1) necesita M >= 3, se recibió {M}")
    return build_L(M, full_rank_spec(M), settings)


def build_L41(a12=1, a23=0, a34=-1, l1=0, l2=0, l3=0, settings=None):
    """L(4,1) con matriz característica de diagonal (a12, a23, a34) y lambdas"""
    off = {
        (1, (1, 2), (2, 4)): l1,
        (1, (2, 3), (1, 4)): l2,
        (1, (3, 4), (1, 3)): l3,
    }
    spec = CharMatrixSpec.create(4, [[a12, a23, a34]], off)
    return build_L(4, spec, settings)


def build_L42(a=(1, 0, -1), b=(0, 1, 0), lambdas=(0, 0, 0), sigma=0, settings=None):
    """L(4,2): A^1 diagonal con (a12, a23, a34), A^2 con (b12, b23, b34) y lambdas"""
    l1, l2, l3 = lambdas
    off = {
        (2, (1, 2), (2, 4)): l1,
        (2, (2, 3), (1, 4)): l2,
        (2, (3, 4), (1, 3)): l3,
    }
    sigma = to_fraction(sigma)
    spec = CharMatrixSpec.create(4, [list(a), list(b)], off, [[0, sigma], [-sigma, 0]])
    return build_L(4, spec, settings)


def build_diagonal_L(M, a, settings=None):
    """L(M,1) diagonal con entradas libres a_{i(i+1)}"""
    if len(a) != M - 1:
        raise CanonicalFormViolation("shape", f"se esperaban {M - 1} parámetros diagonales")
    return build_L(M, CharMatrixSpec.create(M, [list(a)]), settings)


def coadjoint_fields(alg):
    """
    Un campo por elemento de la base: Y_i = sum_j (sum_k C_ij^k y_k) d/dy_j.

    Cuando el álgebra es T(M) o L(M,f) con especificación, el resultado se
    compara con las formas cerradas de closed_form_fields.
    """
    uni = alg.universe
    ring = uni.ring
    gens = ring.gens
    coeffs = [dict() for _ in range(alg.dim)]
    for (i, j), terms in alg.structure.items():
        entry = ring.zero
        for k, c in terms:
            entry += gens[k] * to_qq(c)
        coeffs[i][j] = coeffs[i].get(j, ring.zero) + entry
        coeffs[j][i] = coeffs[j].get(i, ring.zero) - entry
    fields = [VectorField(ring, c) for c in coeffs]
    if alg.f == 0 or alg.char_spec is not None:
        expected = closed_form_fields(alg)
        for label, got, want in zip(alg.basis, fields, expected):
            if got != want:
                raise AssertionError(f"{alg.name}: el campo de {label} no coincide con su forma cerrada")
    return fields


def closed_form_fields(alg):
    """
    Formas cerradas de los operadores de la representación coadjunta.

    N_ik = sum_{b>k} n_ib d/dn_kb - sum_{a<i} n_ak d/dn_ai
           - sum_alpha (a^alpha_ik n_ik + Gamma^alpha_ik) d/dx^alpha
    X^alpha = sum_ik (a^alpha_ik n_ik + Gamma^alpha_ik) d/dn_ik
              + sum_beta sigma^{alpha beta} n_1M d/dx^beta
    """
    uni = alg.universe
    M, f = alg.M, alg.f
    spec = alg.char_spec
    fields = []

    def weight(alpha, pair):
        term = uni.n(*pair) * to_qq(spec.diagonal_entry(alpha, *pair))
        for col, value in spec.off_diagonal_row(alpha, pair):
            term += uni.n(*col) * to_qq(value)
        return term

    for i, k in n_pairs(M):
        coeffs = {}
        for b in range(k + 1, M + 1):
            coeffs[uni.index_of_n(k, b)] = uni.n(i, b)
        for a in range(1, i):
            idx = uni.index_of_n(a, i)
            coeffs[idx] = coeffs.get(idx, uni.ring.zero) - uni.n(a, k)
        for alpha in range(1, f + 1):
            coeffs[uni.r + alpha - 1] = -weight(alpha, (i, k))
        fields.append(VectorField(uni.ring, coeffs))
    for alpha in range(1, f + 1):
        coeffs = {}
        for pair in n_pairs(M):
            coeffs[uni.index_of_n(*pair)] = weight(alpha, pair)
        for beta in range(1, f + 1):
            value = spec.sigma_entry(alpha, beta)
            if value != 0:
                coeffs[uni.r + beta - 1] = uni.n(1, M) * to_qq(value)
        fields.append(VectorField(uni.ring, coeffs))
    return fields


@dataclass(frozen=True, eq=False)
class StructureMatrix:
    """Matriz antisimétrica S_ij = sum_k C_ij^k y_k con entradas polinomiales"""
    algebra: LieAlgebra
    entries: list = field(repr=False)

    @property
    def size(self):
        return len(self.entries)

    def is_antisymmetric(self):
        size = self.size
        return all(self.entries[i][j] == -self.entries[j][i] for i in range(size) for j in range(size))

    def to_domain_matrix(self):
        uni = self.algebra.universe
        return DomainMatrix([list(row) for row in self.entries], (self.size, self.size), uni.domain)

    def evaluate(self, values):
        """Valores QQ de S en un punto; values indexado por variable"""
        size = self.size
        rows = [[QQ.zero] * size for _ in range(size)]
        for (i, j), terms in self.algebra.structure.items():
            value = QQ.zero
            for k, c in terms:
                value += to_qq(c) * values[k]
            rows[i][j] = value
            rows[j][i] = -value
        return DomainMatrix(rows, (size, size), QQ)


def structure_matrix(alg):
    ring = alg.universe.ring
    gens = ring.gens
    size = alg.dim
    entries = [[ring.zero] * size for _ in range(size)]
    for (i, j), terms in alg.structure.items():
        entry = ring.zero
        for k, c in terms:
            entry += gens[k] * to_qq(c)
        entries[i][j] = entry
        entries[j][i] = -entry
    matrix = StructureMatrix(alg, entries)
    if not matrix.is_antisymmetric():
        raise AssertionError(f"{alg.name}: la matriz de estructura no es antisimétrica")
    return matrix


def check_field_brackets(alg, settings=None):
    """
    Verifica [Y_i, Y_j] = sum_k C_ij^k Y_k como conmutadores de derivaciones.

    Devuelve la lista de pares que fallan (vacía si todo cuadra).
    """
    settings = settings or DEFAULT_SETTINGS
    fields = alg.fields
    dim = alg.dim
    if dim <= settings.bracket_check_limit:
        pairs = list(itertools.combinations(range(dim), 2))
    else:
        rng = np.random.default_rng(settings.seed)
        pairs = []
        for _ in range(max(1, settings.jacobi_random_triples // 5)):
            i, j = sorted(rng.choice(dim, size=2, replace=False).tolist())
            pairs.append((i, j))
    failures = []
    ring = alg.universe.ring
    for i, j in pairs:
        expected = VectorField(ring)
        for k, c in alg.bracket(i, j).items():
            expected = expected + fields[k].scale(c)
        if fields[i].commutator(fields[j]) != expected:
            failures.append((alg.basis[i], alg.basis[j]))
    return failures

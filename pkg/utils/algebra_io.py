"""
Lectura y escritura de álgebras en JSON.

Formato (orden de claves fijo):

    {"M": 4, "f": 1,
     "basis": ["N_1_2", ..., "X_1"],
     "brackets": [{"i": "N_1_2", "j": "N_2_3", "terms": [{"k": "N_1_3", "c": "1"}]}],
     "char_matrices": [{"diagonal": ["1", "0", "-1"],
                        "off_diagonal": [{"row": "N_2_3", "col": "N_1_4", "value": "-1"}]}],
     "sigma": [["0"]]}

char_matrices y sigma son opcionales; si están presentes el álgebra se
reconstruye a partir de ellas y los corchetes deben coincidir.
"""
import json
import logging
import os
from fractions import Fraction

from utils.errors import AlgebraFormatError
from utils.lie_algebras import build_L, build_T, CharMatrixSpec, LieAlgebra
from utils.polynomials import format_rational, universe

logger = logging.getLogger(__name__)


def _brackets_to_list(alg):
    basis = alg.basis
    items = []
    for (i, j), terms in sorted(alg.structure.items()):
        items.append({
            'i': basis[i],
            'j': basis[j],
            'terms': [{'k': basis[k], 'c': format_rational(c)} for k, c in terms],
        })
    return items


def _pair_label(pair):
    return f"N_{pair[0]}_{pair[1]}"


def char_spec_to_dict(spec):
    matrices = []
    for alpha in range(1, spec.f + 1):
        off = [
            {'row': _pair_label(row), 'col': _pair_label(col), 'value': format_rational(value)}
            for a, row, col, value in spec.off_diagonal if a == alpha
        ]
        matrices.append({
            'diagonal': [format_rational(value) for value in spec.diagonals[alpha - 1]],
            'off_diagonal': off,
        })
    sigma = [[format_rational(spec.sigma_entry(a, b)) for b in range(1, spec.f + 1)] for a in range(1, spec.f + 1)]
    return matrices, sigma


def algebra_to_dict(alg):
    data = {
        'M': alg.M,
        'f': alg.f,
        'basis': list(alg.basis),
        'brackets': _brackets_to_list(alg),
    }
    if alg.char_spec is not None:
        data['char_matrices'], data['sigma'] = char_spec_to_dict(alg.char_spec)
    return data


def algebra_to_json(alg):
    return json.dumps(algebra_to_dict(alg), ensure_ascii=False, indent=2)


def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise AlgebraFormatError(f"JSON mal formado: {exc.msg}", exc.lineno, exc.colno) from None


def _rational(value, where):
    try:
        if isinstance(value, bool) or not isinstance(value, (int, str)):
            raise ValueError(value)
        return Fraction(value.strip() if isinstance(value, str) else value)
    except (ValueError, ZeroDivisionError):
        raise AlgebraFormatError(f"{where}: {value!r} no es un racional p/q") from None


def _require(data, key, kind):
    if key not in data:
        raise AlgebraFormatError(f"falta la clave {key!r}")
    value = data[key]
    if not isinstance(value, kind) or isinstance(value, bool):
        raise AlgebraFormatError(f"la clave {key!r} tiene un tipo inválido")
    return value


def _parse_pair(label, where):
    parts = label.split('_') if isinstance(label, str) else []
    if len(parts) != 3 or parts[0] != 'N' or not parts[1].isdigit() or not parts[2].isdigit():
        raise AlgebraFormatError(f"{where}: etiqueta {label!r} no es de la forma N_i_k")
    return int(parts[1]), int(parts[2])


def char_spec_from_dict(M, matrices, sigma=None):
    if not isinstance(matrices, list) or not matrices:
        raise AlgebraFormatError("char_matrices debe ser una lista no vacía")
    diagonals = []
    off_diagonal = {}
    for alpha, matrix in enumerate(matrices, start=1):
        if not isinstance(matrix, dict):
            raise AlgebraFormatError(f"char_matrices[{alpha - 1}] debe ser un objeto")
        diagonal = _require(matrix, 'diagonal', list)
        diagonals.append([_rational(value, f"A^{alpha} diagonal") for value in diagonal])
        for entry in matrix.get('off_diagonal', []):
            if not isinstance(entry, dict):
                raise AlgebraFormatError(f"A^{alpha}: entrada fuera de la diagonal inválida")
            row = _parse_pair(entry.get('row'), f"A^{alpha}")
            col = _parse_pair(entry.get('col'), f"A^{alpha}")
            off_diagonal[(alpha, row, col)] = _rational(entry.get('value'), f"A^{alpha} {row},{col}")
    sigma_rows = None
    if sigma is not None:
        if not isinstance(sigma, list) or any(not isinstance(row, list) for row in sigma):
            raise AlgebraFormatError("sigma debe ser una matriz f x f")
        sigma_rows = [[_rational(value, "sigma") for value in row] for row in sigma]
    return CharMatrixSpec.create(M, diagonals, off_diagonal, sigma_rows)


def _structure_from_list(brackets, basis):
    index = {label: idx for idx, label in enumerate(basis)}
    structure = {}
    for entry in brackets:
        if not isinstance(entry, dict):
            raise AlgebraFormatError("cada corchete debe ser un objeto")
        try:
            i, j = index[entry['i']], index[entry['j']]
            terms = {index[term['k']]: _rational(term['c'], f"[{entry['i']}, {entry['j']}]")
                     for term in entry.get('terms', [])}
        except (KeyError, TypeError) as exc:
            raise AlgebraFormatError(f"corchete con etiqueta desconocida o incompleto: {exc}") from None
        if i > j:
            i, j = j, i
            terms = {k: -c for k, c in terms.items()}
        terms = {k: c for k, c in terms.items() if c != 0}
        if terms:
            structure[(i, j)] = tuple(sorted(terms.items()))
    return structure


def algebra_from_dict(data, settings=None):
    """Reconstruye y valida un álgebra; la forma canónica y Jacobi se comprueban"""
    if not isinstance(data, dict):
        raise AlgebraFormatError("el documento debe ser un objeto JSON")
    M = _require(data, 'M', int)
    f = _require(data, 'f', int)
    if M < 2 or f < 0:
        raise AlgebraFormatError(f"tamaños inválidos M={M}, f={f}")
    basis = _require(data, 'basis', list)
    expected_basis = [var.label for var in universe(M, f).variables]
    if basis != expected_basis:
        raise AlgebraFormatError("la base no sigue el orden canónico N_{i,i+1}, ..., N_1M, X_1..X_f")
    brackets = _require(data, 'brackets', list)
    structure = _structure_from_list(brackets, basis)
    if 'char_matrices' in data:
        spec = char_spec_from_dict(M, data['char_matrices'], data.get('sigma'))
        if spec.f != f:
            raise AlgebraFormatError(f"char_matrices define {spec.f} matrices pero f={f}")
        alg = build_L(M, spec, settings)
    elif f == 0:
        alg = build_T(M, settings)
    else:
        logger.info("álgebra L(%d,%d) sin char_matrices: se usan los corchetes tal cual", M, f)
        alg = LieAlgebra(M=M, f=f, name=f"L({M},{f})", structure=structure)
        return alg.validate_jacobi(settings)
    if brackets and structure != alg.structure:
        raise AlgebraFormatError("los corchetes no coinciden con las matrices características")
    return alg


def algebra_from_json(text, settings=None):
    return algebra_from_dict(_loads(text), settings)


def load_algebra(path, settings=None):
    with open(path, 'r', encoding='utf-8') as handle:
        return algebra_from_json(handle.read(), settings)


def save_algebra(alg, path):
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(algebra_to_json(alg))
        handle.write('\n')
    logger.info("álgebra %s guardada en %s", alg.name, path)


def load_char_spec(path, M):
    """
    Lee un fichero de especificación para `L M f SPEC_FILE`: un álgebra
    completa o solo {"char_matrices": [...], "sigma": [...]}.
    """
    with open(path, 'r', encoding='utf-8') as handle:
        data = _loads(handle.read())
    if not isinstance(data, dict) or 'char_matrices' not in data:
        raise AlgebraFormatError("el fichero no contiene char_matrices")
    return char_spec_from_dict(M, data['char_matrices'], data.get('sigma'))

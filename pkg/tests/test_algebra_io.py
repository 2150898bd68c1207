import json

import pytest

from utils.errors import AlgebraFormatError, CanonicalFormViolation, JacobiViolation
from utils.algebra_io import (
    algebra_from_dict,
    algebra_from_json,
    algebra_to_dict,
    algebra_to_json,
    load_algebra,
    load_char_spec,
    save_algebra,
)
from utils.lie_algebras import build_L41, build_L42


def test_key_order(l41_special):
    data = algebra_to_dict(l41_special)
    assert list(data) == ['M', 'f', 'basis', 'brackets', 'char_matrices', 'sigma']
    assert data['basis'][-1] == 'X_1'
    assert data['char_matrices'][0]['diagonal'] == ['1', '0', '-1']


def test_nilpotent_has_no_char_matrices(t4):
    data = algebra_to_dict(t4)
    assert 'char_matrices' not in data
    first = data['brackets'][0]
    assert first == {'i': 'N_1_2', 'j': 'N_2_3', 'terms': [{'k': 'N_1_3', 'c': '1'}]}


def test_rebuild_from_json():
    alg = build_L42((1, 0, -1), (0, 1, 0), (0, 2, 0))
    rebuilt = algebra_from_json(algebra_to_json(alg))
    assert rebuilt.structure == alg.structure
    assert rebuilt.char_spec == alg.char_spec


def test_char_matrices_win_over_missing_brackets(l41_special):
    data = algebra_to_dict(l41_special)
    data['brackets'] = []
    assert algebra_from_dict(data).structure == l41_special.structure


def test_brackets_must_match_char_matrices(l41_special):
    data = algebra_to_dict(l41_special)
    data['brackets'][0]['terms'][0]['c'] = '2'
    with pytest.raises(AlgebraFormatError):
        algebra_from_dict(data)


def test_non_canonical_basis(t4):
    data = algebra_to_dict(t4)
    data['basis'] = list(reversed(data['basis']))
    with pytest.raises(AlgebraFormatError):
        algebra_from_dict(data)


def test_malformed_json_reports_position():
    with pytest.raises(AlgebraFormatError) as excinfo:
        algebra_from_json('{"M": 4,\n "f": }')
    assert excinfo.value.line == 2


def test_bad_rational():
    data = {'M': 4, 'f': 1, 'basis': [], 'brackets': []}
    data['basis'] = algebra_to_dict(build_L41())['basis']
    data['char_matrices'] = [{'diagonal': ['1', 'uno', '-1']}]
    with pytest.raises(AlgebraFormatError):
        algebra_from_dict(data)


def test_missing_key():
    with pytest.raises(AlgebraFormatError):
        algebra_from_dict({'M': 4})


def test_raw_brackets_are_checked_for_jacobi():
    data = algebra_to_dict(build_L41())
    del data['char_matrices']
    del data['sigma']
    data['brackets'].append({'i': 'N_1_2', 'j': 'N_1_3', 'terms': [{'k': 'N_2_3', 'c': '1'}]})
    with pytest.raises(JacobiViolation):
        algebra_from_dict(data)


def test_raw_brackets_without_char_matrices():
    alg = build_L41(1, 1, 0)
    data = algebra_to_dict(alg)
    del data['char_matrices']
    del data['sigma']
    rebuilt = algebra_from_dict(data)
    assert rebuilt.structure == alg.structure
    assert rebuilt.char_spec is None


def test_canonical_form_is_enforced():
    data = algebra_to_dict(build_L41())
    data['char_matrices'][0]['off_diagonal'] = [{'row': 'N_1_2', 'col': 'N_1_3', 'value': '1'}]
    with pytest.raises(CanonicalFormViolation):
        algebra_from_dict(data)


def test_save_and_load(tmp_path, l41_special):
    path = tmp_path / "algebras" / "l41.json"
    save_algebra(l41_special, str(path))
    assert load_algebra(str(path)).structure == l41_special.structure
    spec = load_char_spec(str(path), 4)
    assert spec == l41_special.char_spec


def test_spec_file_without_char_matrices(tmp_path):
    path = tmp_path / "vacio.json"
    path.write_text(json.dumps({'sigma': []}), encoding='utf-8')
    with pytest.raises(AlgebraFormatError):
        load_char_spec(str(path), 4)

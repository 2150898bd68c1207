import pytest

from utils.polynomials import universe
from utils.property_checks import (
    bracket_failures,
    derivation_failures,
    determinant_failures,
    property_suite,
    random_field,
    random_poly,
    structure_failures,
)


def test_random_poly_lives_in_ring(rng):
    ring = universe(4, 1).ring
    p = random_poly(rng, ring)
    assert p.ring == ring
    assert all(sum(monom) <= 2 for monom in p.keys())


def test_random_field_size(rng):
    ring = universe(3).ring
    assert len(random_field(rng, ring, size=2).items()) <= 2


def test_leibniz_rule():
    assert derivation_failures(100, seed=1) == 0


def test_field_brackets():
    assert bracket_failures(100, seed=2) == 0


def test_structure_matrix_properties():
    assert structure_failures(100, seed=3) == 0


def test_determinant_methods_agree():
    assert determinant_failures(100, seed=4) == 0


def test_suite_rows():
    rows = property_suite(cases=10, seed=5)
    assert [row['passed'] for row in rows] == [True] * 4
    assert rows[0]['target'] == "10 casos aleatorios"


@pytest.mark.slow
def test_suite_full_size():
    assert all(row['passed'] for row in property_suite(cases=1000))

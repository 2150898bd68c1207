from fractions import Fraction

import numpy as np
import pytest

from utils.errors import ConditionViolated, DegenerateExponent, InvalidSize, RangeError, ResidualNDerivative
from utils.expression_parser import parse_expression
from utils.expressions import VectorField
from utils.invariant_catalog import (
    catalog,
    coprime_exponents,
    Family,
    l41_log,
    l41_polynomial,
    l41_power,
    l42_invariants,
    l42_log,
    l42_power_free,
    l42_sigma,
    lemma_invariants,
    nilpotent_invariants,
    prop1_invariants,
    prop2_invariants,
    theorem1_basis,
    W,
    Z,
    zhat_closed_form,
    zhat_operator,
)
from utils.lie_algebras import build_L_full_rank
from utils.polynomials import is_homogeneous, universe, VarId
from utils.verification import verify_invariant


class _ShiftedFields:
    """Álgebra mínima cuyo N_1_4 conserva una derivada en n_1_2"""
    M = 4
    universe = universe(4)

    def field_for(self, label):
        return VectorField(self.universe.ring, {0: self.universe.n(1, 4)})


def test_corner_determinants():
    uni = universe(4)
    assert Z(4, 1) == uni.n(1, 4)
    assert Z(4, 2) == uni.n(1, 3) * uni.n(2, 4) - uni.n(1, 4) * uni.n(2, 3)
    assert is_homogeneous(Z(6, 3), 3)


def test_bordered_determinants():
    uni = universe(5)
    assert W(5, 1, 1) == uni.n(1, 2) * uni.n(2, 5)
    assert W(5, 1, 3) == uni.n(1, 4) * uni.n(4, 5)


def test_determinant_ranges():
    with pytest.raises(RangeError):
        Z(4, 3)
    with pytest.raises(InvalidSize):
        Z(1, 1)
    with pytest.raises(RangeError):
        W(5, 1, 4)
    with pytest.raises(RangeError):
        W(4, 2, 1)
    with pytest.raises(InvalidSize):
        W(2, 1, 1)


def test_theorem1_basis_size():
    assert len(theorem1_basis(7)) == 3
    assert nilpotent_invariants(5).expected_count == 2


@pytest.mark.parametrize('values,expected', [
    ([2, -3], (2, -3)),
    ([Fraction(1, 2), Fraction(-3, 4)], (2, -3)),
    ([-2, 4], (1, -2)),
    ([0, -3], (0, 1)),
])
def test_coprime_exponents(values, expected):
    assert coprime_exponents(values) == expected


def test_coprime_exponents_zero_vector():
    with pytest.raises(ValueError):
        coprime_exponents([0, 0])


def test_l41_power_exponents():
    entry = l41_power(1, 1, 0)
    field = entry.algebra.universe.field
    assert entry.invariants[0].rational == field.new(Z(4, 2, 1) ** 2, Z(4, 1, 1) ** 3)
    assert verify_invariant(entry.algebra, entry.invariants[0]).passed


def test_l41_power_rejects_special_case():
    with pytest.raises(ConditionViolated):
        l41_power(1, 0, -1)


def test_l41_polynomial():
    entry = l41_polynomial(2)
    assert entry.expected_count == 3
    assert all(verify_invariant(entry.algebra, e).passed for e in entry.invariants)
    with pytest.raises(ConditionViolated):
        l41_polynomial(0)


def test_printed_log_form():
    entry = l41_log()
    text = "n_1_3*n_2_4/n_1_4^2 - n_2_3/n_1_4 - ln(n_1_4)"
    expr = parse_expression(text, entry.algebra.universe)
    assert verify_invariant(entry.algebra, expr).passed
    assert verify_invariant(entry.algebra, entry.invariants[0]).passed
    wrong_sign = l41_log(l2=1)
    assert not verify_invariant(wrong_sign.algebra, expr).passed


def test_l41_log_requires_lambda():
    with pytest.raises(ConditionViolated):
        l41_log(l2=0)


def test_l42_conditions():
    with pytest.raises(ConditionViolated) as excinfo:
        l42_invariants((1, 0, 0), (0, 1, 0))
    assert excinfo.value.condition == "b23(a12+a34) - a23(b12+b34) = 0"
    with pytest.raises(ConditionViolated) as excinfo:
        l42_invariants((1, 1, 0), (0, 1, 1), l2=1)
    assert excinfo.value.condition == "a14*lambda2 = 0"


def test_l42_general_form():
    entry = l42_invariants((1, 1, 0), (0, 1, 1))
    assert entry.family is Family.L42_POWER
    assert all(verify_invariant(entry.algebra, e).passed for e in entry.invariants)


def test_l42_dispatch_to_normalized_forms():
    assert l42_invariants((1, 0, -1), (0, 1, 0), l2=2).family is Family.L42_LOG
    assert l42_invariants((1, 0, -1), (0, 1, -1), sigma=3).family is Family.L42_SIGMA
    with pytest.raises(ConditionViolated):
        l42_invariants((2, 0, -2), (0, 1, 0), l2=1)


def test_l42_power_free_rejects_degenerate():
    with pytest.raises(ConditionViolated):
        l42_power_free(-1)


def test_full_rank_family():
    entry = prop1_invariants(6)
    assert entry.expected_count == 2
    assert all(verify_invariant(entry.algebra, e).passed for e in entry.invariants)


def test_diagonal_generic_exponents():
    entry = prop2_invariants(5, (1, 1, 1, 1))
    assert entry.family is Family.DIAGONAL_GENERIC
    field = entry.algebra.universe.field
    assert entry.invariants[0].rational == field.new(Z(5, 2, 1) ** 2, Z(5, 1, 1) ** 3)


def test_diagonal_degenerate_exponent():
    with pytest.raises(DegenerateExponent):
        prop2_invariants(5, (1, -1, 0, 1))


def test_diagonal_resonant():
    entry = prop2_invariants(6, (1, 2, 0, -2, -1))
    assert entry.family is Family.DIAGONAL_RESONANT
    assert len(entry.invariants) == 4
    assert all(verify_invariant(entry.algebra, e).passed for e in entry.invariants)


def test_zhat_on_log_family():
    alg = l41_log().algebra
    uni = alg.universe
    expected_2 = VectorField(uni.ring, {uni.r: -Z(4, 2, 1) * 2 - uni.n(1, 4) ** 2})
    assert zhat_operator(alg, 2) == expected_2
    assert zhat_closed_form(alg, 2) == expected_2
    assert zhat_operator(alg, 1) == VectorField(uni.ring, {uni.r: -uni.n(1, 4)})


def test_zhat_without_extension(t4):
    assert zhat_operator(t4, 2).is_zero
    assert zhat_closed_form(t4, 1).is_zero


def test_zhat_residual_is_reported():
    with pytest.raises(ResidualNDerivative) as excinfo:
        zhat_operator(_ShiftedFields(), 1)
    assert excinfo.value.mu == 1


def test_lemma_invariants_lookup():
    assert lemma_invariants('l41-log', a23=2).parameters['a23'] == 2
    with pytest.raises(ValueError):
        lemma_invariants('full-rank')


def test_catalog_entries_verify():
    for entry in catalog(max_full_rank=4):
        for expr in entry.invariants:
            assert verify_invariant(entry.algebra, expr).passed, (entry.family, expr.to_text())
        assert entry.to_dict()['algebra'] == entry.algebra.name


def test_zhat_closed_forms_of_full_rank_four():
    alg = build_L_full_rank(4)
    uni = alg.universe
    z1, z2 = Z(4, 1, 3), Z(4, 2, 3)
    expected_1 = VectorField.from_variables(uni, {VarId.x(1): -z1, VarId.x(2): -z1, VarId.x(3): -z1})
    expected_2 = VectorField.from_variables(uni, {VarId.x(1): -z2, VarId.x(2): -z2 * 2, VarId.x(3): -z2})
    assert zhat_operator(alg, 1) == expected_1
    assert zhat_operator(alg, 2) == expected_2
    assert zhat_closed_form(alg, 1) == expected_1
    assert zhat_closed_form(alg, 2) == expected_2


def _random_fraction(rng, excluded=(0,)):
    while True:
        value = Fraction(int(rng.integers(-9, 9, endpoint=True)), int(rng.integers(1, 9, endpoint=True)))
        if value not in excluded:
            return value


FAMILY_DRAWS = {
    'l41-power': lambda rng: l41_power(*(_random_fraction(rng) for _ in range(3))),
    'l41-log': lambda rng: l41_log(a23=_random_fraction(rng), a12=_random_fraction(rng), l2=_random_fraction(rng)),
    'l42-sigma': lambda rng: l42_sigma(_random_fraction(rng)),
    'l42-log': lambda rng: l42_log(_random_fraction(rng)),
    'l42-power-free': lambda rng: l42_power_free(_random_fraction(rng, excluded=(0, -1))),
}


@pytest.mark.parametrize('seed', [101, 102, 103])
@pytest.mark.parametrize('family', sorted(FAMILY_DRAWS))
def test_families_at_random_parameters(family, seed):
    entry = FAMILY_DRAWS[family](np.random.default_rng(seed))
    assert entry.invariants
    for expr in entry.invariants:
        assert verify_invariant(entry.algebra, expr).passed, (family, entry.parameters, expr.to_text())

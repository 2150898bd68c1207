from fractions import Fraction

import pytest

from utils.errors import ExpressionSyntaxError
from utils.expression_parser import parse_expression, parse_polynomial, resolve_variable
from utils.expressions import InvariantExpr
from utils.invariant_catalog import l41_power
from utils.polynomials import VarId


def test_polynomial(uni4):
    p = parse_polynomial("n_1_2*n_2_4 + n_1_3*n_3_4", uni4)
    assert p == uni4.n(1, 2) * uni4.n(2, 4) + uni4.n(1, 3) * uni4.n(3, 4)


def test_compact_names(uni4):
    assert parse_polynomial("n_13*n_24 - n_14*n_23", uni4) == parse_polynomial("n_1_3*n_2_4 - n_1_4*n_2_3", uni4)


def test_bare_x_with_single_extension(uni41):
    assert parse_polynomial("x", uni41) == uni41.x(1)
    assert resolve_variable('x', uni41) == VarId.x(1)


def test_precedence(uni4):
    assert parse_polynomial("2 + 3*n_1_4^2", uni4) == uni4.n(1, 4) ** 2 * 3 + 2
    assert parse_polynomial("-n_1_4^2", uni4) == -uni4.n(1, 4) ** 2


def test_rational_and_log(uni4):
    expr = parse_expression("n_1_3*n_2_4/n_1_4^2 - ln(n_1_4)", uni4)
    assert not expr.is_rational
    assert expr.log_arguments() == [uni4.n(1, 4)]


def test_fractional_exponent(uni4):
    expr = parse_expression("n_1_4^(1/2)", uni4)
    assert expr == InvariantExpr.power_product([(uni4.n(1, 4), Fraction(1, 2))])


def test_negative_exponent(uni4):
    expr = parse_expression("n_1_4^-2", uni4)
    assert expr == InvariantExpr.from_poly(uni4.n(1, 4) ** 2).inverse()


def test_canonical_text_round_trip(uni4):
    expr = parse_expression("n_1_3/n_1_4 + 2*ln(n_1_4)", uni4)
    assert parse_expression(expr.to_text(), uni4) == expr


@pytest.mark.parametrize('text', ["n_1_2 +", "foo*n_1_2", "ln(3)", "n_1_2^(n_1_3)", "(n_1_2", "n_1_2 $ 3", ""])
def test_syntax_errors(uni4, text):
    with pytest.raises(ExpressionSyntaxError):
        parse_expression(text, uni4)


def test_unknown_variable_for_universe(uni4):
    with pytest.raises(ExpressionSyntaxError) as excinfo:
        parse_expression("x_1 + n_1_2", uni4)
    assert excinfo.value.position == 0


def test_division_by_zero(uni4):
    with pytest.raises(ExpressionSyntaxError):
        parse_expression("n_1_2/0", uni4)


def test_parse_polynomial_rejects_rational(uni4):
    with pytest.raises(ExpressionSyntaxError):
        parse_polynomial("1/n_1_4", uni4)


def test_power_ratio_round_trip():
    entry = l41_power(1, 1, 0)
    invariant = entry.invariants[0]
    assert parse_expression(invariant.to_text(), entry.algebra.universe) == invariant

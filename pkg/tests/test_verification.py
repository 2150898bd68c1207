import json

import numpy as np
import pytest
from sympy import QQ

from utils import verification
from utils.config import EngineSettings
from utils.errors import InvalidSize, ResidualNDerivative, SamplingExhausted, UniverseMismatch
from utils.expression_parser import parse_expression
from utils.expressions import InvariantExpr
from utils.invariant_catalog import Family, prop1_invariants, theorem1_basis, Z
from utils.lie_algebras import build_L41, build_L_full_rank
from utils.polynomials import universe
from utils.rank_calculations import invariant_count
from utils.verification import (
    certify_all,
    cofactor_annihilation_check,
    count_certified,
    embed_expr,
    jacobian_rank,
    sample_diagonal_entries,
    verify_invariant,
)


def test_corner_invariant_passes(t4):
    certificate = verify_invariant(t4, InvariantExpr.from_poly(Z(4, 2)))
    assert certificate.passed
    assert len(certificate.checks) == 6


def test_failure_is_a_result(t4):
    certificate = verify_invariant(t4, parse_expression("n_1_2", t4.universe))
    assert not certificate.passed
    failing = [check.generator for check in certificate.failures]
    assert 'N_2_3' in failing
    assert all(check.residual for check in certificate.failures)


def test_constant_passes_everywhere(l41_special):
    assert verify_invariant(l41_special, InvariantExpr.constant(l41_special.universe.field, 1)).passed


def test_ratio_fails_on_full_rank_extension():
    alg = build_L_full_rank(4)
    ratio = InvariantExpr.from_poly(Z(4, 2, 3)) / InvariantExpr.from_poly(Z(4, 1, 3))
    certificate = verify_invariant(alg, ratio)
    assert not certificate.passed
    assert 'X_2' in [check.generator for check in certificate.failures]


def test_certificate_layout(t4):
    data = verify_invariant(t4, InvariantExpr.from_poly(Z(4, 1))).to_dict()
    assert list(data) == ['algebra', 'invariant', 'per_generator', 'pass']
    assert data['pass'] is True
    assert data['per_generator'][0] == {'generator': 'N_1_2', 'zero': True, 'residual': None}
    assert json.loads(verify_invariant(t4, InvariantExpr.from_poly(Z(4, 1))).to_json())['invariant'] == "n_1_4"


def test_embedding_into_larger_universe():
    expr = InvariantExpr.from_poly(Z(4, 2))
    embedded = embed_expr(universe(4, 1), expr)
    assert embedded.field == universe(4, 1).field
    with pytest.raises(UniverseMismatch):
        embed_expr(universe(4), InvariantExpr.from_poly(universe(4, 1).x(1)))


def test_jacobian_rank_of_corner_basis():
    assert jacobian_rank(theorem1_basis(6)) == 3


def test_jacobian_rank_of_dependent_pair():
    z1 = Z(5, 1)
    assert jacobian_rank([InvariantExpr.from_poly(z1), InvariantExpr.from_poly(z1 ** 2)]) == 1


def test_jacobian_rank_with_logarithm():
    uni = universe(4)
    log = InvariantExpr.log(uni.n(1, 4))
    other = InvariantExpr.from_poly(Z(4, 2))
    assert jacobian_rank([log, other]) == 2


def test_full_rank_invariants_are_independent():
    assert jacobian_rank(prop1_invariants(7).invariants) == 3


def test_sampling_exhausted():
    uni = universe(4)
    expr = InvariantExpr.constant(uni.field, 1) / InvariantExpr.from_poly(uni.n(1, 4))
    settings = EngineSettings(max_bad_samples=3)

    def zeros(rng, size):
        return [QQ(0)] * size

    with pytest.raises(SamplingExhausted) as excinfo:
        jacobian_rank([expr], sampler=zeros, settings=settings)
    assert excinfo.value.attempts == 3


def test_mixed_universes_rejected():
    with pytest.raises(UniverseMismatch):
        jacobian_rank([InvariantExpr.from_poly(Z(4, 1)), InvariantExpr.from_poly(Z(5, 1))])


@pytest.mark.parametrize('M', [4, 5, 6, 7])
def test_cofactor_check(M):
    report = cofactor_annihilation_check(M)
    assert report.passed
    assert set(report.table['mechanism']) >= {'filas repetidas', 'columnas repetidas'}


def test_cofactor_check_needs_four():
    with pytest.raises(InvalidSize):
        cofactor_annihilation_check(3)


def test_count_certified(t4, settings):
    assert count_certified(t4, theorem1_basis(4), settings) == 2
    assert count_certified(t4, theorem1_basis(4)[:1], settings) is None


@pytest.mark.slow
def test_certify_all_small():
    table = certify_all(m_max=5, prop2_draws=2, property_cases=20)
    assert list(table.columns) == ['claim', 'target', 'expected', 'observed', 'passed']
    failed = table[~table['passed']]
    assert failed.empty, failed.to_string()


def test_integer_power_form_of_corner_passes(t4):
    n13, n14 = t4.universe.n(1, 3), t4.universe.n(1, 4)
    expr = (InvariantExpr.power_product([(n13, 2)]) - InvariantExpr.from_poly(n13 ** 2)
            + InvariantExpr.from_poly(n14))
    assert verify_invariant(t4, expr).passed


def test_jacobian_rank_rejects_zero_trials():
    with pytest.raises(ValueError):
        jacobian_rank(theorem1_basis(4), trials=0)


def test_diagonal_sampling_replaces_rejected_vectors():
    for M in (4, 5):
        entries = sample_diagonal_entries(M, 20, np.random.default_rng(0))
        families = [entry.family for entry in entries]
        assert families.count(Family.DIAGONAL_GENERIC) == 20
        assert families[-1] is Family.DIAGONAL_RESONANT


def test_diagonal_sampling_gives_up():
    with pytest.raises(SamplingExhausted):
        sample_diagonal_entries(5, 20, np.random.default_rng(0), max_attempts=3)


def test_zhat_residual_becomes_failed_row(monkeypatch):
    alg = build_L41(1, 1, 0)

    def residual(algebra, mu):
        raise ResidualNDerivative(mu, InvariantExpr.from_poly(algebra.universe.n(1, 2)))

    monkeypatch.setattr(verification, 'zhat_operator', residual)
    rows = verification._zhat_rows(alg)
    assert [row['passed'] for row in rows] == [False, False]
    assert rows[0]['claim'] == "Z^_1 sin derivadas en n"


@pytest.mark.slow
@pytest.mark.parametrize('M', [4, 5, 6, 7, 8, 9])
def test_full_rank_family_acceptance(M):
    entry = prop1_invariants(M)
    assert all(verify_invariant(entry.algebra, e).passed for e in entry.invariants)
    assert jacobian_rank(entry.invariants) == (M - 1) // 2
    assert invariant_count(entry.algebra, confirm=False) == (M - 1) // 2


@pytest.mark.slow
@pytest.mark.parametrize('M', [4, 5, 6, 7, 8])
def test_diagonal_family_acceptance(M):
    entries = sample_diagonal_entries(M, 20, np.random.default_rng(0))
    assert len(entries) == 21
    for entry in entries:
        assert all(verify_invariant(entry.algebra, e).passed for e in entry.invariants), entry.parameters
        assert jacobian_rank(entry.invariants) == entry.expected_count
        assert invariant_count(entry.algebra, confirm=False) == entry.expected_count


@pytest.mark.slow
def test_certify_all_draw_counts():
    table = certify_all(m_max=6, prop2_draws=20, property_cases=20)
    draws = table[table['claim'] == "vectores diagonales genéricos"]
    assert list(draws['target']) == ["L(4,1)", "L(5,1)", "L(6,1)"]
    assert (draws['observed'] == "20").all()
    assert table['passed'].all()

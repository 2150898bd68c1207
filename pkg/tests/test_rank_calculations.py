import pytest
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from utils.config import EngineSettings
from utils.lie_algebras import build_L42, build_L_full_rank, build_T
from utils.rank_calculations import (
    generic_rank,
    invariant_count,
    matrix_rank,
    rank_report,
    rank_table_L41,
    sample_point,
    trial_generators,
)


def test_rank_of_t4(t4):
    report = rank_report(t4)
    assert report.summary() == "n_I = 2 (dim 6, rank 4)"
    assert report.symbolic_rank == 4
    assert report.to_dict()['n_I'] == 2


def test_rank_of_special_l41(l41_special):
    assert rank_report(l41_special).summary() == "n_I = 3 (dim 7, rank 4)"


@pytest.mark.parametrize('M', [3, 4, 5, 6])
def test_t_counts(M):
    assert invariant_count(build_T(M)) == M // 2


@pytest.mark.parametrize('M', [4, 5, 6])
def test_full_rank_counts(M):
    assert invariant_count(build_L_full_rank(M)) == (M - 1) // 2


def test_l42_without_invariants():
    alg = build_L42((1, 0, 0), (0, 1, 0))
    assert invariant_count(alg, confirm=False) == 0


def test_trials_are_reproducible(t4):
    settings = EngineSettings(trials=3, seed=7)
    assert generic_rank(t4, settings=settings) == generic_rank(t4, settings=settings)
    assert len(generic_rank(t4, settings=settings)[1]) == 3


def test_independent_streams():
    first, second = trial_generators(0, 2)
    assert sample_point(first, 5, 100) != sample_point(second, 5, 100)


def test_matrix_rank():
    matrix = DomainMatrix([[QQ(1), QQ(2)], [QQ(2), QQ(4)]], (2, 2), QQ)
    assert matrix_rank(matrix) == 1
    assert matrix_rank(DomainMatrix.zeros((0, 3), QQ)) == 0


def test_l41_rank_table():
    table = rank_table_L41(draws=5, seed=3)
    assert len(table) == 6
    assert table.loc[0, 'rank'] == 4
    assert table['passed'].all()


@pytest.mark.slow
@pytest.mark.parametrize('M', [7, 8, 9])
def test_large_t_counts(M):
    assert invariant_count(build_T(M), confirm=False) == M // 2


def test_zero_trials_rejected(t4):
    with pytest.raises(ValueError):
        generic_rank(t4, trials=0)


@pytest.mark.slow
@pytest.mark.parametrize('M', [5, 6, 7, 8, 9])
def test_t_counts_confirmed_symbolically(M):
    report = rank_report(build_T(M), confirm=True)
    assert report.symbolic_rank == report.rank
    assert report.n_invariants == M // 2


@pytest.mark.slow
@pytest.mark.parametrize('M', [3, 4, 5, 6])
def test_full_rank_counts_confirmed_symbolically(M):
    report = rank_report(build_L_full_rank(M), confirm=True)
    assert report.symbolic_rank == report.rank
    assert report.n_invariants == (M - 1) // 2

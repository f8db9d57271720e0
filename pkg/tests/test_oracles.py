"""Integral and fractional cover oracles, thresholds q, q_f, p_c."""

from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, strategies as st

from expthresh import bits
from expthresh.instances import random_monotone_family
from expthresh.oracles import (CoverProgram, check_fractional_solution, exhaustive_min_cover,
                               expectation_threshold_q, fractional_expectation_threshold_qf,
                               min_cover_weight_fractional, min_cover_weight_integral, thresholds)
from expthresh.weights import MonotoneFamily

F = Fraction
PAIRS3 = MonotoneFamily.from_sets(3, [[0, 1], [1, 2], [0, 2]])


def naive_integral(fam, p):
    """Minimum over all subsets of the nonempty sets inside some minimal element."""
    useful = sorted({T for M in fam.minimal for T in bits.submasks(M) if T})
    best = None
    for r in range(1, len(useful) + 1):
        for chosen in combinations(useful, r):
            if all(any(T & M == T for T in chosen) for M in fam.minimal):
                v = sum(p ** bits.popcount(T) for T in chosen)
                best = v if best is None else min(best, v)
    return best


def test_integral_examples():
    s = min_cover_weight_integral(MonotoneFamily.from_sets(1, [[0]]), F(1, 3))
    assert s.members == [1] and s.objective.lo == F(1, 3)
    s = min_cover_weight_integral(MonotoneFamily.from_sets(3, [[0, 1], [1, 2]]), F(1, 2))
    assert s.members == [bits.mask([1])] and s.objective.lo == F(1, 2)
    # three pairs at p = 1/4: taking the pairs themselves costs 3/16
    s = min_cover_weight_integral(PAIRS3, F(1, 4))
    assert naive_integral(PAIRS3, F(1, 4)) == F(3, 16)
    assert s.objective.lo == s.objective.hi == F(3, 16)


def grid_fractional(fam, p, grid=(F(0), F(1, 4), F(1, 2), F(3, 4), F(1))):
    useful = sorted({T for M in fam.minimal for T in bits.submasks(M) if T})
    best = None
    for xs in product(grid, repeat=len(useful)):
        if all(sum(x for T, x in zip(useful, xs) if T & M == T) >= 1 for M in fam.minimal):
            v = sum(x * p ** bits.popcount(T) for T, x in zip(useful, xs))
            best = v if best is None else min(best, v)
    return best


@pytest.mark.parametrize("p", [F(1, 4), F(1, 2), F(3, 4)])
def test_fractional_three_pairs_vs_grid(p):
    s = min_cover_weight_fractional(PAIRS3, p)
    grid = grid_fractional(PAIRS3, p)
    # the LP optimum here has coordinates on the grid, so the two agree exactly
    assert s.objective.lo == s.objective.hi == grid == min(F(3, 2) * p, 3 * p * p)
    integral = min_cover_weight_integral(PAIRS3, p).objective
    assert s.objective.hi <= integral.lo


def test_fractional_trivial_cases():
    s = min_cover_weight_fractional(MonotoneFamily.from_sets(1, [[0]]), F(2, 5))
    assert s.assignment == {1: 1} and s.objective.lo == F(2, 5)
    s = min_cover_weight_fractional(PAIRS3, F(0))
    assert s.objective.hi == 0


def test_threshold_examples():
    one = MonotoneFamily.from_sets(1, [[0]])
    assert expectation_threshold_q(one).contains(F(1, 2))
    assert fractional_expectation_threshold_qf(one).contains(F(1, 2))
    pair = MonotoneFamily.from_sets(2, [[0, 1]])
    for iv in (expectation_threshold_q(pair), fractional_expectation_threshold_qf(pair)):
        assert iv.lo ** 2 <= F(1, 2) <= iv.hi ** 2
        assert iv.width <= F(1, 2 ** 32)


def test_theta_validation():
    with pytest.raises(ValueError):
        expectation_threshold_q(PAIRS3, F(0))


def test_single_constraint_duality_is_tight():
    fam = MonotoneFamily.from_sets(4, [[0, 1, 3]])
    for p in (F(1, 5), F(2, 3)):
        assert min_cover_weight_fractional(fam, p).objective.lo == min_cover_weight_integral(fam, p).objective.lo


def test_variable_universe_closure_matches_full():
    for seed in range(15):
        fam = random_monotone_family(6, seed)
        for p in (F(1, 3), F(3, 5)):
            a = min_cover_weight_integral(fam, p).objective
            b = min_cover_weight_integral(fam, p, universe="full").objective
            assert a.lo == b.lo
            a = min_cover_weight_fractional(fam, p).objective
            b = min_cover_weight_fractional(fam, p, universe="full").objective
            assert a.lo == b.lo


@given(st.integers(0, 10 ** 6), st.fractions(F(1, 20), F(19, 20), max_denominator=40))
def test_duality_and_ordering(seed, p):
    fam = random_monotone_family(5, seed)
    prog = CoverProgram.build(fam, False)
    frac = min_cover_weight_fractional(prog, p)
    check = check_fractional_solution(prog, frac, p)
    assert check["primal_feasible"] and check["dual_feasible"] and check["gap_within_width"]
    integ = min_cover_weight_integral(fam, p)
    assert frac.objective.hi <= integ.objective.lo
    assert CoverProgram.build(fam, True).is_cover([prog.variables.index(T) for T in integ.members])


@given(st.integers(0, 10 ** 6))
def test_objective_monotone_in_p(seed):
    fam = random_monotone_family(5, seed)
    prev_i = prev_f = F(0)
    for p in (F(1, 10), F(1, 4), F(1, 2), F(3, 4), F(1)):
        i = min_cover_weight_integral(fam, p).objective.lo
        f = min_cover_weight_fractional(fam, p).objective.lo
        assert i >= prev_i and f >= prev_f
        prev_i, prev_f = i, f


@pytest.mark.parametrize("seed", range(10))
def test_branch_and_bound_matches_references(seed):
    fam = random_monotone_family(4, 1000 + seed)
    p = F(1 + seed % 5, 6)
    bb = min_cover_weight_integral(fam, p).objective.lo
    ref, _ = exhaustive_min_cover(fam, p)
    assert bb == ref == naive_integral(fam, p)


def test_thresholds_report_chain():
    rep = thresholds(random_monotone_family(5, 3))
    assert rep.chain_ok
    out = rep.to_json()
    assert set(out) >= {"q", "q_f", "p_c", "chain_ok", "optimal_G_at_q", "optimal_g_at_q_f"}

"""Star parameters, greedy witnesses, the star family and its weight chain."""

import math
import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from expthresh import bits
from expthresh.constructions.stars import (StarSystem, degree_factor, elementary_symmetric,
                                           is_linear, linear_constant_cover, max_codegree,
                                           star_greedy_witness, star_parameters, theorem_bound,
                                           weight_chain, witness_violations)
from expthresh.errors import PreconditionViolated, SmallJrBranch
from expthresh.instances import fano_plane, random_linear_hypergraph, steiner_triple_system
from expthresh.interval import Const, compare
from expthresh.weights import WeightFunction, member_upset_JL

F = Fraction
BIG_L = Const(2 ** 10, 2)


def constant(n, edges, w):
    return WeightFunction(n, {E: F(w) for E in edges})


def test_star_parameters_examples():
    P = star_parameters(3, 100, 2)  # J r / (k-1) = 100
    assert (P.ell, P.L, P.b) == (1, (1,), (1,))
    P = star_parameters(34, 33, 33)  # J r / (k-1) = 33, and J r = 1089 > 2^5 * 34
    assert P.ell == 1
    with pytest.raises(SmallJrBranch):
        star_parameters(3, 33, 2)
    with pytest.raises(PreconditionViolated):
        star_parameters(1, 100, 100)


@given(st.integers(2, 6), st.fractions(F(1), F(10 ** 6), max_denominator=50))
def test_star_parameters_tile(k, x):
    Jr = x * (k - 1)
    if Jr <= 32 * k:
        return
    P = star_parameters(k, Jr, 1)
    assert 2 ** (2 * P.ell + 3) < x <= 2 ** (2 * P.ell + 5)
    others = [l for l in range(1, 40) if 2 ** (2 * l + 3) < x <= 2 ** (2 * l + 5)]
    assert others == [P.ell]
    for i in range(1, P.ell + 1):
        assert P.L[i - 1] == 2 ** (i - 1)
        assert P.b[i - 1] == 2 ** (2 * (P.ell - i) - min(i - 1, P.ell - i)) >= 1


def test_single_edge_witness():
    E = bits.mask([0, 1, 2])
    g = constant(5, [E], F(1, 100))
    w = star_greedy_witness(g, E | 0b11000, 1, 1)
    assert w.index == 1 and w.stars == [[E]]
    assert star_greedy_witness(g, 0b11, 1, 1) is None


def test_fano_witness_invariants_exhaustive():
    g = constant(7, fano_plane(), F(1, 2))
    P = star_parameters(3, 49, 2)
    system = StarSystem(7, g.support, P, degree_factor(g.total, 3, 1))
    found = 0
    for S in range(1 << 7):
        w = star_greedy_witness(g, S, 1, 49, system)
        if w is None:
            assert not system.member(S)
            continue
        found += 1
        assert witness_violations(w, system, S) == []
        assert system.member(S)
    assert found > 0
    full = star_greedy_witness(g, bits.full(7), 1, 49, system)
    assert len(full.stars[0]) == 1 and full.greedy_degrees[0] == 3


def test_steiner_witnesses_at_small_L():
    n = 45
    edges = steiner_triple_system(n)
    g = constant(n, edges, 1)
    J, L = 257, Const(1)
    P = star_parameters(3, J, 1)
    assert P.ell == 2
    system = StarSystem(n, edges, P, degree_factor(g.total, 3, L))
    rng = random.Random(0)
    checked = 0
    for _ in range(30):
        S = bits.full(n)
        for x in rng.sample(range(n), rng.randint(0, 4)):
            S &= ~(1 << x)
        if not member_upset_JL(g, J, L, S):
            continue
        checked += 1
        w = star_greedy_witness(g, S, L, J, system)
        assert w is not None and witness_violations(w, system, S) == []
    assert checked > 0


def test_truncation_gap_on_large_steiner_system():
    # The greedy only guarantees centers with degree threshold up to the greedy star size,
    # while the family needs the threshold below L_i <= 2^(ell-1). Here every center fails.
    n = 339
    edges = steiner_triple_system(n)
    E = len(edges)
    g = constant(n, edges, 1)
    assert E == n * (n - 1) // 6 and is_linear(edges)
    full = bits.full(n)
    assert member_upset_JL(g, E, BIG_L, full)
    P = star_parameters(3, E, 1)
    system = StarSystem(n, edges, P, degree_factor(g.total, 3, BIG_L))
    assert P.ell == 5 and max(P.L) == 16
    theta = system.threshold(0)
    assert compare(theta, 16) > 0
    assert all(system.min_index(x) is None for x in range(n))
    assert system.count_upper() == 0 and not system.member(full)
    assert star_greedy_witness(g, full, BIG_L, E, system) is None


def test_elementary_symmetric():
    assert elementary_symmetric([1, 2, 3], 2) == 11
    assert elementary_symmetric([4], 0) == 1
    assert elementary_symmetric([1, 1], 3) == 0


def test_theorem_bound_is_lower_enclosure():
    b = theorem_bound(100, 2, BIG_L)
    x = (200 ** 0.5) / 128
    true = (1 / (1024 * math.e ** 2)) ** x
    assert b <= F(true) and float(b) > true * (1 - 1e-9)
    with pytest.raises(PreconditionViolated):
        theorem_bound(1, 1, Const(F(1, 2)))


def test_small_branch_support_cover():
    g = constant(7, fano_plane(), F(1, 7))  # sum g = 1, p = 1
    G, cert = linear_constant_cover(g, J=1)
    assert cert.provenance["branch"] == "support" and cert.valid
    assert cert.provenance["below_L_to_minus_k_over_2"]
    # |supp g| (p/L)^k = 7 L^-3
    w = cert.report.weight
    expect = (Const(7) / BIG_L ** 3).interval()
    assert w.lo <= expect.hi and expect.lo <= w.hi


def test_vacuous_star_branch_is_certified():
    g = constant(7, fano_plane(), F(1, 2))
    G, cert = linear_constant_cover(g, J=49)
    assert cert.provenance["branch"] == "stars" and cert.valid
    assert cert.report.vacuous and cert.report.checked == 0
    assert G.count_upper() == 0


def test_non_guaranteed_L_can_fail():
    g = constant(7, fano_plane(), F(1, 2))
    G, cert = linear_constant_cover(g, J=49, L=1)
    assert not cert.provenance["guaranteed"]
    assert not cert.valid


def test_rejects_nonlinear_support():
    g = constant(4, [0b0111, 0b1011], F(1, 2))
    assert max_codegree(g.support) == 2
    with pytest.raises(PreconditionViolated):
        linear_constant_cover(g, F(1))


@pytest.mark.parametrize("seed", range(4))
def test_weight_chain_monotone(seed):
    n = 9
    edges = random_linear_hypergraph(n, 3, 12, seed)
    g = constant(n, edges, F(1, 4))
    J = 25  # J r = 100 > 96
    for L in (Const(1), Const(4, 1), BIG_L):
        chain = weight_chain(g, L, J)
        names = [name for name, _ in chain]
        assert names[0] == "exact"
        stop = len(chain) if L == BIG_L else names.index("parameters") + 1
        for (_, a), (_, b) in zip(chain[:stop], chain[1:stop]):
            assert a.hi <= b.hi + b.width + F(1, 10 ** 30)


def test_structured_star_weight_matches_enumeration():
    g = constant(7, fano_plane(), F(1, 2))
    system = StarSystem(7, g.support, star_parameters(3, 49, 2), degree_factor(g.total, 3, 1))
    members = system.materialize()
    p = F(1, 3)
    assert system.weight(p).lo == sum(p ** bits.popcount(T) for T in members)
    assert system.counting_bound(p).hi >= system.weight(p).hi
    for S in range(1 << 7):
        assert system.member(S) == any(T & S == T for T in members)

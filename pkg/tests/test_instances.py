"""Instance generators."""

import json
from fractions import Fraction
from itertools import combinations

import pytest

from expthresh import bits
from expthresh.constructions.stars import is_linear, max_codegree, pair_codegrees
from expthresh.errors import ParseError, PreconditionViolated
from expthresh.instances import (InstanceSpec, clique_hypergraph, fano_plane, halving_example,
                                 k_ap_hypergraph, random_linear_hypergraph, random_monotone_family,
                                 random_weight_function, steiner_triple_system)
from expthresh.oracles import min_cover_weight_integral
from expthresh.weights import MonotoneFamily, WeightFunction, minimal_elements


def naive_aps(n, k):
    out = set()
    for a in range(1, n + 1):
        for d in range(1, n):
            terms = [a + i * d for i in range(k)]
            if terms[-1] <= n:
                out.add(frozenset(terms))
    return sorted(bits.mask(v - 1 for v in s) for s in out)


def test_ap_examples():
    assert k_ap_hypergraph(4, 3) == sorted([bits.mask([0, 1, 2]), bits.mask([1, 2, 3])])
    expect = [[1, 2, 3], [2, 3, 4], [3, 4, 5], [1, 3, 5]]
    assert k_ap_hypergraph(5, 3) == sorted(bits.mask(v - 1 for v in s) for s in expect)


@pytest.mark.parametrize("n", [7, 20, 33])
@pytest.mark.parametrize("k", [3, 4])
def test_ap_matches_double_loop(n, k):
    assert k_ap_hypergraph(n, k) == naive_aps(n, k)


def test_ap_codegree_bound_exhaustive():
    for k in (3, 4, 5):
        for n in range(k, 61):
            edges = k_ap_hypergraph(n, k)
            assert max_codegree(edges) <= (k - 1) ** 2


def test_random_linear_properties():
    assert len(random_linear_hypergraph(8, 3, 1, seed=3)) == 1
    assert is_linear(fano_plane())
    for seed in range(20):
        edges = random_linear_hypergraph(12, 3, 15, seed)
        assert len(edges) <= 15
        assert max(pair_codegrees(edges).values(), default=0) <= 1
        assert edges == random_linear_hypergraph(12, 3, 15, seed)


@pytest.mark.parametrize("n", [9, 15, 21, 27])
def test_steiner_every_pair_once(n):
    edges = steiner_triple_system(n)
    codeg = pair_codegrees(edges)
    assert len(codeg) == n * (n - 1) // 2 and set(codeg.values()) == {1}
    with pytest.raises(PreconditionViolated):
        steiner_triple_system(10)


def test_halving_examples():
    g = halving_example(4, 1)
    assert g.entries == {1 << i: Fraction(1, 2) for i in range(4)}
    assert minimal_elements(g, 4) == sorted(bits.mask(c) for c in combinations(range(4), 2))
    g = halving_example(6, 2)
    assert set(g.entries.values()) == {Fraction(1, 3)} and len(g.entries) == 15
    assert minimal_elements(g, 6) == sorted(bits.mask(c) for c in combinations(range(6), 3))


@pytest.mark.parametrize("n,k", [(8, 1), (8, 2), (10, 2), (12, 3), (14, 2)])
def test_halving_upset_identity(n, k):
    g = halving_example(n, k)
    for S in range(1 << n):
        assert g.member(S) == (bits.popcount(S) >= n // 2)


def test_halving_support_cover_size():
    n, k = 8, 2
    g = halving_example(n, k)
    fam = MonotoneFamily(n, tuple(minimal_elements(g, n)))
    sol = min_cover_weight_integral(fam, Fraction(1, 2), variables=list(g.entries))
    assert len(sol.members) >= n / (2 * k)


def test_random_generators_deterministic():
    a, b = random_monotone_family(7, 5), random_monotone_family(7, 5)
    assert a == b
    g = random_weight_function(8, 3, seed=2)
    assert g == random_weight_function(8, 3, seed=2)
    assert g.entries and all(0 < w <= 1 for w in g.entries.values())
    assert g.uniform_k == 3


def test_random_monotone_is_antichain():
    for seed in range(30):
        fam = random_monotone_family(6, seed)
        for A, B in combinations(fam.minimal, 2):
            assert A & B not in (A, B)


def test_clique_hypergraph():
    n, edges = clique_hypergraph(5, 3)
    assert n == 10 and len(edges) == 10 and all(bits.popcount(E) == 3 for E in edges)


def test_instance_spec_round_trip():
    inst = InstanceSpec("k_ap", {"n": "9", "k": "3", "law": "grid:4", "seed": 1})
    g = inst.build()
    assert WeightFunction.from_json(json.loads(json.dumps(g.to_json()))) == g
    assert inst.to_json()["kind"] == "k_ap"
    fam = InstanceSpec("random_monotone", {"n": "5", "seed": 2}).build()
    assert MonotoneFamily.from_json(fam.to_json()) == fam
    with pytest.raises(ParseError):
        InstanceSpec("nope")
    with pytest.raises(ParseError):
        InstanceSpec("random_weights", {"n": 5, "k": 2, "law": "bogus"}).build()

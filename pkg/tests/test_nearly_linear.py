"""Greedy linear decomposition and the nearly-linear pipeline."""

from fractions import Fraction

import pytest

from expthresh import bits
from expthresh.constructions import linear_decompose, nearly_linear_cover
from expthresh.constructions.nearly_linear import (CODEGREE_C, LINEAR_L, LINEAR_LOSS,
                                                   DegreeSingletons, split_holds)
from expthresh.constructions.stars import max_codegree
from expthresh.errors import PreconditionViolated
from expthresh.instances import fano_plane, k_ap_hypergraph, random_linear_hypergraph
from expthresh.interval import Const
from expthresh.weights import WeightFunction

F = Fraction


def test_constants():
    assert LINEAR_L == Const(10 * 2 ** 10, 2)
    assert LINEAR_LOSS == Const(4 * 10 ** 4) * LINEAR_L
    # 4 * 10^4 * 10 * 2^10 = 10^5 * 2^12
    assert CODEGREE_C == Const(4) * Const(10 ** 5 * 2 ** 12, 2)


def test_linear_input_one_class():
    assert len(linear_decompose(fano_plane(), 1)) == 1


def test_ap_classes_are_linear():
    edges = k_ap_hypergraph(9, 3)
    classes = linear_decompose(edges, 2)
    assert sorted(E for C in classes for E in C) == sorted(edges)
    assert len(classes) <= 64
    for C in classes:
        assert max_codegree(C) <= 1


def test_pairs_sharing_two_vertices_split():
    A, B = bits.mask([0, 1, 2]), bits.mask([0, 1, 3])
    classes = linear_decompose([A, B], 2)
    assert len(classes) == 2


def test_codegree_precondition():
    edges = [bits.mask([0, 1, x]) for x in range(2, 12)]
    with pytest.raises(PreconditionViolated):
        linear_decompose(edges, 2)


@pytest.mark.parametrize("n", [30, 60])
def test_ap_class_bounds(n):
    edges = k_ap_hypergraph(n, 3)
    classes = linear_decompose(edges, 2)
    assert len(classes) <= 64 and all(max_codegree(C) <= 1 for C in classes)


def test_linear_pipeline_on_fano():
    g = WeightFunction(7, {E: F(1, 7) for E in fano_plane()})
    G, cert = nearly_linear_cover(g)
    assert cert.valid and cert.loss == LINEAR_LOSS
    assert cert.report.mode == "exhaustive"
    assert cert.provenance["split"]["ok"]


def test_linear_pipeline_random_linear():
    edges = random_linear_hypergraph(10, 3, 10, seed=2)
    g = WeightFunction(10, {E: F(1, 2) for E in edges})
    G, cert = nearly_linear_cover(g)
    assert cert.valid and cert.provenance["split"]["ok"]


def test_split_on_brute_forced_members():
    edges = random_linear_hypergraph(11, 3, 12, seed=4)
    g = WeightFunction(11, {E: F(1, 3) for E in edges})
    vl = DegreeSingletons(g, LINEAR_L)
    for S in range(1 << g.n):
        if g.member(S):
            assert split_holds(g, LINEAR_L, vl, S)


def test_codegree_pipeline_small_ap():
    edges = k_ap_hypergraph(9, 3)
    g = WeightFunction(9, {E: F(1, len(edges)) for E in edges})
    G, cert = nearly_linear_cover(g, c=2)
    assert cert.valid and cert.loss == CODEGREE_C * Const(4)
    assert cert.provenance["split"]["ok"]
    assert len(cert.provenance["classes"]) == len(linear_decompose(edges, 2))

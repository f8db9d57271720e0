"""Singleton, volume, constant-density and randomized covers."""

import math
import random
from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import given, strategies as st

from conftest import all_ksubsets, naive_cover_member
from expthresh import bits
from expthresh.constructions import (constant_density_cover, randomized_cover, singleton_cover,
                                     volume_cover)
from expthresh.constructions.randomized import inclusion_probabilities, randomized_loss, sample_cover
from expthresh.constructions.singleton import level_witness
from expthresh.constructions.volume import density_level, volume_threshold
from expthresh.errors import DegenerateThreshold, EmptyFamily, PreconditionViolated, RetriesExhausted
from expthresh.interval import Const, Interval, compare
from expthresh.weights import WeightFunction, binom

F = Fraction


def singletons(weights):
    return WeightFunction(len(weights), {1 << i: F(w) for i, w in enumerate(weights) if w})


# ------------------------------------------------------------------ singleton

def test_singleton_four_halves():
    g = singletons([F(1, 2)] * 4)
    G, cert = singleton_cover(g, F(1, 2))
    assert G.a == 2 and cert.valid and cert.loss == Const(4, 1)
    members = G.materialize()
    assert sorted(members)[:2] == [1, 2]
    expect = {1, 2} | {T for j in (2, 3, 4) for T in all_ksubsets(range(4), j)}
    assert set(members) == expect
    for S in range(16):
        if bits.popcount(S) >= 2:
            assert naive_cover_member(members, S)
    # closed form vs explicit sum at p/(4e)
    q = Const(F(1, 2)) / Const(4, 1)
    closed = sum((Interval(binom(min(2 * j, 4), j)) * q.interval() ** j for j in range(1, 5)), Interval(0))
    explicit = G.weight(q.interval())
    assert closed.lo <= explicit.hi and explicit.lo <= closed.hi


def test_singleton_single_element():
    G, cert = singleton_cover(singletons([1]), F(1))
    assert G.materialize() == [1] and cert.valid
    w = cert.report.weight
    assert abs(float(w.mid) - 1 / (4 * math.e)) < 1e-15


def test_singleton_ties_by_index():
    g = singletons([F(1, 4), F(1, 2), F(1, 4)])
    G, _ = singleton_cover(g, F(1))
    assert list(G.order) == [1, 0, 2]


def test_singleton_rejects_wrong_p():
    with pytest.raises(PreconditionViolated):
        singleton_cover(singletons([F(1, 2)] * 4), F(1, 3))
    with pytest.raises(PreconditionViolated):
        singleton_cover(WeightFunction.from_sets(2, [([0, 1], 1)]))


@given(st.lists(st.integers(0, 8), min_size=1, max_size=9).filter(any))
def test_singleton_level_witness_exists(raw):
    g = singletons([F(x, 4) for x in raw])
    if g.total < 1:
        return
    G, cert = singleton_cover(g)
    assert cert.valid
    for S in range(1 << g.n):
        if g.member(S):
            assert level_witness(G, S) is not None


# ------------------------------------------------------------------ volume

def test_volume_example_t_one():
    V = bits.full(10)
    assert volume_threshold(V, F(1, 2), Const(5, 1)) == 1
    G = volume_cover(V, F(1, 2), Const(5, 1), 10)
    assert G.t == 1 and G.count() == 10
    w = G.weight((Const(F(1, 2)) / Const(5, 1)).interval())
    assert abs(float(w.mid) - 1 / math.e) < 1e-15


def test_volume_exact_integrality_weight_chain():
    # (e p / L)|V| = 2 exactly: p = 1/2, L = 2e, |V| = 8 -> t = 2
    V = bits.full(8)
    assert volume_threshold(V, F(1, 2), Const(2, 1)) == 2
    # the proof's chain binom(|V|,t)(p/L)^t <= (e|V|p/(tL))^t = 1
    x = Const(1, 1) * Const(8) * Const(F(1, 2)) / (Const(2) * Const(2, 1))
    assert x.exact() == 1


def test_volume_degenerate_inputs():
    with pytest.raises(DegenerateThreshold):
        volume_cover(bits.full(4), F(0), Const(1, 1), 4)
    with pytest.raises(EmptyFamily):
        volume_cover(bits.full(4), F(1), Const(F(1, 10)), 4)
    with pytest.raises(PreconditionViolated):
        volume_cover(0, F(1, 2), Const(1, 1), 4)


def test_constant_density_examples():
    V = bits.full(5)
    full = WeightFunction(5, {T: F(1, binom(5, 2)) for T in all_ksubsets(range(5), 2)})
    assert density_level(F(1, binom(5, 2)), 2) == 5
    k1 = singletons([F(1, 4)] * 4 + [0])
    assert density_level(F(1, 4), 1) == 4
    for S in range(32):
        if k1.member(S):
            assert bits.popcount(S & 0b1111) >= 4
    G = constant_density_cover(full, F(1, 2), Const(4, 1))
    assert G.V == V and G.t == volume_threshold(V, F(1, 2), Const(4, 1))
    sparse = WeightFunction(8, {0b11: F(1)})
    with pytest.raises(PreconditionViolated):
        constant_density_cover(sparse, F(1), Const(1, 1))


# ------------------------------------------------------------------ randomized

def test_randomized_forced_inclusion():
    g = WeightFunction(10, {bits.mask([2 * i, 2 * i + 1]): F(1, 5) for i in range(5)})
    probs = inclusion_probabilities(g)
    assert set(probs.values()) == {1}
    G, cert = randomized_cover(g, F(1), seed=0)
    assert sorted(G.materialize()) == sorted(g.entries) and cert.valid
    assert cert.loss == randomized_loss(10, 2)


def test_randomized_clamped_probability():
    g = WeightFunction(4, {0b11: F(1, 2), 0b1100: F(1, 10)})
    assert inclusion_probabilities(g)[0b11] == 1
    assert inclusion_probabilities(g)[0b1100] == F(1, 2)


def test_randomized_deterministic_per_seed():
    g = WeightFunction(10, {T: F(1, 45) for T in all_ksubsets(range(10), 2)})
    a = randomized_cover(g, seed=7)[0].materialize()
    b = randomized_cover(g, seed=7)[0].materialize()
    assert a == b
    rng1, rng2 = random.Random(4), random.Random(4)
    probs = inclusion_probabilities(g)
    assert sample_cover(probs, rng1) == sample_cover(probs, rng2)


def test_randomized_retries_exhausted():
    # a single sample that cannot cover: probability (n+1) g < 1 and ⟨g⟩ needs many sets
    g = WeightFunction(10, {T: F(1, 45) for T in all_ksubsets(range(10), 2)})
    with pytest.raises(RetriesExhausted) as info:
        randomized_cover(g, seed=0, max_retries=1, minimal=[bits.full(10), 0b11])
    assert sum(info.value.failures.values()) == 1

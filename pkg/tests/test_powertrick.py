"""Blow-ups, the power trick and uniformization."""

import random
from fractions import Fraction

import pytest

from expthresh import bits
from expthresh.constructions import blow_up, exact_oracle_inner, power_trick_extract, uniformize_cover
from expthresh.constructions.powertrick import pigeonhole_class
from expthresh.certificate import Certificate
from expthresh.errors import InnerCertificateInvalid, PreconditionViolated
from expthresh.families import Explicit
from expthresh.interval import Const
from expthresh.weights import WeightFunction

F = Fraction


def test_blow_up_identity_and_pair():
    g = WeightFunction.from_sets(2, [([0, 1], F(1, 2))])
    assert blow_up(g, 1) == g
    g2 = blow_up(g, 2)
    assert g2.n == 4 and g2.entries == {0b0011: F(1, 2), 0b1100: F(1, 2)}
    assert g2.total == 2 * g.total


@pytest.mark.parametrize("seed", range(5))
def test_blow_up_weight_scaling(seed):
    rng = random.Random(seed)
    n, k = 5, rng.randint(1, 3)
    pool = [T for T in range(1, 1 << n) if bits.popcount(T) == k]
    g = WeightFunction(n, {T: F(rng.randint(1, 9), 10) for T in rng.sample(pool, 3)})
    p, c, m = F(1, 3), 2, 3
    lhs = blow_up(g, m).weight(p / c)
    rhs = g.weight(p) * (F(m) / c ** k)
    assert lhs.lo == rhs.lo and lhs.hi == rhs.hi


def test_power_trick_c_one_returns_inner_family():
    g = WeightFunction.from_sets(3, [([0], F(1)), ([1], F(1))])
    G, cert = power_trick_extract(g, F(1, 2), 1)
    assert isinstance(G, Explicit) and cert.valid and cert.bound == 1


def test_power_trick_two_copies_singleton():
    g = WeightFunction.from_sets(1, [([0], 1)])
    G, cert = power_trick_extract(g, F(1), 2)
    assert G.materialize() == [1]
    assert cert.valid and cert.bound == F(1, 2) and cert.loss == Const(2)
    assert cert.report.weight.hi == F(1, 2)


def test_power_trick_pigeonhole_on_random_runs():
    for seed in range(4):
        rng = random.Random(seed)
        n = 4
        g = WeightFunction(n, {1 << i: F(rng.randint(1, 4), 4) for i in range(n)})
        p = 1 / g.total
        G, cert = power_trick_extract(g, p, 2)
        inner = exact_oracle_inner(blow_up(g, 2), p / 2)
        total = inner.cover.weight(p / (2 * inner.loss.exact()))
        assert cert.report.weight.hi <= total.hi / 2 <= F(1, 2)
        assert cert.valid


def test_power_trick_rejects_bad_inner():
    g = WeightFunction.from_sets(2, [([0], 1), ([1], 1)])

    def broken(h, q):
        return Certificate(h, q, Explicit(h.n, []), Const(1), F(1))

    with pytest.raises(InnerCertificateInvalid):
        power_trick_extract(g, F(1, 2), 2, broken)


def test_power_trick_precondition():
    g = WeightFunction.from_sets(2, [([0], 1), ([1], 1)])
    with pytest.raises(PreconditionViolated):
        power_trick_extract(g, F(1), 2)


def test_uniformize_single_class():
    g = WeightFunction.from_sets(3, [([0], F(1, 2)), ([1], F(1, 2)), ([2], F(1, 2))])
    G, cert = uniformize_cover(g, F(2, 3))
    assert cert.provenance["sizes"] == [1] and cert.valid


def test_uniformize_two_classes():
    g = WeightFunction.from_sets(3, [([0], F(1, 2)), ([1, 2], F(1, 2))])
    classes = g.split_by_size()
    assert classes[1].scaled(2).clamped(1).entries == {0b001: 1}
    assert classes[2].scaled(4).clamped(1).entries == {0b110: 1}
    G, cert = uniformize_cover(g)
    assert cert.valid and cert.provenance["strict_below_one"]
    assert cert.report.weight.hi < 1
    assert cert.provenance["pigeonhole"]["ok"]
    # geometric tail: sum of 2^-k over the used sizes is below 1
    assert sum(F(1, 2 ** k) for k in cert.provenance["sizes"]) < 1


def test_pigeonhole_every_member():
    g = WeightFunction.from_sets(4, [([0], F(1, 4)), ([1, 2], F(1, 2)), ([0, 1, 3], F(3, 4))])
    classes = g.split_by_size()
    for S in range(16):
        if g.member(S):
            assert pigeonhole_class(classes, S) is not None

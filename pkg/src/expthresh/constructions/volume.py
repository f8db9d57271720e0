"""Volume covers: all t-subsets of a vertex set V."""

from fractions import Fraction

from .. import bits
from ..errors import DegenerateThreshold, EmptyFamily, PreconditionViolated
from ..families import Volume
from ..interval import Const, Interval, compare, e_interval, to_interval
from ..weights import WeightFunction, binom


def volume_threshold(V: int, p, L) -> int:
    """t = ceil((e p / L) |V|), decided with certified interval arithmetic."""
    size = bits.popcount(V)
    if isinstance(p, Interval) or isinstance(L, Interval):
        x = e_interval() * to_interval(p) / to_interval(L) * size
        return x.ceil_exact()
    x = Const(1, 1) * Const.of(p) / Const.of(L) * Const.of(size)
    ex = x.exact()
    if ex is not None:
        return -(-ex.numerator // ex.denominator)
    return x.interval().ceil_exact()


def volume_cover(V: int, p, L, n: int) -> Volume:
    """G = binom(V, t) with t = ceil((e p / L)|V|)."""
    if V == 0:
        raise PreconditionViolated("V must be nonempty")
    t = volume_threshold(V, p, L)
    if t <= 0:
        raise DegenerateThreshold("t = 0 would put the empty set in G")
    if t > bits.popcount(V):
        raise EmptyFamily(f"t = {t} exceeds |V| = {bits.popcount(V)}")
    return Volume(n, V, t)


def density_level(c: Fraction, k: int) -> int:
    """Least s with binom(s, k)^(-1) <= c."""
    if c <= 0:
        raise PreconditionViolated("constant must be positive")
    s = k
    while Fraction(1, binom(s, k)) > c:
        s += 1
    return s


def constant_density_cover(g: WeightFunction, p, L, V: int = None) -> Volume:
    """Volume cover for g constant on a dense subset of binom(V, k)."""
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    values = set(g.entries.values())
    if len(values) != 1:
        raise PreconditionViolated("g must be constant on its support")
    c = values.pop()
    if V is None:
        V = 0
        for T in g.entries:
            V |= T
    size = bits.popcount(V)
    need = (Const(1, 2) / Const.of(L)) ** k * Const.of(binom(size, k))
    if compare(Const.of(len(g.entries)), need) < 0:
        raise PreconditionViolated("support density below (e^2/L)^k binom(|V|, k)")
    s = density_level(c, k)
    G = volume_cover(V, p, L, g.n)
    if G.t > s:
        raise PreconditionViolated(f"threshold t = {G.t} exceeds s = {s}")
    return G

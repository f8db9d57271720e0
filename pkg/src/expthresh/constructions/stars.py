"""Vertex-disjoint star systems in linear hypergraphs.

For g constant 1/r on a linear k-uniform support, the family G(b_i, L_i)
holds every union of b_i vertex-disjoint stars with exactly L_i edges each,
where a star's center x must satisfy L_i >= kappa * deg(x) with
kappa = (L / 8ek) (sum g)^(-1+1/k).  The union over i covers <g>_{J,L}.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

from .. import bits
from ..certificate import Certificate, JLTarget, certified_weight, certify
from ..errors import (MaterializationTooLarge, PreconditionViolated, SmallJrBranch,
                      WitnessSearchInconclusive)
from ..families import MATERIALIZE_BUDGET, CoverFamily, Explicit, register
from ..interval import Const, Interval, compare, e_interval, to_interval
from ..weights import WeightFunction, binom, unit_weight_exact
from .singleton import check_unit_weight

SEARCH_BUDGET = 200_000
JL_EXHAUSTIVE_MAX_N = 14


# ---------------------------------------------------------------- hypergraph helpers

def pair_codegrees(edges: Sequence[int]) -> dict:
    """Number of edges through each pair of vertices (pairs with count >= 1)."""
    out: dict = {}
    for E in edges:
        for pair in combinations(bits.elements(E), 2):
            out[pair] = out.get(pair, 0) + 1
    return out


def max_codegree(edges: Sequence[int]) -> int:
    return max(pair_codegrees(edges).values(), default=0)


def is_linear(edges: Sequence[int]) -> bool:
    return max_codegree(edges) <= 1


def incidence(edges: Sequence[int]) -> dict:
    at: dict = {}
    for E in edges:
        for x in bits.elements(E):
            at.setdefault(x, []).append(E)
    return at


def elementary_symmetric(values: Sequence[int], b: int) -> int:
    """e_b(values), exact."""
    if b < 0:
        return 0
    e = [1] + [0] * b
    for v in values:
        if not v:
            continue
        for j in range(b, 0, -1):
            e[j] += e[j - 1] * v
    return e[b]


def constant_value(g: WeightFunction) -> Fraction:
    values = set(g.entries.values())
    if len(values) != 1:
        raise PreconditionViolated("g must be constant on its support")
    return values.pop()


# ---------------------------------------------------------------- parameters

@dataclass(frozen=True)
class StarParameters:
    k: int
    ell: int
    L: tuple
    b: tuple

    def size(self, i: int) -> int:
        """Cardinality of every member of G(b_i, L_i); i is 1-based."""
        return self.b[i - 1] * ((self.k - 1) * self.L[i - 1] + 1)

    def to_json(self) -> dict:
        return {"k": self.k, "ell": self.ell, "L": list(self.L), "b": list(self.b)}

    @classmethod
    def from_json(cls, obj) -> "StarParameters":
        return cls(int(obj["k"]), int(obj["ell"]), tuple(int(x) for x in obj["L"]),
                   tuple(int(x) for x in obj["b"]))


def star_parameters(k: int, J, r) -> StarParameters:
    """The unique ell with 2^(2 ell + 3) < J r / (k-1) <= 2^(2 ell + 5), and L_i, b_i."""
    if k < 2:
        raise PreconditionViolated("star systems need k >= 2")
    J, r = Fraction(J), Fraction(r)
    if J * r <= 32 * k:
        raise SmallJrBranch(f"J r = {J * r} <= 2^5 k")
    x = J * r / (k - 1)
    ell = 1
    while not (2 ** (2 * ell + 3) < x <= 2 ** (2 * ell + 5)):
        ell += 1
    Ls = tuple(2 ** (i - 1) for i in range(1, ell + 1))
    bs = tuple(2 ** (2 * (ell - i) - min(i - 1, ell - i)) for i in range(1, ell + 1))
    return StarParameters(k, ell, Ls, bs)


def degree_factor(total: Fraction, k: int, L) -> Const:
    """kappa = (L / 8ek) * (sum g)^(-1 + 1/k); the center threshold is kappa * deg(x)."""
    return Const.of(L) / Const(8 * k, 1) * Const(1, 0, ((total, Fraction(1, k) - 1),))


# ---------------------------------------------------------------- the family

class StarSystem(CoverFamily):
    """Lazy union over i of G(b_i, L_i) on the hypergraph ``edges``.

    ``degrees`` fixes deg(x) for the center threshold; by default it is the
    degree in ``edges``.  Projections keep the degrees of the original graph.
    """

    kind = "star_system"

    def __init__(self, n: int, edges: Sequence[int], params: StarParameters, kappa: Const,
                 degrees: Optional[dict] = None, exact_budget: int = MATERIALIZE_BUDGET,
                 search_budget: int = SEARCH_BUDGET):
        bits.check_width(n)
        self.n = n
        self.edges = tuple(sorted(set(int(E) for E in edges)))
        for E in self.edges:
            if E >> n or bits.popcount(E) != params.k:
                raise ValueError("star system edges must be k-sets of the ground set")
        if not is_linear(self.edges):
            raise PreconditionViolated("star systems need a linear hypergraph")
        self.params = params
        self.kappa = kappa
        self.at = incidence(self.edges)
        self.degree_override = degrees is not None
        self.deg = dict(degrees) if degrees is not None else {x: len(U) for x, U in self.at.items()}
        self.exact_budget = exact_budget
        self.search_budget = search_budget
        self._min_index: dict = {}

    # eligibility -------------------------------------------------------
    def threshold(self, x: int) -> Const:
        return self.kappa * Const(self.deg.get(x, 0))

    def min_index(self, x: int) -> Optional[int]:
        """Smallest 1-based i with kappa deg(x) <= L_i, or None."""
        if x not in self._min_index:
            out = None
            for i, Li in enumerate(self.params.L, start=1):
                if compare(self.threshold(x), Li) <= 0:
                    out = i
                    break
            self._min_index[x] = out
        return self._min_index[x]

    def eligible(self, x: int, i: int) -> bool:
        m = self.min_index(x)
        return m is not None and m <= i

    def star_counts(self, i: int) -> list[int]:
        """binom(edges at z, L_i) for every eligible center z."""
        Li = self.params.L[i - 1]
        return [binom(len(U), Li) for x, U in sorted(self.at.items()) if self.eligible(x, i)]

    # counting and weight ----------------------------------------------
    def count_upper(self) -> int:
        """Number of (center set, stars) choices; at least the number of members."""
        return sum(elementary_symmetric(self.star_counts(i), self.params.b[i - 1])
                   for i in range(1, self.params.ell + 1))

    def count(self) -> int:
        return self.count_upper()

    @property
    def weight_is_exact(self) -> bool:
        return self.count_upper() <= self.exact_budget

    def weight(self, p) -> Interval:
        p = to_interval(p)
        if self.weight_is_exact:
            total = Interval(0)
            for T in self.materialize(self.exact_budget):
                total = total + p ** bits.popcount(T)
            return total
        return Interval(0, self.counting_bound(p).hi)

    def counting_bound(self, p) -> Interval:
        """sum_i e_{b_i}(binom(deg z, L_i) 1{eligible}) p^{size_i}."""
        p = to_interval(p)
        total = Interval(0)
        for i in range(1, self.params.ell + 1):
            c = elementary_symmetric(self.star_counts(i), self.params.b[i - 1])
            if c:
                total = total + (p ** self.params.size(i)) * c
        return total

    # enumeration -------------------------------------------------------
    def _stars(self, x: int, Li: int, allowed: int):
        avail = [E for E in self.at.get(x, ()) if E & allowed == E]
        for U in combinations(avail, Li):
            yield U

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        if self.count_upper() > budget:
            raise MaterializationTooLarge(f"star system has up to {self.count_upper()} members")
        out: set[int] = set()
        full = bits.full(self.n)
        for i in range(1, self.params.ell + 1):
            Li, bi = self.params.L[i - 1], self.params.b[i - 1]
            centers = [x for x in sorted(self.at) if self.eligible(x, i)]

            def rec(start, used, union, left):
                if left == 0:
                    out.add(union)
                    return
                for idx in range(start, len(centers)):
                    x = centers[idx]
                    if used >> x & 1:
                        continue
                    for U in self._stars(x, Li, full & ~used):
                        V = 0
                        for E in U:
                            V |= E
                        rec(idx + 1, used | V, union | V, left - 1)

            rec(0, 0, 0, bi)
        return sorted(out)

    # membership --------------------------------------------------------
    def find_stars(self, S: int, i: int) -> Optional[list]:
        """b_i vertex-disjoint qualifying L_i-stars inside S, or None.

        Backtracking search; raises WitnessSearchInconclusive past the budget.
        """
        Li, bi = self.params.L[i - 1], self.params.b[i - 1]
        centers = []
        for x in bits.elements(S):
            if not self.eligible(x, i):
                continue
            if sum(1 for E in self.at.get(x, ()) if E & S == E) >= Li:
                centers.append(x)
        if len(centers) < bi:
            return None
        nodes = 0

        def rec(start, used, chosen):
            nonlocal nodes
            if len(chosen) == bi:
                return list(chosen)
            if len(centers) - start < bi - len(chosen):
                return None
            for idx in range(start, len(centers)):
                x = centers[idx]
                if used >> x & 1:
                    continue
                for U in self._stars(x, Li, S & ~used):
                    nodes += 1
                    if nodes > self.search_budget:
                        raise WitnessSearchInconclusive(
                            f"star search exceeded {self.search_budget} nodes")
                    V = 0
                    for E in U:
                        V |= E
                    chosen.append((x, U))
                    res = rec(idx + 1, used | V, chosen)
                    if res is not None:
                        return res
                    chosen.pop()
            return None

        return rec(0, 0, [])

    def member(self, S: int) -> bool:
        for i in range(1, self.params.ell + 1):
            if self.find_stars(S, i) is not None:
                return True
        return False

    def project(self, offset: int, size: int) -> "StarSystem":
        W = bits.full(size) << offset
        edges = [E >> offset for E in self.edges if E & W == E]
        degrees = {x - offset: d for x, d in self.deg.items() if offset <= x < offset + size}
        return StarSystem(size, edges, self.params, self.kappa, degrees, self.exact_budget,
                          self.search_budget)

    def to_json(self) -> dict:
        out = {"kind": self.kind, "n": self.n, "edges": [bits.elements(E) for E in self.edges],
               "params": self.params.to_json(), "kappa": self.kappa.to_json()}
        if self.degree_override:
            out["degrees"] = [[x, d] for x, d in sorted(self.deg.items())]
        return out


@register("star_system")
def _star_from_json(o) -> StarSystem:
    degrees = {int(x): int(d) for x, d in o["degrees"]} if "degrees" in o else None
    return StarSystem(int(o["n"]), [bits.mask(E) for E in o["edges"]],
                      StarParameters.from_json(o["params"]), Const.from_json(o["kappa"]), degrees)


# ---------------------------------------------------------------- greedy witness

@dataclass
class StarWitness:
    index: int
    centers: list
    stars: list  # per center, the list of edge masks
    greedy_degrees: list = field(default_factory=list)

    @property
    def union(self) -> int:
        out = 0
        for U in self.stars:
            for E in U:
                out |= E
        return out

    def to_json(self) -> dict:
        return {"index": self.index, "centers": self.centers,
                "stars": [[bits.elements(E) for E in U] for U in self.stars]}


def _system_for(g: WeightFunction, L, J) -> StarSystem:
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    c = constant_value(g)
    params = star_parameters(k, J, 1 / c)
    return StarSystem(g.n, g.support, params, degree_factor(g.total, k, L))


def greedy_stars(system: StarSystem, S: int) -> list:
    """Greedy disjoint stars in S: largest qualifying star first, ties by center index.

    Returns [(center, edges)], where edges are all edges at the center
    inside the remaining set.
    """
    remaining = S
    out = []
    while True:
        best = None
        for x in bits.elements(remaining):
            U = [E for E in system.at.get(x, ()) if E & remaining == E]
            if not U:
                continue
            if compare(system.threshold(x), len(U)) > 0:
                continue
            if best is None or len(U) > len(best[1]):
                best = (x, U)
        if best is None:
            return out
        x, U = best
        out.append(best)
        V = 1 << x
        for E in U:
            V |= E
        remaining &= ~V


def star_greedy_witness(g: WeightFunction, S: int, L, J,
                        system: Optional[StarSystem] = None) -> Optional[StarWitness]:
    """Greedy stars in S, then an index i with b_i stars truncated to L_i edges.

    A greedy star counts for index i when it has at least L_i edges and its
    center meets the threshold at L_i.  Returns None when no index qualifies.
    """
    if system is None:
        system = _system_for(g, L, J)
    found = greedy_stars(system, S)
    params = system.params
    for i in range(1, params.ell + 1):
        Li, bi = params.L[i - 1], params.b[i - 1]
        good = [(x, U) for x, U in found if len(U) >= Li and system.eligible(x, i)]
        if len(good) >= bi:
            chosen = good[:bi]
            return StarWitness(i, [x for x, _ in chosen], [sorted(U)[:Li] for _, U in chosen],
                               [len(U) for _, U in found])
    return None


def witness_violations(w: StarWitness, system: StarSystem, S: int) -> list[str]:
    """Every broken witness invariant, as text; empty when the witness is sound."""
    bad = []
    Li = system.params.L[w.index - 1]
    if len(w.centers) != system.params.b[w.index - 1]:
        bad.append("wrong number of stars")
    seen = 0
    for x, U in zip(w.centers, w.stars):
        if len(U) != Li:
            bad.append(f"star at {x} has {len(U)} edges, expected {Li}")
        V = 0
        for E in U:
            if not (E >> x & 1) or E not in system.at.get(x, ()):
                bad.append(f"edge {bits.elements(E)} is not at center {x}")
            V |= E
        for E, F in combinations(U, 2):
            if E & F != 1 << x:
                bad.append(f"edges at {x} meet outside the center")
        if V & ~S:
            bad.append(f"star at {x} leaves S")
        if V & seen:
            bad.append(f"star at {x} is not vertex-disjoint from earlier stars")
        seen |= V
        if compare(system.threshold(x), Li) > 0:
            bad.append(f"center {x} fails the degree threshold at L_i = {Li}")
    return bad


# ---------------------------------------------------------------- weight chain

def _dyadic_pow(base: Interval, x: Fraction, digits: int) -> Interval:
    """base**x for 0 < base <= 1 and dyadic x = N / 2^digits, via repeated square roots."""
    N = int(x * 2 ** digits)
    whole, frac = divmod(N, 2 ** digits)
    out = base ** whole
    r = base
    for j in range(digits - 1, -1, -1):
        r = r.root(2)
        if frac >> j & 1:
            out = out * r
    return out


def _pow_irrational(base: Interval, x: Interval, digits: int = 40) -> Interval:
    """Enclosure of base**x for 0 < base <= 1 and x >= 0 irrational."""
    den = 2 ** digits
    x_lo = max(Fraction(math.floor(x.lo * den), den), Fraction(0))
    x_hi = Fraction(math.ceil(x.hi * den), den)
    lo = _dyadic_pow(Interval(base.lo), x_hi, digits).lo
    hi = _dyadic_pow(Interval(base.hi), x_lo, digits).hi
    return Interval(lo, hi)


def theorem_bound(J, r, L) -> Fraction:
    """A rational lower bound for (1/L)^(sqrt(J r) / 2^7); certifying below it is sound."""
    Li = to_interval(Const.of(L))
    if Li.lo < 1:
        raise PreconditionViolated("L must be at least 1")
    x = Interval(Fraction(J) * Fraction(r)).root(2) / 128
    return _pow_irrational(Interval(1) / Li, x).lo


def weight_chain(g: WeightFunction, L, J, system: Optional[StarSystem] = None) -> list:
    """Successive upper bounds on w(G, p/L) for the star family, as (name, Interval).

    The first entry is exact when the family can be enumerated.
    """
    if system is None:
        system = _system_for(g, L, J)
    P = system.params
    k, n = P.k, g.n
    r = 1 / constant_value(g)
    Jf = Fraction(J)
    p = unit_weight_exact(g).interval()
    Lv = to_interval(Const.of(L))
    e = e_interval()
    q = p / Lv
    ells = range(1, P.ell + 1)
    degs = [len(system.at.get(x, ())) for x in range(n)]
    out = []
    if system.weight_is_exact:
        out.append(("exact", system.weight(q)))
    out.append(("star_count", system.counting_bound(q)))
    growth = Interval(8 * k) * e * e / (Lv * p ** (k - 1))
    b3 = Interval(0)
    b4 = Interval(0)
    for i in ells:
        Li, bi = P.L[i - 1], P.b[i - 1]
        common = (e / Li) ** bi * growth ** (bi * (Li - 1)) * q ** P.size(i)
        b3 = b3 + common * elementary_symmetric(degs, bi)
        mean = Interval(Fraction(r) * k) / p ** k / n
        b4 = b4 + common * binom(n, bi) * mean ** bi
    out.append(("degree_product", b3))
    out.append(("equal_degrees", b4))
    Lk = Lv ** k
    b5 = Interval(0)
    b6 = Interval(0)
    b7 = Interval(0)
    half_k = Lk.root(2)
    for i in ells:
        Li, bi = P.L[i - 1], P.b[i - 1]
        b5 = b5 + (e * e * (Fraction(r) * k) / (Lk * (bi * Li))) ** bi \
            * (e * e * (8 * k) / Lk) ** (bi * (Li - 1))
        b6 = b6 + (e * e * (128 * k * k) / (Lk * Jf)) ** bi * (e * e * (32 * k) / Lk) ** (bi * (Li - 1))
        b7 = b7 + Interval(Fraction(1, 2 ** bi)) * (Interval(1) / half_k) ** (bi * Li)
    out.append(("binomial", b5))
    out.append(("parameters", b6))
    out.append(("geometric", b7))
    s = Interval(Jf * Fraction(r)).root(2)
    out.append(("sqrt_16", _pow_irrational(Interval(1) / Lv, s / 16)))
    out.append(("sqrt_128", _pow_irrational(Interval(1) / Lv, s / 128)))
    return out


# ---------------------------------------------------------------- the cover

def linear_constant_cover(g: WeightFunction, p=None, J=1, L=None, mode: Optional[str] = None,
                          exact_budget: int = MATERIALIZE_BUDGET, seed: int = 0):
    """Cover <g>_{J,L} for g constant 1/r on a linear k-uniform support.

    Small J r: G = supp(g).  Otherwise the star system.  Both certify
    w(G, p/L) <= (1/L)^(sqrt(J r) / 2^7) through a rational lower bound.
    """
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    c = constant_value(g)
    if not is_linear(g.support):
        raise PreconditionViolated("support of g is not linear")
    if L is None:
        L = Const(2 ** 10, 2)
    L = Const.of(L)
    J = Fraction(J)
    if p is None:
        p = unit_weight_exact(g)
    check_unit_weight(g, p)
    r = 1 / c
    bound = theorem_bound(J, r, L)
    guaranteed = compare(L, Const(2 ** 10, 2)) >= 0
    prov = {"construction": "linear_constant_cover", "J": str(J), "r": str(r), "L": L.to_json(),
            "guaranteed": guaranteed, "bound_exponent": "sqrt(J r)/2^7"}
    if J * r <= 32 * k:
        G = Explicit(g.n, g.support)
        prov["branch"] = "support"
        half = L ** Fraction(-k, 2)
        scaled = Const.of(p) / L if not isinstance(p, Interval) else p / L.interval()
        _, ok = certified_weight(G, scaled, half)
        prov["below_L_to_minus_k_over_2"] = ok
    else:
        params = star_parameters(k, J, r)
        G = StarSystem(g.n, g.support, params, degree_factor(g.total, k, L),
                       exact_budget=exact_budget)
        prov["branch"] = "stars"
        prov["params"] = params.to_json()
        prov["weight_exact"] = G.weight_is_exact
    if mode is None:
        mode = "exhaustive" if g.n <= JL_EXHAUSTIVE_MAX_N else "sampled:2000"
    cert = Certificate(g, p, G, L, bound, mode, seed, JLTarget(J, L), prov)
    return G, certify(cert)

"""Weight functions g, monotone families F, and the evaluations built on them.

``w(g, p) = sum_T g(T) p^|T|`` and ``<g> = {S : sum_{T subset S} g(T) >= 1}``.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

import numpy as np

from . import bits
from .errors import BudgetExceeded, IndeterminateAtPrecision, NoRoot, ParseError
from .interval import Const, Interval, compare, get_prec, to_fraction_str, to_interval

ENUM_BUDGET = 22


def parse_fraction(s) -> Fraction:
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise ParseError(f"bad rational {s!r}") from exc


@dataclass(frozen=True, eq=False)
class WeightFunction:
    """Sparse nonnegative weights on nonempty subsets of {0..n-1}."""

    n: int
    entries: Mapping[int, Fraction] = field(default_factory=dict)

    def __post_init__(self):
        bits.check_width(self.n)
        clean = {}
        for S, w in self.entries.items():
            w = Fraction(w)
            if S == 0:
                if w != 0:
                    raise ValueError("a weight function may not put weight on the empty set")
                continue
            if S < 0 or S >> self.n:
                raise ValueError(f"support set {bits.elements(S)} outside ground set of size {self.n}")
            if w < 0:
                raise ValueError("weights must be nonnegative")
            if w:
                clean[S] = w
        object.__setattr__(self, "entries", dict(sorted(clean.items())))

    @classmethod
    def from_sets(cls, n: int, weights: Union[Mapping, Iterable]) -> "WeightFunction":
        items = weights.items() if isinstance(weights, Mapping) else weights
        out: dict[int, Fraction] = {}
        for S, w in items:
            m = bits.mask(S)
            out[m] = out.get(m, Fraction(0)) + Fraction(w)
        return cls(n, out)

    @classmethod
    def indicator(cls, n: int, family: Iterable[int]) -> "WeightFunction":
        return cls(n, {T: Fraction(1) for T in family})

    def __eq__(self, other):
        return isinstance(other, WeightFunction) and self.n == other.n and self.entries == other.entries

    def __hash__(self):
        return hash((self.n, tuple(self.entries.items())))

    def __len__(self):
        return len(self.entries)

    def __repr__(self):
        body = ", ".join(f"{bits.elements(S)}: {w}" for S, w in list(self.entries.items())[:6])
        more = ", ..." if len(self.entries) > 6 else ""
        return f"WeightFunction(n={self.n}, {{{body}{more}}})"

    @property
    def support(self) -> list[int]:
        return list(self.entries)

    @cached_property
    def uniform_k(self) -> Optional[int]:
        sizes = {bits.popcount(S) for S in self.entries}
        return sizes.pop() if len(sizes) == 1 else None

    @cached_property
    def total(self) -> Fraction:
        return sum(self.entries.values(), Fraction(0))

    @cached_property
    def by_size(self) -> dict[int, Fraction]:
        out: dict[int, Fraction] = {}
        for S, w in self.entries.items():
            s = bits.popcount(S)
            out[s] = out.get(s, Fraction(0)) + w
        return dict(sorted(out.items()))

    @cached_property
    def degrees(self) -> dict[int, Fraction]:
        """Weighted vertex degree: x -> sum of g(T) over T containing x."""
        out: dict[int, Fraction] = {}
        for S, w in self.entries.items():
            for x in bits.elements(S):
                out[x] = out.get(x, Fraction(0)) + w
        return out

    @cached_property
    def integer_form(self) -> tuple[int, tuple]:
        """(D, ((T, D g(T)), ...)) with D the common denominator; all numerators integers."""
        D = 1
        for w in self.entries.values():
            D = D * w.denominator // math.gcd(D, w.denominator)
        return D, tuple((T, int(w * D)) for T, w in self.entries.items())

    @cached_property
    def integer_degrees(self) -> dict[int, int]:
        """D * deg(x), with D from ``integer_form``."""
        D, items = self.integer_form
        out: dict[int, int] = {}
        for T, a in items:
            for x in bits.elements(T):
                out[x] = out.get(x, 0) + a
        return out

    def weight(self, p) -> Interval:
        return weight_of_function(self, p)

    def upset_sum(self, S: int) -> Fraction:
        D, items = self.integer_form
        return Fraction(sum(a for T, a in items if T & S == T), D)

    def member(self, S: int) -> bool:
        D, items = self.integer_form
        acc = 0
        for T, a in items:
            if T & S == T:
                acc += a
                if acc >= D:
                    return True
        return False

    def scaled(self, c) -> "WeightFunction":
        c = Fraction(c)
        return WeightFunction(self.n, {S: c * w for S, w in self.entries.items()})

    def clamped(self, cap=1) -> "WeightFunction":
        cap = Fraction(cap)
        return WeightFunction(self.n, {S: min(w, cap) for S, w in self.entries.items()})

    def restricted(self, keep: Callable[[int], bool]) -> "WeightFunction":
        return WeightFunction(self.n, {S: w for S, w in self.entries.items() if keep(S)})

    def split_by_size(self) -> dict[int, "WeightFunction"]:
        out: dict[int, dict[int, Fraction]] = {}
        for S, w in self.entries.items():
            out.setdefault(bits.popcount(S), {})[S] = w
        return {k: WeightFunction(self.n, e) for k, e in sorted(out.items())}

    def member_table(self) -> np.ndarray:
        """Boolean array over all 2^n subsets: S in <g>."""
        return upset_table(self)

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "entries": [{"set": bits.elements(S), "weight": to_fraction_str(w)}
                        for S, w in self.entries.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "WeightFunction":
        try:
            n = int(obj["n"])
            items = [(e["set"], parse_fraction(e["weight"])) for e in obj["entries"]]
        except (KeyError, TypeError) as exc:
            raise ParseError(f"malformed weight function: {exc}") from exc
        try:
            return cls.from_sets(n, items)
        except ValueError as exc:
            raise ParseError(str(exc)) from exc


@dataclass(frozen=True, eq=False)
class MonotoneFamily:
    """Increasing nontrivial family given by its antichain of minimal sets."""

    n: int
    minimal: tuple

    def __post_init__(self):
        bits.check_width(self.n)
        mins = sorted(set(int(M) for M in self.minimal))
        if not mins:
            raise ValueError("family is empty (trivial)")
        if 0 in mins:
            raise ValueError("family contains the empty set, i.e. it is 2^X (trivial)")
        for M in mins:
            if M >> self.n:
                raise ValueError(f"minimal set {bits.elements(M)} outside ground set")
        for i, A in enumerate(mins):
            for B in mins[i + 1:]:
                if A & B == A or A & B == B:
                    raise ValueError(f"not an antichain: {bits.elements(A)} vs {bits.elements(B)}")
        object.__setattr__(self, "minimal", tuple(mins))

    @classmethod
    def from_sets(cls, n: int, sets: Iterable[Iterable[int]], prune: bool = False) -> "MonotoneFamily":
        masks = [bits.mask(s) for s in sets]
        if prune:
            masks = antichain(masks)
        return cls(n, tuple(masks))

    def __eq__(self, other):
        return isinstance(other, MonotoneFamily) and (self.n, self.minimal) == (other.n, other.minimal)

    def __hash__(self):
        return hash((self.n, self.minimal))

    def member(self, S: int) -> bool:
        return any(M & S == M for M in self.minimal)

    def member_table(self) -> np.ndarray:
        arr = _all_subsets(self.n)
        out = np.zeros(arr.shape, dtype=bool)
        for M in self.minimal:
            out |= (arr & np.int64(M)) == M
        return out

    def to_json(self) -> dict:
        return {"n": self.n, "minimal": [bits.elements(M) for M in self.minimal]}

    @classmethod
    def from_json(cls, obj) -> "MonotoneFamily":
        try:
            return cls.from_sets(int(obj["n"]), obj["minimal"])
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"malformed monotone family: {exc}") from exc


def antichain(masks: Iterable[int]) -> list[int]:
    """Inclusion-minimal members of ``masks`` (deduplicated, sorted)."""
    ms = sorted(set(masks), key=lambda m: (bits.popcount(m), m))
    kept: list[int] = []
    for m in ms:
        if not any(k & m == k for k in kept):
            kept.append(m)
    return sorted(kept)


def _all_subsets(n: int) -> np.ndarray:
    if n > 62:
        raise BudgetExceeded(f"cannot tabulate 2^{n} subsets")
    return np.arange(1 << n, dtype=np.int64)


def _zeta_sum(values: np.ndarray, n: int) -> np.ndarray:
    """In-place subset-sum transform: out[S] = sum_{T subset S} values[T]."""
    for i in range(n):
        v = values.reshape(-1, 2, 1 << i)
        v[:, 1, :] += v[:, 0, :]
    return values


def upset_table(g: WeightFunction, budget: int = ENUM_BUDGET) -> np.ndarray:
    n = g.n
    if n > budget:
        raise BudgetExceeded(f"n={n} exceeds exhaustive budget {budget}")
    if not g.entries:
        return np.zeros(1 << n, dtype=bool)
    denom = 1
    for w in g.entries.values():
        denom = denom * w.denominator // np.gcd(denom, w.denominator)
    scaled = {S: int(w * denom) for S, w in g.entries.items()}
    if sum(scaled.values()) < 2 ** 62:
        vals = np.zeros(1 << n, dtype=np.int64)
    else:
        vals = np.zeros(1 << n, dtype=object)
        vals[:] = 0
    for S, v in scaled.items():
        vals[S] = v
    _zeta_sum(vals, n)
    return vals >= denom


def weight_of_function(g: WeightFunction, p) -> Interval:
    """Enclosure of w(g, p) = sum_T g(T) p^|T|."""
    pi = to_interval(p)
    total = Interval(0)
    for s, c in g.by_size.items():
        total = total + (pi ** s) * c
    return total


def weight_of_cover(G, p) -> Interval:
    return G.weight(p)


def member_upset(x, S: int) -> bool:
    """S in <g> (weight function) or S in <G> (cover family)."""
    return x.member(S)


def jl_degree_term(g: WeightFunction, L, S: int):
    """(L / 4ek) * (sum g)^(-1+1/k) * sum_{x in S} deg(x), as an exact Const."""
    k = g.uniform_k
    D, _ = g.integer_form
    deg = g.integer_degrees
    degsum = Fraction(sum(deg.get(x, 0) for x in bits.elements(S)), D)
    if degsum == 0:
        return Const(0)
    return (Const.of(L) / Const(4 * k, 1)) * Const(degsum, 0, ((g.total, Fraction(1 - k, k)),))


def member_upset_JL(g: WeightFunction, J, L, S: int) -> bool:
    """S in <g>_{J,L}; raises IndeterminateAtPrecision if undecidable at max precision."""
    k = g.uniform_k
    if k is None or not g.entries:
        raise ValueError("<g>_{J,L} needs a nonempty uniform weight function")
    lhs = g.upset_sum(S)
    if compare(lhs, Const.of(J)) < 0:
        return False
    return compare(lhs, jl_degree_term(g, L, S)) >= 0


def member_upset_JL_tri(g: WeightFunction, J, L, S: int) -> Optional[bool]:
    try:
        return member_upset_JL(g, J, L, S)
    except IndeterminateAtPrecision:
        return None


def minimal_elements(member, n: int, budget: int = ENUM_BUDGET) -> list[int]:
    """Inclusion-minimal S with member(S) true, by exhaustive scan of 2^n.

    ``member`` is either a predicate on masks or an object exposing
    ``member_table()`` (weight functions, monotone and cover families).
    """
    if n > budget:
        raise BudgetExceeded(f"n={n} exceeds exhaustive budget {budget}")
    if hasattr(member, "member_table"):
        table = np.asarray(member.member_table(), dtype=bool)
    else:
        table = np.fromiter((bool(member(S)) for S in range(1 << n)), dtype=bool, count=1 << n)
    return minimal_from_table(table, n)


def minimal_from_table(table: np.ndarray, n: int) -> list[int]:
    arr = np.arange(1 << n, dtype=np.int64)
    nonmin = np.zeros(1 << n, dtype=bool)
    for i in range(n):
        bit = np.int64(1 << i)
        has = (arr & bit) != 0
        nonmin |= has & table[arr ^ bit]
    return [int(S) for S in np.nonzero(table & ~nonmin)[0]]


def upset_minimal_elements(g: WeightFunction, budget: int = ENUM_BUDGET,
                           state_budget: int = 200_000) -> list[int]:
    """Minimal elements of <g>.

    Exhaustive for n within ``budget``; otherwise a search over unions of
    support sets (every minimal element of <g> is such a union), expanding
    each union below weight 1 once.
    """
    if g.n <= budget:
        return minimal_elements(g, g.n, budget)
    edges = list(g.entries.items())
    found: set[int] = set()
    seen: set[int] = set()
    frontier = []
    for T, _ in edges:
        if T not in seen:
            seen.add(T)
            frontier.append(T)
    while frontier:
        nxt = []
        for U in frontier:
            if g.member(U):
                found.add(U)
                continue
            for T, _ in edges:
                if T & U == T:
                    continue
                V = U | T
                if V in seen:
                    continue
                seen.add(V)
                if len(seen) > state_budget:
                    raise BudgetExceeded(f"more than {state_budget} support unions explored")
                nxt.append(V)
        frontier = nxt
    return antichain(found)


def unit_weight_exact(g: WeightFunction) -> Optional[Const]:
    """Closed form p = (sum g)^(-1/k) for uniform g, else None."""
    k = g.uniform_k
    if k is None or not g.entries:
        return None
    return Const(1, 0, ((g.total, Fraction(-1, k)),))


def unit_weight_p(g: WeightFunction, bits_: Optional[int] = None) -> Interval:
    """Enclosure of the unique p in [0, 1] with w(g, p) = 1."""
    w1 = g.total
    if w1 < 1:
        raise NoRoot(f"w(g, 1) = {w1} < 1, no p in [0,1] has unit weight")
    exact = unit_weight_exact(g)
    if exact is not None:
        return exact.interval()
    nbits = bits_ or get_prec()
    lo, hi = Fraction(0), Fraction(1)
    poly = g.by_size
    for _ in range(nbits):
        mid = (lo + hi) / 2
        val = sum((c * mid ** s for s, c in poly.items()), Fraction(0))
        if val == 1:
            return Interval(mid)
        if val < 1:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def size_counts(F: MonotoneFamily, budget: int = ENUM_BUDGET) -> list[int]:
    """a_s = number of members of F with exactly s elements."""
    if F.n > budget:
        raise BudgetExceeded(f"n={F.n} exceeds exhaustive budget {budget}")
    table = F.member_table()
    sizes = np.bitwise_count(np.nonzero(table)[0].astype(np.uint64))
    counts = np.bincount(sizes.astype(np.int64), minlength=F.n + 1)
    return [int(c) for c in counts]


def _prob_from_counts(counts: Sequence[int], n: int, p: Fraction) -> Fraction:
    q = 1 - p
    return sum((c * p ** s * q ** (n - s) for s, c in enumerate(counts) if c), Fraction(0))


def containment_probability(F: MonotoneFamily, p, budget: int = ENUM_BUDGET) -> Fraction:
    """Exact P[X_p in F] for rational p."""
    p = Fraction(p)
    if F.n <= budget:
        return _prob_from_counts(size_counts(F, budget), F.n, p)
    if len(F.minimal) <= 20:
        return _inclusion_exclusion(F, p)
    raise BudgetExceeded(f"n={F.n} and {len(F.minimal)} minimal sets exceed budgets")


def _inclusion_exclusion(F: MonotoneFamily, p: Fraction) -> Fraction:
    mins = F.minimal
    total = Fraction(0)
    for r in range(1, 1 << len(mins)):
        U = 0
        for i, M in enumerate(mins):
            if r >> i & 1:
                U |= M
        sign = 1 if bin(r).count("1") % 2 else -1
        total += sign * p ** bits.popcount(U)
    return total


def threshold_pc(F: MonotoneFamily, bits_: int = 64, budget: int = ENUM_BUDGET) -> Interval:
    """Enclosure of the unique p_c with P[X_{p_c} in F] = 1/2, width <= 2^-bits_."""
    if F.n <= budget:
        counts = size_counts(F, budget)
        prob = lambda p: _prob_from_counts(counts, F.n, p)  # noqa: E731
    else:
        prob = lambda p: containment_probability(F, p, budget)  # noqa: E731
    lo, hi = Fraction(0), Fraction(1)
    half = Fraction(1, 2)
    for _ in range(bits_):
        mid = (lo + hi) / 2
        v = prob(mid)
        if v == half:
            return Interval(mid)
        if v < half:
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def binom(n: int, k: int) -> int:
    return comb(n, k) if 0 <= k <= n else 0


class _UpsetCounter:
    """Running value of sum_{T subset S} g(T) under single-element updates."""

    def __init__(self, g: WeightFunction):
        self.g = g
        self.edges = list(g.entries.items())
        self.size = [bits.popcount(T) for T, _ in self.edges]
        self.at: dict[int, list[int]] = {}
        for idx, (T, _) in enumerate(self.edges):
            for x in bits.elements(T):
                self.at.setdefault(x, []).append(idx)
        self.reset()

    def reset(self):
        self.missing = list(self.size)
        self.value = Fraction(0)
        self.S = 0

    def add(self, x: int):
        self.S |= 1 << x
        for idx in self.at.get(x, ()):
            self.missing[idx] -= 1
            if self.missing[idx] == 0:
                self.value += self.edges[idx][1]

    def remove(self, x: int):
        self.S &= ~(1 << x)
        for idx in self.at.get(x, ()):
            if self.missing[idx] == 0:
                self.value -= self.edges[idx][1]
            self.missing[idx] += 1

    def removal_value(self, x: int) -> Fraction:
        v = self.value
        for idx in self.at.get(x, ()):
            if self.missing[idx] == 0:
                v -= self.edges[idx][1]
        return v


def sample_upset_minimal(g: WeightFunction, count: int, seed: int) -> list[int]:
    """``count`` random minimal elements of <g> (with repetition), deterministic per seed.

    Each sample grows a random permutation prefix until it enters <g>, then
    drops elements in random order while staying inside.
    """
    import random

    if not g.member(bits.full(g.n)):
        return []
    rng = random.Random(seed)
    counter = _UpsetCounter(g)
    verts = sorted(counter.at)
    out = []
    for _ in range(count):
        counter.reset()
        order = verts[:]
        rng.shuffle(order)
        for x in order:
            counter.add(x)
            if counter.value >= 1:
                break
        inside = bits.elements(counter.S)
        rng.shuffle(inside)
        for x in inside:
            if counter.removal_value(x) >= 1:
                counter.remove(x)
        out.append(counter.S)
    return out

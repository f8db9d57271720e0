"""Cover families G and membership in their up-sets <G>.

Every variant answers ``member(S)`` (is some T in G contained in S) and
``weight(p)`` (w(G, p) = sum_{T in G} p^|T|) without listing its members.
``materialize`` lists them under a budget.
"""

from fractions import Fraction
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from . import bits
from .errors import MaterializationTooLarge, ParseError
from .interval import Interval, get_prec, to_interval
from .weights import binom

MATERIALIZE_BUDGET = 200_000


def _table_indices(n: int) -> np.ndarray:
    if n > 30:
        raise MaterializationTooLarge(f"cannot tabulate 2^{n} subsets")
    return np.arange(1 << n, dtype=np.int64)


def _popcount_table(arr: np.ndarray) -> np.ndarray:
    return np.bitwise_count(arr.astype(np.uint64)).astype(np.int64)


def _window(offset: int, size: int) -> int:
    return bits.full(size) << offset


class CoverFamily:
    """Base class; subclasses set ``kind`` and ``n``."""

    kind = "abstract"
    n: int
    # False when weight() only returns an upper bound (lower end 0).
    weight_is_exact = True

    def member(self, S: int) -> bool:
        raise NotImplementedError

    def member_table(self) -> np.ndarray:
        return np.fromiter((self.member(S) for S in range(1 << self.n)), dtype=bool, count=1 << self.n)

    def weight(self, p) -> Interval:
        raise NotImplementedError

    def count(self) -> int:
        raise NotImplementedError

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        raise NotImplementedError

    def project(self, offset: int, size: int) -> "CoverFamily":
        """Members contained in the window [offset, offset+size), shifted to start at 0."""
        W = _window(offset, size)
        return Explicit(size, [T >> offset for T in self.materialize() if T & W == T])

    def explicit(self, budget: int = MATERIALIZE_BUDGET) -> "Explicit":
        return Explicit(self.n, self.materialize(budget))

    def to_json(self) -> dict:
        raise NotImplementedError

    def _check_budget(self, budget: int) -> None:
        c = self.count()
        if c > budget:
            raise MaterializationTooLarge(f"{self.kind} family has {c} members, budget {budget}")


class Explicit(CoverFamily):
    kind = "explicit"

    def __init__(self, n: int, members: Sequence[int]):
        bits.check_width(n)
        ms = sorted(set(int(T) for T in members))
        if ms and ms[0] == 0:
            raise ValueError("the empty set may not be a cover member")
        for T in ms:
            if T >> n:
                raise ValueError(f"member {bits.elements(T)} outside ground set of size {n}")
        self.n = n
        self.members = tuple(ms)

    @classmethod
    def from_sets(cls, n, sets) -> "Explicit":
        return cls(n, [bits.mask(s) for s in sets])

    def member(self, S: int) -> bool:
        return any(T & S == T for T in self.members)

    def member_table(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=bool)
        if self.n > 30:
            raise MaterializationTooLarge(f"cannot tabulate 2^{self.n} subsets")
        out[list(self.members)] = True
        for i in range(self.n):
            v = out.reshape(-1, 2, 1 << i)
            v[:, 1, :] |= v[:, 0, :]
        return out

    def weight(self, p) -> Interval:
        counts: dict[int, int] = {}
        for T in self.members:
            s = bits.popcount(T)
            counts[s] = counts.get(s, 0) + 1
        pi = to_interval(p)
        total = Interval(0)
        for s, c in sorted(counts.items()):
            total = total + (pi ** s) * c
        return total

    def count(self) -> int:
        return len(self.members)

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        self._check_budget(budget)
        return list(self.members)

    def without(self, T: int) -> "Explicit":
        return Explicit(self.n, [m for m in self.members if m != T])

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "members": [bits.elements(T) for T in self.members]}


class Levels(CoverFamily):
    """G = union over j >= 1 of the j-subsets of pools[j-1]."""

    kind = "levels"

    def __init__(self, n: int, pools: Sequence[int]):
        bits.check_width(n)
        self.n = n
        self.pools = tuple(int(P) for P in pools)
        for P in self.pools:
            if P >> n:
                raise ValueError("pool outside ground set")

    def member(self, S: int) -> bool:
        size = bits.popcount(S)
        for j, P in enumerate(self.pools[:size], start=1):
            if bits.popcount(S & P) >= j:
                return True
        return False

    def member_table(self) -> np.ndarray:
        arr = _table_indices(self.n)
        out = np.zeros(arr.shape, dtype=bool)
        for j, P in enumerate(self.pools, start=1):
            if bits.popcount(P) >= j:
                out |= _popcount_table(arr & np.int64(P)) >= j
        return out

    def weight(self, p) -> Interval:
        pi = to_interval(p)
        total = Interval(0)
        power = Interval(1)
        sizes = [bits.popcount(P) for P in self.pools]
        # suffix maxima of pool sizes bound every later binomial
        top = sizes[:]
        for j in range(len(top) - 2, -1, -1):
            top[j] = max(top[j], top[j + 1])
        tiny = Fraction(1, 2 ** (get_prec() + 8))
        for j, s in enumerate(sizes, start=1):
            power = power * pi
            c = binom(s, j)
            if c:
                total = total + power * c
            if j < len(sizes):
                N = top[j]
                rho = N * pi.hi / (j + 1)
                head = power.hi * binom(N, j)
                if rho <= Fraction(1, 2) and head <= tiny * max(total.lo, tiny):
                    # later terms shrink by a factor rho each: their sum is below head
                    return total + Interval(0, head)
        return total

    def count(self) -> int:
        return sum(binom(bits.popcount(P), j) for j, P in enumerate(self.pools, start=1))

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        self._check_budget(budget)
        out = []
        for j, P in enumerate(self.pools, start=1):
            out.extend(bits.mask(c) for c in combinations(bits.elements(P), j))
        return sorted(out)

    def project(self, offset: int, size: int) -> "Levels":
        W = _window(offset, size)
        return Levels(size, [(P & W) >> offset for P in self.pools])

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "pools": [bits.elements(P) for P in self.pools]}


class SingletonLevels(Levels):
    """Level j is every j-subset of the first min(j*a, n) elements of ``order``."""

    kind = "singleton_levels"

    def __init__(self, n: int, order: Sequence[int], a: int):
        if a < 1:
            raise ValueError("level bound a must be >= 1")
        order = [int(x) for x in order]
        if sorted(order) != sorted(set(order)) or any(x >= n or x < 0 for x in order):
            raise ValueError("order must list distinct elements of the ground set")
        self.order = tuple(order)
        self.a = int(a)
        m = len(order)
        prefix = [0]
        for x in order:
            prefix.append(prefix[-1] | (1 << x))
        pools = [prefix[min(j * a, m)] for j in range(1, m + 1)]
        super().__init__(n, pools)

    def top(self, j: int) -> int:
        return self.pools[j - 1]

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "order": list(self.order), "a": self.a}


class Volume(CoverFamily):
    """G = all t-subsets of V."""

    kind = "volume"

    def __init__(self, n: int, V: int, t: int):
        bits.check_width(n)
        if t < 1:
            raise ValueError("volume threshold t must be >= 1")
        if V >> n:
            raise ValueError("V outside ground set")
        self.n, self.V, self.t = n, int(V), int(t)

    def member(self, S: int) -> bool:
        return bits.popcount(S & self.V) >= self.t

    def member_table(self) -> np.ndarray:
        arr = _table_indices(self.n)
        return _popcount_table(arr & np.int64(self.V)) >= self.t

    def weight(self, p) -> Interval:
        return (to_interval(p) ** self.t) * binom(bits.popcount(self.V), self.t)

    def count(self) -> int:
        return binom(bits.popcount(self.V), self.t)

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        self._check_budget(budget)
        return sorted(bits.mask(c) for c in combinations(bits.elements(self.V), self.t))

    def project(self, offset: int, size: int) -> "Volume":
        return Volume(size, (self.V & _window(offset, size)) >> offset, self.t)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "V": bits.elements(self.V), "t": self.t}


class Union(CoverFamily):
    kind = "union"

    def __init__(self, n: int, parts: Sequence[CoverFamily], exact_budget: int = MATERIALIZE_BUDGET):
        for P in parts:
            if P.n != n:
                raise ValueError("union parts must share the ground set")
        self.n = n
        self.parts = tuple(parts)
        self.exact_budget = exact_budget

    def member(self, S: int) -> bool:
        return any(P.member(S) for P in self.parts)

    def member_table(self) -> np.ndarray:
        out = np.zeros(1 << self.n, dtype=bool)
        for P in self.parts:
            out |= P.member_table()
        return out

    def _small(self) -> bool:
        try:
            return sum(P.count() for P in self.parts) <= self.exact_budget
        except (MaterializationTooLarge, NotImplementedError):
            return False

    @property
    def weight_is_exact(self) -> bool:
        return len(self.parts) <= 1 and all(P.weight_is_exact for P in self.parts) or self._small()

    def weight(self, p) -> Interval:
        if len(self.parts) > 1 and self._small():
            return Explicit(self.n, self.materialize(self.exact_budget)).weight(p)
        total = Interval(0)
        for P in self.parts:
            total = total + P.weight(p)
        if len(self.parts) > 1 or not self.weight_is_exact:
            # overlapping parts are double counted: only the upper end is meaningful
            total = Interval(0, total.hi)
        return total

    def count(self) -> int:
        return len(self.materialize())

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        out: set[int] = set()
        for P in self.parts:
            out.update(P.materialize(budget))
            if len(out) > budget:
                raise MaterializationTooLarge(f"union exceeds budget {budget}")
        return sorted(out)

    def project(self, offset: int, size: int) -> "Union":
        return Union(size, [P.project(offset, size) for P in self.parts], self.exact_budget)

    def to_json(self) -> dict:
        return {"kind": self.kind, "n": self.n, "parts": [P.to_json() for P in self.parts]}


class CopyProjection(CoverFamily):
    """Restriction of a family on m disjoint copies of X to copy ``copy``."""

    kind = "copy_projection"

    def __init__(self, inner: CoverFamily, copy: int, size: int):
        if (copy + 1) * size > inner.n:
            raise ValueError("copy index outside the blown-up ground set")
        self.inner = inner
        self.copy = copy
        self.n = size
        self.resolved = inner.project(copy * size, size)

    @property
    def weight_is_exact(self) -> bool:
        return self.resolved.weight_is_exact

    def member(self, S: int) -> bool:
        return self.resolved.member(S)

    def member_table(self) -> np.ndarray:
        return self.resolved.member_table()

    def weight(self, p) -> Interval:
        return self.resolved.weight(p)

    def count(self) -> int:
        return self.resolved.count()

    def materialize(self, budget: int = MATERIALIZE_BUDGET) -> list[int]:
        return self.resolved.materialize(budget)

    def project(self, offset: int, size: int) -> CoverFamily:
        return self.resolved.project(offset, size)

    def to_json(self) -> dict:
        return {"kind": self.kind, "copy": self.copy, "size": self.n, "inner": self.inner.to_json()}


_REGISTRY = {}


def register(kind: str):
    def deco(fn):
        _REGISTRY[kind] = fn
        return fn
    return deco


register("explicit")(lambda o: Explicit.from_sets(int(o["n"]), o["members"]))
register("levels")(lambda o: Levels(int(o["n"]), [bits.mask(P) for P in o["pools"]]))
register("singleton_levels")(lambda o: SingletonLevels(int(o["n"]), o["order"], int(o["a"])))
register("volume")(lambda o: Volume(int(o["n"]), bits.mask(o["V"]), int(o["t"])))
register("union")(lambda o: Union(int(o["n"]), [family_from_json(P) for P in o["parts"]]))
register("copy_projection")(lambda o: CopyProjection(family_from_json(o["inner"]), int(o["copy"]), int(o["size"])))


def family_from_json(obj) -> CoverFamily:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ParseError("cover family object needs a 'kind'")
    kind = obj["kind"]
    if kind not in _REGISTRY and kind == "star_system":
        from .constructions import stars  # noqa: F401  (registers the star loader)
    try:
        loader = _REGISTRY[kind]
    except KeyError:
        raise ParseError(f"unknown cover family kind {kind!r}") from None
    try:
        return loader(obj)
    except (KeyError, TypeError, ValueError) as exc:
        raise ParseError(f"malformed {kind} family: {exc}") from exc


def weight_upper(G: CoverFamily, p) -> Fraction:
    return G.weight(p).hi


def explicit_or_none(G: CoverFamily, budget: int = MATERIALIZE_BUDGET) -> Optional[Explicit]:
    try:
        return G.explicit(budget)
    except MaterializationTooLarge:
        return None

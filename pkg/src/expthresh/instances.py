"""Instance generators: arithmetic progressions, linear hypergraphs, fuzzing inputs."""

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from . import bits
from .errors import ParseError, PreconditionViolated
from .weights import MonotoneFamily, WeightFunction, binom

FANO_LINES = ((0, 1, 2), (0, 3, 4), (0, 5, 6), (1, 3, 5), (1, 4, 6), (2, 3, 6), (2, 4, 5))


def k_ap_hypergraph(n: int, k: int) -> list[int]:
    """All k-term progressions {a, a+d, ..., a+(k-1)d} in {1..n}, d > 0; value v is bit v-1."""
    if not n >= k >= 2:
        raise PreconditionViolated("need n >= k >= 2")
    out = []
    for d in range(1, (n - 1) // (k - 1) + 1):
        for a in range(1, n - (k - 1) * d + 1):
            out.append(bits.mask(a - 1 + i * d for i in range(k)))
    return sorted(out)


def fano_plane() -> list[int]:
    return [bits.mask(L) for L in FANO_LINES]


def random_linear_hypergraph(n: int, k: int, target_edges: int, seed: int,
                             max_tries: int = None) -> list[int]:
    """Random k-sets, each kept if it meets every kept edge in at most one vertex."""
    if not n >= k >= 2:
        raise PreconditionViolated("need n >= k >= 2")
    rng = random.Random(seed)
    used_pairs: set = set()
    out: list[int] = []
    tries = max_tries if max_tries is not None else 50 * max(target_edges, 1)
    for _ in range(tries):
        if len(out) >= target_edges:
            break
        E = sorted(rng.sample(range(n), k))
        pairs = list(combinations(E, 2))
        if any(pr in used_pairs for pr in pairs):
            continue
        used_pairs.update(pairs)
        out.append(bits.mask(E))
    return sorted(out)


def steiner_triple_system(n: int) -> list[int]:
    """Bose's Steiner triple system on n = 6t + 3 points; every pair lies in exactly one triple."""
    if n % 6 != 3:
        raise PreconditionViolated("this construction needs n = 3 mod 6")
    m = n // 3
    half = (m + 1) // 2  # inverse of 2 modulo the odd number m

    def pt(x, i):
        return x + m * i

    out = []
    for x in range(m):
        out.append(bits.mask((pt(x, 0), pt(x, 1), pt(x, 2))))
    for i in range(3):
        for x in range(m):
            for y in range(x + 1, m):
                z = ((x + y) * half) % m
                out.append(bits.mask((pt(x, i), pt(y, i), pt(z, (i + 1) % 3))))
    return sorted(out)


def halving_example(n: int, k: int) -> WeightFunction:
    """g = binom(n/2, k)^-1 on every k-set; <g> is exactly the sets of size >= n/2."""
    if n % 2 or n < 2 * k or k < 1:
        raise PreconditionViolated("need n even and n >= 2k >= 2")
    w = Fraction(1, binom(n // 2, k))
    return WeightFunction(n, {bits.mask(T): w for T in combinations(range(n), k)})


def clique_hypergraph(m: int, t: int) -> tuple[int, list[int]]:
    """Edge sets of t-cliques in K_m, over the ground set of its binom(m, 2) edges."""
    index = {pair: i for i, pair in enumerate(combinations(range(m), 2))}
    out = [bits.mask(index[pr] for pr in combinations(C, 2)) for C in combinations(range(m), t)]
    return len(index), sorted(out)


def parse_law(law: str) -> list[Fraction]:
    """'grid:<d>' (uniform over {1/d, ..., d/d}), 'dyadic' (= grid:16) or 'constant'."""
    if law in ("dyadic", "grid"):
        law = "grid:16"
    if law == "constant":
        return [Fraction(1)]
    if law.startswith("grid:"):
        try:
            d = int(law.split(":", 1)[1])
        except ValueError:
            raise ParseError(f"bad weight law {law!r}") from None
        if d < 1:
            raise ParseError("grid size must be positive")
        return [Fraction(j, d) for j in range(1, d + 1)]
    raise ParseError(f"unknown weight law {law!r}")


def assign_weights(n: int, support, law: str = "grid:16", seed: int = 0) -> WeightFunction:
    values = parse_law(law)
    rng = random.Random(seed)
    return WeightFunction(n, {T: rng.choice(values) for T in sorted(support)})


def random_weight_function(n: int, k: int, law: str = "grid:16", seed: int = 0,
                           density: float = 0.5) -> WeightFunction:
    """Each k-set joins the support with probability ``density``; weights drawn from ``law``."""
    if not n >= k >= 1:
        raise PreconditionViolated("need n >= k >= 1")
    if not 0 < density <= 1:
        raise PreconditionViolated("density must lie in (0, 1]")
    rng = random.Random(seed)
    values = parse_law(law)
    support = [bits.mask(T) for T in combinations(range(n), k) if rng.random() < density]
    if not support:
        support = [bits.mask(rng.sample(range(n), k))]
    return WeightFunction(n, {T: rng.choice(values) for T in support})


def random_monotone_family(n: int, seed: int, max_sets: int = None) -> MonotoneFamily:
    """1..max_sets random nonempty sets, pruned to their minimal ones."""
    if n < 1:
        raise PreconditionViolated("n must be positive")
    rng = random.Random(seed)
    count = rng.randint(1, max_sets or n)
    sets = []
    for _ in range(count):
        S = 0
        while S == 0:
            S = rng.getrandbits(n)
        sets.append(S)
    return MonotoneFamily.from_sets(n, [bits.elements(S) for S in sets], prune=True)


KINDS = ("k_ap", "random_linear", "halving", "random_monotone", "random_weights", "fano", "steiner",
         "clique")


@dataclass
class InstanceSpec:
    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParseError(f"unknown instance kind {self.kind!r}")

    def build(self):
        """A WeightFunction, or a MonotoneFamily for random_monotone."""
        P = self.params
        seed = int(P.get("seed", 0))
        law = P.get("law", "grid:16")
        if self.kind == "k_ap":
            n, k = int(P["n"]), int(P["k"])
            edges = k_ap_hypergraph(n, k)
            if "law" in P:
                return assign_weights(n, edges, law, seed)
            return WeightFunction(n, {E: Fraction(1, len(edges)) for E in edges})
        if self.kind == "random_linear":
            n, k = int(P["n"]), int(P["k"])
            edges = random_linear_hypergraph(n, k, int(P.get("edges", n)), seed)
            return WeightFunction(n, {E: Fraction(P.get("weight", "1/2")) for E in edges})
        if self.kind == "halving":
            return halving_example(int(P["n"]), int(P["k"]))
        if self.kind == "random_monotone":
            ms = P.get("max_sets")
            return random_monotone_family(int(P["n"]), seed, int(ms) if ms is not None else None)
        if self.kind == "random_weights":
            return random_weight_function(int(P["n"]), int(P["k"]), law, seed,
                                          float(P.get("density", 0.5)))
        if self.kind == "fano":
            return WeightFunction(7, {E: Fraction(P.get("weight", "1/2")) for E in fano_plane()})
        if self.kind == "steiner":
            n = int(P["n"])
            return WeightFunction(n, {E: Fraction(P.get("weight", "1")) for E in steiner_triple_system(n)})
        n, edges = clique_hypergraph(int(P["m"]), int(P["t"]))
        return WeightFunction(n, {E: Fraction(1, len(edges)) for E in edges})

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": dict(self.params)}

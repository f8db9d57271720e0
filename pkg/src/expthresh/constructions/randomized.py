"""Randomized cover for uniform weight functions, loss 4 n^(1/k)."""

import random
from fractions import Fraction
from typing import Optional

from ..certificate import Certificate, certified_weight, certify
from ..errors import PreconditionViolated, RetriesExhausted
from ..families import Explicit
from ..interval import Const
from ..weights import ENUM_BUDGET, WeightFunction, unit_weight_exact, upset_minimal_elements
from .singleton import check_unit_weight


def randomized_loss(n: int, k: int) -> Const:
    return Const(4, 0, ((n, Fraction(1, k)),))


def inclusion_probabilities(g: WeightFunction, c=None) -> dict:
    """P(T in G) = min{c g(T), 1}, with c = n + 1 by default."""
    c = Fraction(g.n + 1) if c is None else Fraction(c)
    return {T: min(c * v, Fraction(1)) for T, v in g.entries.items()}


def sample_cover(probs: dict, rng: random.Random) -> list[int]:
    """One draw: each support set independently with its probability."""
    out = []
    for T in sorted(probs):
        q = probs[T]
        if q >= 1 or Fraction(rng.random()) < q:
            out.append(T)
    return out


def randomized_cover(g: WeightFunction, p=None, seed: int = 0, max_retries: int = 100,
                     mode: Optional[str] = None, minimal: Optional[list] = None):
    """Sample G from supp(g) until it covers <g> and w(G, p/(4 n^(1/k))) <= 1."""
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    if p is None:
        p = unit_weight_exact(g)
    check_unit_weight(g, p)
    loss = randomized_loss(g.n, k)
    probs = inclusion_probabilities(g)
    if minimal is None:
        minimal = upset_minimal_elements(g)
    rng = random.Random(seed)
    scaled = Const.of(p) / loss if not hasattr(p, "lo") else p / loss.interval()
    failures = {"coverage": 0, "weight": 0}
    for attempt in range(1, max_retries + 1):
        members = sample_cover(probs, rng)
        G = Explicit(g.n, members)
        if not all(G.member(S) for S in minimal):
            failures["coverage"] += 1
            continue
        _, ok = certified_weight(G, scaled, Fraction(1))
        if not ok:
            failures["weight"] += 1
            continue
        if mode is None:
            mode = "exhaustive" if g.n <= ENUM_BUDGET else "minimal"
        cert = Certificate(g, p, G, loss, Fraction(1), mode, seed,
                           provenance={"construction": "randomized_cover", "attempts": attempt,
                                       "failures": dict(failures), "inclusion_factor": g.n + 1})
        return G, certify(cert)
    raise RetriesExhausted(f"no acceptable sample in {max_retries} attempts", failures)

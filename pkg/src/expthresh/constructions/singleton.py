"""Covers for weight functions supported on singletons."""

from fractions import Fraction
from typing import Optional

from ..certificate import Certificate, certify
from ..errors import EmptyFamily, PreconditionViolated
from ..families import SingletonLevels
from ..interval import Const, Interval, to_interval
from ..weights import ENUM_BUDGET, WeightFunction


def check_unit_weight(g: WeightFunction, p) -> None:
    """Reject p when w(g, p) is certifiably different from 1."""
    w = g.weight(to_interval(p))
    if not w.contains(1):
        raise PreconditionViolated(f"w(g, p) = {w} does not contain 1")


def singleton_order(weights: dict, support_only: bool = False, n: Optional[int] = None) -> list[int]:
    """Elements by decreasing weight, ties by index; zero-weight elements last."""
    order = sorted(weights, key=lambda x: (-weights[x], x))
    if not support_only and n is not None:
        rest = [x for x in range(n) if x not in weights]
        order += rest
    return order


def singleton_levels(n: int, weights: dict, total, support_only: bool = False) -> SingletonLevels:
    """Level family for singleton weights ``weights`` (element -> weight) with sum ``total``.

    ``total`` may be an Interval when the weights are irrational; a = ceil(total).
    """
    if isinstance(total, Interval):
        a = total.ceil_exact()
    else:
        a = -(-Fraction(total).numerator // Fraction(total).denominator)
    if a < 1:
        raise EmptyFamily("singleton weights sum to zero")
    return SingletonLevels(n, singleton_order(weights, support_only, n), a)


def singleton_cover(g: WeightFunction, p=None, support_only: bool = False,
                    mode: Optional[str] = None):
    """Cover <g> for g supported on 1-sets; loss 4e, bound 1.

    Level j holds the j-subsets of the top min(j*a, n) elements, a = ceil(sum g).
    """
    if not g.entries:
        raise PreconditionViolated("support of g is empty")
    if g.uniform_k != 1:
        raise PreconditionViolated("g must be supported on singletons")
    if p is None:
        p = Const(1 / g.total)
    check_unit_weight(g, p)
    weights = {T.bit_length() - 1: v for T, v in g.entries.items()}
    G = singleton_levels(g.n, weights, g.total, support_only)
    if mode is None:
        mode = "exhaustive" if g.n <= ENUM_BUDGET else "minimal"
    cert = Certificate(g, p, G, Const(4, 1), Fraction(1), mode,
                       provenance={"construction": "singleton_cover", "a": G.a,
                                   "order": list(G.order)})
    return G, certify(cert)


def level_witness(G: SingletonLevels, S: int) -> Optional[int]:
    """Some j with |S & top_j| >= j, or None."""
    for j in range(1, len(G.order) + 1):
        if bin(S & G.top(j)).count("1") >= j:
            return j
    return None

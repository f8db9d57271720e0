"""Blow-ups, the power trick, and the reduction to uniform weight functions."""

from fractions import Fraction
from typing import Callable, Optional

from .. import bits
from ..certificate import Certificate, certify, verify_certificate
from ..errors import BudgetExceeded, InnerCertificateInvalid, PreconditionViolated
from ..families import CopyProjection, Explicit, Union
from ..interval import Const, Interval, to_interval
from ..oracles import min_cover_weight_integral
from ..weights import (ENUM_BUDGET, MonotoneFamily, WeightFunction, unit_weight_exact,
                       unit_weight_p, upset_minimal_elements)

# inner(h, q) -> Certificate claiming <h> <= <cover> and w(cover, q/loss) <= 1;
# the power trick verifies it, so builders need not attach a report
InnerBuilder = Callable[[WeightFunction, object], Certificate]


def default_mode(n: int) -> str:
    return "exhaustive" if n <= ENUM_BUDGET else "minimal"


def blow_up(g: WeightFunction, m: int) -> WeightFunction:
    """g on m disjoint copies of the ground set; copy i occupies [i n, (i+1) n)."""
    if m < 1:
        raise PreconditionViolated("m must be >= 1")
    bits.check_width(m * g.n)
    entries = {}
    for i in range(m):
        for T, v in g.entries.items():
            entries[T << (i * g.n)] = v
    return WeightFunction(m * g.n, entries)


def exact_oracle_inner(h: WeightFunction, q) -> Certificate:
    """Optimal 0/1 cover of <h> at q; loss max(1, optimum) makes the weight at q/loss <= 1."""
    minimal = upset_minimal_elements(h) if h.entries else []
    if not minimal:
        G = Explicit(h.n, [])
        return Certificate(h, q, G, Const(1), Fraction(1), default_mode(h.n),
                           provenance={"construction": "exact_oracle", "empty": True})
    sol = min_cover_weight_integral(MonotoneFamily(h.n, tuple(minimal)), q)
    G = Explicit(h.n, sol.members)
    L = max(Fraction(1), sol.objective.hi)
    cert = Certificate(h, q, G, Const(L), Fraction(1), default_mode(h.n),
                       provenance={"construction": "exact_oracle",
                                   "optimum_upper": str(sol.objective.hi)})
    return cert


def _div(p, c):
    if isinstance(p, Interval):
        return p / to_interval(c)
    return Const.of(p) / Const.of(c)


def power_trick_extract(g: WeightFunction, p, c: int, inner: InnerBuilder = exact_oracle_inner,
                        inner_mode: Optional[str] = None, mode: Optional[str] = None):
    """Cover <g> with w(G, p/(c L)) <= c^(-k) using an inner cover of the c^k-fold blow-up.

    Returns (family, certificate); the certificate has loss c L and bound c^(-k).
    """
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    if c < 1:
        raise PreconditionViolated("c must be >= 1")
    m = c ** k
    gm = blow_up(g, m)
    q = _div(p, c)
    if gm.weight(to_interval(q)).lo > 1:
        raise PreconditionViolated("w(g^(m), p/c) > 1")
    icert = inner(gm, q)
    report = verify_certificate(icert, inner_mode or default_mode(gm.n))
    if not report.valid:
        raise InnerCertificateInvalid(f"inner certificate failed: {report.notes}")
    L = icert.loss
    scaled = _div(p, Const(c) * L)
    if m == 1:
        best, best_w = icert.cover, None
    else:
        best, best_w = None, None
        for i in range(m):
            Gi = CopyProjection(icert.cover, i, g.n)
            w = Gi.weight(to_interval(scaled))
            if best_w is None or w.hi < best_w.hi:
                best, best_w = Gi, w
    cert = Certificate(g, p, best, Const(c) * L, Fraction(1, m), mode or default_mode(g.n),
                       provenance={"construction": "power_trick", "c": c, "m": m,
                                   "inner_loss": L.to_json(),
                                   "copy": getattr(best, "copy", 0),
                                   "inner_provenance": icert.provenance})
    return best, certify(cert)


def pigeonhole_class(classes: dict, S: int) -> Optional[int]:
    """Some k with sum_{T <= S} g_k(T) >= 2^(-k), or None."""
    for k in sorted(classes):
        if classes[k].upset_sum(S) >= Fraction(1, 2 ** k):
            return k
    return None


def uniformize_cover(g: WeightFunction, p=None, uniform_inner: InnerBuilder = exact_oracle_inner,
                     inner_mode: Optional[str] = None, mode: Optional[str] = None):
    """Cover <g> for non-uniform g by power-tricking h_k = min{2^k g_k, 1} per size k.

    Returns (family, certificate) with loss 4 L, L the largest inner loss.
    """
    if not g.entries:
        raise PreconditionViolated("g must be nonzero")
    if p is None:
        exact = unit_weight_exact(g)
        p = exact if exact is not None else unit_weight_p(g)
    wp = g.weight(to_interval(p))
    if not wp.contains(1):
        raise PreconditionViolated(f"w(g, p) = {wp} does not contain 1")
    classes = g.split_by_size()
    parts, skipped, per_k = [], [], {}
    for k in sorted(classes):
        h = classes[k].scaled(2 ** k).clamped(1)
        if h.total < 1:
            skipped.append(k)
            continue
        Gk, ck = power_trick_extract(h, _div(p, 2), 2, uniform_inner, inner_mode)
        if not ck.valid:
            raise InnerCertificateInvalid(f"power trick for size {k} not certified")
        parts.append(Gk)
        per_k[k] = ck.loss
    if not parts:
        raise PreconditionViolated("every size class has empty up-set")
    L = common_loss(list(per_k.values())) / Const(2)
    G = Union(g.n, parts)
    checked_mode = mode or default_mode(g.n)
    cert = Certificate(g, p, G, Const(4) * L, Fraction(1), checked_mode,
                       provenance={"construction": "uniformize", "sizes": sorted(per_k),
                                   "skipped": skipped,
                                   "inner_losses": {str(k): v.to_json() for k, v in per_k.items()}})
    certify(cert)
    cert.provenance["strict_below_one"] = bool(cert.report and cert.report.weight.hi < 1)
    cert.provenance["pigeonhole"] = pigeonhole_report(g, classes)
    return G, cert


def common_loss(losses: list) -> Const:
    """A single constant >= every loss: the shared value, else a rational upper bound."""
    if all(x == losses[0] for x in losses):
        return losses[0]
    return Const(max(x.interval().hi for x in losses))


def pigeonhole_report(g: WeightFunction, classes: dict, budget: int = ENUM_BUDGET) -> dict:
    try:
        checks = upset_minimal_elements(g, budget)
    except BudgetExceeded as exc:
        return {"checked": 0, "ok": None, "note": str(exc)}
    bad = [bits.elements(S) for S in checks if pigeonhole_class(classes, S) is None]
    return {"checked": len(checks), "ok": not bad, "failures": bad[:20]}

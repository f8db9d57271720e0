"""Covers for uniform weight functions on hypergraphs with bounded codegree."""

from fractions import Fraction
from typing import Optional

import numpy as np

from .. import bits
from ..certificate import DEFAULT_SAMPLES, Certificate, certified_weight, certify
from ..errors import (BudgetExceeded, IndeterminateAtPrecision, InnerCertificateInvalid,
                      PreconditionViolated)
from ..families import SingletonLevels, Union
from ..interval import Const, Interval, compare, precision, precision_ladder, to_interval
from ..weights import (ENUM_BUDGET, WeightFunction, member_upset_JL_tri, sample_upset_minimal,
                       unit_weight_exact, upset_minimal_elements, upset_table)
from .powertrick import power_trick_extract
from .singleton import check_unit_weight, singleton_order
from .stars import linear_constant_cover, pair_codegrees
from .weighted import weight_class_cover

# L for the linear case, and the loss of the whole linear pipeline (4 * 10^4 * L)
LINEAR_L = Const(10 * 2 ** 10, 2)
LINEAR_LOSS = Const(4 * 10 ** 4) * LINEAR_L
# loss constant for codegree at most c^k: C c^2 with C = 4 * LINEAR_LOSS
CODEGREE_C = Const(4) * LINEAR_LOSS


def linear_decompose(edges, c: int) -> list[list[int]]:
    """Greedy colouring of the 'share at least two vertices' graph on ``edges``.

    Edges are coloured in lexicographic order of their sorted elements; each
    colour class is a linear hypergraph.
    """
    edges = sorted(set(edges), key=lambda E: bits.elements(E))
    if not edges:
        return []
    k = bits.popcount(edges[0])
    codeg = pair_codegrees(edges)
    if max(codeg.values(), default=0) > c ** k:
        raise PreconditionViolated(f"codegree {max(codeg.values())} exceeds c^k = {c ** k}")
    through: dict = {}
    for E in edges:
        for pair in _pairs(E):
            through.setdefault(pair, []).append(E)
    colour: dict = {}
    for E in edges:
        taken = set()
        for pair in _pairs(E):
            for F in through[pair]:
                if F != E and F in colour:
                    taken.add(colour[F])
        col = 0
        while col in taken:
            col += 1
        colour[E] = col
    ncol = max(colour.values()) + 1
    classes = [[E for E in edges if colour[E] == j] for j in range(ncol)]
    assert ncol <= (2 * c) ** k
    return classes


def _pairs(E: int):
    el = bits.elements(E)
    for i in range(len(el)):
        for j in range(i + 1, len(el)):
            yield (el[i], el[j])


# ---------------------------------------------------------------- the V_L part

class DegreeSingletons:
    """f(x) = kappa * deg_g(x) clamped at 1, where kappa = (L/4ek)(sum g)^(-1+1/k)."""

    def __init__(self, g: WeightFunction, L: Const):
        k = g.uniform_k
        self.g = g
        self.kappa = Const.of(L) / Const(4 * k, 1) * Const(1, 0, ((g.total, Fraction(1, k) - 1),))
        self.deg = g.degrees
        self.clamped = {x for x, d in self.deg.items() if compare(self.kappa * Const(d), 1) >= 0}

    def total(self) -> Interval:
        rest = sum((d for x, d in self.deg.items() if x not in self.clamped), Fraction(0))
        return Interval(len(self.clamped)) + self.kappa.interval() * rest

    def order(self) -> list[int]:
        """Decreasing f, ties by index: clamped elements first (all equal to 1)."""
        key = {x: (Fraction(2) if x in self.clamped else d) for x, d in self.deg.items()}
        return singleton_order(key, support_only=True)

    def member(self, S: int) -> bool:
        """S in V_L, i.e. sum_{x in S} f(x) >= 1."""
        xs = [x for x in bits.elements(S) if x in self.deg]
        if any(x in self.clamped for x in xs):
            return True
        d = sum((self.deg[x] for x in xs), Fraction(0))
        return d > 0 and compare(self.kappa * Const(d), 1) >= 0

    def ceil_total(self) -> Optional[int]:
        """ceil(sum f), or None when sum f < 1."""
        for prec in precision_ladder():
            with precision(prec):
                t = self.total()
            if t.hi < 1:
                return None
            try:
                return max(1, t.ceil_exact())
            except IndeterminateAtPrecision:
                continue
        raise PreconditionViolated("cannot decide the ceiling of the V_L singleton weight")


def split_holds(g: WeightFunction, L: Const, vl: DegreeSingletons, S: int) -> bool:
    """S in <g>_{1,L} or S in V_L."""
    return vl.member(S) or bool(member_upset_JL_tri(g, 1, L, S))


def upset_check_set(g: WeightFunction, mode: str, seed: int, budget: int = ENUM_BUDGET) -> tuple[list, str]:
    """The elements of <g> a verifier in ``mode`` examines."""
    kind, _, rest = mode.partition(":")
    if kind == "exhaustive" and g.n <= budget:
        return [int(S) for S in np.nonzero(upset_table(g, budget))[0]], "exhaustive"
    if kind in ("exhaustive", "minimal", "minimal-elements"):
        try:
            return upset_minimal_elements(g, budget), "minimal"
        except BudgetExceeded:
            kind, rest = "sampled", str(DEFAULT_SAMPLES)
    count = int(rest) if rest else DEFAULT_SAMPLES
    return sorted(set(sample_upset_minimal(g, count, seed))), f"sampled:{count}"


def _scaled(p, L: Const):
    if isinstance(p, Interval):
        return p / L.interval()
    return Const.of(p) / L


def _linear_pipeline(g: WeightFunction, p, mode: Optional[str], class_mode: Optional[str],
                     seed: int, split_check: bool = True, verify: bool = True):
    if pair_codegrees(g.support) and max(pair_codegrees(g.support).values()) > 1:
        raise PreconditionViolated("support of g is not linear")
    L = LINEAR_L
    vl = DegreeSingletons(g, L)
    parts = []
    prov = {"construction": "nearly_linear_cover", "c": 1, "L": L.to_json()}
    a = vl.ceil_total()
    if a is not None:
        Gs = SingletonLevels(g.n, vl.order(), a)
        w, ok = certified_weight(Gs, _scaled(p, L), Fraction(1))
        if not ok:
            raise InnerCertificateInvalid(f"V_L cover weight {w} not certified below 1")
        parts.append(Gs)
        prov["singletons"] = {"a": a, "clamped": len(vl.clamped), "weight_upper": float(w.hi)}
    else:
        prov["singletons"] = {"a": None, "note": "V_L is empty"}
    Gw, cw = weight_class_cover(g, p, L, linear_constant_cover, mode=class_mode,
                                class_mode=class_mode, seed=seed)
    parts.append(Gw)
    prov["weight_classes"] = cw.provenance
    if mode is None:
        mode = "exhaustive" if g.n <= ENUM_BUDGET else "minimal"
    cert = Certificate(g, p, Union(g.n, parts), LINEAR_LOSS, Fraction(1), mode, seed, None, prov)
    if verify:
        certify(cert)
    if split_check:
        checks, used = upset_check_set(g, cert.report.mode if cert.report else mode, seed)
        bad = [bits.elements(S) for S in checks if not split_holds(g, L, vl, S)]
        prov["split"] = {"checked": len(checks), "mode": used, "ok": not bad, "failures": bad[:20]}
    return cert.cover, cert


def nearly_linear_cover(g: WeightFunction, p=None, c: int = 1, mode: Optional[str] = None,
                        seed: int = 0, class_mode: Optional[str] = "sampled:200",
                        inner_mode: Optional[str] = None):
    """Cover <g> for k-uniform g whose support has codegree at most c^k.

    c = 1: loss 4 * 10^4 * L with L = 10 * 2^10 e^2.  c > 1: split into linear
    classes, run the linear pipeline on each clamped blow-up, and extract one
    copy by the power trick; loss C c^2 with C = 4 * 10^5 * 2^12 e^2.
    """
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    if c < 1:
        raise PreconditionViolated("c must be >= 1")
    if p is None:
        p = unit_weight_exact(g)
    check_unit_weight(g, p)
    if c == 1:
        return _linear_pipeline(g, p, mode, class_mode, seed)
    classes = linear_decompose(g.support, c)
    m = (2 * c) ** k
    bits.check_width(m * g.n)
    vl = DegreeSingletons(g, LINEAR_L)
    parts, records = [], []

    def inner(gm: WeightFunction, q):
        h = gm.clamped(1)
        p_hat = unit_weight_exact(h)
        if compare(to_interval(q).hi, p_hat) > 0:
            raise InnerCertificateInvalid("scaled probability exceeds the unit-weight point of h")
        _, ch = _linear_pipeline(h, p_hat, inner_mode or "minimal", class_mode, seed,
                                 split_check=False, verify=False)
        # w(G, q/loss) <= w(G, p_hat/loss) <= 1 since q <= p_hat
        cert = Certificate(gm, q, ch.cover, LINEAR_LOSS, Fraction(1), inner_mode or "minimal", seed,
                           None, {"construction": "clamped_linear_pipeline",
                                  "p_hat": str(p_hat), "pipeline": ch.provenance})
        return cert

    for j, cls in enumerate(classes):
        keep = set(cls)
        gj = g.restricted(lambda T: T in keep)
        Gj, cj = power_trick_extract(gj.scaled(m), _div(p, 2 * c), 2 * c, inner,
                                     inner_mode or "minimal", mode="minimal")
        w, ok = certified_weight(Gj, _scaled(p, CODEGREE_C * Const(c * c)), Fraction(1, m))
        if not ok:
            raise InnerCertificateInvalid(f"class {j}: weight {w} not certified below (2c)^-k")
        parts.append(Gj)
        records.append({"class": j, "edges": len(cls), "copy": cj.provenance.get("copy"),
                        "weight_upper": float(w.hi)})
    if mode is None:
        mode = "exhaustive" if g.n <= ENUM_BUDGET else "minimal"
    loss = CODEGREE_C * Const(c * c)
    cert = Certificate(g, p, Union(g.n, parts), loss, Fraction(1), mode, seed, None,
                       {"construction": "nearly_linear_cover", "c": c, "m": m,
                        "classes": records})
    certify(cert)
    checks, used = upset_check_set(g, cert.report.mode, seed)
    bad = [bits.elements(S) for S in checks if not split_holds(g, LINEAR_L, vl, S)]
    cert.provenance["split"] = {"checked": len(checks), "mode": used, "ok": not bad,
                                "failures": bad[:20]}
    return cert.cover, cert


def _div(p, c: int):
    if isinstance(p, Interval):
        return p / c
    return Const.of(p) / Const(c)

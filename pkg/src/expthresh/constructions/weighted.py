"""From constant weights to general weights on a uniform support, by dyadic classes."""

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .. import bits
from ..certificate import Certificate, JLTarget, certified_weight, certify, jl_candidates
from ..errors import InnerCertificateInvalid, PreconditionViolated
from ..families import Union
from ..interval import Const, Interval
from ..weights import WeightFunction, member_upset_JL_tri, unit_weight_exact
from .singleton import check_unit_weight
from .stars import JL_EXHAUSTIVE_MAX_N, linear_constant_cover

CLASS_CONSTANT = 200


@dataclass(frozen=True)
class DyadicClass:
    index: int
    g: WeightFunction  # constant 4^-(index-1) on its support
    ell: Fraction
    J: Fraction
    r: Fraction

    @property
    def value(self) -> Fraction:
        return Fraction(1, 4 ** (self.index - 1))

    def scaled(self) -> WeightFunction:
        """10 ell^-1 g_i, constant 1/r on the class support."""
        return self.g.scaled(10 / self.ell)


def dyadic_index(w: Fraction) -> int:
    """The i with 4^-(i-1) >= w > 4^-i."""
    if not 0 < w <= 1:
        raise PreconditionViolated(f"weight {w} outside (0, 1]")
    i = 1
    while w <= Fraction(1, 4 ** i):
        i += 1
    return i


def dyadic_decompose(g: WeightFunction) -> list[DyadicClass]:
    """Round each weight up to a power of 1/4 and group by the power."""
    if not g.entries:
        raise PreconditionViolated("g must be nonzero")
    groups: dict[int, dict] = {}
    for T, w in g.entries.items():
        i = dyadic_index(w)
        groups.setdefault(i, {})[T] = Fraction(1, 4 ** (i - 1))
    total = g.total
    out = []
    for i in sorted(groups):
        gi = WeightFunction(g.n, groups[i])
        ell = gi.total / total
        J = max(Fraction(1), 1 / ell / 2 ** (i - 1))
        r = ell * 4 ** (i - 1) / 10
        out.append(DyadicClass(i, gi, ell, J, r))
    rounded = {}
    for c in out:
        rounded.update(c.g.entries)
    for T, w in g.entries.items():
        assert w <= rounded[T] <= 4 * w
    assert sum(c.ell for c in out) <= 4
    return out


def _div_const(p, c: Const):
    if isinstance(p, Interval):
        return p / c.interval()
    return Const.of(p) / c


def class_member(classes: list[DyadicClass], L, S: int) -> Optional[int]:
    """Some class index i with S in <10 ell_i^-1 g_i>_{J_i, L/10}, or None."""
    L10 = Const.of(L) / Const(10)
    for c in classes:
        h = c.scaled()
        if member_upset_JL_tri(h, c.J, L10, S):
            return c.index
    return None


def jl_check_set(g: WeightFunction, J, L, mode: str, seed: int) -> list[int]:
    """Members of <g>_{J,L} among the sets a verifier in ``mode`` would examine."""
    if g.n <= JL_EXHAUSTIVE_MAX_N and mode == "exhaustive":
        candidates = range(1, 1 << g.n)
    else:
        _, _, rest = mode.partition(":")
        candidates = jl_candidates(g, int(rest) if rest else 1000, seed)
    return [S for S in candidates if member_upset_JL_tri(g, J, L, S)]


def weight_class_cover(g: WeightFunction, p=None, L=None, per_class: Callable = linear_constant_cover,
                       c: int = CLASS_CONSTANT, mode: Optional[str] = None,
                       class_mode: Optional[str] = None, seed: int = 0):
    """Cover <g>_{1,L}: per dyadic class, cover <10 ell_i^-1 g_i>_{J_i, L/10} at p / 10^(1/k).

    Returns (Union family, certificate) with loss 100 c L and bound 1.
    """
    k = g.uniform_k
    if k is None or not g.entries:
        raise PreconditionViolated("g must be nonzero and k-uniform")
    if L is None:
        L = Const(2 ** 10, 2)
    L = Const.of(L)
    if p is None:
        p = unit_weight_exact(g)
    check_unit_weight(g, p)
    classes = dyadic_decompose(g)
    p_class = _div_const(p, Const(1, 0, ((10, Fraction(1, k)),)))
    parts, records = [], []
    for cl in classes:
        h = cl.scaled()
        kw = {"mode": class_mode} if class_mode else {}
        Gi, ci = per_class(h, p_class, cl.J, L / Const(10), **kw)
        if not ci.valid:
            raise InnerCertificateInvalid(f"class {cl.index} certificate invalid: {ci.report.notes}")
        bound_i = Fraction(c, cl.index ** 2)
        w, ok = certified_weight(Gi, _div_const(p_class, L), bound_i)
        if not ok:
            raise InnerCertificateInvalid(f"class {cl.index} weight {w} not below {bound_i}")
        parts.append(Gi)
        records.append({"index": cl.index, "ell": str(cl.ell), "J": str(cl.J), "r": str(cl.r),
                        "weight_upper": float(w.hi), "branch": ci.provenance.get("branch")})
    G = Union(g.n, parts)
    if mode is None:
        mode = "exhaustive" if g.n <= JL_EXHAUSTIVE_MAX_N else "sampled:1000"
    cert = Certificate(g, p, G, Const(100 * c) * L, Fraction(1), mode, seed, JLTarget(Fraction(1), L),
                       {"construction": "weight_class_cover", "c": c, "classes": records})
    certify(cert)
    checks = jl_check_set(g, 1, L, mode, seed)
    bad = [bits.elements(S) for S in checks if class_member(classes, L, S) is None]
    cert.provenance["pigeonhole"] = {"checked": len(checks), "ok": not bad, "failures": bad[:20]}
    return G, cert

"""Cover certificates and their independent verification.

A certificate claims ``target <= <cover>`` and ``w(cover, p/loss) <= bound``,
where the target is <g> or, for the star machinery, <g>_{J,L}.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union as TUnion

import random

import numpy as np

from . import bits
from .errors import (BudgetExceeded, ExpThreshError, IndeterminateAtPrecision, ParseError,
                     WitnessSearchInconclusive)
from .families import CoverFamily, family_from_json
from .interval import (Const, Interval, MAX_PREC, decimal_str, precision, precision_ladder,
                       to_fraction_str, to_interval)
from .weights import (ENUM_BUDGET, WeightFunction, member_upset_JL_tri,
                      parse_fraction, sample_upset_minimal, upset_minimal_elements, upset_table)

DEFAULT_SAMPLES = 10_000
MAX_FAILURES_LISTED = 20


@dataclass(frozen=True)
class JLTarget:
    """Coverage target <g>_{J,L} instead of <g>."""

    J: Fraction
    L: Const

    def to_json(self):
        return {"kind": "jl", "J": to_fraction_str(self.J), "L": self.L.to_json()}


def parse_mode(mode: str) -> tuple[str, int]:
    """'exhaustive' | 'minimal' | 'sampled' | 'sampled:<count>' -> (kind, count)."""
    if mode in ("exhaustive", "minimal"):
        return mode, 0
    if mode == "minimal-elements":
        return "minimal", 0
    if mode.startswith("sampled"):
        _, _, rest = mode.partition(":")
        try:
            count = int(rest) if rest else DEFAULT_SAMPLES
        except ValueError:
            raise ParseError(f"bad sample count in mode {mode!r}") from None
        if count <= 0:
            raise ParseError("sample count must be positive")
        return "sampled", count
    raise ParseError(f"unknown coverage mode {mode!r}")


@dataclass
class Certificate:
    g: WeightFunction
    p: TUnion[Const, Interval, Fraction]
    cover: CoverFamily
    loss: Const
    bound: TUnion[Fraction, Const]
    coverage_mode: str = "exhaustive"
    seed: int = 0
    target: Optional[JLTarget] = None
    provenance: dict = field(default_factory=dict)
    report: Optional["VerificationReport"] = None

    @property
    def n(self) -> int:
        return self.g.n

    def scaled_p(self):
        """p / loss, exact when both are symbolic constants."""
        if isinstance(self.p, Interval):
            return self.p / self.loss.interval()
        return Const.of(self.p) / self.loss

    @property
    def valid(self) -> bool:
        return bool(self.report and self.report.valid)

    def to_json(self) -> dict:
        p = self.p
        if isinstance(p, Interval):
            pj = {"lower": decimal_str(p.lo, up=False), "upper": decimal_str(p.hi, up=True),
                  "exact_lower": to_fraction_str(p.lo), "exact_upper": to_fraction_str(p.hi)}
        else:
            c = Const.of(p)
            pi = c.interval()
            pj = {"lower": decimal_str(pi.lo, up=False), "upper": decimal_str(pi.hi, up=True),
                  "exact": c.to_json()}
        out = {
            "g": self.g.to_json(),
            "p": pj,
            "cover": self.cover.to_json(),
            "loss": self.loss.to_json(),
            "bound": bound_json(self.bound),
            "coverage_mode": self.coverage_mode,
            "seed": self.seed,
            "target": self.target.to_json() if self.target else {"kind": "upset"},
            "provenance": self.provenance,
        }
        if self.report is not None:
            out["status"] = self.report.to_json()
            out["valid"] = self.report.valid
        else:
            out["valid"] = False
        return out

    @classmethod
    def from_json(cls, obj) -> "Certificate":
        try:
            g = WeightFunction.from_json(obj["g"])
            pj = obj["p"]
            if "exact" in pj:
                p = Const.from_json(pj["exact"])
            elif "exact_lower" in pj:
                p = Interval(parse_fraction(pj["exact_lower"]), parse_fraction(pj["exact_upper"]))
            else:
                p = Interval(parse_fraction(pj["lower"]), parse_fraction(pj["upper"]))
            cover = family_from_json(obj["cover"])
            loss = Const.from_json(obj["loss"])
            bound = bound_from_json(obj["bound"])
            t = obj.get("target") or {"kind": "upset"}
            target = None
            if t.get("kind") == "jl":
                target = JLTarget(parse_fraction(t["J"]), Const.from_json(t["L"]))
            elif t.get("kind") != "upset":
                raise ParseError(f"unknown target kind {t.get('kind')!r}")
            return cls(g, p, cover, loss, bound, obj.get("coverage_mode", "exhaustive"),
                       int(obj.get("seed", 0)), target, obj.get("provenance", {}))
        except ParseError:
            raise
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise ParseError(f"malformed certificate: {exc}") from exc


@dataclass
class VerificationReport:
    mode: str
    coverage_ok: bool
    checked: int
    failures: list
    vacuous: bool
    weight: Interval
    weight_ok: bool
    weight_exact: bool
    notes: list = field(default_factory=list)

    @property
    def valid(self) -> bool:
        return self.coverage_ok and self.weight_ok

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "coverage": {"ok": self.coverage_ok, "checked": self.checked, "vacuous": self.vacuous,
                         "failures": [bits.elements(S) for S in self.failures[:MAX_FAILURES_LISTED]]},
            "weight": {"ok": self.weight_ok, "lower": decimal_str(self.weight.lo, up=False),
                       "upper": decimal_str(self.weight.hi, up=True),
                       "upper_bound_only": not self.weight_exact},
            "notes": list(self.notes),
            "valid": self.valid,
        }


def _cover_member(cover: CoverFamily, S: int) -> bool:
    try:
        return cover.member(S)
    except (WitnessSearchInconclusive, IndeterminateAtPrecision):
        return False


def bound_json(bound):
    if isinstance(bound, Const):
        return bound.to_json() if bound.exact() is None else to_fraction_str(bound.exact())
    return to_fraction_str(Fraction(bound))


def bound_from_json(obj):
    if isinstance(obj, dict):
        return Const.from_json(obj)
    return parse_fraction(obj)


def certified_weight(cover: CoverFamily, p, bound,
                     max_prec: int = MAX_PREC) -> tuple[Interval, bool]:
    """Enclosure of w(cover, p) and whether its upper end is certifiably <= bound."""
    w = None
    for prec in precision_ladder(None, max_prec):
        with precision(prec):
            w = cover.weight(to_interval(p))
            b = to_interval(bound)
        if w.hi <= b.lo:
            return w, True
        if w.lo > b.hi and cover.weight_is_exact:
            return w, False
    return w, False


def _upset_coverage(cert: Certificate, kind: str, count: int, budget: int, notes: list):
    g, cover = cert.g, cert.cover
    if kind == "exhaustive":
        if g.n > budget:
            raise BudgetExceeded(f"exhaustive coverage needs n <= {budget}, got {g.n}")
        need = upset_table(g, budget)
        have = cover.member_table()
        bad = np.nonzero(need & ~have)[0]
        return int(need.sum()), [int(S) for S in bad[:MAX_FAILURES_LISTED]], "exhaustive"
    if kind == "minimal":
        try:
            checks = upset_minimal_elements(g, budget)
            used = "minimal"
        except BudgetExceeded as exc:
            notes.append(f"minimal-element enumeration exceeded budget ({exc}); "
                         f"falling back to sampled:{DEFAULT_SAMPLES}")
            kind, count = "sampled", DEFAULT_SAMPLES
    if kind == "sampled":
        checks = sorted(set(sample_upset_minimal(g, count, cert.seed)))
        used = f"sampled:{count}"
    bad = [S for S in checks if not _cover_member(cover, S)]
    return len(checks), bad, used


def jl_candidates(g: WeightFunction, count: int, seed: int) -> list[int]:
    """Candidate sets for <g>_{J,L} checks: the full ground set, co-small sets, random dense sets."""
    rng = random.Random(seed)
    full = bits.full(g.n)
    verts = sorted(g.degrees)
    out = {full}
    for x in verts:
        out.add(full & ~(1 << x))
    while len(out) < count + 1 + len(verts):
        density = rng.choice((0.5, 0.7, 0.85, 0.95))
        S = 0
        for x in range(g.n):
            if rng.random() < density:
                S |= 1 << x
        out.add(S)
        if len(out) >= 2 ** g.n:
            break
    return sorted(out)


def _jl_coverage(cert: Certificate, kind: str, count: int, budget: int, notes: list):
    g, cover, t = cert.g, cert.cover, cert.target
    if kind == "minimal":
        # <g>_{J,L} is not an up-set, so minimal elements do not suffice
        kind = "exhaustive" if g.n <= budget else "sampled"
        count = count or DEFAULT_SAMPLES
        notes.append(f"target <g>_(J,L) is not monotone; using {kind}")
    if kind == "exhaustive":
        if g.n > budget:
            raise BudgetExceeded(f"exhaustive coverage needs n <= {budget}, got {g.n}")
        lhs_ok = np.nonzero(_jl_lhs_table(g, t.J, budget))[0]
        candidates = [int(S) for S in lhs_ok]
        used = "exhaustive"
    else:
        candidates = jl_candidates(g, count, cert.seed)
        used = f"sampled:{count}"
    checked, bad = 0, []
    for S in candidates:
        m = member_upset_JL_tri(g, t.J, t.L, S)
        if m is False:
            continue
        checked += 1
        if m is None:
            notes.append(f"indeterminate <g>_(J,L) membership at {bits.elements(S)}")
            bad.append(S)
        elif not _cover_member(cover, S):
            bad.append(S)
    return checked, bad, used


def _jl_lhs_table(g: WeightFunction, J: Fraction, budget: int) -> np.ndarray:
    """Sets whose contained weight reaches J (a superset of <g>_{J,L})."""
    if not g.entries:
        return np.zeros(1 << g.n, dtype=bool)
    return upset_table(g.scaled(1 / Fraction(J)), budget)


def verify_certificate(cert: Certificate, mode: Optional[str] = None,
                       budget_enum: int = ENUM_BUDGET, max_prec: int = MAX_PREC) -> VerificationReport:
    """Re-check coverage and the weight bound; never trusts stored status."""
    kind, count = parse_mode(mode or cert.coverage_mode)
    notes: list = []
    try:
        if cert.target is None:
            checked, bad, used = _upset_coverage(cert, kind, count, budget_enum, notes)
        else:
            checked, bad, used = _jl_coverage(cert, kind, count, budget_enum, notes)
        coverage_ok = not bad
    except ExpThreshError as exc:
        notes.append(f"coverage check failed: {exc.code}: {exc}")
        checked, bad, used, coverage_ok = 0, [], kind, False
    try:
        w, weight_ok = certified_weight(cert.cover, cert.scaled_p(), cert.bound, max_prec)
        if not weight_ok:
            notes.append("weight bound not certified")
    except ExpThreshError as exc:
        notes.append(f"weight check failed: {exc.code}: {exc}")
        w, weight_ok = Interval(0, 0), False
    report = VerificationReport(used, coverage_ok, checked, bad, checked == 0, w, weight_ok,
                                cert.cover.weight_is_exact, notes)
    return report


def certify(cert: Certificate, **kw) -> Certificate:
    """Attach a fresh verification report and return the certificate."""
    cert.report = verify_certificate(cert, **kw)
    return cert

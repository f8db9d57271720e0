"""Exact minimum-weight covers of a monotone family, and the thresholds q, q_f.

For an increasing family F with minimal sets M_1..M_m the integral problem is

    minimize  sum_T x_T p^|T|   s.t.  sum_{T subset M_i} x_T >= 1 for all i,  x in {0,1}

and the fractional one relaxes x to [0, 1].  q (resp. q_f) is the largest p
whose optimum is at most theta.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from scipy.optimize import linprog

from . import bits
from .errors import BudgetExceeded, ParseError
from .interval import Const, Interval, to_fraction_str, to_interval
from .simplex import maximize
from .weights import MonotoneFamily, threshold_pc

VARIABLE_BUDGET = 1 << 18
THRESHOLD_BITS = 32


@dataclass
class CoverProgram:
    n: int
    constraints: tuple
    variables: tuple
    integral: bool = True

    def __post_init__(self):
        for T in self.variables:
            if T == 0:
                raise ValueError("the empty set is not a cover variable")
            if not any(T & M == T for M in self.constraints):
                raise ValueError(f"variable {bits.elements(T)} lies in no constraint")
        self.incidence = [[i for i, M in enumerate(self.constraints) if T & M == T]
                          for T in self.variables]

    @classmethod
    def build(cls, F, integral: bool = True, variables: Optional[Iterable[int]] = None,
              universe: str = "closure", budget: int = VARIABLE_BUDGET) -> "CoverProgram":
        n, cons = _constraints(F)
        if variables is not None:
            vs = sorted({int(T) for T in variables if any(T & M == T for M in cons)},
                        key=lambda T: (bits.popcount(T), T))
        elif universe == "closure":
            vs = intersection_closure(cons, budget)
        elif universe == "full":
            vs = downset_universe(cons, budget)
        else:
            raise ValueError(f"unknown variable universe {universe!r}")
        return cls(n, tuple(cons), tuple(vs), integral)

    def costs(self, p: Fraction) -> list[Fraction]:
        return [p ** bits.popcount(T) for T in self.variables]

    def is_cover(self, chosen: Iterable[int]) -> bool:
        covered = set()
        for v in chosen:
            covered.update(self.incidence[v])
        return len(covered) == len(self.constraints)

    def to_json(self) -> dict:
        return {"n": self.n, "integral": self.integral,
                "constraints": [bits.elements(M) for M in self.constraints],
                "variables": [bits.elements(T) for T in self.variables]}


@dataclass
class CoverSolution:
    objective: Interval
    assignment: dict
    integral: bool
    dual: Optional[dict] = None
    dual_objective: Optional[Interval] = None
    proof: dict = field(default_factory=dict)

    @property
    def members(self) -> list[int]:
        return sorted(T for T, v in self.assignment.items() if v)

    def weight_at(self, p) -> Interval:
        pi = to_interval(p)
        total = Interval(0)
        for T, v in self.assignment.items():
            if v:
                total = total + (pi ** bits.popcount(T)) * v
        return total

    def to_json(self) -> dict:
        out = {
            "integral": self.integral,
            "objective": self.objective.to_json(),
            "assignment": [{"set": bits.elements(T), "value": to_fraction_str(v)}
                           for T, v in sorted(self.assignment.items()) if v],
            "proof": self.proof,
        }
        if self.dual is not None:
            out["dual"] = [{"constraint": bits.elements(M), "value": to_fraction_str(v)}
                           for M, v in sorted(self.dual.items()) if v]
            out["dual_objective"] = self.dual_objective.to_json()
        return out


def _constraints(F) -> tuple[int, list[int]]:
    if isinstance(F, MonotoneFamily):
        return F.n, list(F.minimal)
    if isinstance(F, tuple) and len(F) == 2:
        n, cons = F
        return int(n), sorted(set(cons))
    raise ParseError("expected a MonotoneFamily or (n, constraints)")


def intersection_closure(constraints: Sequence[int], budget: int = VARIABLE_BUDGET) -> list[int]:
    """All nonempty intersections of nonempty subfamilies of ``constraints``.

    Any T inside some constraint is dominated by the intersection of all
    constraints containing it: same constraints covered, no larger weight.
    """
    seen = set(constraints)
    frontier = list(seen)
    while frontier:
        nxt = []
        for A in frontier:
            for M in constraints:
                B = A & M
                if B and B not in seen:
                    seen.add(B)
                    nxt.append(B)
                    if len(seen) > budget:
                        raise BudgetExceeded(f"more than {budget} cover variables")
        frontier = nxt
    return sorted(seen, key=lambda T: (bits.popcount(T), T))


def downset_universe(constraints: Sequence[int], budget: int = VARIABLE_BUDGET) -> list[int]:
    """Every nonempty subset of some constraint."""
    out: set[int] = set()
    for M in constraints:
        if (1 << bits.popcount(M)) + len(out) > 4 * budget:
            raise BudgetExceeded(f"more than {budget} cover variables")
        out.update(T for T in bits.submasks(M) if T)
        if len(out) > budget:
            raise BudgetExceeded(f"more than {budget} cover variables")
    return sorted(out, key=lambda T: (bits.popcount(T), T))


def _rational_endpoints(p) -> tuple[Fraction, Fraction]:
    if isinstance(p, (int, Fraction)):
        return Fraction(p), Fraction(p)
    if isinstance(p, Const) and p.exact() is not None:
        return p.exact(), p.exact()
    pi = to_interval(p)
    return pi.lo, pi.hi


# ---------------------------------------------------------------- fractional

def _solve_lp_exact(prog: CoverProgram, p: Fraction):
    """(value, x per variable, y per constraint), exactly."""
    costs = prog.costs(p)
    m = len(prog.constraints)
    A = []
    for inc in prog.incidence:
        row = [0] * m
        for i in inc:
            row[i] = 1
        A.append(row)
    value, y, x = maximize(A, [Fraction(1)] * m, costs)
    x = [min(v, Fraction(1)) for v in x]
    return value, x, y


def min_cover_weight_fractional(F, p, variables: Optional[Iterable[int]] = None,
                                universe: str = "closure") -> CoverSolution:
    """Optimal fractional cover with a matching dual certificate."""
    prog = F if isinstance(F, CoverProgram) else CoverProgram.build(F, False, variables, universe)
    lo, hi = _rational_endpoints(p)
    v_hi, x_hi, y_hi = _solve_lp_exact(prog, hi)
    if lo == hi:
        v_lo, y_lo = v_hi, y_hi
    else:
        v_lo, _, y_lo = _solve_lp_exact(prog, lo)
    assignment = {T: x for T, x in zip(prog.variables, x_hi) if x}
    primal = sum((x * hi ** bits.popcount(T) for T, x in assignment.items()), Fraction(0))
    dual = {M: y for M, y in zip(prog.constraints, y_lo) if y}
    return CoverSolution(Interval(v_lo, primal), assignment, False, dual, Interval(sum(y_lo), sum(y_lo)),
                         {"method": "exact simplex (Bland)", "variables": len(prog.variables),
                          "constraints": len(prog.constraints)})


def check_fractional_solution(prog: CoverProgram, sol: CoverSolution, p) -> dict:
    """Primal feasibility, dual feasibility and objective agreement."""
    lo, hi = _rational_endpoints(p)
    primal_ok = all(
        sum((v for T, v in sol.assignment.items() if T & M == T), Fraction(0)) >= 1
        for M in prog.constraints)
    box_ok = all(0 <= v <= 1 for v in sol.assignment.values())
    dual_ok = all(v >= 0 for v in sol.dual.values()) and all(
        sum((sol.dual.get(M, 0) for M in prog.constraints if T & M == T), Fraction(0))
        <= lo ** bits.popcount(T) for T in prog.variables)
    dual_value = sum(sol.dual.values(), Fraction(0))
    primal_value = sum((v * hi ** bits.popcount(T) for T, v in sol.assignment.items()), Fraction(0))
    return {"primal_feasible": primal_ok and box_ok, "dual_feasible": dual_ok,
            "gap": primal_value - dual_value,
            "gap_within_width": 0 <= primal_value - dual_value <= sol.objective.width}


# ------------------------------------------------------------------ integral

class _BranchAndBound:
    def __init__(self, prog: CoverProgram, p: Fraction, stop_at: Optional[Fraction] = None,
                 prune_at: Optional[Fraction] = None, node_limit: int = 1_000_000,
                 strict: bool = False):
        self.prog = prog
        self.strict = strict
        self.p = p
        self.cost = prog.costs(p)
        self.stop_at = stop_at
        self.prune_at = prune_at
        self.node_limit = node_limit
        self.nodes = 0
        self.lp_calls = 0
        self.best: Optional[tuple] = None  # (value, count, chosen)
        nv, m = len(prog.variables), len(prog.constraints)
        self.A = np.zeros((m, nv))
        for v, inc in enumerate(prog.incidence):
            for i in inc:
                self.A[i, v] = 1.0
        self.cost_f = np.array([float(c) for c in self.cost])

    def _key_better(self, value, count) -> bool:
        return self.best is None or (value, count) < self.best[:2]

    def _bound(self, uncovered: list[int], free: list[int]):
        """Rigorous LP lower bound on the cost of covering ``uncovered`` with ``free``."""
        if not uncovered:
            return Fraction(0), {}
        self.lp_calls += 1
        A = self.A[np.ix_(uncovered, free)]
        res = linprog(self.cost_f[free], A_ub=-A, b_ub=-np.ones(len(uncovered)),
                      bounds=[(0, 1)] * len(free), method="highs")
        if res.status == 2:
            return None, {}
        if res.status != 0:
            return Fraction(0), {}
        y = [max(Fraction(float(-d)), Fraction(0)) for d in res.ineqlin.marginals]
        # scale y so that it is exactly feasible for the dual of the box-free LP
        scale = Fraction(1)
        for col, v in enumerate(free):
            s = sum((y[r] for r, i in enumerate(uncovered) if A[r, col]), Fraction(0))
            if s > 0:
                c = self.cost[v]
                if c < s * scale:
                    scale = c / s
        bound = scale * sum(y, Fraction(0))
        return bound, {v: float(x) for v, x in zip(free, res.x)}

    def run(self, warm: Optional[list[int]] = None):
        prog = self.prog
        if warm is not None and prog.is_cover(warm):
            self._offer(sorted(set(warm)))
        nv = len(prog.variables)
        self._dfs([], set(), list(range(len(prog.constraints))), list(range(nv)))
        return self.best

    def _offer(self, chosen: list[int]):
        value = sum((self.cost[v] for v in chosen), Fraction(0))
        if self._key_better(value, len(chosen)):
            self.best = (value, len(chosen), sorted(chosen))

    def _done(self) -> bool:
        if self.stop_at is None or self.best is None:
            return False
        return self.best[0] < self.stop_at if self.strict else self.best[0] <= self.stop_at

    def _dfs(self, chosen: list[int], banned: set, uncovered: list[int], free: list[int]):
        if self._done():
            return
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExceeded(f"branch and bound exceeded {self.node_limit} nodes")
        fixed = sum((self.cost[v] for v in chosen), Fraction(0))
        if not uncovered:
            self._offer(chosen)
            return
        for i in uncovered:
            if not any(i in self.prog.incidence[v] for v in free):
                return
        lp, xs = self._bound(uncovered, free)
        if lp is None:
            return
        bound = fixed + lp
        if self.prune_at is not None and (bound > self.prune_at or self.strict and bound == self.prune_at):
            return
        if self.best is not None:
            if bound > self.best[0] or (bound == self.best[0] and len(chosen) + 1 >= self.best[1]):
                return
        # greedy rounding of the LP point gives an incumbent early
        order = sorted(free, key=lambda v: (-xs.get(v, 0.0), v))
        pick = order[0]
        self._round(chosen, uncovered, order)
        if self._done():
            return
        inc = set(self.prog.incidence[pick])
        rest = [v for v in free if v != pick]
        self._dfs(chosen + [pick], banned, [i for i in uncovered if i not in inc], rest)
        self._dfs(chosen, banned | {pick}, uncovered, rest)

    def _round(self, chosen, uncovered, order):
        need = set(uncovered)
        pick = list(chosen)
        for v in order:
            if not need:
                break
            hit = need.intersection(self.prog.incidence[v])
            if hit:
                pick.append(v)
                need -= hit
        if not need:
            # drop redundant picks (latest first)
            for v in sorted(set(pick) - set(chosen), key=lambda v: -self.cost[v]):
                trial = [u for u in pick if u != v]
                if self.prog.is_cover(trial):
                    pick = trial
            self._offer(pick)


def min_cover_weight_integral(F, p, variables: Optional[Iterable[int]] = None,
                              universe: str = "closure", node_limit: int = 1_000_000) -> CoverSolution:
    """Exact optimal 0/1 cover by LP-bounded branch and bound."""
    prog = F if isinstance(F, CoverProgram) else CoverProgram.build(F, True, variables, universe)
    lo, hi = _rational_endpoints(p)
    bb = _BranchAndBound(prog, hi, node_limit=node_limit)
    best = bb.run()
    if best is None:
        raise BudgetExceeded("no feasible cover among the allowed variables")
    value_hi, _, chosen = best
    value_lo = value_hi
    if lo != hi:
        bb_lo = _BranchAndBound(prog, lo, node_limit=node_limit)
        value_lo = bb_lo.run(warm=chosen)[0]
    assignment = {prog.variables[v]: Fraction(1) for v in chosen}
    return CoverSolution(Interval(value_lo, value_hi), assignment, True, None, None,
                         {"method": "branch and bound", "nodes": bb.nodes, "lp_calls": bb.lp_calls,
                          "variables": len(prog.variables), "constraints": len(prog.constraints)})


def cover_exists_below(F, p, cutoff, variables: Optional[Iterable[int]] = None,
                       strict: bool = True, node_limit: int = 1_000_000) -> Optional[CoverSolution]:
    """A 0/1 cover of weight < cutoff (<= cutoff if not strict), or None if none exists."""
    prog = F if isinstance(F, CoverProgram) else CoverProgram.build(F, True, variables)
    cutoff = Fraction(cutoff)
    bb = _BranchAndBound(prog, Fraction(p), stop_at=cutoff, prune_at=cutoff,
                         node_limit=node_limit, strict=strict)
    bb.run()
    if not bb._done():
        return None
    value, _, chosen = bb.best
    return CoverSolution(Interval(value), {prog.variables[v]: Fraction(1) for v in chosen}, True,
                         proof={"method": "branch and bound (decision)", "nodes": bb.nodes})


def exhaustive_min_cover(F, p) -> tuple[Fraction, list[int]]:
    """Reference optimum: choose one nonempty T_M inside every minimal set M.

    Every cover contains such a choice, and a choice is itself a cover, so the
    minimum over choices (with duplicates merged) is the integral optimum.
    """
    n, cons = _constraints(F)
    p = Fraction(p)
    options = [[T for T in bits.submasks(M) if T] for M in cons]
    best_val, best = None, None

    def rec(i, chosen: frozenset, value: Fraction):
        nonlocal best_val, best
        if best_val is not None and value > best_val:
            return
        if i == len(cons):
            if best_val is None or value < best_val:
                best_val, best = value, sorted(chosen)
            return
        M = cons[i]
        if any(T & M == T for T in chosen):
            rec(i + 1, chosen, value)
            return
        for T in options[i]:
            rec(i + 1, chosen | {T}, value + p ** bits.popcount(T))

    rec(0, frozenset(), Fraction(0))
    return best_val, best


# ---------------------------------------------------------------- thresholds

def _bisect(feasible, bits_: int) -> Interval:
    lo, hi = Fraction(0), Fraction(1)
    if feasible(hi):
        return Interval(1)
    for _ in range(bits_):
        mid = (lo + hi) / 2
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return Interval(lo, hi)


def expectation_threshold_q(F, theta=Fraction(1, 2), bits_: int = THRESHOLD_BITS) -> Interval:
    """Largest p whose cheapest 0/1 cover has weight <= theta."""
    theta = _check_theta(theta)
    prog = CoverProgram.build(F, True)
    state = {"warm": None}

    def feasible(p):
        warm = state["warm"]
        if warm is not None and sum((p ** bits.popcount(prog.variables[v]) for v in warm), Fraction(0)) <= theta:
            return True
        bb = _BranchAndBound(prog, p, stop_at=theta, prune_at=theta)
        best = bb.run(warm=warm)
        if best is not None and best[0] <= theta:
            state["warm"] = best[2]
            return True
        return False

    return _bisect(feasible, bits_)


def fractional_expectation_threshold_qf(F, theta=Fraction(1, 2), bits_: int = THRESHOLD_BITS) -> Interval:
    """Largest p whose cheapest fractional cover has weight <= theta."""
    theta = _check_theta(theta)
    prog = CoverProgram.build(F, False)

    def feasible(p):
        value, _, _ = _solve_lp_exact(prog, p)
        return value <= theta

    return _bisect(feasible, bits_)


def _check_theta(theta) -> Fraction:
    theta = Fraction(theta)
    if not 0 < theta <= 1:
        raise ValueError("theta must lie in (0, 1]")
    return theta


@dataclass
class ThresholdReport:
    q: Interval
    q_f: Interval
    p_c: Interval
    theta: Fraction
    cover_integral: CoverSolution
    cover_fractional: CoverSolution
    tol: Fraction = Fraction(1, 10 ** 6)

    @property
    def chain_ok(self) -> bool:
        return (self.q.hi <= self.q_f.lo + self.tol) and (self.q_f.hi <= self.p_c.lo + self.tol)

    def to_json(self) -> dict:
        return {"theta": to_fraction_str(self.theta), "q": self.q.to_json(), "q_f": self.q_f.to_json(),
                "p_c": self.p_c.to_json(), "chain_ok": self.chain_ok,
                "tolerance": to_fraction_str(self.tol),
                "optimal_G_at_q": self.cover_integral.to_json(),
                "optimal_g_at_q_f": self.cover_fractional.to_json()}


def thresholds(F: MonotoneFamily, theta=Fraction(1, 2), bits_: int = THRESHOLD_BITS) -> ThresholdReport:
    q = expectation_threshold_q(F, theta, bits_)
    qf = fractional_expectation_threshold_qf(F, theta, bits_)
    pc = threshold_pc(F, bits_)
    ci = min_cover_weight_integral(F, q.lo)
    cf = min_cover_weight_fractional(F, qf.lo)
    return ThresholdReport(q, qf, pc, Fraction(theta), ci, cf)

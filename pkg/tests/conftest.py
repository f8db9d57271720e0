import os
import sys
from fractions import Fraction
from itertools import combinations

from hypothesis import settings

settings.register_profile("desk", max_examples=40, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "desk"))

HERE = os.path.dirname(__file__)
sys.path.insert(0, HERE)


def naive_upset_sum(entries, S):
    """Sum of g(T) over T subset of S, by direct loop."""
    return sum((w for T, w in entries.items() if T & S == T), Fraction(0))


def naive_cover_member(members, S):
    return any(T & S == T for T in members)


def all_ksubsets(elems, k):
    out = []
    for c in combinations(elems, k):
        m = 0
        for x in c:
            m |= 1 << x
        out.append(m)
    return out


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)

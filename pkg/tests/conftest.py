"""Shared independent oracles and the acceptance summary printer."""

from __future__ import annotations

import itertools
import math
import re
from collections import deque

import numpy as np
import pytest

# Hand-written Young functions, kept separate from the package catalog so the
# tests compare against formulas typed twice.
PHI_FORMULAS = {
    "power:2": lambda x: x**2 / 2,
    "power:3": lambda x: x**3 / 3,
    "xlog": lambda x: x * np.log1p(x),
    "exp": lambda x: np.expm1(x) - x,
    "entropy": lambda x: (1 + x) * np.log(1 + x) - x,
}

RHO_FORMULAS = {
    "poly": lambda beta: (lambda x: beta * np.log(1 + x)),
    "subexp": lambda alpha, C: (lambda x: C * x**alpha),
    "subexp2": lambda gamma, C: (lambda x: np.array([C * v / math.log1p(v) ** gamma if v > 0 else 0.0
                                                     for v in np.atleast_1d(x)])),
}


def bfs_lengths(d: int, radius: int) -> dict:
    """Word length from the origin with generators {-1,0,1}^d, by BFS."""
    gens = [g for g in itertools.product((-1, 0, 1), repeat=d) if any(g)]
    dist = {(0,) * d: 0}
    queue = deque([(0,) * d])
    while queue:
        p = queue.popleft()
        if dist[p] == radius:
            continue
        for g in gens:
            q = tuple(a + b for a, b in zip(p, g))
            if q not in dist:
                dist[q] = dist[p] + 1
                queue.append(q)
    return dist


def naive_twisted(f: dict, g: dict, omega) -> dict:
    """Dictionary double loop; ``omega(s, t)`` returns a complex number."""
    out: dict = {}
    for s, a in f.items():
        for t, b in g.items():
            key = tuple(x + y for x, y in zip(s, t))
            out[key] = out.get(key, 0) + a * b * omega(s, t)
    return {k: v for k, v in out.items() if v != 0}


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- acceptance summary -------------------------------------------------------

_RESULTS: dict = {}
_NAME = re.compile(r"test_criterion_(\d+)")


def pytest_runtest_logreport(report):
    m = _NAME.search(report.nodeid)
    if not m or "test_acceptance" not in report.nodeid:
        return
    key = int(m.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _RESULTS[key] = ("PASS" if report.outcome == "passed" else "FAIL", report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_RESULTS):
        outcome, name = _RESULTS[key]
        terminalreporter.write_line(f"criterion {key:2d}: {outcome}  {name}")

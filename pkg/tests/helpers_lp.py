"""Brute-force LP oracle: enumerate vertices as row-subset intersections.

Sound for bounded feasible regions (the random generator always includes a
box, so every nonempty region is a polytope and the max sits at a vertex).
"""

from __future__ import annotations

import random
from itertools import combinations

from mosipcert.lp import EQ, GE, LE, LinearProgram
from mosipcert.rationals import Q, ZERO, qdot


def solve_square(mat: list, rhs: list):
    """Exact Gaussian elimination; None when the matrix is singular."""
    n = len(mat)
    a = [list(row) + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), -1)
        if piv < 0:
            return None
        a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [v * inv for v in a[col]]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col]
                a[r] = [v - f * w for v, w in zip(a[r], a[col])]
    return [a[i][n] for i in range(n)]


def satisfies(rows, x) -> bool:
    for coeffs, rel, b in rows:
        lhs = qdot(coeffs, x)
        if (rel == LE and lhs > b) or (rel == GE and lhs < b) or (rel == EQ and lhs != b):
            return False
    return True


def brute_force_max(num_vars: int, objective, rows):
    """(best value, argmax vertex) over all feasible intersections of num_vars rows,
    or (None, None) when no feasible vertex exists."""
    best, arg = None, None
    for subset in combinations(range(len(rows)), num_vars):
        mat = [rows[i][0] for i in subset]
        rhs = [rows[i][2] for i in subset]
        x = solve_square(mat, rhs)
        if x is None or not satisfies(rows, x):
            continue
        val = qdot(objective, x)
        if best is None or val > best:
            best, arg = val, x
    return best, arg


def random_lp(rng: random.Random, max_vars: int = 3, max_rows: int = 5) -> LinearProgram:
    """A random LP over a box (always bounded), mixed relations, small integers."""
    n = rng.randint(1, max_vars)
    m = rng.randint(0, max_rows)
    box = rng.randint(1, 3)
    rows = []
    for _ in range(m):
        coeffs = [Q(rng.randint(-3, 3)) for _ in range(n)]
        if all(c == 0 for c in coeffs):
            coeffs[rng.randrange(n)] = Q(1)
        rel = rng.choice([LE, LE, GE, EQ])
        rows.append((coeffs, rel, Q(rng.randint(-4, 4))))
    for j in range(n):
        e = [ZERO] * n
        e[j] = Q(1)
        rows.append((list(e), LE, Q(box)))
        rows.append((list(e), GE, Q(-box)))
    objective = [Q(rng.randint(-4, 4)) for _ in range(n)]
    return LinearProgram(n, objective, rows)

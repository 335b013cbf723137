"""Independent reference computations used to cross-check the library.

These deliberately avoid the double description code and the simplex: rays
are found by brute force over row subsets and linear systems are solved by
plain Gaussian elimination on Fractions.
"""

import itertools
from fractions import Fraction as F
from math import gcd


def nullspace(rows, dim):
    """Basis of {x : row . x = 0 for all rows} by reduced row echelon form."""
    m = [[F(x) for x in r] for r in rows]
    pivots = []
    r = 0
    for c in range(dim):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        piv = m[r][c]
        m[r] = [x / piv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    free = [c for c in range(dim) if c not in pivots]
    basis = []
    for fc in free:
        v = [F(0)] * dim
        v[fc] = F(1)
        for i, pc in enumerate(pivots):
            v[pc] = -m[i][fc]
        basis.append(v)
    return basis


def primitive(v):
    den = 1
    for x in v:
        den = den * F(x).denominator // gcd(den, F(x).denominator)
    ints = [int(F(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, abs(x))
    return tuple(x // g for x in ints) if g else tuple(ints)


def brute_force_rays(rows, dim):
    """Extreme rays of the pointed cone {x : row . x <= 0}, by trying every row subset."""
    rays = set()
    for subset in itertools.combinations(range(len(rows)), dim - 1):
        basis = nullspace([rows[i] for i in subset], dim)
        if len(basis) != 1:
            continue
        for sign in (1, -1):
            x = [sign * c for c in basis[0]]
            if all(sum(F(a) * b for a, b in zip(row, x)) <= 0 for row in rows):
                rays.add(primitive(x))
    return rays




def solve_square(a, b):
    """Solve a x = b for square nonsingular a with Fractions; None if singular."""
    n = len(a)
    m = [[F(x) for x in row] + [F(y)] for row, y in zip(a, b)]
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        piv = m[c][c]
        m[c] = [x / piv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


def in_cone_brute(gens, point):
    """Is point a nonnegative combination of gens?  Caratheodory: try every
    linearly independent subset and solve exactly."""
    point = [F(x) for x in point]
    if not any(point):
        return True
    dim = len(point)
    gens = [[F(x) for x in g] for g in gens]
    for k in range(1, min(len(gens), dim) + 1):
        for subset in itertools.combinations(gens, k):
            # least-squares-free: pick k coordinates where the subset is independent
            for coords in itertools.combinations(range(dim), k):
                a = [[g[c] for g in subset] for c in coords]
                sol = solve_square(a, [point[c] for c in coords])
                if sol is None:
                    continue
                if all(s >= 0 for s in sol) and all(
                    sum(s * g[c] for s, g in zip(sol, subset)) == point[c] for c in range(dim)
                ):
                    return True
                break
    return False


def vertex_max(vertices, x, atom):
    """Largest conditional expectation of x on atom over the charging vertices."""
    best = None
    for q in vertices:
        mass = sum(F(q[w]) for w in atom)
        if mass == 0:
            continue
        val = sum(F(q[w]) * F(x[w]) for w in atom) / mass
        best = val if best is None else max(best, val)
    return best

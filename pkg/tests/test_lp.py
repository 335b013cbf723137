import itertools
import random
from fractions import Fraction as F

from hypothesis import given, strategies as st

from riskcone import lp

from oracles import in_cone_brute


def test_simple_optimum():
    # max x + y s.t. x + 2y <= 4, 3x + y <= 6
    res = lp.solve([], [], [1, 1], [[1, 2], [3, 1]], [4, 6])
    assert res.status == "optimal"
    assert res.value == F(14, 5) and res.x == [F(8, 5), F(6, 5)]


def test_infeasible_with_farkas():
    res = lp.solve([[1, 1]], [-1])
    assert not res.feasible
    y = res.farkas
    assert y[0] * -1 > 0 and all(y[0] * c <= 0 for c in (1, 1))


def test_unbounded():
    assert lp.solve([[1, -1]], [0], [1, 1]).status == "unbounded"


def test_in_cone_zero_point():
    assert lp.in_cone([[1, 0]], [0, 0]).feasible
    assert not lp.in_cone([], [1, 0]).feasible


@given(st.integers(0, 10**9))
def test_in_cone_matches_brute_force(seed):
    rng = random.Random(seed)
    dim = rng.randint(2, 4)
    gens = [[rng.randint(-3, 3) for _ in range(dim)] for _ in range(rng.randint(1, 4))]
    point = [rng.randint(-4, 4) for _ in range(dim)]
    if rng.random() < 0.5:
        point = [sum(rng.randint(0, 2) * g[i] for g in gens) for i in range(dim)]
    res = lp.in_cone(gens, point)
    assert res.feasible == in_cone_brute(gens, point)
    if res.feasible and res.x:
        assert all(c >= 0 for c in res.x)
        assert [sum(c * g[i] for c, g in zip(res.x, gens)) for i in range(dim)] == point
    if not res.feasible:
        y = res.farkas
        assert sum(a * b for a, b in zip(y, point)) > 0
        assert all(sum(a * b for a, b in zip(y, g)) <= 0 for g in gens)


@given(st.integers(0, 10**9))
def test_optimum_matches_vertex_enumeration(seed):
    rng = random.Random(seed)
    n = rng.randint(1, 3)
    a = [[rng.randint(0, 4) for _ in range(n)] for _ in range(rng.randint(1, 3))]
    for row in a:
        row[rng.randrange(n)] += 1
    b = [rng.randint(1, 8) for _ in a]
    for i in range(n):  # keep the region bounded
        a.append([1 if j == i else 0 for j in range(n)])
        b.append(rng.randint(1, 5))
    c = [rng.randint(-3, 3) for _ in range(n)]
    res = lp.solve([], [], c, a, b)
    # brute force: every basic point of the inequality system plus x >= 0
    rows = a + [[-1 if j == i else 0 for j in range(n)] for i in range(n)]
    rhs = b + [0] * n
    best = None
    from oracles import solve_square

    for subset in itertools.combinations(range(len(rows)), n):
        x = solve_square([rows[i] for i in subset], [rhs[i] for i in subset])
        if x is None or any(sum(F(r) * v for r, v in zip(row, x)) > h for row, h in zip(rows, rhs)):
            continue
        val = sum(F(ci) * v for ci, v in zip(c, x))
        best = val if best is None else max(best, val)
    assert res.status == "optimal" and res.value == best

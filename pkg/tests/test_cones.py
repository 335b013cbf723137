import random

import pytest
from hypothesis import given, strategies as st

from riskcone.cones import (
    PolyCone,
    cone_sum,
    contains,
    contains_negative_orthant,
    dd_convert,
    double_description,
    equal,
    intersect,
    lines_and_rays,
    member,
    polar,
    separate,
)
from riskcone.errors import RepresentationUnavailable, ShapeError
from riskcone.rational import primitive
from riskcone.risk import acceptance_cone

from oracles import brute_force_rays

seeds = st.integers(0, 10**9)


def random_generators(rng, dim, k):
    return [[rng.randint(-3, 3) for _ in range(dim)] for _ in range(k)]


def random_cone(rng, dim=None):
    dim = dim or rng.randint(1, 4)
    gens = [g for g in random_generators(rng, dim, rng.randint(1, 5)) if any(g)] or [[1] + [0] * (dim - 1)]
    if rng.random() < 0.5:
        return PolyCone.from_generators(gens, dim)
    return PolyCone.from_rows(gens, dim)


def test_negative_orthant_polar():
    neg = PolyCone.from_generators([[-1, 0, 0], [0, -1, 0], [0, 0, -1]], 3)
    pos = dd_convert(polar(neg))
    assert sorted(pos.v_rep) == [(0, 0, 1), (0, 1, 0), (1, 0, 0)]
    assert contains_negative_orthant(neg)


def test_polar_of_acceptance_cone_is_generated_by_vertices(ex54):
    a0 = acceptance_cone(ex54, 0)
    p = polar(a0)
    expected = PolyCone.from_generators([["1/3", "1/6", "1/4", "1/4"], ["1/2", "1/8", "3/16", "3/16"]], 4)
    assert equal(p, expected)


def test_apex_and_idempotent_sum():
    c = PolyCone.from_generators([[1, 2], [2, -1]], 2)
    assert member([0, 0], c)
    assert equal(cone_sum([c, c]), c)


def test_budget_is_enforced():
    rows = [[-1 if i == j else 0 for j in range(6)] for i in range(6)] + [[1, 1, 1, 1, 1, -1]]
    with pytest.raises(RepresentationUnavailable):
        double_description([primitive(r) for r in rows], 6, budget=2)


def test_dimension_mismatch():
    with pytest.raises(ShapeError):
        contains(PolyCone.whole_space(2), PolyCone.whole_space(3))


def test_whole_space_and_origin():
    whole, origin = PolyCone.whole_space(2), PolyCone.origin(2)
    assert member([5, -7], whole) and not member([1, 0], origin)
    assert equal(polar(whole), origin)


def test_separator_certifies_non_membership():
    c = PolyCone.from_generators([[1, 0], [1, 1]], 2)
    y = separate([0, 1], c)
    assert y is not None and y[1] > 0 and all(sum(a * b for a, b in zip(y, g)) <= 0 for g in c.v_rep)
    assert separate([2, 1], c) is None


# --- properties ------------------------------------------------------------


@given(seeds)
def test_dd_matches_brute_force_rays(seed):
    rng = random.Random(seed)
    dim = rng.randint(2, 4)
    # the -x <= 0 rows keep the cone pointed
    rows = [[-1 if i == j else 0 for j in range(dim)] for i in range(dim)]
    rows += random_generators(rng, dim, rng.randint(0, 4))
    rows = [primitive(r) for r in rows if any(r)]
    lines, rays = double_description(rows, dim)
    assert lines == []
    assert set(rays) == brute_force_rays(rows, dim)


@given(seeds)
def test_double_description_round_trip(seed):
    rng = random.Random(seed)
    c = random_cone(rng)
    full = dd_convert(c)
    again = dd_convert(PolyCone(c.dim, h_rep=full.h_rep)) if c.h_rep is None else dd_convert(PolyCone(c.dim, v_rep=full.v_rep))
    assert equal(full, again)
    # every generator satisfies every row
    assert all(sum(a * b for a, b in zip(r, g)) <= 0 for r in full.h_rep for g in full.v_rep)


@given(seeds)
def test_double_polar(seed):
    rng = random.Random(seed)
    c = random_cone(rng)
    assert equal(polar(dd_convert(polar(c))), c)


@given(seeds)
def test_polar_calculus(seed):
    rng = random.Random(seed)
    dim = rng.randint(1, 4)
    c1, c2 = random_cone(rng, dim), random_cone(rng, dim)
    assert equal(intersect([polar(c1), polar(c2)]), polar(cone_sum([c1, c2])))
    assert equal(polar(intersect([c1, c2])), cone_sum([polar(c1), polar(c2)]))


@given(seeds)
def test_membership_agrees_across_representations(seed):
    rng = random.Random(seed)
    c = dd_convert(random_cone(rng))
    x = [rng.randint(-3, 3) for _ in range(c.dim)]
    by_rows = member(x, PolyCone(c.dim, h_rep=c.h_rep))
    by_gens = member(x, PolyCone(c.dim, v_rep=c.v_rep))
    assert by_rows == by_gens


@given(seeds)
def test_lineality_reported(seed):
    rng = random.Random(seed)
    c = random_cone(rng)
    lines, rays = lines_and_rays(c)
    for ell in lines:
        assert member(ell, c) and member([-x for x in ell], c)
    assert equal(PolyCone.from_generators(list(rays) + list(lines) + [[-x for x in l] for l in lines], c.dim), c)

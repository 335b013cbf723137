import random
from fractions import Fraction as F

import pytest
from hypothesis import settings

from riskcone.risk import RiskMeasure
from riskcone.space import make_space

settings.register_profile("riskcone", max_examples=200, deadline=None, derandomize=True)
settings.load_profile("riskcone")


def pytest_terminal_summary(terminalreporter):
    import sys

    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(acceptance.RESULTS):
            terminalreporter.write_line(acceptance.RESULTS[n])


def tree4():
    return make_space([[[0, 1, 2, 3]], [[0, 1], [2, 3]], [[0], [1], [2], [3]]])


def tree3():
    return make_space([[[0, 1, 2]], [[0, 1], [2]], [[0], [1], [2]]])


@pytest.fixture
def ex54():
    return RiskMeasure.from_vertices(tree4(), [["1/3", "1/6", "1/4", "1/4"], ["1/2", "1/8", "3/16", "3/16"]])


@pytest.fixture
def ex513():
    return RiskMeasure.from_vertices(
        tree4(), [["1/4"] * 4, ["1/4", "1/4", "3/8", "1/8"], ["3/8", "1/8", "1/4", "1/4"], ["3/8", "1/8", "3/8", "1/8"]]
    )


@pytest.fixture
def ex715():
    return RiskMeasure.from_vertices(
        tree4(), [["1/2", "1/2", 0, 0], [0, 0, "1/2", "1/2"], ["1/3", "1/6", "1/6", "1/3"], ["1/6", "1/3", "1/3", "1/6"]], 2
    )


@pytest.fixture
def ex717():
    return RiskMeasure.from_vertices(tree3(), [["1/2", "1/3", "1/6"], ["1/3", "2/9", "4/9"]], 1)


def random_space(rng: random.Random, n_states: int, horizon: int):
    """A filtration on n_states points refined level by level; the last level is discrete."""
    parts = [[list(range(n_states))]]
    for t in range(1, horizon):
        level = []
        for atom in parts[-1]:
            if len(atom) > 1 and rng.random() < 0.7:
                cut = rng.randint(1, len(atom) - 1)
                level += [atom[:cut], atom[cut:]]
            else:
                level.append(atom)
        parts.append(level)
    if horizon:
        parts.append([[w] for w in range(n_states)])
    return make_space(parts)


def random_measure(rng: random.Random, n: int, positive: bool = True):
    weights = [rng.randint(1 if positive else 0, 6) for _ in range(n)]
    if not any(weights):
        weights[0] = 1
    total = sum(weights)
    return [F(w, total) for w in weights]


def random_rm(rng: random.Random, n_states: int = None, horizon: int = None, n_vertices: int = None):
    n_states = n_states or rng.randint(2, 5)
    horizon = horizon if horizon is not None else rng.randint(1, 2)
    space = random_space(rng, n_states, horizon)
    k = n_vertices or rng.randint(1, 4)
    verts = [random_measure(rng, n_states, positive=True)]
    verts += [random_measure(rng, n_states, positive=rng.random() < 0.5) for _ in range(k - 1)]
    return RiskMeasure.from_vertices(space, verts, 0)


def random_assets(rng: random.Random, n_states: int, d: int):
    return [[1] * n_states] + [[F(rng.randint(1, 6), rng.randint(1, 3)) for _ in range(n_states)] for _ in range(d - 1)]

"""Conditional coherent risk measures given by a polytope of test measures.

Every supremum over the polytope is evaluated at its vertices.  On an atom
``A`` the conditional expectation ``E_Q(X|A)`` and the ratio
``E_Q(X|A) / E_Q(v|A)`` are both quotients of two linear functions of the
masses of ``Q`` with a positive denominator, so they are quasi-linear on the
polytope and attain their extremes at vertices.  Vertices that do not charge
``A`` are skipped; the strictly positive reference vertex always qualifies.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .cones import PolyCone
from .errors import NotANumeraire, ShapeError
from .space import FilteredSpace, Measure, RandomVec, TestSet, as_scalar


@dataclass(frozen=True)
class RiskMeasure:
    testset: TestSet

    @property
    def space(self) -> FilteredSpace:
        return self.testset.space

    @property
    def vertices(self) -> tuple[Measure, ...]:
        return self.testset.vertices

    @classmethod
    def from_vertices(cls, space: FilteredSpace, vertices: Iterable, reference: int = 0) -> "RiskMeasure":
        return cls(TestSet(space, tuple(Measure(v) for v in vertices), reference))


def _charging(vertices: Sequence[Measure], atom: Sequence[int]) -> list[Measure]:
    return [m for m in vertices if m.of(atom) > 0]


def _weighted(measure: Measure, x: Sequence[Fraction], atom: Sequence[int]) -> Fraction:
    return sum((measure.mass[w] * x[w] for w in atom), Fraction(0))


def _per_atom(space: FilteredSpace, t: int, value_on_atom: Callable[[tuple[int, ...]], Fraction]) -> RandomVec:
    space.check_level(t)
    out: list = [None] * space.n_states
    for atom in space.atoms(t):
        val = value_on_atom(atom)
        for w in atom:
            out[w] = val
    return RandomVec(tuple(out), 1, t)


def _claim(rm: RiskMeasure, x) -> tuple[Fraction, ...]:
    vec = as_scalar(x, rm.space.n_states)
    if not vec.fully_defined():
        raise ShapeError("claim has undefined entries")
    return vec.values


def rho_t(rm: RiskMeasure, x, t: int) -> RandomVec:
    """Risk of ``x`` given the information at time ``t`` (one value per atom)."""
    vals = _claim(rm, x)

    def worst(atom):
        return max(_weighted(m, vals, atom) / m.of(atom) for m in _charging(rm.vertices, atom))

    return _per_atom(rm.space, t, worst)


def acceptance_cone(rm: RiskMeasure, t: int) -> PolyCone:
    """Claims with nonpositive conditional expectation at ``t`` under every test measure."""
    space = rm.space
    space.check_level(t)
    n = space.n_states
    rows = []
    for atom in space.atoms(t):
        members = set(atom)
        for m in rm.vertices:
            if m.of(atom) > 0:
                rows.append([m.mass[w] if w in members else 0 for w in range(n)])
    return PolyCone.from_rows(rows, n, shape=(n, 1), space=space)


def lambda_t(rm: RiskMeasure, v, t: int) -> RandomVec:
    """Smallest conditional expectation of ``v`` over the test measures, per atom."""
    vals = _claim(rm, v)

    def best(atom):
        return min(_weighted(m, vals, atom) / m.of(atom) for m in _charging(rm.vertices, atom))

    return _per_atom(rm.space, t, best)


@dataclass(frozen=True)
class Numeraire:
    v: RandomVec
    lambda_profile: tuple[RandomVec, ...]

    def __len__(self) -> int:
        return len(self.v)

    @property
    def values(self) -> tuple[Fraction, ...]:
        return self.v.values


def is_numeraire(rm: RiskMeasure, v) -> bool:
    vals = _claim(rm, v)
    if any(x <= 0 for x in vals):
        return False
    for t in range(rm.space.horizon + 1):
        if any(x <= 0 for x in lambda_t(rm, vals, t).values):
            return False
    return True


def make_numeraire(rm: RiskMeasure, v) -> Numeraire:
    """Validate ``v`` as a unit of account and cache its lambda profile."""
    vec = as_scalar(v, rm.space.n_states)
    if not is_numeraire(rm, vec):
        raise NotANumeraire("a numeraire must be strictly positive with positive lambda at every level")
    profile = tuple(lambda_t(rm, vec, t) for t in range(rm.space.horizon + 1))
    return Numeraire(RandomVec.scalar(vec.values), profile)


def _as_numeraire(rm: RiskMeasure, v) -> Numeraire:
    return v if isinstance(v, Numeraire) else make_numeraire(rm, v)


def rho_t_v(rm: RiskMeasure, x, v, t: int) -> RandomVec:
    """Risk of ``x`` in units of the numeraire ``v`` at time ``t``."""
    num = _as_numeraire(rm, v)
    vals = _claim(rm, x)
    unit = num.values

    def worst(atom):
        return max(_weighted(m, vals, atom) / _weighted(m, unit, atom) for m in _charging(rm.vertices, atom))

    return _per_atom(rm.space, t, worst)


def check_equivalent(rm: RiskMeasure, v, w) -> bool:
    """Do ``v`` and ``w`` price each other reciprocally on every initial atom?"""
    nv = _as_numeraire(rm, v)
    nw = _as_numeraire(rm, w)
    a = rho_t_v(rm, nw.values, nv, 0)
    b = rho_t_v(rm, nv.values, nw, 0)
    return all(x * y == 1 for x, y in zip(a.values, b.values))

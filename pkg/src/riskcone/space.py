"""Finite filtered probability spaces, measures and conditional expectation.

Sample points are the integers ``0..n-1``.  A filtration is a list of
partitions, one per time ``t = 0..T``, each refining the one before.  JSON
documents use 1-based indices; everything in Python is 0-based.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import (
    DivisionByZero,
    EmptyAtomError,
    LevelOutOfRange,
    MeasureError,
    RefinementError,
    ShapeError,
)
from .rational import fmt, q

Value = Union[Fraction, tuple, None]


@dataclass(frozen=True)
class FilteredSpace:
    n_states: int
    partitions: tuple[tuple[tuple[int, ...], ...], ...]
    atom_of: tuple[tuple[int, ...], ...] = field(repr=False, compare=False)

    @property
    def horizon(self) -> int:
        return len(self.partitions) - 1

    def atoms(self, t: int) -> tuple[tuple[int, ...], ...]:
        self.check_level(t)
        return self.partitions[t]

    def atom_containing(self, t: int, state: int) -> tuple[int, ...]:
        return self.partitions[t][self.atom_of[t][state]]

    def children(self, t: int, atom_index: int) -> list[int]:
        """Indices of the level ``t+1`` atoms inside atom ``atom_index`` of level ``t``."""
        self.check_level(t + 1)
        first = {self.atom_of[t + 1][w] for w in self.partitions[t][atom_index]}
        return sorted(first)

    def check_level(self, t: int) -> None:
        if not isinstance(t, int) or t < 0 or t > self.horizon:
            raise LevelOutOfRange(f"level {t} outside 0..{self.horizon}")

    def is_discrete(self, t: int) -> bool:
        return len(self.partitions[t]) == self.n_states

    def is_measurable(self, values: Sequence, t: int) -> bool:
        for atom in self.atoms(t):
            first = values[atom[0]]
            if any(values[w] != first for w in atom[1:]):
                return False
        return True

    def to_json(self) -> dict:
        return {
            "states": self.n_states,
            "partitions": [[[w + 1 for w in atom] for atom in level] for level in self.partitions],
        }

    @classmethod
    def from_json(cls, doc: dict) -> "FilteredSpace":
        parts = [[[w - 1 for w in atom] for atom in level] for level in doc["partitions"]]
        space = make_space(parts)
        if "states" in doc and doc["states"] != space.n_states:
            raise ShapeError(f"states={doc['states']} but partitions cover {space.n_states} points")
        return space


def make_space(partitions: Sequence[Sequence[Iterable[int]]]) -> FilteredSpace:
    """Validate a filtration given as 0-based atom lists for ``t = 0..T``."""
    if not partitions:
        raise EmptyAtomError("at least one partition (t = 0) is required")
    levels = []
    for t, level in enumerate(partitions):
        atoms = []
        for atom in level:
            members = sorted(set(int(w) for w in atom))
            if not members:
                raise EmptyAtomError(f"empty atom at level {t}")
            atoms.append(tuple(members))
        if not atoms:
            raise EmptyAtomError(f"level {t} has no atoms")
        atoms.sort()
        levels.append(tuple(atoms))

    n = sum(len(a) for a in levels[0])
    universe = set(range(n))
    atom_of = []
    for t, atoms in enumerate(levels):
        seen: dict[int, int] = {}
        for i, atom in enumerate(atoms):
            for w in atom:
                if w in seen:
                    raise EmptyAtomError(f"point {w} lies in two atoms at level {t}")
                seen[w] = i
        if set(seen) != universe:
            raise EmptyAtomError(f"level {t} does not partition 0..{n - 1}")
        atom_of.append(tuple(seen[w] for w in range(n)))

    for t in range(1, len(levels)):
        for atom in levels[t]:
            parents = {atom_of[t - 1][w] for w in atom}
            if len(parents) != 1:
                raise RefinementError(f"atom {list(atom)} at level {t} straddles level {t - 1} atoms")
    return FilteredSpace(n, tuple(levels), tuple(atom_of))


def discrete_partition(n: int) -> list[list[int]]:
    return [[w] for w in range(n)]


def trivial_partition(n: int) -> list[list[int]]:
    return [list(range(n))]


@dataclass(frozen=True)
class Measure:
    """Probability masses, one per sample point."""

    mass: tuple[Fraction, ...]

    def __init__(self, mass: Iterable):
        values = tuple(q(m) for m in mass)
        if not values:
            raise MeasureError("a measure needs at least one point")
        if any(m < 0 for m in values):
            raise MeasureError("negative mass")
        if sum(values) != 1:
            raise MeasureError(f"masses sum to {fmt(sum(values))}, not 1")
        object.__setattr__(self, "mass", values)

    @classmethod
    def uniform(cls, n: int) -> "Measure":
        return cls([Fraction(1, n)] * n)

    def __len__(self) -> int:
        return len(self.mass)

    def __getitem__(self, i: int) -> Fraction:
        return self.mass[i]

    def of(self, atom: Iterable[int]) -> Fraction:
        return sum((self.mass[w] for w in atom), Fraction(0))

    def is_positive(self) -> bool:
        return all(m > 0 for m in self.mass)

    def to_json(self) -> list[str]:
        return [fmt(m) for m in self.mass]


@dataclass(frozen=True)
class RandomVec:
    """Scalar (``dim == 1``) or vector field over the sample points.

    Scalar entries are Fractions, vector entries are tuples of Fractions.  An
    entry of ``None`` marks a value that is undefined (a conditional
    expectation on an atom the measure does not charge).
    """

    values: tuple
    dim: int = 1
    meas_level: Optional[int] = None

    @classmethod
    def scalar(cls, values: Iterable, meas_level: Optional[int] = None) -> "RandomVec":
        return cls(tuple(None if v is None else q(v) for v in values), 1, meas_level)

    @classmethod
    def vector(cls, rows: Iterable[Iterable], meas_level: Optional[int] = None) -> "RandomVec":
        vals = tuple(None if r is None else tuple(q(x) for x in r) for r in rows)
        dims = {len(r) for r in vals if r is not None}
        if len(dims) > 1:
            raise ShapeError("vector field rows have different lengths")
        return cls(vals, dims.pop() if dims else 1, meas_level)

    @classmethod
    def constant(cls, n: int, c) -> "RandomVec":
        return cls.scalar([c] * n, 0)

    @classmethod
    def indicator(cls, n: int, states: Iterable[int]) -> "RandomVec":
        s = set(states)
        return cls.scalar([1 if w in s else 0 for w in range(n)])

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, i: int):
        return self.values[i]

    def __iter__(self):
        return iter(self.values)

    @property
    def is_scalar(self) -> bool:
        return self.dim == 1 and all(not isinstance(v, tuple) for v in self.values)

    def is_defined(self, state: int) -> bool:
        return self.values[state] is not None

    def fully_defined(self) -> bool:
        return all(v is not None for v in self.values)

    def component(self, i: int) -> "RandomVec":
        return RandomVec.scalar([None if v is None else v[i] for v in self.values])

    def _binary(self, other, op) -> "RandomVec":
        if isinstance(other, RandomVec):
            if len(other) != len(self):
                raise ShapeError("length mismatch")
            vals = [None if a is None or b is None else op(a, b) for a, b in zip(self.values, other.values)]
        else:
            c = q(other)
            vals = [None if a is None else op(a, c) for a in self.values]
        return RandomVec.scalar(vals)

    def __add__(self, other):
        return self._binary(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binary(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binary(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, lambda a, b: a / b)

    def __neg__(self):
        return self * -1

    def to_json(self) -> list:
        out = []
        for v in self.values:
            if v is None:
                out.append(None)
            elif isinstance(v, tuple):
                out.append([fmt(x) for x in v])
            else:
                out.append(fmt(v))
        return out


def as_scalar(x, n: Optional[int] = None) -> RandomVec:
    if isinstance(x, RandomVec):
        vec = x
    else:
        vec = RandomVec.scalar(x)
    if n is not None and len(vec) != n:
        raise ShapeError(f"expected {n} values, got {len(vec)}")
    return vec


def _check_len(space: FilteredSpace, n: int, what: str) -> None:
    if n != space.n_states:
        raise ShapeError(f"{what} has {n} entries but the space has {space.n_states} states")


def cond_exp(space: FilteredSpace, x, measure: Measure, t: int) -> RandomVec:
    """Conditional expectation of ``x`` given level ``t`` under ``measure``.

    Atoms carrying no mass get ``None``.
    """
    space.check_level(t)
    vec = x if isinstance(x, RandomVec) else RandomVec.scalar(x)
    _check_len(space, len(vec), "random vector")
    _check_len(space, len(measure), "measure")
    vector_valued = any(isinstance(v, tuple) for v in vec.values)
    out: list = [None] * space.n_states
    for atom in space.atoms(t):
        weight = measure.of(atom)
        if weight == 0:
            continue
        if vector_valued:
            acc = [Fraction(0)] * vec.dim
            for w in atom:
                m = measure.mass[w]
                if m:
                    acc = [a + m * c for a, c in zip(acc, vec.values[w])]
            value: Value = tuple(a / weight for a in acc)
        else:
            value = sum((measure.mass[w] * vec.values[w] for w in atom if measure.mass[w]), Fraction(0)) / weight
        for w in atom:
            out[w] = value
    if vector_valued:
        return RandomVec(tuple(out), vec.dim, t)
    return RandomVec(tuple(out), 1, t)


def density(q_measure: Measure, p_measure: Measure) -> RandomVec:
    if len(q_measure) != len(p_measure):
        raise ShapeError("measures live on different spaces")
    if any(m == 0 for m in p_measure.mass):
        raise DivisionByZero("reference measure has a null point")
    return RandomVec.scalar([a / b for a, b in zip(q_measure.mass, p_measure.mass)])


def restrict_density(space: FilteredSpace, q_measure: Measure, p_measure: Measure, t: int) -> RandomVec:
    """Density of ``q_measure`` w.r.t. ``p_measure`` restricted to level ``t`` information."""
    return cond_exp(space, density(q_measure, p_measure), p_measure, t)


@dataclass(frozen=True)
class TestSet:
    """Polytope of probability measures given by vertices.

    ``reference_index`` points at a vertex charging every sample point.
    """

    __test__ = False  # not a pytest class

    space: FilteredSpace
    vertices: tuple[Measure, ...]
    reference_index: int = 0

    def __post_init__(self):
        verts = tuple(v if isinstance(v, Measure) else Measure(v) for v in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if not verts:
            raise MeasureError("a test set needs at least one vertex")
        for v in verts:
            _check_len(self.space, len(v), "vertex")
        if not 0 <= self.reference_index < len(verts):
            raise MeasureError(f"reference index {self.reference_index} out of range")
        if not verts[self.reference_index].is_positive():
            raise MeasureError("reference vertex must charge every state")

    @property
    def reference(self) -> Measure:
        return self.vertices[self.reference_index]

    def to_json(self) -> dict:
        return {"vertices": [v.to_json() for v in self.vertices], "reference": self.reference_index}

    @classmethod
    def from_json(cls, space: FilteredSpace, doc: dict) -> "TestSet":
        return cls(space, tuple(Measure(v) for v in doc["vertices"]), int(doc.get("reference", 0)))

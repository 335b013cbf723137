"""Exact polyhedral cones in R^N.

A cone is stored through generators (``v_rep``: the cone is their
nonnegative hull) and/or inequality rows (``h_rep``: the cone is
``{x : row . x <= 0 for every row}``).  Both are kept as primitive integer
vectors, sorted and deduplicated, so two cones built the same way compare
equal syntactically.  A line is stored as the pair ``+l, -l`` and an
equality as the pair ``+a, -a``.

The polar pairing is the plain dot product, so taking the polar simply swaps
the two representations.  Conversion between them is the double description
method in integer arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import lp
from .errors import RepresentationUnavailable, ShapeError
from .rational import fmt, primitive

DEFAULT_BUDGET = 5000

IntVec = tuple[int, ...]


def _canon(vectors: Iterable[Sequence]) -> tuple[IntVec, ...]:
    out = set()
    for v in vectors:
        p = primitive(v)
        if any(p):
            out.add(p)
    return tuple(sorted(out))


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _prim(vec: list[int]) -> IntVec:
    from math import gcd

    g = 0
    for x in vec:
        if x:
            g = gcd(g, x)
            if g == 1:
                break
    if g > 1:
        return tuple(x // g for x in vec)
    return tuple(vec)


def double_description(rows: Sequence[IntVec], dim: int, budget: int = DEFAULT_BUDGET) -> tuple[list[IntVec], list[IntVec]]:
    """Lines and extreme rays of ``{x in R^dim : row . x <= 0 for all rows}``.

    The lineality space is spanned by the returned lines; together with the
    rays it generates the cone, and the rays are irredundant.  Rows are
    processed in the given order, which matters a great deal for speed.
    """
    lines: list[IntVec] = [tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)]
    rays: list[IntVec] = []
    zeros: list[int] = []  # bitmask of processed rows vanishing on each ray
    for k, row in enumerate(rows):
        bit = 1 << k
        pivot = -1
        for idx, line in enumerate(lines):
            if _idot(row, line):
                pivot = idx
                break
        if pivot >= 0:
            ell = lines.pop(pivot)
            a_ell = _idot(row, ell)
            if a_ell > 0:
                ell = tuple(-x for x in ell)
                a_ell = -a_ell
            scale = -a_ell
            new_lines = []
            for other in lines:
                c = _idot(row, other)
                if c:
                    other = _prim([scale * x + c * y for x, y in zip(other, ell)])
                new_lines.append(other)
            lines = new_lines
            new_rays = []
            for ray, z in zip(rays, zeros):
                c = _idot(row, ray)
                if c:
                    ray = _prim([scale * x + c * y for x, y in zip(ray, ell)])
                new_rays.append(ray)
            zeros = [z | bit for z in zeros]
            rays = new_rays + [ell]
            zeros.append(bit - 1)
            if len(rays) > budget:
                raise RepresentationUnavailable(f"double description exceeded the budget of {budget} generators")
            continue

        vals = [_idot(row, r) for r in rays]
        pos = [i for i, v in enumerate(vals) if v > 0]
        if not pos:
            zeros = [z | bit if v == 0 else z for z, v in zip(zeros, vals)]
            continue
        neg = [i for i, v in enumerate(vals) if v < 0]
        keep = [i for i, v in enumerate(vals) if v <= 0]
        new_rays = [rays[i] for i in keep]
        new_zeros = [zeros[i] | bit if vals[i] == 0 else zeros[i] for i in keep]
        need = dim - len(lines) - 2
        # vanishing[s]: bitset of rays on which processed row s vanishes
        vanishing = [0] * k
        for m, z in enumerate(zeros):
            while z:
                low = z & -z
                vanishing[low.bit_length() - 1] |= 1 << m
                z ^= low
        everyone = (1 << len(rays)) - 1
        for i in pos:
            zi = zeros[i]
            for j in neg:
                common = zi & zeros[j]
                if need > 0 and common.bit_count() < need:
                    continue
                # adjacent iff no third ray vanishes on every row in common
                others = everyone & ~((1 << i) | (1 << j))
                c = common
                while c and others:
                    low = c & -c
                    others &= vanishing[low.bit_length() - 1]
                    c ^= low
                if others:
                    continue
                vi, vj = vals[i], vals[j]
                new_rays.append(_prim([vi * y - vj * x for x, y in zip(rays[i], rays[j])]))
                new_zeros.append(common | bit)
                if len(new_rays) > budget:
                    raise RepresentationUnavailable(f"double description exceeded the budget of {budget} generators")
        rays, zeros = new_rays, new_zeros
    return lines, rays


@dataclass(frozen=True)
class PolyCone:
    dim: int
    h_rep: Optional[tuple[IntVec, ...]] = None
    v_rep: Optional[tuple[IntVec, ...]] = None
    # (n_states, d) when the coordinates are (state, asset) pairs, state-major
    shape: Optional[tuple[int, int]] = None
    space: Optional[object] = field(default=None, repr=False, compare=False)
    _split: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if self.h_rep is None and self.v_rep is None:
            raise ShapeError("a cone needs at least one representation")
        for reps in (self.h_rep, self.v_rep):
            if reps is not None and any(len(r) != self.dim for r in reps):
                raise ShapeError(f"vector length differs from ambient dimension {self.dim}")

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence], dim: int, shape=None, space=None) -> "PolyCone":
        return cls(dim, h_rep=_canon(rows), shape=shape, space=space)

    @classmethod
    def from_generators(cls, gens: Iterable[Sequence], dim: int, shape=None, space=None) -> "PolyCone":
        return cls(dim, v_rep=_canon(gens), shape=shape, space=space)

    @classmethod
    def whole_space(cls, dim: int, shape=None) -> "PolyCone":
        return cls(dim, h_rep=(), shape=shape)

    @classmethod
    def origin(cls, dim: int, shape=None) -> "PolyCone":
        return cls(dim, v_rep=(), shape=shape)

    def to_json(self) -> dict:
        doc: dict = {"dim": self.dim}
        if self.shape:
            doc["shape"] = list(self.shape)
        if self.h_rep is not None:
            doc["h_rep"] = [[fmt(Fraction(x)) for x in r] for r in self.h_rep]
        if self.v_rep is not None:
            doc["v_rep"] = [[fmt(Fraction(x)) for x in r] for r in self.v_rep]
        return doc


def dd_convert(c: PolyCone, budget: int = DEFAULT_BUDGET) -> PolyCone:
    """Return ``c`` with both representations filled in."""
    if c.h_rep is not None and c.v_rep is not None:
        return c
    if c.v_rep is None:
        lines, rays = lines_and_rays(c, budget)
        gens = list(rays) + list(lines) + [tuple(-x for x in l) for l in lines]
        return PolyCone(c.dim, c.h_rep, _canon(gens), c.shape, c.space)
    lines, rays = double_description(c.v_rep, c.dim, budget)
    rows = list(rays) + list(lines) + [tuple(-x for x in l) for l in lines]
    return PolyCone(c.dim, _canon(rows), c.v_rep, c.shape, c.space)


def lines_and_rays(c: PolyCone, budget: int = DEFAULT_BUDGET) -> tuple[list[IntVec], list[IntVec]]:
    """Minimal description: a basis of the lineality space and the extreme rays."""
    key = ("lr", budget)
    if key not in c._split:
        rows = c.h_rep if c.h_rep is not None else dd_convert(c, budget).h_rep
        c._split[key] = double_description(rows, c.dim, budget)
    return c._split[key]


def generators(c: PolyCone, budget: int = DEFAULT_BUDGET) -> tuple[IntVec, ...]:
    if c.v_rep is not None:
        return c.v_rep
    return dd_convert(c, budget).v_rep


def inequalities(c: PolyCone, budget: int = DEFAULT_BUDGET) -> tuple[IntVec, ...]:
    if c.h_rep is not None:
        return c.h_rep
    return dd_convert(c, budget).h_rep


def polar(c: PolyCone) -> PolyCone:
    """``{y : y . x <= 0 for all x in c}``; representations trade places."""
    return PolyCone(c.dim, h_rep=c.v_rep, v_rep=c.h_rep, shape=c.shape, space=c.space)


def _check_dims(*cones: PolyCone) -> int:
    dims = {c.dim for c in cones}
    if len(dims) != 1:
        raise ShapeError(f"cones live in different ambient dimensions {sorted(dims)}")
    return dims.pop()


def member(x: Sequence, c: PolyCone) -> bool:
    if len(x) != c.dim:
        raise ShapeError(f"point has length {len(x)}, cone dimension is {c.dim}")
    if c.h_rep is not None:
        return all(sum(Fraction(a) * Fraction(b) for a, b in zip(row, x)) <= 0 for row in c.h_rep)
    return lp.in_cone(c.v_rep, x).feasible


def separate(x: Sequence, c: PolyCone) -> Optional[list[Fraction]]:
    """A functional ``y`` with ``y . g <= 0`` on ``c`` and ``y . x > 0``, or None if ``x`` is in ``c``."""
    if c.h_rep is not None:
        for row in c.h_rep:
            if sum(Fraction(a) * Fraction(b) for a, b in zip(row, x)) > 0:
                return [Fraction(a) for a in row]
        return None
    res = lp.in_cone(c.v_rep, x)
    if res.feasible:
        return None
    return res.farkas


def contains(outer: PolyCone, inner: PolyCone, budget: int = DEFAULT_BUDGET) -> bool:
    """Is ``inner`` a subset of ``outer``?"""
    _check_dims(outer, inner)
    return first_outside(outer, inner, budget) is None


def first_outside(outer: PolyCone, inner: PolyCone, budget: int = DEFAULT_BUDGET) -> Optional[IntVec]:
    """First generator of ``inner`` (in canonical order) that is not in ``outer``."""
    for g in generators(inner, budget):
        if not member(g, outer):
            return g
    return None


def equal(a: PolyCone, b: PolyCone, budget: int = DEFAULT_BUDGET) -> bool:
    _check_dims(a, b)
    if a.h_rep is not None and a.h_rep == b.h_rep:
        return True
    if a.v_rep is not None and a.v_rep == b.v_rep:
        return True
    return contains(a, b, budget) and contains(b, a, budget)


def cone_sum(cones: Sequence[PolyCone], budget: int = DEFAULT_BUDGET) -> PolyCone:
    dim = _check_dims(*cones)
    gens: list[IntVec] = []
    for c in cones:
        gens.extend(generators(c, budget))
    return PolyCone(dim, v_rep=_canon(gens), shape=cones[0].shape, space=cones[0].space)


def intersect(cones: Sequence[PolyCone], budget: int = DEFAULT_BUDGET) -> PolyCone:
    dim = _check_dims(*cones)
    rows: list[IntVec] = []
    for c in cones:
        rows.extend(inequalities(c, budget))
    return PolyCone(dim, h_rep=_canon(rows), shape=cones[0].shape, space=cones[0].space)


def contains_negative_orthant(c: PolyCone) -> bool:
    """Acceptance-type flag: every ``-e_i`` lies in the cone."""
    return all(member(tuple(-1 if i == j else 0 for j in range(c.dim)), c) for i in range(c.dim))


def is_pointed(c: PolyCone, budget: int = DEFAULT_BUDGET) -> bool:
    lines, _ = lines_and_rays(c, budget)
    return not lines

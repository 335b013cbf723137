"""Portfolio acceptance cones and their time decompositions.

Vector fields ``X`` over the sample points with values in R^d are flattened
state-major: coordinate ``w * d + i`` holds asset ``i`` at state ``w``.  A
claim in units of the portfolio ``V = (v^1, ..., v^d)`` pays ``X(w) . V(w)``.

The pieces of a decomposition are the cones of F_{t+eta}-measurable fields
that stay acceptable after any nonnegative F_t-measurable rescaling.  They are
built by merging coordinates: one variable per (F_{t+eta} atom, asset),
which keeps the double description small, and the resulting generators are
copied back onto every state of the atom.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Optional, Sequence

from . import lp
from .cones import (
    DEFAULT_BUDGET,
    IntVec,
    PolyCone,
    cone_sum,
    dd_convert,
    double_description,
    equal,
    first_outside,
    generators,
    inequalities,
    lines_and_rays,
    polar,
)
from .errors import LevelOutOfRange, NotANumeraire, ShapeError
from .rational import primitive, q
from .risk import RiskMeasure, acceptance_cone, make_numeraire
from .space import FilteredSpace, RandomVec


@dataclass(frozen=True)
class PortfolioSpec:
    """Strictly positive assets; the first one is the unit of account ``1``."""

    assets: tuple[tuple[Fraction, ...], ...]
    require_unit: bool = field(default=True, compare=False)

    def __init__(self, assets: Iterable, require_unit: bool = True):
        rows = []
        for a in assets:
            vals = a.values if isinstance(a, RandomVec) else a
            vals = getattr(vals, "values", vals)
            rows.append(tuple(q(x) for x in vals))
        if not rows:
            raise ShapeError("a portfolio needs at least one asset")
        if len({len(r) for r in rows}) != 1:
            raise ShapeError("assets have different lengths")
        if any(x <= 0 for r in rows for x in r):
            raise NotANumeraire("portfolio assets must be strictly positive")
        if require_unit and any(x != 1 for x in rows[0]):
            raise NotANumeraire("the first portfolio asset must be the constant 1")
        object.__setattr__(self, "assets", tuple(rows))
        object.__setattr__(self, "require_unit", require_unit)

    @property
    def d(self) -> int:
        return len(self.assets)

    @property
    def n_states(self) -> int:
        return len(self.assets[0])

    def at(self, state: int) -> tuple[Fraction, ...]:
        return tuple(a[state] for a in self.assets)

    def validate(self, rm: RiskMeasure) -> None:
        if self.n_states != rm.space.n_states:
            raise ShapeError("portfolio and risk measure live on different spaces")
        for a in self.assets:
            make_numeraire(rm, a)

    def to_json(self) -> list:
        return [[str(x) for x in a] for a in self.assets]


def _rows_on_atoms(rm: RiskMeasure, V: PortfolioSpec, t: int) -> list[list[Fraction]]:
    """One functional per test vertex per level-``t`` atom, in flattened coordinates."""
    space = rm.space
    d = V.d
    rows = []
    for atom in space.atoms(t):
        for m in rm.vertices:
            if m.of(atom) == 0:
                continue
            row = [Fraction(0)] * (space.n_states * d)
            for w in atom:
                for i in range(d):
                    row[w * d + i] = m.mass[w] * V.assets[i][w]
            rows.append(row)
    return rows


def _ambient(rm: RiskMeasure, V: PortfolioSpec) -> tuple[int, tuple[int, int]]:
    if V.n_states != rm.space.n_states:
        raise ShapeError("portfolio and risk measure live on different spaces")
    n = rm.space.n_states
    return n * V.d, (n, V.d)


def portfolio_cone(rm: RiskMeasure, V: PortfolioSpec) -> PolyCone:
    """Fields whose portfolio value is acceptable at time 0."""
    dim, shape = _ambient(rm, V)
    return PolyCone.from_rows(_rows_on_atoms(rm, V, 0), dim, shape, rm.space)


def a_t_cone(rm: RiskMeasure, V: PortfolioSpec, t: int) -> PolyCone:
    """Fields that remain acceptable under every nonnegative level-``t`` rescaling."""
    rm.space.check_level(t)
    dim, shape = _ambient(rm, V)
    return PolyCone.from_rows(_rows_on_atoms(rm, V, t), dim, shape, rm.space)


def restricted_piece(
    space: FilteredSpace,
    d: int,
    rows: Sequence[Sequence],
    t: int,
    eta: int,
    budget: int = DEFAULT_BUDGET,
) -> PolyCone:
    """Largest F_{t+eta}-measurable subcone stable under level-``t`` rescaling.

    ``rows`` is an inequality description over flattened coordinates.  Each
    row is cut into its restrictions to the level-``t`` atoms; the result is
    the set of F_{t+eta}-measurable fields satisfying every restricted row.
    """
    if eta not in (0, 1):
        raise ValueError("eta must be 0 or 1")
    if t < 0 or t + eta > space.horizon:
        raise LevelOutOfRange(f"t={t} with eta={eta} exceeds horizon {space.horizon}")
    fine = space.atoms(t + eta)
    fine_of = space.atom_of[t + eta]
    n_merged = len(fine) * d
    merged_rows = set()
    for row in rows:
        for atom in space.atoms(t):
            merged = [Fraction(0)] * n_merged
            for w in atom:
                b = fine_of[w]
                for i in range(d):
                    merged[b * d + i] += Fraction(row[w * d + i])
            if any(merged):
                merged_rows.add(primitive(merged))
    lines, rays = double_description(sorted(merged_rows), n_merged, budget)
    dim = space.n_states * d

    def lift(g: IntVec) -> list[int]:
        out = [0] * dim
        for w in range(space.n_states):
            b = fine_of[w]
            for i in range(d):
                out[w * d + i] = g[b * d + i]
        return out

    gens = [lift(r) for r in rays]
    for ell in lines:
        gens.append(lift(ell))
        gens.append([-x for x in lift(ell)])
    # inequality description: restricted rows plus measurability equalities
    h_rows: list[list] = []
    for row in rows:
        for atom in space.atoms(t):
            members = set(atom)
            r = [Fraction(row[k]) if k // d in members else Fraction(0) for k in range(dim)]
            if any(r):
                h_rows.append(r)
    for atom in fine:
        for w0, w1 in zip(atom, atom[1:]):
            for i in range(d):
                e = [0] * dim
                e[w0 * d + i] = 1
                e[w1 * d + i] = -1
                h_rows.append(e)
                h_rows.append([-x for x in e])
    base = PolyCone.from_rows(h_rows, dim, (space.n_states, d), space)
    return PolyCone(dim, base.h_rep, PolyCone.from_generators(gens, dim).v_rep, (space.n_states, d), space)


def kt_eta(rm: RiskMeasure, V: PortfolioSpec, t: int, eta: int, budget: int = DEFAULT_BUDGET) -> PolyCone:
    """Level-``t`` piece of the eta-decomposition of the portfolio cone."""
    _ambient(rm, V)
    if t < 0 or t + eta > rm.space.horizon:
        raise LevelOutOfRange(f"t={t} with eta={eta} exceeds horizon {rm.space.horizon}")
    return restricted_piece(rm.space, V.d, _rows_on_atoms(rm, V, 0), t, eta, budget)


def decomposed_cone(rm: RiskMeasure, V: PortfolioSpec, eta: int, budget: int = DEFAULT_BUDGET) -> PolyCone:
    """Sum of the pieces ``kt_eta`` over ``t = 0..T-eta``."""
    pieces = [kt_eta(rm, V, t, eta, budget) for t in range(rm.space.horizon - eta + 1)]
    return cone_sum(pieces, budget)


@dataclass
class RepresentationReport:
    represented: bool
    eta: int
    # a generator of the portfolio cone outside the decomposed cone
    missing_generator: Optional[IntVec] = None
    # a functional nonpositive on the decomposed cone and positive on it
    separator: Optional[list[Fraction]] = None
    checked: int = 0


def _portfolio_generators(c: PolyCone, budget: int) -> list[IntVec]:
    lines, rays = lines_and_rays(c, budget)
    out: list[IntVec] = []
    for ell in lines:
        out.append(tuple(ell))
        out.append(tuple(-x for x in ell))
    out.extend(rays)
    return out


def representation_report(rm: RiskMeasure, V: PortfolioSpec, eta: int, budget: int = DEFAULT_BUDGET) -> RepresentationReport:
    """Compare the portfolio cone with its eta-decomposition, with a certificate."""
    if eta not in (0, 1):
        raise ValueError("eta must be 0 or 1")
    target = portfolio_cone(rm, V)
    decomposed = decomposed_cone(rm, V, eta, budget)
    stray = first_outside(target, decomposed, budget)
    if stray is not None:
        raise AssertionError(f"decomposed cone escapes the portfolio cone at {stray}")
    gens = decomposed.v_rep
    checked = 0
    for g in _portfolio_generators(target, budget):
        checked += 1
        res = lp.in_cone(gens, g)
        if not res.feasible:
            return RepresentationReport(False, eta, g, res.farkas, checked)
    return RepresentationReport(True, eta, checked=checked)


def is_represented(rm: RiskMeasure, V: PortfolioSpec, eta: int, budget: int = DEFAULT_BUDGET) -> bool:
    return representation_report(rm, V, eta, budget).represented


def portfolio_polar_by_assets(rm: RiskMeasure, V: PortfolioSpec) -> PolyCone:
    """Generators of the scalar polar cone multiplied state-wise by the asset vector."""
    dim, shape = _ambient(rm, V)
    scalar_polar = polar(acceptance_cone(rm, 0))
    gens = []
    for z in generators(scalar_polar):
        g = []
        for w in range(rm.space.n_states):
            g.extend(z[w] * a for a in V.at(w))
        gens.append(g)
    return PolyCone.from_generators(gens, dim, shape, rm.space)


def polar_portfolio_identity(rm: RiskMeasure, V: PortfolioSpec, budget: int = DEFAULT_BUDGET) -> bool:
    """Polar of the portfolio cone equals the scalar polar cone times ``V``.

    The left side is produced by converting the portfolio cone to generators
    and back through the double description, so the comparison is not a
    syntactic tautology.
    """
    cone = portfolio_cone(rm, V)
    gens_only = PolyCone(cone.dim, v_rep=dd_convert(cone, budget).v_rep, shape=cone.shape, space=cone.space)
    left = dd_convert(polar(gens_only), budget)
    right = portfolio_polar_by_assets(rm, V)
    return equal(left, right, budget)


def b_eta(c: PolyCone, eta: int, space: Optional[FilteredSpace] = None, budget: int = DEFAULT_BUDGET) -> PolyCone:
    """Largest eta-decomposable subcone of an acceptance-type cone ``c``."""
    space = space or c.space
    if space is None or c.shape is None:
        raise ShapeError("b_eta needs a cone over (state, asset) coordinates with a known space")
    n, d = c.shape
    if n != space.n_states:
        raise ShapeError("cone shape does not match the space")
    rows = inequalities(c, budget)
    pieces = [restricted_piece(space, d, rows, t, eta, budget) for t in range(space.horizon - eta + 1)]
    out = cone_sum(pieces, budget)
    return out


@dataclass
class TConeProfile:
    """Per-level, per-atom cones of conditional portfolio values of test measures."""

    # cones[t][k] is the cone in R^d attached to the k-th atom of level t
    cones: list[list[PolyCone]]
    identity_holds: bool
    # a density in the intersection that is not a nonnegative combination of test measures
    certificate: Optional[IntVec] = None

    def level_cone(self, t: int, space: FilteredSpace) -> PolyCone:
        """The level-``t`` cone over (atom, asset) coordinates."""
        per_atom = self.cones[t]
        d = per_atom[0].dim
        k = len(per_atom)
        gens = []
        for idx, c in enumerate(per_atom):
            for g in generators(c):
                v = [0] * (k * d)
                v[idx * d:(idx + 1) * d] = g
                gens.append(v)
        return PolyCone.from_generators(gens, k * d, (k, d))


def t_cone_profile(rm: RiskMeasure, V: PortfolioSpec, budget: int = DEFAULT_BUDGET) -> TConeProfile:
    """Per-atom cones spanned by conditional portfolio values, and the intersection test.

    The intersection over all levels of the densities whose conditional
    portfolio values stay in these cones always contains the test-measure
    cone; ``identity_holds`` says whether it is equal to it.
    """
    space = rm.space
    d = V.d
    n = space.n_states
    cones: list[list[PolyCone]] = []
    rows: list[list[Fraction]] = []
    for t in range(space.horizon + 1):
        level = []
        for atom in space.atoms(t):
            gens = []
            for m in rm.vertices:
                if m.of(atom) == 0:
                    continue
                g = [sum((m.mass[w] * V.assets[i][w] for w in atom), Fraction(0)) for i in range(d)]
                gens.append(g)
            c = dd_convert(PolyCone.from_generators(gens, d), budget)
            level.append(c)
            for h in c.h_rep:
                row = [Fraction(0)] * n
                for w in atom:
                    row[w] = sum((Fraction(h[i]) * V.assets[i][w] for i in range(d)), Fraction(0))
                rows.append(row)
        cones.append(level)
    intersection = PolyCone.from_rows(rows, n, (n, 1), space)
    measures = PolyCone.from_generators([m.mass for m in rm.vertices], n, (n, 1), space)
    cert = first_outside(measures, intersection, budget)
    return TConeProfile(cones, cert is None, cert)

"""Stability of a polytope of test measures under pasting.

The verdict comes from cone duality: the polytope is stable with respect to
a set of assets exactly when the portfolio acceptance cone equals the sum of
its one-period (``eta = 1``) or instantaneous (``eta = 0``) pieces.  The
pasting search below is an independent witness generator.  Each witness it
emits is a single two-piece pasting at a fixed time ``t``::

    X = 1_F * alpha * Y + 1_{F^c} * beta * W

with ``Y, W, Z`` in the polytope, ``alpha, beta >= 0`` measurable at level
``t - eta + 1``, the level-``t`` conditional asset prices of ``X`` equal to
those of ``Z``, and ``X`` outside the cone spanned by the polytope.

All measures are handled through their masses, so conditional-price
identities are sums over atoms and the reference probability cancels.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import lp
from .cones import DEFAULT_BUDGET, PolyCone, dd_convert, double_description
from .errors import BudgetExhausted, InputError, RepresentationUnavailable, ShapeError
from .portfolio import PortfolioSpec, representation_report
from .rational import fmt, primitive, q
from .risk import RiskMeasure
from .space import FilteredSpace, Measure

DEFAULT_SEARCH_BUDGET = 20000

Vec = tuple[Fraction, ...]


def finite_strong_assets(space: FilteredSpace) -> PortfolioSpec:
    """The unit of account plus one Arrow-type bump ``1 + 1_{w}`` per state."""
    n = space.n_states
    assets = [[1] * n]
    for w in range(n):
        assets.append([2 if k == w else 1 for k in range(n)])
    return PortfolioSpec(assets)


@dataclass
class PastingWitness:
    t: int
    eta: int
    F: tuple[int, ...]
    Y: Vec
    W: Vec
    Z: Vec
    alpha: Vec
    beta: Vec
    X: Vec
    separator: Optional[Vec] = None

    def to_json(self) -> dict:
        doc = {
            "t": self.t,
            "eta": self.eta,
            "F": [w + 1 for w in self.F],
            "Y": [fmt(x) for x in self.Y],
            "W": [fmt(x) for x in self.W],
            "Z": [fmt(x) for x in self.Z],
            "alpha": [fmt(x) for x in self.alpha],
            "beta": [fmt(x) for x in self.beta],
            "X": [fmt(x) for x in self.X],
        }
        if self.separator is not None:
            doc["separator"] = [fmt(x) for x in self.separator]
        return doc

    @classmethod
    def from_json(cls, doc: dict) -> "PastingWitness":
        try:
            sep = doc.get("separator")
            return cls(
                t=int(doc["t"]),
                eta=int(doc["eta"]),
                F=tuple(int(w) - 1 for w in doc["F"]),
                Y=tuple(q(x) for x in doc["Y"]),
                W=tuple(q(x) for x in doc["W"]),
                Z=tuple(q(x) for x in doc["Z"]),
                alpha=tuple(q(x) for x in doc["alpha"]),
                beta=tuple(q(x) for x in doc["beta"]),
                X=tuple(q(x) for x in doc["X"]),
                separator=None if sep is None else tuple(q(x) for x in sep),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed witness: {exc}") from exc


@dataclass
class StabilityVerdict:
    stable: bool
    eta: int
    assets: PortfolioSpec
    witness: Optional[PastingWitness] = None
    method: str = "duality"
    diagnostic: Optional[str] = None


# ---------------------------------------------------------------------------
# helpers


def _vertex_masses(rm: RiskMeasure) -> list[Vec]:
    return [m.mass for m in rm.vertices]


def _measure_cone(rm: RiskMeasure) -> PolyCone:
    n = rm.space.n_states
    return dd_convert(PolyCone.from_generators(_vertex_masses(rm), n))


def _outside(cone: PolyCone, x: Sequence[Fraction]) -> Optional[Vec]:
    for row in cone.h_rep:
        if sum((a * b for a, b in zip(row, x)), Fraction(0)) > 0:
            return tuple(Fraction(a) for a in row)
    return None


def _prices(x: Sequence[Fraction], atom: Sequence[int], assets: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    return [sum((x[w] * a[w] for w in atom), Fraction(0)) for a in assets]


def _normalise(x: Sequence[Fraction]) -> tuple[Vec, Fraction]:
    total = sum(x, Fraction(0))
    if total == 0:
        return tuple(x), total
    return tuple(v / total for v in x), total


# ---------------------------------------------------------------------------
# witness search


@dataclass
class _Column:
    vector: list[Fraction]  # contribution to X (masses), zero outside its atom
    atom: int  # index of the level-t atom, or -1 for the reference measure
    tag: tuple  # ("mix", vertex) | ("tail", shape_index, sub_atom) | ("ref", vertex)


def _tail_shapes(rm: RiskMeasure) -> list[Vec]:
    verts = _vertex_masses(rm)
    shapes = list(verts)
    for a, b in itertools.combinations(verts, 2):
        shapes.append(tuple((x + y) / 2 for x, y in zip(a, b)))
    out = []
    for s in shapes:
        if s not in out:
            out.append(s)
    return out


class _Search:
    def __init__(self, rm: RiskMeasure, U: PortfolioSpec, eta: int, budget: int):
        self.rm = rm
        self.space = rm.space
        self.U = U
        self.eta = eta
        self.budget = budget
        self.spent = 0
        self.cone = _measure_cone(rm)
        self.verts = _vertex_masses(rm)
        self.shapes = _tail_shapes(rm) if eta == 0 else []

    def charge(self, amount: int = 1) -> None:
        self.spent += amount
        if self.spent > self.budget:
            raise BudgetExhausted(f"pasting search exceeded its budget of {self.budget} steps")

    def run(self) -> Optional[PastingWitness]:
        for t in range(self.space.horizon + self.eta):
            found = self.at_level(t)
            if found is not None:
                return found
        return None

    def modes(self, t: int, atom_idx: int) -> list[tuple]:
        modes: list[tuple] = [("mix",)]
        if self.eta == 0:
            subs = self.space.children(t, atom_idx)
            if len(subs) > 1:
                for k in range(len(self.shapes)):
                    modes.append(("tail", k))
        return modes

    def at_level(self, t: int) -> Optional[PastingWitness]:
        atoms = self.space.atoms(t)
        per_atom = [self.modes(t, i) for i in range(len(atoms))]
        for combo in itertools.product(*per_atom):
            self.charge()
            found = self.try_combo(t, combo)
            if found is not None:
                return found
        return None

    def columns(self, t: int, combo: Sequence[tuple]) -> list[_Column]:
        space = self.space
        n = space.n_states
        cols: list[_Column] = []
        for i, atom in enumerate(space.atoms(t)):
            members = set(atom)
            mode = combo[i]
            if mode[0] == "mix":
                for k, v in enumerate(self.verts):
                    if any(v[w] for w in atom):
                        vec = [v[w] if w in members else Fraction(0) for w in range(n)]
                        cols.append(_Column(vec, i, ("mix", k)))
            else:
                shape = self.shapes[mode[1]]
                for b in space.children(t, i):
                    sub = set(space.atoms(t + 1)[b])
                    if any(shape[w] for w in sub):
                        vec = [shape[w] if w in sub else Fraction(0) for w in range(n)]
                        cols.append(_Column(vec, i, ("tail", mode[1], b)))
        for k, v in enumerate(self.verts):
            cols.append(_Column([-x for x in v], -1, ("ref", k)))
        return cols

    def try_combo(self, t: int, combo: Sequence[tuple]) -> Optional[PastingWitness]:
        space = self.space
        cols = self.columns(t, combo)
        m = len(cols)
        # price constraints: for each atom and asset, (X - Z) prices vanish
        rows: list[list[Fraction]] = []
        for atom in space.atoms(t):
            for a in self.U.assets:
                rows.append([sum((c.vector[w] * a[w] for w in atom), Fraction(0)) for c in cols])
        h = [primitive(r) for r in rows if any(r)]
        h += [tuple(-x for x in r) for r in h]
        h += [tuple(-1 if i == j else 0 for j in range(m)) for i in range(m)]
        try:
            lines, rays = double_description(sorted(set(h)), m, self.budget)
        except RepresentationUnavailable as exc:
            raise BudgetExhausted(str(exc)) from exc
        assert not lines
        for ray in sorted(rays):
            self.charge()
            coeffs = [Fraction(x) for x in ray]
            x = [Fraction(0)] * space.n_states
            for c, col in zip(coeffs, cols):
                if c and col.atom >= 0:
                    for w in range(space.n_states):
                        x[w] += c * col.vector[w]
            if _outside(self.cone, x) is None:
                continue
            return self.build(t, combo, cols, coeffs)
        return None

    def build(self, t: int, combo, cols: list[_Column], coeffs: list[Fraction]) -> PastingWitness:
        """Turn a many-piece pasting into a chain of two-piece pastings and
        return the first link that leaves the polytope."""
        space = self.space
        n = space.n_states
        ref = [Fraction(0)] * n
        for c, col in zip(coeffs, cols):
            if col.atom < 0 and c:
                for w in range(n):
                    ref[w] -= c * col.vector[w]
        z, z_total = _normalise(ref)
        if z_total == 0:
            raise AssertionError("pasting without a reference measure")
        scale = 1 / z_total
        s = t - self.eta + 1
        current = list(z)
        for i, atom in enumerate(space.atoms(t)):
            members = set(atom)
            piece = [Fraction(0)] * n
            alpha = [Fraction(0)] * n
            mode = combo[i]
            if mode[0] == "mix":
                for c, col in zip(coeffs, cols):
                    if col.atom == i and c:
                        for w in atom:
                            piece[w] += c * scale * col.vector[w]
                y_on_atom = [Fraction(0)] * n
                weight = Fraction(0)
                for c, col in zip(coeffs, cols):
                    if col.atom == i and c:
                        weight += c * scale
                        v = self.verts[col.tag[1]]
                        for w in range(n):
                            y_on_atom[w] += c * scale * v[w]
                if weight:
                    y = tuple(v / weight for v in y_on_atom)
                    for w in atom:
                        alpha[w] = weight
                else:
                    y = tuple(self.verts[self.rm.testset.reference_index])
            else:
                y = self.shapes[mode[1]]
                for c, col in zip(coeffs, cols):
                    if col.atom == i and c:
                        for w in space.atoms(s)[col.tag[2]]:
                            alpha[w] = c * scale
                            piece[w] = c * scale * y[w]
            nxt = [piece[w] if w in members else current[w] for w in range(n)]
            sep = _outside(self.cone, nxt)
            if sep is not None:
                w_vec, w_total = _normalise(current)
                if w_total == 0:
                    w_vec = tuple(self.verts[self.rm.testset.reference_index])
                beta = tuple(Fraction(0) if w in members else w_total for w in range(n))
                return PastingWitness(
                    t=t,
                    eta=self.eta,
                    F=tuple(sorted(atom)),
                    Y=tuple(y),
                    W=tuple(w_vec),
                    Z=tuple(z),
                    alpha=tuple(alpha),
                    beta=beta,
                    X=tuple(nxt),
                    separator=sep,
                )
            current = nxt
        raise AssertionError("assembled pasting unexpectedly stayed inside the polytope")


def falsify_m_stability(
    rm: RiskMeasure, U: PortfolioSpec, eta: int, budget: int = DEFAULT_SEARCH_BUDGET
) -> Optional[PastingWitness]:
    """Search for a pasting that leaves the polytope.

    Returns ``None`` when the candidate family is exhausted without finding
    one (which does not prove stability) and raises ``BudgetExhausted`` when
    the budget runs out first.
    """
    if eta not in (0, 1):
        raise ValueError("eta must be 0 or 1")
    if U.n_states != rm.space.n_states:
        raise ShapeError("assets and risk measure live on different spaces")
    return _Search(rm, U, eta, budget).run()


# ---------------------------------------------------------------------------
# independent re-verification


def witness_problems(rm: RiskMeasure, U: PortfolioSpec, w: PastingWitness) -> list[str]:
    """Everything wrong with ``w``; an empty list means it is a valid witness."""
    space = rm.space
    n = space.n_states
    problems: list[str] = []
    if w.eta not in (0, 1):
        return [f"eta={w.eta} is not 0 or 1"]
    if not 0 <= w.t <= space.horizon - 1 + w.eta:
        return [f"time {w.t} outside 0..{space.horizon - 1 + w.eta}"]
    for name in ("Y", "W", "Z", "alpha", "beta", "X"):
        if len(getattr(w, name)) != n:
            return [f"{name} has the wrong length"]
    fset = set(w.F)
    if any(not 0 <= s < n for s in fset):
        return ["F mentions unknown states"]
    for atom in space.atoms(w.t):
        inside = [s in fset for s in atom]
        if any(inside) and not all(inside):
            problems.append(f"F splits the level-{w.t} atom {[s + 1 for s in atom]}")
    s_level = w.t - w.eta + 1
    for name in ("alpha", "beta"):
        field_vals = getattr(w, name)
        if any(x < 0 for x in field_vals):
            problems.append(f"{name} is negative somewhere")
        if not space.is_measurable(field_vals, s_level):
            problems.append(f"{name} is not measurable at level {s_level}")
    verts = _vertex_masses(rm)
    for name in ("Y", "W", "Z"):
        vec = getattr(w, name)
        try:
            Measure(vec)
        except InputError:
            problems.append(f"{name} is not a probability measure")
            continue
        if not lp.in_cone(verts, vec).feasible:
            problems.append(f"{name} is not in the polytope")
    expected = tuple(
        w.alpha[s] * w.Y[s] if s in fset else w.beta[s] * w.W[s] for s in range(n)
    )
    if expected != tuple(w.X):
        problems.append("X differs from the pasting formula")
    for atom in space.atoms(w.t):
        if _prices(w.X, atom, U.assets) != _prices(w.Z, atom, U.assets):
            problems.append(f"conditional asset prices differ on atom {[s + 1 for s in atom]}")
    if lp.in_cone(verts, w.X).feasible:
        problems.append("X lies in the cone of the polytope")
    if w.separator is not None:
        sep = w.separator
        if any(sum((a * b for a, b in zip(sep, v)), Fraction(0)) > 0 for v in verts):
            problems.append("separator is positive on a vertex")
        if sum((a * b for a, b in zip(sep, w.X)), Fraction(0)) <= 0:
            problems.append("separator does not separate X")
    return problems


def verify_witness(rm: RiskMeasure, U: PortfolioSpec, w: PastingWitness) -> bool:
    return not witness_problems(rm, U, w)


# ---------------------------------------------------------------------------
# verdicts


def is_m_stable(
    rm: RiskMeasure,
    U: PortfolioSpec,
    eta: int,
    budget: int = DEFAULT_BUDGET,
    search_budget: int = DEFAULT_SEARCH_BUDGET,
) -> StabilityVerdict:
    """Certified stability verdict, with a pasting witness when unstable."""
    try:
        report = representation_report(rm, U, eta, budget)
    except RepresentationUnavailable as exc:
        witness = falsify_m_stability(rm, U, eta, search_budget)
        if witness is None:
            raise
        return StabilityVerdict(False, eta, U, witness, "falsifier", f"duality route unavailable: {exc}")
    if report.represented:
        return StabilityVerdict(True, eta, U)
    try:
        witness = falsify_m_stability(rm, U, eta, search_budget)
    except BudgetExhausted as exc:
        return StabilityVerdict(False, eta, U, None, "duality", f"witness search: {exc}")
    if witness is None:
        return StabilityVerdict(False, eta, U, None, "duality", "witness search found no pasting in its candidate family")
    return StabilityVerdict(False, eta, U, witness, "duality")


def _stopping_time(space: FilteredSpace, tau: Sequence[int]) -> tuple[int, ...]:
    levels = tuple(int(x) for x in tau)
    if len(levels) != space.n_states:
        raise ShapeError("stopping time needs one level per state")
    for s, k in enumerate(levels):
        if not 0 <= k <= space.horizon:
            raise InputError(f"stopping level {k} outside 0..{space.horizon}")
        if any(levels[r] != k for r in space.atom_containing(k, s)):
            raise InputError("levels do not define a stopping time (not adapted)")
    return levels


def check_stopping_time_pasting(
    rm: RiskMeasure, U: PortfolioSpec, q_idx: int, qprime_idx: int, tau: Sequence[int]
) -> bool:
    """Paste the tail of vertex ``qprime_idx`` after ``tau`` onto vertex ``q_idx``.

    Returns True when the pasted measure lies in the polytope, and also when
    the premise fails (the conditional asset prices of the two vertices at
    ``tau`` disagree), in which case the statement is vacuous.
    """
    space = rm.space
    levels = _stopping_time(space, tau)
    base = rm.vertices[q_idx]
    tail = rm.vertices[qprime_idx]
    if not tail.is_positive():
        raise InputError("the tail measure must charge every state")
    pasted = []
    for s in range(space.n_states):
        atom = space.atom_containing(levels[s], s)
        base_mass = base.of(atom)
        if base_mass > 0:
            tail_mass = tail.of(atom)
            for a in U.assets:
                if _prices(base.mass, atom, [a])[0] / base_mass != _prices(tail.mass, atom, [a])[0] / tail_mass:
                    return True
        pasted.append(tail.mass[s] / tail.of(atom) * base_mass)
    return lp.in_cone(_vertex_masses(rm), pasted).feasible


def witness_json(w: PastingWitness) -> str:
    return json.dumps(w.to_json(), sort_keys=True)

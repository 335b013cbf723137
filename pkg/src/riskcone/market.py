"""Proportional transaction costs, consistent prices, and the augmented market.

Claims live in the coordinates ``(terminal atom, asset)``, atom-major: a
claim is ``F_T``-measurable, so one ``d``-vector per atom of the last level
suffices.  Price processes are stored in mass form ``M(B) = P(B) Z_T(B)``;
the martingale property then holds by construction (``Z_t`` on an atom is
the mass of its sub-atoms divided by ``P``), and the pairing of a price
process with a claim is the plain dot product.  The consistent price cone is
therefore exactly the polar of the claims cone.

The augmented market adds one frictionless period.  Its states are pairs
``(w, label)`` with ``label`` in ``{0,1}^(d-1)``, indexed ``w * 2^(d-1) + k``
where ``k`` enumerates labels in lexicographic order.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import lp
from .cones import DEFAULT_BUDGET, PolyCone, double_description
from .errors import BidAskError, InputError, NoCPPError, RangeError, ShapeError
from .rational import fmt, primitive, q
from .space import FilteredSpace, Measure, TestSet, make_space
from .workers import ordered_map

Matrix = tuple[tuple[Fraction, ...], ...]


# ---------------------------------------------------------------------------
# bid-ask processes


@dataclass(frozen=True)
class BidAskProcess:
    """``pi[(t, a)][i][j]``: units of asset ``i`` paid for one unit of asset ``j``
    at time ``t`` on atom ``a`` of that level."""

    space: FilteredSpace
    d: int
    pi: dict
    prob: Measure = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.prob is None:
            object.__setattr__(self, "prob", Measure.uniform(self.space.n_states))
        if len(self.prob) != self.space.n_states:
            raise ShapeError("reference probability has the wrong length")
        if not self.prob.is_positive():
            raise InputError("the reference probability must charge every state")
        validate_bidask(self)

    @property
    def horizon(self) -> int:
        return self.space.horizon

    def matrix(self, t: int, atom_index: int) -> Matrix:
        return self.pi[(t, atom_index)]

    def at_state(self, t: int, state: int) -> Matrix:
        return self.pi[(t, self.space.atom_of[t][state])]

    def to_json(self) -> dict:
        entries = []
        for (t, a), m in sorted(self.pi.items()):
            entries.append({"t": t, "atom": a + 1, "matrix": [[fmt(x) for x in row] for row in m]})
        return {"d": self.d, "pi": entries, "P": self.prob.to_json()}

    @classmethod
    def from_json(cls, space: FilteredSpace, doc: dict) -> "BidAskProcess":
        try:
            d = int(doc["d"])
            entries = doc["pi"]
            if isinstance(entries, dict):
                entries = [entries]
            pi = {}
            for e in entries:
                key = (int(e["t"]), int(e["atom"]) - 1)
                if key in pi:
                    raise BidAskError(f"duplicate matrix for t={key[0]}, atom={key[1] + 1}")
                pi[key] = tuple(tuple(q(x) for x in row) for row in e["matrix"])
            prob = Measure(doc["P"]) if "P" in doc else None
        except (KeyError, TypeError) as exc:
            raise InputError(f"malformed bid-ask process: {exc}") from exc
        return cls(space, d, pi, prob)


def validate_bidask(pi: BidAskProcess) -> None:
    """Shapes, unit diagonal, positive entries and the chain inequality.

    The chain inequality is checked on all triples ``i, j, k`` (with
    repetition, so ``i == k`` covers round trips).  Longer chains follow by
    induction: ``pi^{i0,in} <= pi^{i0,i(n-1)} pi^{i(n-1),in}`` and so on.
    """
    space, d = pi.space, pi.d
    if d < 1:
        raise BidAskError("need at least one asset")
    expected = {(t, a) for t in range(space.horizon + 1) for a in range(len(space.atoms(t)))}
    if set(pi.pi) != expected:
        missing = sorted(expected - set(pi.pi))
        extra = sorted(set(pi.pi) - expected)
        raise BidAskError(f"matrices missing for {[(t, a + 1) for t, a in missing]}, unknown {[(t, a + 1) for t, a in extra]}")
    for (t, a), m in pi.pi.items():
        where = f"t={t}, atom={a + 1}"
        if len(m) != d or any(len(row) != d for row in m):
            raise BidAskError(f"matrix at {where} is not {d}x{d}")
        for i in range(d):
            if m[i][i] != 1:
                raise BidAskError(f"diagonal entry ({i + 1},{i + 1}) at {where} is not 1")
            for j in range(d):
                if m[i][j] <= 0:
                    raise BidAskError(f"entry ({i + 1},{j + 1}) at {where} is not positive")
        for i, j, k in itertools.product(range(d), repeat=3):
            if m[i][k] > m[i][j] * m[j][k]:
                raise BidAskError(
                    f"chain inequality fails at {where}: pi[{i + 1},{k + 1}] > pi[{i + 1},{j + 1}] * pi[{j + 1},{k + 1}]"
                )


def _terminal(space: FilteredSpace) -> tuple[tuple[int, ...], ...]:
    return space.atoms(space.horizon)


def claim_dim(pi: BidAskProcess) -> int:
    return len(_terminal(pi.space)) * pi.d


def _local_generators(m: Matrix, d: int) -> list[list[Fraction]]:
    gens = []
    for i in range(d):
        for j in range(d):
            if i != j:
                g = [Fraction(0)] * d
                g[j] += 1
                g[i] -= m[i][j]
                gens.append(g)
    for k in range(d):
        g = [Fraction(0)] * d
        g[k] = Fraction(-1)
        gens.append(g)
    return gens


def _lift(pi: BidAskProcess, t: int, atom: Sequence[int], local: Sequence[Fraction]) -> list[Fraction]:
    """Spread a ``d``-vector over every terminal atom inside ``atom``."""
    space, d = pi.space, pi.d
    out = [Fraction(0)] * claim_dim(pi)
    seen = set()
    for w in atom:
        b = space.atom_of[space.horizon][w]
        if b not in seen:
            seen.add(b)
            out[b * d : (b + 1) * d] = list(local)
    return out


def trading_generators(pi: BidAskProcess, t: int) -> list[list[Fraction]]:
    pi.space.check_level(t)
    gens = []
    for a, atom in enumerate(pi.space.atoms(t)):
        for g in _local_generators(pi.matrix(t, a), pi.d):
            gens.append(_lift(pi, t, atom, g))
    return gens


def trading_cone(pi: BidAskProcess, t: int) -> PolyCone:
    """Positions reachable by trading (and discarding) at time ``t``."""
    n_atoms = len(_terminal(pi.space))
    return PolyCone.from_generators(trading_generators(pi, t), claim_dim(pi), shape=(n_atoms, pi.d))


def claims_generators(pi: BidAskProcess) -> list[list[Fraction]]:
    gens = []
    for t in range(pi.horizon + 1):
        gens.extend(trading_generators(pi, t))
    return gens


def claims_cone(pi: BidAskProcess) -> PolyCone:
    """Claims attainable from zero endowment: the sum of all trading cones."""
    n_atoms = len(_terminal(pi.space))
    return PolyCone.from_generators(claims_generators(pi), claim_dim(pi), shape=(n_atoms, pi.d))


def consistent_price_cone(pi: BidAskProcess) -> PolyCone:
    """Closed cone of consistent price processes in mass form (the polar of the claims cone)."""
    n_atoms = len(_terminal(pi.space))
    return PolyCone.from_rows(claims_generators(pi), claim_dim(pi), shape=(n_atoms, pi.d))


def strictly_consistent_price(pi: BidAskProcess) -> Optional[list[Fraction]]:
    """A consistent price process with every mass at least 1, or None."""
    gens = claims_generators(pi)
    n = claim_dim(pi)
    # M = 1 + s with s >= 0 and g.s <= -g.1 for every generator
    a_ub = [list(g) for g in gens]
    b_ub = [-sum(g, Fraction(0)) for g in gens]
    res = lp.solve([], [], None, a_ub, b_ub) if gens else lp.LPResult("optimal", [Fraction(0)] * n)
    if not res.feasible:
        return None
    return [1 + x for x in res.x[:n]]


def is_arbitrage_free(pi: BidAskProcess) -> bool:
    return strictly_consistent_price(pi) is not None


@dataclass(frozen=True)
class PriceProcess:
    """``Z[t][a]``: price vector on atom ``a`` of level ``t``."""

    space: FilteredSpace
    Z: tuple[tuple[tuple[Fraction, ...], ...], ...]

    @classmethod
    def from_masses(cls, pi: BidAskProcess, masses: Sequence[Fraction]) -> "PriceProcess":
        space, d = pi.space, pi.d
        terminal = _terminal(space)
        if len(masses) != len(terminal) * d:
            raise ShapeError("mass vector has the wrong length")
        levels = []
        for t in range(space.horizon + 1):
            row = []
            for atom in space.atoms(t):
                subs = sorted({space.atom_of[space.horizon][w] for w in atom})
                total = [sum((Fraction(masses[b * d + i]) for b in subs), Fraction(0)) for i in range(d)]
                p = pi.prob.of(atom)
                row.append(tuple(x / p for x in total))
            levels.append(tuple(row))
        return cls(space, tuple(levels))

    def is_strictly_positive(self) -> bool:
        return all(x > 0 for level in self.Z for z in level for x in z)

    def is_martingale(self, prob: Measure) -> bool:
        space = self.space
        for t in range(space.horizon):
            for a, atom in enumerate(space.atoms(t)):
                total = [Fraction(0)] * len(self.Z[t][a])
                for b in space.children(t, a):
                    weight = prob.of(space.atoms(t + 1)[b])
                    for i, x in enumerate(self.Z[t + 1][b]):
                        total[i] += weight * x
                if any(x / prob.of(atom) != y for x, y in zip(total, self.Z[t][a])):
                    return False
        return True

    def is_consistent(self, pi: BidAskProcess) -> bool:
        for t in range(self.space.horizon + 1):
            for a in range(len(self.space.atoms(t))):
                z = self.Z[t][a]
                for g in _local_generators(pi.matrix(t, a), pi.d):
                    if sum((x * y for x, y in zip(z, g)), Fraction(0)) > 0:
                        return False
        return True

    def to_json(self) -> list:
        return [[[fmt(x) for x in z] for z in level] for level in self.Z]


# ---------------------------------------------------------------------------
# the augmented market


def labels(d: int) -> list[tuple[int, ...]]:
    return list(itertools.product((0, 1), repeat=d - 1))


def spread_bounds(pi: BidAskProcess, terminal_atom: int) -> tuple[list[Fraction], list[Fraction]]:
    """Bid ``S^i = 1/pi^{i1}`` and ask ``B^i = pi^{1i}`` at the last time."""
    m = pi.matrix(pi.horizon, terminal_atom)
    bid = [1 / m[i][0] for i in range(pi.d)]
    ask = [m[0][i] for i in range(pi.d)]
    return bid, ask


def corner_prices(pi: BidAskProcess, epsilon: Fraction, terminal_atom: int) -> list[tuple[Fraction, ...]]:
    bid, ask = spread_bounds(pi, terminal_atom)
    out = []
    for lab in labels(pi.d):
        y = [Fraction(1)]
        for j, bit in enumerate(lab):
            y.append((1 + epsilon) * ask[j + 1] if bit else (1 - epsilon) * bid[j + 1])
        out.append(tuple(y))
    return out


def _check_epsilon(epsilon) -> Fraction:
    eps = q(epsilon)
    if not 0 < eps < 1:
        raise InputError("epsilon must lie strictly between 0 and 1")
    return eps


@dataclass
class AugmentedMarket:
    base: BidAskProcess
    epsilon: Fraction
    omega_tilde: list[tuple[int, ...]]
    Y: list[tuple[Fraction, ...]]  # indexed by product state
    space: FilteredSpace
    prob: Measure
    budget: int = DEFAULT_BUDGET
    _qset: Optional[TestSet] = field(default=None, repr=False)

    @property
    def Qset(self) -> TestSet:
        if self._qset is None:
            self._qset = risk_q_set(self.base, self.epsilon, self.budget)
        return self._qset

    def state(self, w: int, label_index: int) -> int:
        return w * len(self.omega_tilde) + label_index

    def to_json(self) -> dict:
        return {
            "epsilon": fmt(self.epsilon),
            "labels": ["".join(map(str, lab)) for lab in self.omega_tilde],
            "Y": [[fmt(x) for x in y] for y in self.Y],
            "space": self.space.to_json(),
        }


def _product_space(space: FilteredSpace, n_labels: int) -> FilteredSpace:
    def lift(atom):
        return [w * n_labels + k for w in atom for k in range(n_labels)]

    parts = [[lift(atom) for atom in space.atoms(t)] for t in range(space.horizon + 1)]
    last = [[w * n_labels + k for w in atom] for atom in space.atoms(space.horizon) for k in range(n_labels)]
    parts.append(last)
    return make_space(parts)


def augment(pi: BidAskProcess, epsilon, budget: int = DEFAULT_BUDGET) -> AugmentedMarket:
    eps = _check_epsilon(epsilon)
    labs = labels(pi.d)
    nl = len(labs)
    space = pi.space
    ys: list = [None] * (space.n_states * nl)
    for b, atom in enumerate(_terminal(space)):
        corners = corner_prices(pi, eps, b)
        for w in atom:
            for k in range(nl):
                ys[w * nl + k] = corners[k]
    prob = Measure([pi.prob.mass[w] / nl for w in range(space.n_states) for _ in range(nl)])
    return AugmentedMarket(pi, eps, labs, ys, _product_space(space, nl), prob, budget)


def _theta(zbar: Sequence[Fraction], bid, ask, eps: Fraction) -> list[Fraction]:
    if zbar[0] != 1:
        raise RangeError("normalised price must have first coordinate 1")
    thetas = []
    for i in range(1, len(zbar)):
        if not bid[i] <= zbar[i] <= ask[i]:
            raise RangeError(f"price of asset {i + 1} is outside its bid-ask interval [{fmt(bid[i])}, {fmt(ask[i])}]")
        low, high = (1 - eps) * bid[i], (1 + eps) * ask[i]
        thetas.append((zbar[i] - low) / (high - low))
    return thetas


def _lambda_weights(thetas: Sequence[Fraction], labs) -> list[Fraction]:
    out = []
    for lab in labs:
        w = Fraction(1)
        for th, bit in zip(thetas, lab):
            w *= th if bit else 1 - th
        out.append(w)
    return out


def lambda_decomposition(zbar, pi: BidAskProcess, epsilon) -> list[Fraction]:
    """Barycentric weights of a normalised terminal price over the corner prices.

    ``zbar`` holds one ``d``-vector per state (or per terminal atom).  The
    result is indexed by product state.
    """
    eps = _check_epsilon(epsilon)
    space, d = pi.space, pi.d
    terminal = _terminal(space)
    rows = [tuple(q(x) for x in r) for r in zbar]
    if len(rows) == len(terminal) and len(rows) != space.n_states:
        rows = [rows[space.atom_of[space.horizon][w]] for w in range(space.n_states)]
    if len(rows) != space.n_states or any(len(r) != d for r in rows):
        raise ShapeError(f"expected {space.n_states} price vectors of length {d}")
    labs = labels(d)
    out: list[Fraction] = []
    for w in range(space.n_states):
        bid, ask = spread_bounds(pi, space.atom_of[space.horizon][w])
        out.extend(_lambda_weights(_theta(rows[w], bid, ask, eps), labs))
    return out


def cpp_extreme_rays(pi: BidAskProcess, budget: int = DEFAULT_BUDGET) -> list[tuple[int, ...]]:
    # Last period first: its constraints are block diagonal, so the
    # intermediate cone stays a product of small cones for as long as possible.
    rows: list[tuple[int, ...]] = []
    seen = set()
    for t in reversed(range(pi.horizon + 1)):
        for g in trading_generators(pi, t):
            r = primitive(g)
            if r not in seen:
                seen.add(r)
                rows.append(r)
    lines, rays = double_description(rows, claim_dim(pi), budget)
    if lines:
        raise AssertionError("consistent price cone contains a line")
    return sorted(rays)


def _f0_block(pi: BidAskProcess, ray: Sequence) -> int:
    space, d = pi.space, pi.d
    blocks = set()
    for b, atom in enumerate(_terminal(space)):
        if any(ray[b * d : (b + 1) * d]):
            blocks.add(space.atom_of[0][atom[0]])
    if len(blocks) != 1:
        raise AssertionError("extreme consistent price ray spans several initial atoms")
    return blocks.pop()


def measure_from_masses(pi: BidAskProcess, epsilon: Fraction, masses: Sequence) -> tuple[Fraction, ...]:
    """Test measure on the augmented space for a consistent price in mass form.

    The terminal numeraire mass is spread over the states of each terminal
    atom according to ``P`` and split over labels by the lambda weights; the
    result is scaled to total mass one.
    """
    space, d = pi.space, pi.d
    labs = labels(d)
    nl = len(labs)
    out = [Fraction(0)] * (space.n_states * nl)
    total = Fraction(0)
    for b, atom in enumerate(_terminal(space)):
        m = [Fraction(x) for x in masses[b * d : (b + 1) * d]]
        if m[0] == 0:
            if any(m):
                raise RangeError("price vanishes in the first asset but not elsewhere")
            continue
        bid, ask = spread_bounds(pi, b)
        weights = _lambda_weights(_theta([x / m[0] for x in m], bid, ask, epsilon), labs)
        p_atom = pi.prob.of(atom)
        for w in atom:
            for k in range(nl):
                out[w * nl + k] = m[0] * pi.prob.mass[w] / p_atom * weights[k]
        total += m[0]
    return tuple(x / total for x in out)


def risk_q_set(pi: BidAskProcess, epsilon, budget: int = DEFAULT_BUDGET) -> TestSet:
    """Vertices of the test-measure polytope of the augmented market.

    One vertex per extreme consistent price ray, each supported in a single
    initial atom and normalised there.  When no vertex charges every state a
    barycentre of all vertices is appended as the reference measure.
    """
    eps = _check_epsilon(epsilon)
    if not is_arbitrage_free(pi):
        raise NoCPPError("the bid-ask process admits no strictly consistent price process")
    aug_space = _product_space(pi.space, len(labels(pi.d)))
    verts = [measure_from_masses(pi, eps, ray) for ray in cpp_extreme_rays(pi, budget)]
    ref = next((i for i, v in enumerate(verts) if all(x > 0 for x in v)), None)
    if ref is None:
        bary = tuple(sum(col, Fraction(0)) / len(verts) for col in zip(*verts))
        verts.append(bary)
        ref = len(verts) - 1
    return TestSet(aug_space, tuple(Measure(v) for v in verts), ref)


def payoff_rows(pi: BidAskProcess, epsilon, qset: TestSet) -> list[list[Fraction]]:
    """Row per test measure: ``row . X = E_Q(Y . X)`` for claims ``X`` in terminal-atom coordinates."""
    eps = _check_epsilon(epsilon)
    space, d = pi.space, pi.d
    labs = labels(d)
    nl = len(labs)
    rows = []
    for m in qset.vertices:
        row = [Fraction(0)] * claim_dim(pi)
        for b, atom in enumerate(_terminal(space)):
            corners = corner_prices(pi, eps, b)
            for w in atom:
                for k in range(nl):
                    mass = m.mass[w * nl + k]
                    if mass:
                        for i in range(d):
                            row[b * d + i] += mass * corners[k][i]
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# desk-scale verification of the acceptance equality


@dataclass
class AcceptanceReport:
    epsilon: Fraction
    vertices: int
    generators_checked: int
    rays_checked: int
    claims_side: bool  # every attainable claim is acceptable
    acceptance_side: bool  # every acceptable claim is attainable
    claims_failure: Optional[dict] = None
    acceptance_failure: Optional[dict] = None

    @property
    def passed(self) -> bool:
        return self.claims_side and self.acceptance_side

    def to_json(self) -> dict:
        doc = {
            "epsilon": fmt(self.epsilon),
            "pass": self.passed,
            "claims_in_acceptance": self.claims_side,
            "acceptance_in_claims": self.acceptance_side,
            "vertices": self.vertices,
            "generators_checked": self.generators_checked,
            "rays_checked": self.rays_checked,
        }
        if self.claims_failure:
            doc["claims_failure"] = self.claims_failure
        if self.acceptance_failure:
            doc["acceptance_failure"] = self.acceptance_failure
        return doc


def _as_strings(v) -> list[str]:
    return [fmt(Fraction(x)) for x in v]


def verify_acceptance_equality(
    pi: BidAskProcess, epsilon, budget: int = DEFAULT_BUDGET, qset: Optional[TestSet] = None
) -> AcceptanceReport:
    """Check that the attainable claims are exactly those with ``rho(Y . X) <= 0``.

    Direction (a): each claims generator has nonpositive expected value
    ``E_Q(Y . X)`` under every test measure.  Direction (b): each extreme ray
    and line of the cone ``{X : E_Q(Y . X) <= 0 for all Q}`` is attainable,
    decided by an LP over the claims generators.  Pass ``qset`` to check a
    different (for example corrupted) set of test measures.
    """
    eps = _check_epsilon(epsilon)
    if qset is None:
        qset = risk_q_set(pi, eps, budget)
    rows = payoff_rows(pi, eps, qset)
    gens = claims_generators(pi)

    report = AcceptanceReport(eps, len(qset.vertices), len(gens), 0, True, True)
    for gi, g in enumerate(gens):
        for vi, row in enumerate(rows):
            value = sum((a * b for a, b in zip(row, g)), Fraction(0))
            if value > 0:
                report.claims_side = False
                report.claims_failure = {"generator": _as_strings(g), "vertex": vi, "expectation": fmt(value)}
                break
        if not report.claims_side:
            break

    lines, rays = double_description([primitive(r) for r in rows], claim_dim(pi), budget)
    candidates = [tuple(r) for r in sorted(rays)]
    for line in sorted(lines):
        candidates.append(tuple(line))
        candidates.append(tuple(-x for x in line))
    report.rays_checked = len(candidates)
    results = ordered_map(lambda x: lp.in_cone(gens, x), candidates)
    for ray, res in zip(candidates, results):
        if not res.feasible:
            report.acceptance_side = False
            report.acceptance_failure = {"ray": _as_strings(ray), "separator": _as_strings(res.farkas)}
            break
    return report


def drop_vertex(qset: TestSet) -> TestSet:
    """Negative control: remove the first vertex that is not the reference."""
    idx = next(i for i in range(len(qset.vertices)) if i != qset.reference_index)
    verts = tuple(v for i, v in enumerate(qset.vertices) if i != idx)
    ref = qset.reference_index - (1 if qset.reference_index > idx else 0)
    return TestSet(qset.space, verts, ref)


# ---------------------------------------------------------------------------
# the frictionless last period


def frictionless_split(u: Sequence[Fraction], y: Sequence[Fraction]) -> tuple[list[Fraction], list[Fraction]]:
    """Write ``u`` (with ``u . y <= 0``) as ``u1 - u2``: ``u1 . y = 0`` and ``u2 >= 0``."""
    if y[0] == 0:
        raise ShapeError("first price coordinate must be nonzero")
    value = sum((Fraction(a) * Fraction(b) for a, b in zip(u, y)), Fraction(0))
    if value > 0:
        raise InputError("u is not in the frictionless trading cone")
    shift = value / Fraction(y[0])
    u1 = [Fraction(x) for x in u]
    u1[0] -= shift
    u2 = [Fraction(0)] * len(u)
    u2[0] = -shift
    return u1, u2


def terminal_frictionless_generators(pi: BidAskProcess, epsilon, budget: int = DEFAULT_BUDGET) -> list[list[Fraction]]:
    """Generators of ``F_T``-measurable positions that are tradeable at every corner price."""
    eps = _check_epsilon(epsilon)
    d = pi.d
    out = []
    for b, _atom in enumerate(_terminal(pi.space)):
        lines, rays = double_description([primitive(y) for y in corner_prices(pi, eps, b)], d, budget)
        local = list(rays) + list(lines) + [tuple(-x for x in l) for l in lines]
        for g in local:
            vec = [Fraction(0)] * claim_dim(pi)
            vec[b * d : (b + 1) * d] = [Fraction(x) for x in g]
            out.append(vec)
    return out


# ---------------------------------------------------------------------------
# random desk instances


def random_tree(rng: random.Random, horizon: int, max_children: int = 2, max_states: int = 8) -> FilteredSpace:
    """Trivial start, discrete end, each node branching into 1..max_children
    (the root into at least two)."""
    paths: list[tuple[int, ...]] = [()]
    for _ in range(horizon):
        grown: list[tuple[int, ...]] = []
        for idx, p in enumerate(paths):
            room = max_states - len(grown) - (len(paths) - idx - 1)
            lowest = 2 if not p and max_children > 1 else 1
            width = max(1, min(rng.randint(lowest, max_children), room))
            grown.extend(p + (c,) for c in range(width))
        paths = grown
    parts = []
    for t in range(horizon + 1):
        groups: dict = {}
        for w, p in enumerate(paths):
            groups.setdefault(p[:t], []).append(w)
        parts.append(list(groups.values()))
    return make_space(parts)


def random_bidask(
    rng: random.Random,
    d: int,
    horizon: int,
    max_children: int = 2,
    max_states: int = 8,
    max_spread: Fraction = Fraction(1, 4),
) -> BidAskProcess:
    """An arbitrage-free process built around a martingale mid price.

    Mid prices ``S`` (with ``S^1 = 1``) are a martingale under the uniform
    reference probability; ``pi^{ij} = S^j (1 + a_j) / (S^i (1 - b_i))`` with
    random spreads ``a, b`` in ``[0, max_spread)``, so ``S`` itself is a
    consistent price process.
    """
    space = random_tree(rng, horizon, max_children, max_states)
    n_states = space.n_states
    terminal = [[Fraction(1)] + [Fraction(rng.randint(2, 12), rng.randint(2, 6)) for _ in range(d - 1)] for _ in range(n_states)]
    steps = 8
    pi = {}
    for t in range(space.horizon + 1):
        for a, atom in enumerate(space.atoms(t)):
            mid = [sum((terminal[w][i] for w in atom), Fraction(0)) / len(atom) for i in range(d)]
            ask = [Fraction(0)] + [max_spread * rng.randrange(steps) / steps for _ in range(d - 1)]
            bid = [Fraction(0)] + [max_spread * rng.randrange(steps) / steps for _ in range(d - 1)]
            m = tuple(
                tuple(Fraction(1) if i == j else mid[j] * (1 + ask[j]) / (mid[i] * (1 - bid[i])) for j in range(d))
                for i in range(d)
            )
            pi[(t, a)] = m
    return BidAskProcess(space, d, pi)


def random_desk_instance(rng: random.Random) -> tuple[BidAskProcess, Fraction]:
    """A desk-scale instance with epsilon 1/10 or 1/4.

    The number of consistent-price extreme rays, and with it the cost of
    the acceptance-cone enumeration, grows very fast with depth and with
    the number of assets, so the tree size depends on the shape: up to
    eight states for two assets over one period, binary trees for two
    assets over two periods, and at most two states for three assets.
    """
    d = rng.choice((2, 3))
    horizon = rng.choice((1, 2))
    if d == 2 and horizon == 1:
        pi = random_bidask(rng, d, horizon, max_children=8, max_states=8)
    elif d == 2:
        pi = random_bidask(rng, d, horizon, max_children=2, max_states=4)
    else:
        pi = random_bidask(rng, d, horizon, max_children=2, max_states=2)
    return pi, rng.choice((Fraction(1, 10), Fraction(1, 4)))

"""Exact linear programming by the two-phase simplex method.

All arithmetic is rational (``gmpy2.mpq`` internally, ``Fraction`` at the
boundary).  Bland's rule is used for both entering and leaving variables, so
the method terminates on degenerate problems.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from gmpy2 import mpq

ZERO = mpq(0)


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible" or "unbounded"
    x: Optional[list[Fraction]] = None
    value: Optional[Fraction] = None
    # when infeasible: y with y.A_j <= 0 for every column and y.b > 0
    farkas: Optional[list[Fraction]] = None

    @property
    def feasible(self) -> bool:
        return self.status != "infeasible"


def _frac(v) -> Fraction:
    return Fraction(int(v.numerator), int(v.denominator))


def _mpq(v) -> mpq:
    if isinstance(v, Fraction):
        return mpq(v.numerator, v.denominator)
    return mpq(v)


class _Tableau:
    def __init__(self, rows: list[list[mpq]], rhs: list[mpq], n_cols: int):
        self.rows = [r + [b] for r, b in zip(rows, rhs)]
        self.n = n_cols  # number of columns excluding rhs
        self.basis: list[int] = []
        self.obj: Optional[list[mpq]] = None

    def pivot(self, r: int, e: int) -> None:
        rows = self.rows
        prow = rows[r]
        pv = prow[e]
        if pv != 1:
            inv = 1 / pv
            prow = [x * inv if x else x for x in prow]
            rows[r] = prow
        nz = [j for j, x in enumerate(prow) if x]
        for i, row in enumerate(rows):
            if i == r:
                continue
            f = row[e]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
        obj = self.obj
        if obj is not None:
            f = obj[e]
            if f:
                for j in nz:
                    obj[j] -= f * prow[j]
        self.basis[r] = e


def _simplex(tab: _Tableau, cost: list[mpq], allowed: int) -> str:
    """Maximise ``cost . x`` over the tableau in place (columns < ``allowed`` may enter)."""
    width = len(tab.rows[0]) if tab.rows else len(cost) + 1
    obj = list(cost) + [ZERO] * (width - len(cost))
    for i, b in enumerate(tab.basis):
        cb = cost[b]
        if cb:
            row = tab.rows[i]
            for j, a in enumerate(row):
                if a:
                    obj[j] -= cb * a
    tab.obj = obj
    try:
        while True:
            entering = next((j for j in range(allowed) if obj[j] > 0), -1)
            if entering < 0:
                return "optimal"
            best = None
            leave = -1
            basis = tab.basis
            for i, row in enumerate(tab.rows):
                a = row[entering]
                if a > 0:
                    ratio = row[-1] / a
                    if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                        best = ratio
                        leave = i
            if leave < 0:
                return "unbounded"
            tab.pivot(leave, entering)
    finally:
        tab.obj = None


def solve(
    a_eq: Sequence[Sequence],
    b_eq: Sequence,
    cost: Optional[Sequence] = None,
    a_ub: Optional[Sequence[Sequence]] = None,
    b_ub: Optional[Sequence] = None,
) -> LPResult:
    """Maximise ``cost . x`` subject to ``a_eq x = b_eq``, ``a_ub x <= b_ub``, ``x >= 0``.

    With ``cost`` omitted this is a pure feasibility problem.  For infeasible
    problems without inequality rows a Farkas vector is returned.
    """
    a_eq = [list(r) for r in a_eq]
    a_ub = [list(r) for r in (a_ub or [])]
    b_ub = list(b_ub or [])
    n = len(a_eq[0]) if a_eq else (len(a_ub[0]) if a_ub else len(cost or []))
    n_slack = len(a_ub)
    rows: list[list[mpq]] = []
    rhs: list[mpq] = []
    signs: list[int] = []
    for r, b in zip(a_eq, b_eq):
        rows.append([_mpq(v) for v in r] + [ZERO] * n_slack)
        rhs.append(_mpq(b))
    for k, (r, b) in enumerate(zip(a_ub, b_ub)):
        slack = [ZERO] * n_slack
        slack[k] = mpq(1)
        rows.append([_mpq(v) for v in r] + slack)
        rhs.append(_mpq(b))
    m = len(rows)
    n_real = n + n_slack
    for i in range(m):
        if rhs[i] < 0:
            rows[i] = [-v for v in rows[i]]
            rhs[i] = -rhs[i]
            signs.append(-1)
        else:
            signs.append(1)
    # artificial columns
    for i in range(m):
        art = [ZERO] * m
        art[i] = mpq(1)
        rows[i] = rows[i] + art
    tab = _Tableau(rows, rhs, n_real + m)
    tab.basis = [n_real + i for i in range(m)]
    phase1 = [ZERO] * n_real + [mpq(-1)] * m
    _simplex(tab, phase1, n_real + m)
    infeas = sum((tab.rows[i][-1] for i, b in enumerate(tab.basis) if b >= n_real), ZERO)
    if infeas > 0:
        farkas = None
        if not a_ub:
            y = []
            for i in range(m):
                yi = sum((phase1[b] * tab.rows[k][n_real + i] for k, b in enumerate(tab.basis)), ZERO)
                y.append(-yi * signs[i])
            farkas = [_frac(v) for v in y]
        return LPResult("infeasible", farkas=farkas)

    # drive artificials out of the basis; drop redundant rows
    k = 0
    while k < len(tab.rows):
        b = tab.basis[k]
        if b >= n_real:
            row = tab.rows[k]
            col = next((j for j in range(n_real) if row[j]), -1)
            if col >= 0:
                tab.pivot(k, col)
            else:
                del tab.rows[k]
                del tab.basis[k]
                continue
        k += 1
    for row in tab.rows:
        del row[n_real:n_real + m]
        # rhs is now at index n_real
    tab.n = n_real

    if cost is None:
        x = [ZERO] * n_real
        for i, b in enumerate(tab.basis):
            x[b] = tab.rows[i][-1]
        return LPResult("optimal", [_frac(v) for v in x[:n]], Fraction(0))

    c = [_mpq(v) for v in cost] + [ZERO] * n_slack
    status = _simplex(tab, c, n_real)
    if status == "unbounded":
        return LPResult("unbounded")
    x = [ZERO] * n_real
    for i, b in enumerate(tab.basis):
        x[b] = tab.rows[i][-1]
    value = sum((ci * xi for ci, xi in zip(c, x)), ZERO)
    return LPResult("optimal", [_frac(v) for v in x[:n]], _frac(value))


def in_cone(generators: Sequence[Sequence], point: Sequence) -> LPResult:
    """Is ``point`` a nonnegative combination of ``generators``?

    Returns the LP result; ``x`` holds the weights when feasible and ``farkas``
    a separating functional (``y.g <= 0`` for all generators, ``y.point > 0``)
    otherwise.
    """
    dim = len(point)
    if not generators:
        if all(v == 0 for v in point):
            return LPResult("optimal", [], Fraction(0))
        return LPResult("infeasible", farkas=[Fraction(v) for v in point])
    cols = list(generators)
    a_eq = [[g[i] for g in cols] for i in range(dim)]
    return solve(a_eq, point)

"""Scenario documents: loading, validation and task execution.

A scenario bundles a filtered space, a test set and/or a bid-ask process,
named assets and claims, and a list of tasks.  Every task produces one
report.  A task with an ``expect`` block is a verdict task: it passes when
every expected field matches the result exactly.  A few checks
(``polar_identity``, ``verify_witness``, ``market_verify``) are verdicts by
nature and pass when the check succeeds.  Everything else is informational.
"""

from __future__ import annotations

import copy
import json
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional

import jsonschema

from . import market, portfolio, risk, stability
from .cones import DEFAULT_BUDGET, PolyCone, equal, lines_and_rays
from .errors import BudgetError, InputError, RiskconeError, SchemaError
from .rational import fmt, q
from .space import FilteredSpace, TestSet

FORMAT = 1

_RATIONAL = {
    "oneOf": [
        {"type": "integer"},
        {"type": "string", "pattern": r"^\s*-?\d+(\s*/\s*-?\d+)?\s*$"},
    ]
}
_VECTOR = {"type": "array", "items": _RATIONAL, "minItems": 1}
_NAMES = {"type": "array", "items": {"type": "string"}, "minItems": 1}

OPS = (
    "rho",
    "rho_compose",
    "numeraire_check",
    "equiv_check",
    "acceptance_cone",
    "represent",
    "b_eta",
    "t_cones",
    "polar_identity",
    "stability",
    "falsify",
    "verify_witness",
    "stopping_pasting",
    "market_validate",
    "market_cpp",
    "market_augment",
    "market_lambda",
    "market_verify",
)

SCHEMA: dict = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "riskcone scenario",
    "type": "object",
    "required": ["format", "space", "tasks"],
    "additionalProperties": False,
    "properties": {
        "format": {"const": FORMAT},
        "id": {"type": "string"},
        "description": {"type": "string"},
        "space": {
            "type": "object",
            "required": ["partitions"],
            "additionalProperties": False,
            "properties": {
                "states": {"type": "integer", "minimum": 1},
                "partitions": {
                    "type": "array",
                    "minItems": 1,
                    "items": {
                        "type": "array",
                        "minItems": 1,
                        "items": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 1}},
                    },
                },
            },
        },
        "testset": {
            "type": "object",
            "required": ["vertices"],
            "additionalProperties": False,
            "properties": {
                "vertices": {"type": "array", "minItems": 1, "items": _VECTOR},
                "reference": {"type": "integer", "minimum": 0},
            },
        },
        "bidask": {
            "type": "object",
            "required": ["d", "pi"],
            "additionalProperties": False,
            "properties": {
                "d": {"type": "integer", "minimum": 1},
                "P": _VECTOR,
                "pi": {
                    "oneOf": [
                        {"$ref": "#/$defs/matrix_entry"},
                        {"type": "array", "minItems": 1, "items": {"$ref": "#/$defs/matrix_entry"}},
                    ]
                },
            },
        },
        "assets": {"type": "object", "additionalProperties": _VECTOR},
        "claims": {"type": "object", "additionalProperties": _VECTOR},
        "tasks": {"type": "array", "items": {"$ref": "#/$defs/task"}},
    },
    "$defs": {
        "matrix_entry": {
            "type": "object",
            "required": ["t", "atom", "matrix"],
            "additionalProperties": False,
            "properties": {
                "t": {"type": "integer", "minimum": 0},
                "atom": {"type": "integer", "minimum": 1},
                "matrix": {"type": "array", "minItems": 1, "items": _VECTOR},
            },
        },
        "task": {
            "type": "object",
            "required": ["id", "op"],
            "properties": {
                "id": {"type": "string", "minLength": 1},
                "op": {"enum": list(OPS)},
                "claim": {"type": "string"},
                "asset": {"type": "string"},
                "numeraire": {"type": "string"},
                "assets": {"oneOf": [_NAMES, {"const": "finite_strong"}]},
                "t": {"type": "integer", "minimum": 0},
                "outer": {"type": "integer", "minimum": 0},
                "inner": {"type": "integer", "minimum": 0},
                "eta": {"enum": [0, 1]},
                "budget": {"type": "integer", "minimum": 1},
                "q": {"type": "integer", "minimum": 0},
                "qprime": {"type": "integer", "minimum": 0},
                "tau": {"type": "array", "items": {"type": "integer", "minimum": 0}},
                "eps": _RATIONAL,
                "zbar": {"type": "array", "items": _VECTOR},
                "witness": {"type": "object"},
                "expect": {"type": "object"},
            },
            "additionalProperties": False,
        },
    },
}


def _pointer(parts) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def validate_document(doc: Any) -> None:
    """Raise SchemaError (with a JSON pointer) when ``doc`` violates the schema."""
    validator = jsonschema.Draft202012Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: (len(e.absolute_path), list(map(str, e.absolute_path))))
    if errors:
        err = errors[0]
        raise SchemaError(_pointer(err.absolute_path), err.message)


# ---------------------------------------------------------------------------
# loaded scenarios


@dataclass
class Scenario:
    doc: dict
    space: FilteredSpace
    rm: Optional[risk.RiskMeasure]
    bidask: Optional[market.BidAskProcess]
    assets: dict[str, tuple[Fraction, ...]]
    claims: dict[str, tuple[Fraction, ...]]
    tasks: list[dict] = field(default_factory=list)

    @property
    def id(self) -> str:
        return self.doc.get("id", "scenario")


def _at(pointer: str, fn: Callable[[], Any]):
    try:
        return fn()
    except SchemaError:
        raise
    except InputError as exc:
        raise SchemaError(pointer, str(exc)) from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(pointer, f"invalid value: {exc}") from exc


def _vector(pointer: str, values, n: int) -> tuple[Fraction, ...]:
    vec = _at(pointer, lambda: tuple(q(x) for x in values))
    if len(vec) != n:
        raise SchemaError(pointer, f"expected {n} entries, got {len(vec)}")
    return vec


def load(doc: Any) -> Scenario:
    validate_document(doc)
    space = _at("/space", lambda: FilteredSpace.from_json(doc["space"]))
    n = space.n_states
    rm = None
    if "testset" in doc:
        ts = doc["testset"]
        for i, v in enumerate(ts["vertices"]):
            vec = _vector(f"/testset/vertices/{i}", v, n)
            if any(x < 0 for x in vec) or sum(vec) != 1:
                raise SchemaError(f"/testset/vertices/{i}", f"not a probability vector (masses sum to {fmt(sum(vec))})")
        rm = _at("/testset", lambda: risk.RiskMeasure(TestSet.from_json(space, ts)))
    bidask = None
    if "bidask" in doc:
        bidask = _at("/bidask", lambda: market.BidAskProcess.from_json(space, doc["bidask"]))
    assets = {name: _vector(f"/assets/{name}", v, n) for name, v in doc.get("assets", {}).items()}
    claims = {name: _vector(f"/claims/{name}", v, n) for name, v in doc.get("claims", {}).items()}
    scen = Scenario(doc, space, rm, bidask, assets, claims, list(doc["tasks"]))
    seen = set()
    for i, task in enumerate(scen.tasks):
        if task["id"] in seen:
            raise SchemaError(f"/tasks/{i}/id", f"duplicate task id {task['id']!r}")
        seen.add(task["id"])
        _check_task(scen, task, f"/tasks/{i}")
    return scen


_NEEDS_TESTSET = {
    "rho", "rho_compose", "numeraire_check", "equiv_check", "acceptance_cone", "represent", "b_eta",
    "t_cones", "polar_identity", "stability", "falsify", "verify_witness", "stopping_pasting",
}
_NEEDS_BIDASK = {"market_validate", "market_cpp", "market_augment", "market_lambda", "market_verify"}
_NEEDS_EPS = {"market_augment", "market_lambda", "market_verify"}


def _check_task(scen: Scenario, task: dict, ptr: str) -> None:
    op = task["op"]
    if op in _NEEDS_TESTSET and scen.rm is None:
        raise SchemaError(ptr + "/op", f"{op} needs a testset")
    if op in _NEEDS_BIDASK and scen.bidask is None:
        raise SchemaError(ptr + "/op", f"{op} needs a bidask process")
    if op in _NEEDS_EPS and "eps" not in task:
        raise SchemaError(ptr, f"{op} needs eps")
    if op in ("rho", "rho_compose") and "claim" not in task:
        raise SchemaError(ptr, f"{op} needs a claim")
    if "claim" in task and task["claim"] not in scen.claims:
        raise SchemaError(ptr + "/claim", f"unknown claim {task['claim']!r}")
    for key in ("asset", "numeraire"):
        if key in task and task[key] not in scen.assets:
            raise SchemaError(f"{ptr}/{key}", f"unknown asset {task[key]!r}")
    names = task.get("assets")
    if isinstance(names, list):
        for j, name in enumerate(names):
            if name not in scen.assets:
                raise SchemaError(f"{ptr}/assets/{j}", f"unknown asset {name!r}")
    if op in ("represent", "b_eta", "stability", "falsify") and "eta" not in task:
        raise SchemaError(ptr, f"{op} needs eta")
    if op == "equiv_check" and (not isinstance(names, list) or len(names) != 2):
        raise SchemaError(ptr + "/assets", "equiv_check needs exactly two assets")
    if op == "numeraire_check" and "asset" not in task:
        raise SchemaError(ptr, "numeraire_check needs an asset")
    if op == "verify_witness" and "witness" not in task:
        raise SchemaError(ptr, "verify_witness needs a witness")
    if op == "stopping_pasting":
        for key in ("q", "qprime", "tau"):
            if key not in task:
                raise SchemaError(ptr, f"stopping_pasting needs {key}")
        for key in ("q", "qprime"):
            if task[key] >= len(scen.rm.vertices):
                raise SchemaError(f"{ptr}/{key}", "vertex index out of range")
    if op == "market_lambda" and "zbar" not in task:
        raise SchemaError(ptr, "market_lambda needs zbar")
    for key in ("t", "outer", "inner"):
        if key in task and task[key] > scen.space.horizon:
            raise SchemaError(f"{ptr}/{key}", f"level outside 0..{scen.space.horizon}")


# ---------------------------------------------------------------------------
# execution


def _jsonable(value):
    if isinstance(value, Fraction):
        return fmt(value)
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    return value


def _portfolio(scen: Scenario, task: dict) -> portfolio.PortfolioSpec:
    names = task.get("assets")
    if names == "finite_strong":
        return stability.finite_strong_assets(scen.space)
    if names is None:
        names = list(scen.assets)
    return portfolio.PortfolioSpec([scen.assets[n] for n in names])


def _cone_json(c: PolyCone) -> dict:
    doc = c.to_json()
    doc.pop("dim", None)
    doc.pop("shape", None)
    return doc


def _extreme_generators(c: PolyCone, budget: int) -> list[list[int]]:
    lines, rays = lines_and_rays(c, budget)
    gens = set(rays) | set(lines) | {tuple(-x for x in ell) for ell in lines}
    return [list(g) for g in sorted(gens)]


def _per_atom(space: FilteredSpace, t: int, vec) -> dict:
    atoms = space.atoms(t)
    return {"atoms": [[w + 1 for w in a] for a in atoms], "values": [vec.values[a[0]] for a in atoms]}


def _op_rho(scen, task, budget):
    t = task.get("t", 0)
    x = scen.claims[task["claim"]]
    if "numeraire" in task:
        vec = risk.rho_t_v(scen.rm, x, scen.assets[task["numeraire"]], t)
    else:
        vec = risk.rho_t(scen.rm, x, t)
    return _per_atom(scen.space, t, vec)


def _op_rho_compose(scen, task, budget):
    outer, inner = task.get("outer", 0), task.get("inner", 1)
    x = scen.claims[task["claim"]]
    nested = risk.rho_t(scen.rm, risk.rho_t(scen.rm, x, inner), outer)
    direct = risk.rho_t(scen.rm, x, outer)
    out = _per_atom(scen.space, outer, nested)
    out["direct"] = _per_atom(scen.space, outer, direct)["values"]
    out["equal"] = out["values"] == out["direct"]
    return out


def _op_numeraire(scen, task, budget):
    v = scen.assets[task["asset"]]
    ok = risk.is_numeraire(scen.rm, v)
    lam = [_per_atom(scen.space, t, risk.lambda_t(scen.rm, v, t))["values"] for t in range(scen.space.horizon + 1)]
    return {"numeraire": ok, "lambda": lam}


def _op_equiv(scen, task, budget):
    v, w = (scen.assets[n] for n in task["assets"])
    a = risk.rho_t_v(scen.rm, w, v, 0)
    b = risk.rho_t_v(scen.rm, v, w, 0)
    atoms = scen.space.atoms(0)
    products = [a.values[at[0]] * b.values[at[0]] for at in atoms]
    return {"equivalent": risk.check_equivalent(scen.rm, v, w), "products": products}


def _op_acceptance(scen, task, budget):
    c = risk.acceptance_cone(scen.rm, task.get("t", 0))
    return {"h_rep": _cone_json(c)["h_rep"], "rows": len(c.h_rep)}


def _op_represent(scen, task, budget):
    rep = portfolio.representation_report(scen.rm, _portfolio(scen, task), task["eta"], budget)
    out: dict = {"represented": rep.represented, "eta": rep.eta}
    if rep.missing_generator is not None:
        out["missing_generator"] = list(rep.missing_generator)
        out["separator"] = rep.separator
    return out


def _op_b_eta(scen, task, budget):
    V = _portfolio(scen, task)
    target = portfolio.portfolio_cone(scen.rm, V)
    cone = portfolio.b_eta(target, task["eta"], scen.space, budget)
    return {"cone": _cone_json(cone), "equals_portfolio_cone": equal(cone, target, budget)}


def _op_t_cones(scen, task, budget):
    prof = portfolio.t_cone_profile(scen.rm, _portfolio(scen, task), budget)
    levels = [[_extreme_generators(c, budget) for c in level] for level in prof.cones]
    out: dict = {"levels": levels, "identity_holds": prof.identity_holds}
    if prof.certificate is not None:
        out["certificate"] = list(prof.certificate)
    return out


def _op_polar(scen, task, budget):
    return {"holds": portfolio.polar_portfolio_identity(scen.rm, _portfolio(scen, task), budget)}


def _op_stability(scen, task, budget):
    U = _portfolio(scen, task)
    verdict = stability.is_m_stable(scen.rm, U, task["eta"], budget, task.get("budget", stability.DEFAULT_SEARCH_BUDGET))
    out: dict = {"stable": verdict.stable, "eta": verdict.eta, "method": verdict.method}
    if verdict.witness is not None:
        out["witness"] = verdict.witness.to_json()
        out["witness_t"] = verdict.witness.t
    if verdict.diagnostic:
        out["diagnostic"] = verdict.diagnostic
    return out


def _op_falsify(scen, task, budget):
    w = stability.falsify_m_stability(
        scen.rm, _portfolio(scen, task), task["eta"], task.get("budget", stability.DEFAULT_SEARCH_BUDGET)
    )
    return {"found": w is not None, "witness": None if w is None else w.to_json()}


def _op_verify_witness(scen, task, budget):
    w = _at("/witness", lambda: stability.PastingWitness.from_json(task["witness"]))
    problems = stability.witness_problems(scen.rm, _portfolio(scen, task), w)
    return {"valid": not problems, "problems": problems}


def _op_stopping(scen, task, budget):
    ok = stability.check_stopping_time_pasting(
        scen.rm, _portfolio(scen, task), task["q"], task["qprime"], task["tau"]
    )
    return {"member": ok}


def _op_market_validate(scen, task, budget):
    pi = scen.bidask
    return {"valid": True, "d": pi.d, "arbitrage_free": market.is_arbitrage_free(pi)}


def _op_market_cpp(scen, task, budget):
    pi = scen.bidask
    masses = market.strictly_consistent_price(pi)
    out: dict = {"arbitrage_free": masses is not None}
    if masses is not None:
        proc = market.PriceProcess.from_masses(pi, masses)
        out["price_process"] = proc.to_json()
        out["strictly_positive"] = proc.is_strictly_positive()
        out["consistent"] = proc.is_consistent(pi)
        out["martingale"] = proc.is_martingale(pi.prob)
    return out


def _op_market_augment(scen, task, budget):
    aug = market.augment(scen.bidask, task["eps"], budget)
    return {"epsilon": aug.epsilon, "labels": ["".join(map(str, lab)) for lab in aug.omega_tilde], "Y": [list(y) for y in aug.Y]}


def _op_market_lambda(scen, task, budget):
    lam = market.lambda_decomposition(task["zbar"], scen.bidask, task["eps"])
    return {"lambda": lam}


def _op_market_verify(scen, task, budget):
    rep = market.verify_acceptance_equality(scen.bidask, task["eps"], budget)
    return rep.to_json()


_HANDLERS: dict[str, Callable] = {
    "rho": _op_rho,
    "rho_compose": _op_rho_compose,
    "numeraire_check": _op_numeraire,
    "equiv_check": _op_equiv,
    "acceptance_cone": _op_acceptance,
    "represent": _op_represent,
    "b_eta": _op_b_eta,
    "t_cones": _op_t_cones,
    "polar_identity": _op_polar,
    "stability": _op_stability,
    "falsify": _op_falsify,
    "verify_witness": _op_verify_witness,
    "stopping_pasting": _op_stopping,
    "market_validate": _op_market_validate,
    "market_cpp": _op_market_cpp,
    "market_augment": _op_market_augment,
    "market_lambda": _op_market_lambda,
    "market_verify": _op_market_verify,
}

# checks that are verdicts even without an expect block
_INTRINSIC = {"polar_identity": "holds", "verify_witness": "valid", "market_verify": "pass"}


def _first_mismatch(expected, actual, path: str = "") -> Optional[dict]:
    if isinstance(expected, dict):
        if not isinstance(actual, dict):
            return {"field": path or "/", "expected": expected, "actual": actual}
        for key, val in expected.items():
            if key not in actual:
                return {"field": f"{path}/{key}", "expected": val, "actual": None}
            hit = _first_mismatch(val, actual[key], f"{path}/{key}")
            if hit:
                return hit
        return None
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            return {"field": path, "expected": expected, "actual": actual}
        for i, (e, a) in enumerate(zip(expected, actual)):
            hit = _first_mismatch(e, a, f"{path}/{i}")
            if hit:
                return hit
        return None
    if isinstance(expected, bool) or expected is None or isinstance(actual, bool):
        return None if expected == actual else {"field": path, "expected": expected, "actual": actual}
    try:
        same = q(expected) == q(actual)
    except InputError:
        same = expected == actual
    return None if same else {"field": path, "expected": expected, "actual": actual}


def replay_document(scen: Scenario, task: dict) -> dict:
    """A standalone scenario that re-runs exactly this task."""
    doc = {k: copy.deepcopy(v) for k, v in scen.doc.items() if k != "tasks"}
    doc["tasks"] = [copy.deepcopy(task)]
    return doc


def run_task(scen: Scenario, task: dict, budget: int = DEFAULT_BUDGET, replay: bool = True) -> dict:
    started = time.perf_counter()
    report: dict = {"format": FORMAT, "scenario": scen.id, "task": task["id"], "op": task["op"]}
    try:
        result = _jsonable(_HANDLERS[task["op"]](scen, task, task.get("budget", budget)))
    except BudgetError as exc:
        report["verdict"] = "budget"
        report["error"] = f"task {task['id']}: {exc}"
    except RiskconeError as exc:
        report["verdict"] = "error"
        report["error"] = f"task {task['id']}: {type(exc).__name__}: {exc}"
    else:
        report["result"] = result
        if "expect" in task:
            mismatch = _first_mismatch(_jsonable(task["expect"]), result)
            report["verdict"] = "fail" if mismatch else "pass"
            if mismatch:
                report["mismatch"] = mismatch
        elif task["op"] in _INTRINSIC:
            report["verdict"] = "pass" if result.get(_INTRINSIC[task["op"]]) else "fail"
        else:
            report["verdict"] = "info"
    if replay:
        report["replay"] = replay_document(scen, task)
    report["elapsed_ms"] = round((time.perf_counter() - started) * 1000)
    return report


def matches_filter(task_id: str, pattern: Optional[str]) -> bool:
    """``5.4`` (or ``ex5_4``) selects task ``5.4`` and every ``5.4/...`` task."""
    if not pattern:
        return True
    if pattern.startswith("ex") and pattern[2:3].isdigit():
        pattern = pattern[2:].replace("_", ".")
    return task_id == pattern or task_id.startswith(pattern + "/") or task_id.startswith(pattern + ".")


def run_scenario(scen: Scenario, budget: int = DEFAULT_BUDGET, task_filter: Optional[str] = None, replay: bool = True):
    for task in scen.tasks:
        if matches_filter(task["id"], task_filter):
            yield run_task(scen, task, budget, replay)


def load_file(path: str) -> Scenario:
    from .corpus import resolve

    try:
        doc = resolve(path)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"not valid JSON: {exc}") from exc
    return load(doc)


def exit_code(reports: list[dict]) -> int:
    """0 all pass, 1 some verdict failed, 2 a task rejected its input, 3 out of budget."""
    verdicts = {r["verdict"] for r in reports}
    if "error" in verdicts:
        return 2
    if "fail" in verdicts:
        return 1
    if "budget" in verdicts:
        return 3
    return 0


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, separators=(",", ":"))

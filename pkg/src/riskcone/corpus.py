"""The bundled example scenarios and the corpus runner."""

from __future__ import annotations

import copy
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Iterator, Optional

from .cones import DEFAULT_BUDGET
from .rational import fmt
from .scenario import load, matches_filter, run_scenario


def bundled_names() -> list[str]:
    root = resources.files("riskcone") / "data"
    return sorted(p.name[:-5] for p in root.iterdir() if p.name.endswith(".json"))


def bundled_document(name: str) -> dict:
    name = Path(name).name
    if name.endswith(".json"):
        name = name[:-5]
    path = resources.files("riskcone") / "data" / f"{name}.json"
    return json.loads(path.read_text(encoding="utf-8"))


def resolve(path: str) -> dict:
    """Read a scenario file, falling back to the bundled copy of the same name."""
    p = Path(path)
    if not p.exists() and p.suffix == ".json" and p.stem in bundled_names():
        return bundled_document(p.stem)
    with open(p, encoding="utf-8") as fh:
        return json.load(fh)


def _nudge(value, kinds):
    """Alter the first leaf of one of ``kinds``; returns (new value, changed?)."""
    if isinstance(value, bool):
        return (not value, True) if bool in kinds else (value, False)
    if isinstance(value, int):
        return (value + 1, True) if int in kinds else (value, False)
    if isinstance(value, str):
        if str not in kinds:
            return value, False
        try:
            return fmt(Fraction(value) + Fraction(1, 1000)), True
        except ValueError:
            return value, False
    if isinstance(value, list):
        for i, item in enumerate(value):
            new, done = _nudge(item, kinds)
            if done:
                return value[:i] + [new] + value[i + 1:], True
        return value, False
    if isinstance(value, dict):
        for key in value:
            new, done = _nudge(value[key], kinds)
            if done:
                out = dict(value)
                out[key] = new
                return out, True
    return value, False


def perturb(doc: dict) -> dict:
    """Testing mode: alter one value in every expectation so that each verdict task fails."""
    doc = copy.deepcopy(doc)
    for task in doc.get("tasks", []):
        if "expect" in task:
            # rationals first, then verdict flags, then integers
            for kind in (str, bool, int):
                task["expect"], done = _nudge(task["expect"], (kind,))
                if done:
                    break
    return doc


def run_corpus(
    task_filter: Optional[str] = None, budget: int = DEFAULT_BUDGET, perturbed: bool = False, replay: bool = True
) -> Iterator[dict]:
    for name in bundled_names():
        doc = bundled_document(name)
        if perturbed:
            doc = perturb(doc)
        if task_filter and not any(matches_filter(t["id"], task_filter) for t in doc["tasks"]):
            continue
        yield from run_scenario(load(doc), budget, task_filter, replay)

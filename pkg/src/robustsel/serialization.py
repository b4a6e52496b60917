"""Instance and policy documents: JSON load, dump, and validation.

The instance schema:

    {
      "items":      [{"id": 0, "label": "a"}, ...],        (optional)
      "priors":     [[0.5, 0.5], [1.0], ...],
      "objectives": [{"f": {...reward...},
                      "g": {...reward...},                  (optional, default f)
                      "epsilon": 1.0}, ...],                (optional, default 1)
      "constraint": {"type": "uniform", "k": 2}
                  | {"type": "partition", "parts": [[0,1],[2]], "capacities": [1,1]}
                  | {"type": "explicit", "sets": [[], [0], [1]]}
    }

Reward documents carry a "kind" of modular | weighted-coverage |
saturating-sum | perturbed plus kind-specific parameters.  Validation
failures raise InstanceFormatError naming the offending field.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InstanceFormatError
from .model import FeasibleFamily, Instance, Item
from .policies import MixedSetPolicy
from .rewards import ObjectiveFamily, SurrogatePair, reward_from_dict


def _require(doc, key, field, types=None):
    if key not in doc:
        raise InstanceFormatError(field, "missing")
    value = doc[key]
    if types is not None and not isinstance(value, types):
        raise InstanceFormatError(field, f"expected {types}, got {type(value).__name__}")
    return value


def instance_from_dict(doc: dict) -> Instance:
    if not isinstance(doc, dict):
        raise InstanceFormatError("(root)", "instance document must be a JSON object")
    priors = _require(doc, "priors", "priors", list)
    n = len(priors)

    items = None
    if "items" in doc:
        raw = _require(doc, "items", "items", list)
        items = []
        for i, entry in enumerate(raw):
            if not isinstance(entry, dict) or "id" not in entry:
                raise InstanceFormatError(f"items[{i}]", "expected an object with an 'id'")
            items.append(Item(int(entry["id"]), entry.get("label")))

    raw_objs = _require(doc, "objectives", "objectives", list)
    if not raw_objs:
        raise InstanceFormatError("objectives", "must be nonempty")
    members = []
    for i, entry in enumerate(raw_objs):
        if not isinstance(entry, dict):
            raise InstanceFormatError(f"objectives[{i}]", "expected an object")
        try:
            f = reward_from_dict(_require(entry, "f", f"objectives[{i}].f", dict))
        except (KeyError, ValueError, TypeError) as exc:
            raise InstanceFormatError(f"objectives[{i}].f", str(exc)) from exc
        eps = float(entry.get("epsilon", 1.0))
        if "g" in entry:
            try:
                g = reward_from_dict(entry["g"])
            except (KeyError, ValueError, TypeError) as exc:
                raise InstanceFormatError(f"objectives[{i}].g", str(exc)) from exc
        else:
            g = f
            if "epsilon" not in entry:
                eps = 1.0
        try:
            members.append(SurrogatePair(f=f, g=g, epsilon=eps))
        except ValueError as exc:
            raise InstanceFormatError(f"objectives[{i}].epsilon", str(exc)) from exc

    raw_con = _require(doc, "constraint", "constraint", dict)
    con_doc = dict(raw_con)
    con_doc.setdefault("n", n)
    try:
        constraint = FeasibleFamily.from_dict(con_doc)
    except (KeyError, ValueError, TypeError) as exc:
        raise InstanceFormatError("constraint", str(exc)) from exc

    return Instance(priors=priors, objectives=ObjectiveFamily(members),
                    constraint=constraint, items=items)


def instance_to_dict(instance: Instance) -> dict:
    doc = {
        "items": [
            {"id": it.id, **({"label": it.label} if it.label is not None else {})}
            for it in instance.items
        ],
        "priors": [list(p.probs) for p in instance.priors],
        "objectives": [],
        "constraint": instance.constraint.to_dict(),
    }
    doc["constraint"].pop("n", None)
    for pair in instance.objectives:
        entry = {"f": pair.f.to_dict(), "epsilon": pair.epsilon}
        if pair.g is not pair.f:
            entry["g"] = pair.g.to_dict()
        doc["objectives"].append(entry)
    return doc


def load_instance(path) -> Instance:
    text = Path(path).read_text()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("(root)", f"not valid JSON: {exc}") from exc
    return instance_from_dict(doc)


def save_instance(instance: Instance, path) -> None:
    Path(path).write_text(dumps_canonical(instance_to_dict(instance)))


def dumps_canonical(doc) -> str:
    """Stable serialization: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def policy_from_dict(doc: dict) -> MixedSetPolicy:
    support_doc = _require(doc, "support", "support", list)
    support = []
    for i, entry in enumerate(support_doc):
        if not isinstance(entry, dict):
            raise InstanceFormatError(f"support[{i}]", "expected an object")
        items = _require(entry, "items", f"support[{i}].items", list)
        prob = float(_require(entry, "probability", f"support[{i}].probability", (int, float)))
        support.append((frozenset(int(e) for e in items), prob))
    regime = doc.get("regime", "distribution")
    try:
        return MixedSetPolicy(tuple(support), regime=regime)
    except ValueError as exc:
        raise InstanceFormatError("support", str(exc)) from exc


def policy_to_dict(policy: MixedSetPolicy) -> dict:
    return {
        "regime": policy.regime,
        "support": [
            {"items": sorted(S), "probability": p} for S, p in policy.support
        ],
    }


def load_policy(path) -> MixedSetPolicy:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InstanceFormatError("(root)", f"not valid JSON: {exc}") from exc
    return policy_from_dict(doc)

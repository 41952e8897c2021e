"""On-disk formats: instance JSON, allocation JSON, and DOT.

Canonical instance format::

    {"items": ["name0", ...], "arcs": [[tail, head], ...], "agents": k}

``agents`` is optional (solving may supply k separately).  Allocation
results serialize as::

    {"agents": k, "bundles": [[item, ...], ...], "profile": [...],
     "total": T, "lower_bound": B, "good": bool, "solver": name}

``lower_bound`` and ``good`` are null when certification was skipped
(graphs too large for the quadratic reachability index).  DOT export
colors items by agent; :func:`from_dot` parses exactly the subset of DOT
that :func:`to_dot` emits, so both formats round-trip.
"""

from __future__ import annotations

import json
import re
from typing import Any

from .certificates import Certificate
from .errors import PrefAllocError
from .graph import Allocation, PreferenceGraph, build_graph

INSTANCE_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "items": {"type": "array", "items": {"type": "string"}},
        "arcs": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "integer", "minimum": 0},
                "minItems": 2,
                "maxItems": 2,
            },
        },
        "agents": {"type": ["integer", "null"], "minimum": 1},
    },
    "required": ["items", "arcs"],
    "additionalProperties": False,
}

ALLOCATION_SCHEMA: dict[str, Any] = {
    "type": "object",
    "properties": {
        "agents": {"type": "integer", "minimum": 1},
        "bundles": {
            "type": "array",
            "items": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        },
        "profile": {"type": ["array", "null"], "items": {"type": "integer"}},
        "total": {"type": ["integer", "null"]},
        "lower_bound": {"type": ["integer", "null"]},
        "good": {"type": ["boolean", "null"]},
        "solver": {"type": ["string", "null"]},
        "certificate": {"type": "object"},
    },
    "required": ["agents", "bundles"],
    "additionalProperties": False,
}


def instance_to_dict(graph: PreferenceGraph, agents: int | None = None) -> dict:
    return {
        "items": [graph.item_name(v) for v in range(graph.item_count)],
        "arcs": [[t, h] for t, h in graph.arcs],
        "agents": agents,
    }


def instance_from_dict(data: dict) -> tuple[PreferenceGraph, int | None]:
    try:
        items = data["items"]
        arcs = [(int(t), int(h)) for t, h in data["arcs"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise PrefAllocError(f"malformed instance: {exc}") from exc
    agents = data.get("agents")
    if agents is not None:
        agents = int(agents)
        if agents < 1:
            raise PrefAllocError("agents must be >= 1")
    return build_graph(len(items), arcs, [str(s) for s in items]), agents


def load_instance(path) -> tuple[PreferenceGraph, int | None]:
    with open(path, "r", encoding="utf-8") as fh:
        return instance_from_dict(json.load(fh))


def save_instance(path, graph: PreferenceGraph, agents: int | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(instance_to_dict(graph, agents), fh, indent=2, sort_keys=True)
        fh.write("\n")


def allocation_result_to_dict(
    allocation: Allocation,
    solver: str | None = None,
    certificate: Certificate | None = None,
    include_certificate: bool = False,
) -> dict:
    out: dict[str, Any] = {
        "agents": allocation.agent_count,
        "bundles": [sorted(b) for b in allocation.bundles],
        "profile": list(certificate.profile.per_agent) if certificate else None,
        "total": certificate.total if certificate else None,
        "lower_bound": certificate.lower_bound if certificate else None,
        "good": certificate.goodness.is_good if certificate else None,
        "solver": solver,
    }
    if include_certificate and certificate is not None:
        out["certificate"] = certificate.to_json_dict()
    return out


def allocation_from_dict(data: dict) -> Allocation:
    try:
        return Allocation.from_bundles(
            int(data["agents"]), [[int(v) for v in b] for b in data["bundles"]]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise PrefAllocError(f"malformed allocation: {exc}") from exc


def load_allocation(path) -> Allocation:
    with open(path, "r", encoding="utf-8") as fh:
        return allocation_from_dict(json.load(fh))


_PALETTE = [
    "lightblue", "lightsalmon", "palegreen", "gold", "plum",
    "lightpink", "khaki", "aquamarine", "coral", "lightgray",
]


def to_dot(graph: PreferenceGraph, allocation: Allocation | None = None) -> str:
    """DOT rendering; with an allocation, items are filled by agent color
    and annotated ``name (agent i)``."""
    labels = allocation.to_labeling(graph.item_count) if allocation else None
    lines = ["digraph preference {"]
    for v in range(graph.item_count):
        name = graph.item_name(v).replace('"', r"\"")
        if labels is not None and labels[v] is not None:
            agent = labels[v]
            color = _PALETTE[agent % len(_PALETTE)]
            lines.append(
                f'  {v} [label="{name} (agent {agent})" style=filled fillcolor={color}];'
            )
        else:
            lines.append(f'  {v} [label="{name}"];')
    for t, h in graph.arcs:
        lines.append(f"  {t} -> {h};")
    lines.append("}")
    return "\n".join(lines) + "\n"


_DOT_NODE = re.compile(r'^\s*(\d+)\s*\[label="((?:[^"\\]|\\.)*)"')
_DOT_ARC = re.compile(r"^\s*(\d+)\s*->\s*(\d+)\s*;")


def from_dot(text: str) -> PreferenceGraph:
    """Parse a graph written by :func:`to_dot` (allocation notes dropped)."""
    names: dict[int, str] = {}
    arcs: list[tuple[int, int]] = []
    for line in text.splitlines():
        m = _DOT_NODE.match(line)
        if m:
            label = m.group(2).replace(r"\"", '"')
            label = re.sub(r" \(agent \d+\)$", "", label)
            names[int(m.group(1))] = label
            continue
        m = _DOT_ARC.match(line)
        if m:
            arcs.append((int(m.group(1)), int(m.group(2))))
    if not names:
        raise PrefAllocError("no nodes found in DOT input")
    count = max(names) + 1
    if sorted(names) != list(range(count)):
        raise PrefAllocError("DOT input does not enumerate items densely")
    return build_graph(count, arcs, [names[v] for v in range(count)])

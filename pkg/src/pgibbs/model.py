"""Layered noisy-OR belief networks: structure, file format, validation.

A network is a DAG of binary variables arranged in layers, every edge going
from one layer to the next. Each node carries a leak probability (the chance
it turns on with no active parent; for a parentless node this is its prior),
and each edge carries a weight: the probability the parent, when on, turns
the child on. The conditional probability of a node being on is

    P(on | parents) = 1 - (1 - leak) * prod over on-parents of (1 - weight)

Evidence clamps a subset of nodes to observed 0/1 values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

from .errors import NetworkFormatError


@dataclass(frozen=True)
class NodeSpec:
    """A single network variable: unique name plus leak probability."""

    name: str
    leak: float


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of :func:`validate`: ok iff no issue has severity ``error``."""

    issues: tuple[tuple[str, str], ...]  # (severity, message)

    @property
    def ok(self) -> bool:
        return not any(sev == "error" for sev, _ in self.issues)

    @property
    def errors(self) -> list[str]:
        return [msg for sev, msg in self.issues if sev == "error"]

    @property
    def warnings(self) -> list[str]:
        return [msg for sev, msg in self.issues if sev == "warning"]


class Network:
    """Immutable layered noisy-OR network.

    Node index is position in the canonical order: layer order, then
    declaration order within a layer. Construction checks only structural
    integrity (valid indices, unique names, 0/1 evidence); semantic checks
    such as layering and probability ranges belong to :func:`validate`.

    Instances are immutable after construction and safe to share across
    threads or processes.
    """

    def __init__(
        self,
        nodes: Iterable[NodeSpec],
        layers: Iterable[Iterable[int]],
        edges: Iterable[tuple[int, int, float]],
        evidence: Mapping[int, int],
    ):
        self.nodes = tuple(nodes)
        self.layers = tuple(tuple(layer) for layer in layers)
        self.edges = tuple((int(p), int(c), float(w)) for p, c, w in edges)
        self.evidence = MappingProxyType({int(i): int(v) for i, v in evidence.items()})

        n = len(self.nodes)
        names = [spec.name for spec in self.nodes]
        if len(set(names)) != n:
            raise ValueError("node names must be unique")
        placed = [i for layer in self.layers for i in layer]
        if sorted(placed) != list(range(n)):
            raise ValueError("layers must partition the node indices")
        for p, c, _ in self.edges:
            if not (0 <= p < n and 0 <= c < n):
                raise ValueError(f"edge ({p}, {c}) references a node index out of range")
        for i, v in self.evidence.items():
            if not 0 <= i < n:
                raise ValueError(f"evidence index {i} out of range")
            if v not in (0, 1):
                raise ValueError(f"evidence value for node {i} must be 0 or 1, got {v}")

        self.name_to_index = {spec.name: i for i, spec in enumerate(self.nodes)}
        layer_of = [0] * n
        for layer_idx, layer in enumerate(self.layers):
            for i in layer:
                layer_of[i] = layer_idx
        self.layer_of = tuple(layer_of)

        parents: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        children: list[list[tuple[int, float]]] = [[] for _ in range(n)]
        for p, c, w in self.edges:
            parents[c].append((p, w))
            children[p].append((c, w))
        self.parents = tuple(tuple(ps) for ps in parents)
        self.children = tuple(tuple(cs) for cs in children)

        self.unobserved = tuple(i for i in range(n) if i not in self.evidence)

        # Per node k: (child, weight of k->child, other parents of that child).
        # This is the full Markov blanket data needed by Gibbs conditionals.
        detail = []
        for k in range(n):
            per_child = []
            for c, w in self.children[k]:
                others = tuple((p, pw) for p, pw in self.parents[c] if p != k)
                per_child.append((c, w, others))
            detail.append(tuple(per_child))
        self._child_detail = tuple(detail)

        self._leak_comp = tuple(1.0 - spec.leak for spec in self.nodes)

        # Nodes whose values the conditional of k depends on: parents,
        # children, and co-parents. Order is deterministic for cache keys.
        relevant = []
        conflict = []
        for k in range(n):
            par = {p for p, _ in self.parents[k]}
            chi = {c for c, _ in self.children[k]}
            cop = {
                p for _, _, others in self._child_detail[k] for p, _ in others
            }
            seen = sorted(par | chi | cop)
            relevant.append(tuple(seen))
            # The extremal-completion rules assign parents/children and
            # co-parents opposite values; overlap means the rules conflict,
            # which strict layering rules out.
            conflict.append(bool((par | chi) & cop))
        self._relevant = tuple(relevant)
        self._completion_conflict = tuple(conflict)

    @property
    def n(self) -> int:
        return len(self.nodes)

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return (
            self.nodes == other.nodes
            and self.layers == other.layers
            and self.edges == other.edges
            and dict(self.evidence) == dict(other.evidence)
        )

    __hash__ = None

    def __repr__(self) -> str:
        return (
            f"Network({self.n} nodes, {len(self.layers)} layers, "
            f"{len(self.edges)} edges, {len(self.evidence)} observed)"
        )


def _require(cond: bool, message: str):
    if not cond:
        raise NetworkFormatError(message)


def parse_network(text: str) -> Network:
    """Parse the JSON network document format.

    Expected shape::

        { "layers": [["D1","D2"],["S1"]],
          "nodes":  {"D1": {"leak": 0.1}, "D2": {"leak": 0.1}, "S1": {"leak": 0.0}},
          "edges":  [["D1","S1",1.0],["D2","S1",1.0]],
          "evidence": {"S1": 1} }

    Node order is layer order, then declaration order within a layer.
    ``edges`` and ``evidence`` may be omitted (treated as empty). Raises
    :class:`NetworkFormatError` for malformed documents, out-of-range
    probabilities, or references to undeclared nodes.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise NetworkFormatError(f"not valid JSON (line {exc.lineno}): {exc.msg}") from exc

    _require(isinstance(doc, dict), "top-level value must be a JSON object")
    _require("layers" in doc, "missing required field 'layers'")
    _require("nodes" in doc, "missing required field 'nodes'")

    layers_doc = doc["layers"]
    nodes_doc = doc["nodes"]
    edges_doc = doc.get("edges", [])
    evidence_doc = doc.get("evidence", {})
    _require(isinstance(layers_doc, list), "'layers' must be a list of lists of names")
    _require(isinstance(nodes_doc, dict), "'nodes' must be an object mapping name to spec")
    _require(isinstance(edges_doc, list), "'edges' must be a list")
    _require(isinstance(evidence_doc, dict), "'evidence' must be an object")

    order: list[str] = []
    layer_indices: list[list[int]] = []
    for li, layer in enumerate(layers_doc):
        _require(isinstance(layer, list), f"layer {li} must be a list of node names")
        idxs = []
        for name in layer:
            _require(isinstance(name, str), f"layer {li} contains a non-string entry")
            _require(name not in order, f"node '{name}' appears in more than one layer")
            _require(name in nodes_doc, f"layer {li} references undeclared node '{name}'")
            idxs.append(len(order))
            order.append(name)
        layer_indices.append(idxs)
    for name in nodes_doc:
        _require(name in order, f"node '{name}' is declared but not placed in any layer")

    specs = []
    for name in order:
        spec = nodes_doc[name]
        _require(isinstance(spec, dict), f"node '{name}' spec must be an object")
        _require("leak" in spec, f"node '{name}' is missing field 'leak'")
        leak = spec["leak"]
        _require(
            isinstance(leak, (int, float)) and not isinstance(leak, bool),
            f"node '{name}' leak must be a number",
        )
        _require(0.0 <= leak <= 1.0, f"node '{name}' leak {leak} outside [0, 1]")
        specs.append(NodeSpec(name=name, leak=float(leak)))

    index = {name: i for i, name in enumerate(order)}
    edges = []
    for ei, entry in enumerate(edges_doc):
        _require(
            isinstance(entry, list) and len(entry) == 3,
            f"edge {ei} must be [parent, child, weight]",
        )
        pname, cname, weight = entry
        _require(pname in index, f"edge {ei} references unknown node '{pname}'")
        _require(cname in index, f"edge {ei} references unknown node '{cname}'")
        _require(
            isinstance(weight, (int, float)) and not isinstance(weight, bool),
            f"edge {ei} weight must be a number",
        )
        _require(0.0 <= weight <= 1.0, f"edge {ei} weight {weight} outside [0, 1]")
        edges.append((index[pname], index[cname], float(weight)))

    evidence = {}
    for name, value in evidence_doc.items():
        _require(name in index, f"evidence references unknown node '{name}'")
        _require(
            isinstance(value, int) and not isinstance(value, bool) and value in (0, 1),
            f"evidence for '{name}' must be 0 or 1",
        )
        evidence[index[name]] = value

    return Network(nodes=specs, layers=layer_indices, edges=edges, evidence=evidence)


def serialize_network(net: Network) -> str:
    """Render a network back into the JSON document format.

    ``parse_network(serialize_network(net)) == net`` holds exactly; floats
    are emitted with full round-trip precision.
    """
    doc = {
        "layers": [[net.nodes[i].name for i in layer] for layer in net.layers],
        "nodes": {spec.name: {"leak": spec.leak} for spec in net.nodes},
        "edges": [
            [net.nodes[p].name, net.nodes[c].name, w] for p, c, w in net.edges
        ],
        "evidence": {net.nodes[i].name: v for i, v in sorted(net.evidence.items())},
    }
    return json.dumps(doc, indent=2) + "\n"


def validate(net: Network) -> ValidationReport:
    """Check the semantic invariants of a network.

    Errors: edges that stay within a layer, skip layers, or point backwards
    (this also rules out cycles, since every remaining edge descends exactly
    one layer), duplicate edges, and out-of-range probabilities.

    Warning: any weight or leak exactly 0 or 1. Such networks are legal but
    give some configurations zero probability, and exact sampling is then no
    longer guaranteed to coalesce within any finite start depth.
    """
    issues: list[tuple[str, str]] = []

    seen_pairs = set()
    for p, c, w in net.edges:
        pname, cname = net.nodes[p].name, net.nodes[c].name
        if (p, c) in seen_pairs:
            issues.append(("error", f"duplicate edge {pname} -> {cname}"))
        seen_pairs.add((p, c))
        delta = net.layer_of[c] - net.layer_of[p]
        if delta != 1:
            kind = "within a layer" if delta == 0 else (
                "skips layers" if delta > 1 else "points backwards"
            )
            issues.append(("error", f"edge {pname} -> {cname} {kind}"))
        if not 0.0 <= w <= 1.0:
            issues.append(("error", f"edge {pname} -> {cname} weight {w} outside [0, 1]"))

    for spec in net.nodes:
        if not 0.0 <= spec.leak <= 1.0:
            issues.append(("error", f"node '{spec.name}' leak {spec.leak} outside [0, 1]"))

    deterministic = [spec.name for spec in net.nodes if spec.leak in (0.0, 1.0)]
    deterministic += [
        f"{net.nodes[p].name}->{net.nodes[c].name}"
        for p, c, w in net.edges
        if w in (0.0, 1.0)
    ]
    if deterministic:
        issues.append(
            (
                "warning",
                "deterministic probabilities (exactly 0 or 1) at: "
                + ", ".join(deterministic)
                + "; some configurations have zero probability, so exact "
                "sampling may fail to coalesce",
            )
        )

    return ValidationReport(issues=tuple(issues))


def noisy_or_prob(net: Network, node: int, parent_values: Mapping[int, int]) -> float:
    """P(node = 1 | parent_values) under the noisy-OR combination rule.

    ``parent_values`` must assign a 0/1 value to exactly the node's parents;
    for a parentless node it must be empty and the leak is returned.
    """
    parents = net.parents[node]
    if set(parent_values) != {p for p, _ in parents}:
        raise ValueError(
            f"parent_values must cover exactly the parents of node {node}"
        )
    q = net._leak_comp[node]
    for p, w in parents:
        if parent_values[p]:
            q *= 1.0 - w
    return 1.0 - q


def prob_on(net: Network, config, node: int) -> float:
    """P(node = 1 | its parents' values in config); same rule as noisy_or_prob."""
    q = net._leak_comp[node]
    for p, w in net.parents[node]:
        if config[p]:
            q *= 1.0 - w
    return 1.0 - q

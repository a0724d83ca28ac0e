"""Flow-based program documents and their DAG representation.

A flow program is a JSON array of node records. Every node carries a unique
``id`` and a ``type``; optional ``wires`` list output ports, each port an
ordered list of target node ids. All remaining keys are node attributes,
except the reserved editor metadata keys (``x``/``y``/``z``), which never
take part in comparison.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

from .errors import (
    CycleError,
    DanglingWireError,
    DuplicateIdError,
    FlowSyntaxError,
    MissingFieldError,
)

#: Structural / editor-metadata keys excluded from attribute comparison.
META_KEYS = frozenset({"id", "type", "wires", "x", "y", "z"})


def canonical_attributes(record: dict[str, Any]) -> dict[str, Any]:
    """Return the node record minus reserved meta keys; everything else verbatim."""
    return {k: v for k, v in record.items() if k not in META_KEYS}


def attribute_values_equal(a: Any, b: Any) -> bool:
    """Deep structural equality over attribute value trees.

    Booleans only equal booleans; numbers compare by exact value; text by exact
    codepoint sequence; lists elementwise; maps by identical key sets and
    per-key equality. Differing kinds (including null vs anything non-null)
    are unequal.
    """
    if isinstance(a, bool) or isinstance(b, bool):
        return isinstance(a, bool) and isinstance(b, bool) and a == b
    if isinstance(a, (int, float)) and isinstance(b, (int, float)):
        return a == b
    if a is None or b is None:
        return a is None and b is None
    if isinstance(a, str) and isinstance(b, str):
        return a == b
    if isinstance(a, list) and isinstance(b, list):
        return len(a) == len(b) and all(attribute_values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict) and isinstance(b, dict):
        return a.keys() == b.keys() and all(attribute_values_equal(a[k], b[k]) for k in a)
    return False


@dataclass(frozen=True, eq=False)
class FlowNode:
    """One node of a flow program."""

    id: str
    node_type: str
    attributes: dict[str, Any] = field(default_factory=dict)
    out_wires: tuple[tuple[str, ...], ...] = ()

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FlowNode):
            return NotImplemented
        return (
            self.id == other.id
            and self.node_type == other.node_type
            and self.out_wires == other.out_wires
            and self.attributes.keys() == other.attributes.keys()
            and all(
                attribute_values_equal(self.attributes[k], other.attributes[k])
                for k in self.attributes
            )
        )


@dataclass(frozen=True)
class FlowProgram:
    """An ordered list of flow nodes with resolved wiring."""

    nodes: tuple[FlowNode, ...] = ()

    def node_ids(self) -> list[str]:
        return [n.id for n in self.nodes]


@dataclass(frozen=True)
class ProgramDag:
    """Attributed directed acyclic graph built from a flow program.

    ``vertices[k]`` is a ``(node_type, attributes)`` pair; ``edges`` holds
    ordered ``(source, target)`` vertex-index pairs. Construction rejects
    self-loops, invalid endpoints, and directed cycles.
    """

    vertices: tuple[tuple[str, dict[str, Any]], ...] = ()
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self) -> None:
        n = len(self.vertices)
        for u, v in self.edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) references a vertex outside 0..{n - 1}")
            if u == v:
                raise CycleError(f"self-loop on vertex {u}")
        self.topological_order()

    def __len__(self) -> int:
        return len(self.vertices)

    def topological_order(self) -> list[int]:
        """Kahn's algorithm; raises CycleError when the edge set is cyclic."""
        n = len(self.vertices)
        indegree = [0] * n
        succ: list[list[int]] = [[] for _ in range(n)]
        for u, v in sorted(self.edges):
            succ[u].append(v)
            indegree[v] += 1
        ready = [i for i in range(n) if indegree[i] == 0]
        order: list[int] = []
        while ready:
            u = ready.pop()
            order.append(u)
            for v in succ[u]:
                indegree[v] -= 1
                if indegree[v] == 0:
                    ready.append(v)
        if len(order) != n:
            raise CycleError("wire graph contains a directed cycle")
        return order


def _require_string(record: dict[str, Any], key: str, where: str) -> str:
    value = record.get(key)
    if not isinstance(value, str) or not value:
        raise MissingFieldError(f"{where}: missing or non-string '{key}'")
    return value


def _parse_wires(raw: Any, where: str) -> tuple[tuple[str, ...], ...]:
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise FlowSyntaxError(f"{where}: 'wires' must be an array of arrays of id strings")
    ports: list[tuple[str, ...]] = []
    for port in raw:
        if not isinstance(port, list) or any(not isinstance(t, str) for t in port):
            raise FlowSyntaxError(f"{where}: 'wires' must be an array of arrays of id strings")
        ports.append(tuple(port))
    return tuple(ports)


def parse_flow(text: str) -> FlowProgram:
    """Parse a flow-program document into a validated FlowProgram.

    Raises FlowSyntaxError for malformed documents, MissingFieldError when a
    node lacks id/type, DuplicateIdError for repeated ids, and
    DanglingWireError when a wire targets an unknown id.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FlowSyntaxError(f"invalid program document: {exc}") from exc
    if not isinstance(doc, list):
        raise FlowSyntaxError("program document must be a JSON array of node records")

    nodes: list[FlowNode] = []
    seen: set[str] = set()
    for pos, record in enumerate(doc):
        where = f"node[{pos}]"
        if not isinstance(record, dict):
            raise FlowSyntaxError(f"{where}: node record must be a JSON object")
        node_id = _require_string(record, "id", where)
        node_type = _require_string(record, "type", where)
        if node_id in seen:
            raise DuplicateIdError(f"duplicate node id '{node_id}'")
        seen.add(node_id)
        nodes.append(
            FlowNode(
                id=node_id,
                node_type=node_type,
                attributes=canonical_attributes(record),
                out_wires=_parse_wires(record.get("wires"), where),
            )
        )

    for node in nodes:
        for port in node.out_wires:
            for target in port:
                if target not in seen:
                    raise DanglingWireError(f"node '{node.id}' wires to unknown id '{target}'")
    return FlowProgram(nodes=tuple(nodes))


def serialize_flow(program: FlowProgram) -> str:
    """Emit a byte-stable document; parse_flow(serialize_flow(p)) equals p."""
    records = []
    for node in program.nodes:
        record: dict[str, Any] = {"id": node.id, "type": node.node_type}
        record.update(node.attributes)
        record["wires"] = [list(port) for port in node.out_wires]
        records.append(record)
    return json.dumps(records, indent=2, sort_keys=True) + "\n"


def build_dag(program: FlowProgram) -> ProgramDag:
    """One vertex per node, one edge per wire target; ports and duplicates collapse."""
    index = {node.id: k for k, node in enumerate(program.nodes)}
    edges: set[tuple[int, int]] = set()
    for k, node in enumerate(program.nodes):
        for port in node.out_wires:
            for target in port:
                edges.add((k, index[target]))
    vertices = tuple((node.node_type, node.attributes) for node in program.nodes)
    return ProgramDag(vertices=vertices, edges=frozenset(edges))


def parse_dag(text: str) -> ProgramDag:
    """Convenience: parse a program document straight to its DAG."""
    return build_dag(parse_flow(text))

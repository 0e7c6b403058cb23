"""Entity-level flow graph built from the control-dependency forest.

Each function's tree is traversed depth-first with a stack of enclosing
condition sentences. Behavior nodes propagate taint from already-visited
sources to their destination, and every edge carries the source's inherited
conditions plus the conditions pushed since the source was recorded. After
all per-function passes, same-named global entities collapse into one node,
which is what links flows across functions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .entities import (
    OPERATION,
    EntityId,
    PropagationTuple,
    extract_tuple,
    is_constant,
    normalize_entity,
)
from .forest import BEHAVIOR, CONDITION, ContractForest


class ConditionStack:
    """DFS path of condition texts with a monotonic push counter.

    The counter never decreases, so a snapshot taken at visit time identifies
    exactly which conditions were pushed afterwards, even across pops.
    """

    def __init__(self) -> None:
        self._stack: list[tuple[str, int]] = []
        self._pushes = 0

    def push(self, text: str) -> None:
        self._pushes += 1
        self._stack.append((text, self._pushes))

    def pop(self) -> None:
        self._stack.pop()

    @property
    def counter(self) -> int:
        return self._pushes

    def entries(self) -> tuple[tuple[str, int], ...]:
        return tuple(self._stack)


@dataclass
class VisitRecord:
    """First-visit state of an entity within one function traversal."""

    entity: EntityId
    conditions: tuple[str, ...]
    condition_snapshot: int


def collect_condition_delta(stack: ConditionStack, record: VisitRecord) -> list[str]:
    """Conditions currently on the stack that were pushed after the record."""
    out: list[str] = []
    for text, counter in stack.entries():
        if counter > record.condition_snapshot and text not in out:
            out.append(text)
    return out


@dataclass(frozen=True)
class FlowEdge:
    src: EntityId
    dst: EntityId
    conditions: tuple[str, ...]
    function: str


@dataclass
class FlowGraph:
    """Immutable after construction; nodes keyed by canonical entity key."""

    nodes: dict[str, EntityId] = field(default_factory=dict)
    edges: list[FlowEdge] = field(default_factory=list)
    _out: dict[str, list[int]] = field(default_factory=dict, repr=False)
    _in: dict[str, list[int]] = field(default_factory=dict, repr=False)

    def add_node(self, entity: EntityId) -> None:
        self.nodes.setdefault(entity.key(), entity)

    def add_edge(self, edge: FlowEdge) -> None:
        self.add_node(edge.src)
        self.add_node(edge.dst)
        self.edges.append(edge)
        self._out.setdefault(edge.src.key(), []).append(len(self.edges) - 1)
        self._in.setdefault(edge.dst.key(), []).append(len(self.edges) - 1)

    def out_edges(self, key: str) -> list[FlowEdge]:
        return [self.edges[i] for i in self._out.get(key, [])]

    def in_edges(self, key: str) -> list[FlowEdge]:
        return [self.edges[i] for i in self._in.get(key, [])]


def _ordered_union(*sequences: tuple[str, ...] | list[str]) -> tuple[str, ...]:
    out: list[str] = []
    for seq in sequences:
        for item in seq:
            if item not in out:
                out.append(item)
    return tuple(out)


def _function_tuples(
    forest: ContractForest, root_id: int, extra_globals: frozenset[str]
) -> dict[int, PropagationTuple]:
    """Propagation tuples for one function, keyed by behavior node id.

    Computed once so operation occurrence numbers follow document order no
    matter how the traversal proceeds.
    """
    scope = forest.function_name(root_id)
    op_counts: dict[str, int] = {}
    tuples: dict[int, PropagationTuple] = {}
    for node in forest.iter_tree(root_id):
        if node.kind == BEHAVIOR and node.behavior is not None:
            tuples[node.id] = extract_tuple(
                node.behavior, scope, extra_globals, op_counts
            )
    return tuples


def transform(
    forest: ContractForest, extra_globals: frozenset[str] = frozenset()
) -> FlowGraph:
    """Build the flow graph: per-function traversals, then a global merge.

    The visited set starts with the function's parameters and the globals the
    function reads (source position), all carrying empty condition sets. A
    destination acquires in-edges only at the step that first visits it.
    """
    graph = FlowGraph()
    for root_id in forest.roots:
        _transform_function(graph, forest, root_id, extra_globals)
    return graph


def _transform_function(
    graph: FlowGraph,
    forest: ContractForest,
    root_id: int,
    extra_globals: frozenset[str],
) -> None:
    scope = forest.function_name(root_id)
    tuples = _function_tuples(forest, root_id, extra_globals)

    visited: dict[EntityId, VisitRecord] = {}

    def seed(entity: EntityId) -> None:
        if entity not in visited:
            visited[entity] = VisitRecord(entity, (), 0)
            graph.add_node(entity)

    for param in forest.function_parameters(root_id):
        if not is_constant(param):
            seed(normalize_entity(param, scope, extra_globals))
    # globals the function reads are live on entry
    for node in forest.iter_tree(root_id):
        if node.kind == BEHAVIOR and node.id in tuples:
            for source in tuples[node.id].sources:
                if not source.scope:
                    seed(source)

    stack = ConditionStack()

    def process_behavior(node_id: int) -> None:
        prop = tuples.get(node_id)
        if prop is None or prop.dst is None:
            return
        if prop.dst in visited:
            return
        contributing = [visited[s] for s in prop.sources if s in visited]
        if not contributing:
            return
        annotations: list[tuple[str, ...]] = []
        for record in contributing:
            delta = collect_condition_delta(stack, record)
            annotation = _ordered_union(record.conditions, delta)
            graph.add_edge(
                FlowEdge(record.entity, prop.dst, annotation, function=scope)
            )
            annotations.append(annotation)
        visited[prop.dst] = VisitRecord(
            prop.dst, _ordered_union(*annotations), stack.counter
        )

    def walk(node_id: int) -> None:
        node = forest.node(node_id)
        if node.kind == CONDITION:
            stack.push(node.text)
            for child in node.children:
                walk(child)
            stack.pop()
            return
        if node.kind == BEHAVIOR:
            process_behavior(node_id)
        for child in node.children:
            walk(child)

    for child in forest.node(root_id).children:
        walk(child)


def graph_to_json(graph: FlowGraph) -> dict:
    return {
        "nodes": [
            {"id": key, "label": ent.display, "flavor": ent.flavor}
            for key, ent in graph.nodes.items()
        ],
        "edges": [
            {
                "from": e.src.key(),
                "to": e.dst.key(),
                "conditions": list(e.conditions),
                "function": e.function,
            }
            for e in graph.edges
        ],
    }


def graph_from_json(data: dict) -> FlowGraph:
    graph = FlowGraph()
    by_key: dict[str, EntityId] = {}
    for raw in data["nodes"]:
        ent = EntityId.from_key(raw["id"], flavor=raw["flavor"])
        by_key[raw["id"]] = ent
        graph.add_node(ent)
    for raw in data["edges"]:
        graph.add_edge(
            FlowEdge(
                src=by_key[raw["from"]],
                dst=by_key[raw["to"]],
                conditions=tuple(raw["conditions"]),
                function=raw["function"],
            )
        )
    return graph

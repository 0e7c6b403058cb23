"""Control-dependency forest: one tree per function, typed sentence nodes.

Each sentence becomes a node whose parent is the nearest preceding sentence
one depth level up (the function root for depth 0), so the tree edges encode
the control nesting expressed by the description.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .behavior import ParsedBehavior, classify_sentence, parse_behavior
from .description import ContractDescription, FunctionChunk
from .errors import MalformedNesting

FUNCTION = "function"
BEHAVIOR = "behavior"
CONDITION = "condition"
UNKNOWN = "unknown"


@dataclass
class DepNode:
    """One forest node; ``behavior`` is set iff kind == 'behavior'."""

    id: int
    kind: str
    text: str
    children: list[int] = field(default_factory=list)
    behavior: ParsedBehavior | None = None


@dataclass
class ContractForest:
    """Flat node store with preorder ids; roots are the function nodes."""

    contract_id: str
    nodes: list[DepNode] = field(default_factory=list)
    roots: list[int] = field(default_factory=list)

    def node(self, node_id: int) -> DepNode:
        return self.nodes[node_id]

    def function_signature(self, root_id: int) -> str:
        return self.nodes[root_id].text

    def function_name(self, root_id: int) -> str:
        return self.nodes[root_id].text.split("(", 1)[0]

    def function_parameters(self, root_id: int) -> tuple[str, ...]:
        sig = self.nodes[root_id].text
        inner = sig.split("(", 1)[1].rsplit(")", 1)[0]
        return tuple(p.strip() for p in inner.split(",") if p.strip())

    def iter_tree(self, root_id: int):
        """Yield the tree's nodes in preorder, root included."""
        stack = [root_id]
        while stack:
            node = self.nodes[stack.pop()]
            yield node
            stack.extend(reversed(node.children))

    def behavior_nodes(self) -> list[DepNode]:
        return [n for n in self.nodes if n.kind == BEHAVIOR]


def _build_tree(forest: ContractForest, chunk: FunctionChunk) -> int:
    root = DepNode(id=len(forest.nodes), kind=FUNCTION, text=chunk.signature)
    forest.nodes.append(root)
    forest.roots.append(root.id)

    # parent candidates per depth: parents[d] is the most recent node at depth d-1
    parents: list[int] = [root.id]
    prev_depth = -1
    for sentence in chunk.sentences:
        if sentence.depth > prev_depth + 1:
            raise MalformedNesting(
                f"in {chunk.signature}: sentence {sentence.text!r} at depth "
                f"{sentence.depth} after depth {prev_depth}"
            )
        kind = classify_sentence(sentence.text)
        node = DepNode(id=len(forest.nodes), kind=kind, text=sentence.text)
        if kind == BEHAVIOR:
            node.behavior = parse_behavior(sentence.text)
        forest.nodes.append(node)
        forest.nodes[parents[sentence.depth]].children.append(node.id)
        del parents[sentence.depth + 1 :]
        parents.append(node.id)
        prev_depth = sentence.depth
    return root.id


def build_forest(desc: ContractDescription) -> ContractForest:
    """Build the control-dependency forest for a whole contract description."""
    forest = ContractForest(contract_id=desc.contract_id)
    for chunk in desc.functions:
        _build_tree(forest, chunk)
    return forest


def forest_to_json(forest: ContractForest) -> dict:
    return {
        "contract": forest.contract_id,
        "roots": list(forest.roots),
        "nodes": [
            {
                "id": n.id,
                "kind": n.kind,
                "text": n.text,
                "children": list(n.children),
                **({"behavior": n.behavior.to_json()} if n.behavior else {}),
            }
            for n in forest.nodes
        ],
    }


def forest_from_json(data: dict) -> ContractForest:
    nodes = []
    for raw in data["nodes"]:
        behavior = ParsedBehavior.from_json(raw["behavior"]) if "behavior" in raw else None
        nodes.append(
            DepNode(
                id=raw["id"],
                kind=raw["kind"],
                text=raw["text"],
                children=list(raw["children"]),
                behavior=behavior,
            )
        )
    return ContractForest(
        contract_id=data["contract"], nodes=nodes, roots=list(data["roots"])
    )

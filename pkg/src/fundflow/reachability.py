"""Ingress/egress anchors, fund-flow reachability, and path rendering.

Ingress nodes are where attacker-influenced value enters (transaction fields
plus every function parameter); egress nodes are fund-moving operations.
Reachability runs forward from ingress, prunes against backward reachability
from egress, and enumerates simple ingress-to-egress paths with the edge
conditions carried along verbatim.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .entities import OPERATION, VARIABLE, EntityId, is_constant, normalize_entity
from .forest import ContractForest
from .graph import FlowGraph

PREDEFINED_INGRESS = (
    "msg.sender",
    "msg.value",
    "tx.origin",
    "address(this).balance",
)

PREDEFINED_EGRESS = (
    "transfer",
    "transferFrom",
    "approve",
    "deposit",
    "withdraw",
    "flashLoan",
    "swapExactTokensForTokens",
    "selfdestruct",
    "delegatecall",
)

# lifter vocabulary for transaction fields differs from the predefined names
DEFAULT_ALIASES = {
    "caller": "msg.sender",
    "call value": "msg.value",
}

_EGRESS_LOWER = frozenset(name.lower() for name in PREDEFINED_EGRESS)


@dataclass
class AnchorSets:
    ingress: set[EntityId] = field(default_factory=set)
    egress: set[EntityId] = field(default_factory=set)


def identify_ingress(
    graph: FlowGraph,
    forest: ContractForest,
    extra_globals: frozenset[str] = frozenset(),
    aliases: dict[str, str] | None = None,
) -> set[EntityId]:
    """Variable nodes named like transaction fields, plus parameter nodes."""
    alias_map = DEFAULT_ALIASES if aliases is None else aliases
    out: set[EntityId] = set()
    for ent in graph.nodes.values():
        if ent.flavor != VARIABLE or ent.scope:
            continue
        canonical = alias_map.get(ent.name, ent.name)
        if canonical in PREDEFINED_INGRESS:
            out.add(ent)
    for root_id in forest.roots:
        scope = forest.function_name(root_id)
        for param in forest.function_parameters(root_id):
            if is_constant(param):
                continue
            ent = normalize_entity(param, scope, extra_globals)
            if ent.key() in graph.nodes:
                out.add(graph.nodes[ent.key()])
    return out


def egress_label(label: str) -> str:
    """Final dot-separated identifier segment, lowercased, parens stripped."""
    segment = label.rsplit(".", 1)[-1]
    return segment.split("(", 1)[0].strip().lower()


def identify_egress(graph: FlowGraph) -> set[EntityId]:
    return {
        ent
        for ent in graph.nodes.values()
        if ent.flavor == OPERATION and egress_label(ent.name) in _EGRESS_LOWER
    }


def forward_reach(graph: FlowGraph, ingress: set[EntityId]) -> set[EntityId]:
    """All nodes reachable from any ingress node along directed edges."""
    seen: set[str] = set()
    stack = [ent.key() for ent in ingress if ent.key() in graph.nodes]
    while stack:
        key = stack.pop()
        if key in seen:
            continue
        seen.add(key)
        for edge in graph.out_edges(key):
            if edge.dst.key() not in seen:
                stack.append(edge.dst.key())
    return {graph.nodes[key] for key in seen}


def _backward_reach(graph: FlowGraph, egress: set[EntityId]) -> set[str]:
    seen: set[str] = set()
    stack = [ent.key() for ent in egress if ent.key() in graph.nodes]
    while stack:
        key = stack.pop()
        if key in seen:
            continue
        seen.add(key)
        for edge in graph.in_edges(key):
            if edge.src.key() not in seen:
                stack.append(edge.src.key())
    return seen


@dataclass(frozen=True)
class FundFlowPath:
    """A simple ingress-to-egress chain with per-edge condition lists."""

    hops: tuple[EntityId, ...]
    conditions: tuple[tuple[str, ...], ...]  # one entry per edge


@dataclass(frozen=True)
class ReachLimits:
    max_depth: int = 32
    max_paths: int = 256


@dataclass
class EnumerationResult:
    paths: list[FundFlowPath]
    truncated: bool = False  # a limit cut the enumeration short
    retained_nodes: set[EntityId] = field(default_factory=set)


def prune_and_enumerate(
    graph: FlowGraph,
    reach: set[EntityId],
    anchors: AnchorSets,
    limits: ReachLimits = ReachLimits(),
) -> EnumerationResult:
    """Keep nodes on some ingress-egress chain, then list simple paths.

    Enumeration is depth-first with successors ordered by node key, so the
    output order is stable. Hitting either limit sets the truncated flag
    instead of raising.
    """
    retained_keys = {e.key() for e in reach} & _backward_reach(graph, anchors.egress)
    result = EnumerationResult(
        paths=[], retained_nodes={graph.nodes[k] for k in retained_keys}
    )
    egress_keys = {e.key() for e in anchors.egress}
    starts = sorted(
        (e.key() for e in anchors.ingress if e.key() in retained_keys),
    )

    def extend(path_keys: list[str], conds: list[tuple[str, ...]]) -> bool:
        """Returns False when the max_paths limit is exhausted."""
        current = path_keys[-1]
        if current in egress_keys:
            if len(result.paths) >= limits.max_paths:
                result.truncated = True
                return False
            result.paths.append(
                FundFlowPath(
                    hops=tuple(graph.nodes[k] for k in path_keys),
                    conditions=tuple(conds),
                )
            )
            return True
        on_path = set(path_keys)
        successors = sorted(
            (
                e
                for e in graph.out_edges(current)
                if e.dst.key() in retained_keys and e.dst.key() not in on_path
            ),
            key=lambda e: e.dst.key(),
        )
        if len(path_keys) - 1 >= limits.max_depth:
            if successors:
                result.truncated = True
            return True
        for edge in successors:
            path_keys.append(edge.dst.key())
            conds.append(edge.conditions)
            keep_going = extend(path_keys, conds)
            path_keys.pop()
            conds.pop()
            if not keep_going:
                return False
        return True

    for start in starts:
        if not extend([start], []):
            break
    return result


def render_path(path: FundFlowPath) -> str:
    """`a --[c1, c2]--> b` style; an empty condition list renders as --[]-->."""
    parts = [path.hops[0].display]
    for conditions, hop in zip(path.conditions, path.hops[1:]):
        parts.append(f"--[{', '.join(conditions)}]-->")
        parts.append(hop.display)
    return " ".join(parts)


def paths_to_json(result: EnumerationResult) -> dict:
    return {
        "truncated": result.truncated,
        "paths": [
            {
                "rendered": render_path(p),
                "hops": [
                    {"id": h.key(), "display": h.display} for h in p.hops
                ],
                "conditions": [list(c) for c in p.conditions],
            }
            for p in result.paths
        ],
    }


def paths_report(result: EnumerationResult) -> str:
    """Plain-text report: one rendered path per line."""
    lines = [render_path(p) for p in result.paths]
    return "\n".join(lines) + ("\n" if lines else "")

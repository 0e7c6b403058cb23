"""End-to-end orchestration: parse, graph, probe, fuse, persist, decide.

Every stage's output is written to the run directory as JSON the moment it
exists, so a failure later in the pipeline still leaves the artifacts
computed so far on disk. Replay mode makes the whole run hermetic.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

from .description import ContractDescription, description_to_json
from .forest import build_forest, forest_to_json
from .fusion import Verdict, decide, fuse
from .graph import transform, graph_to_json
from .indicators import compute_indicators, is_unknown_function
from .probing import run_stage1, run_stage2
from .prompts import AnalysisBundle, UnknownFunction
from .reachability import (
    AnchorSets,
    ReachLimits,
    forward_reach,
    identify_egress,
    identify_ingress,
    paths_to_json,
    prune_and_enumerate,
    render_path,
)
from .transport import LiveTransport, RecordTransport, ReplayTransport, TransportParams

DEFAULT_ENDPOINT = "https://api.openai.com/v1/chat/completions"


@dataclass
class RunConfig:
    transport: str = "replay"  # live | record | replay
    store: str | None = None
    model: str = "gpt-4o"
    endpoint: str = DEFAULT_ENDPOINT
    api_key_env: str = "OPENAI_API_KEY"
    temperature: float = 0.0
    max_tokens: int = 1024
    concurrency: int = 4
    retries: int = 2
    threshold: float | None = None
    max_depth: int = 32
    max_paths: int = 256
    out_dir: str = "out"

    def limits(self) -> ReachLimits:
        return ReachLimits(max_depth=self.max_depth, max_paths=self.max_paths)

    def params(self) -> TransportParams:
        return TransportParams(
            model=self.model,
            temperature=self.temperature,
            max_tokens=self.max_tokens,
        )


def make_transport(config: RunConfig):
    if config.transport == "live":
        return LiveTransport(
            config.params(), endpoint=config.endpoint, api_key_env=config.api_key_env
        )
    if config.transport == "record":
        if not config.store:
            raise ValueError("record transport requires --store")
        live = LiveTransport(
            config.params(), endpoint=config.endpoint, api_key_env=config.api_key_env
        )
        return RecordTransport(live, config.store)
    if config.transport == "replay":
        if not config.store:
            raise ValueError("replay transport requires --store")
        return ReplayTransport(config.store, config.params())
    raise ValueError(f"unknown transport mode: {config.transport!r}")


def write_json(out_dir: str, name: str, payload: dict) -> str:
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, name)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")
    return path


@dataclass
class StaticArtifacts:
    forest: object
    graph: object
    anchors: AnchorSets
    enumeration: object
    indicators: object


def run_static(
    desc: ContractDescription,
    config: RunConfig,
    extra_globals: frozenset[str] = frozenset(),
    persist: bool = True,
) -> StaticArtifacts:
    """The model-free half: forest, graph, anchors, paths, indicators."""
    out = config.out_dir
    if persist:
        write_json(out, "description.json", description_to_json(desc))
    forest = build_forest(desc)
    if persist:
        write_json(out, "forest.json", forest_to_json(forest))
    graph = transform(forest, extra_globals)
    if persist:
        write_json(out, "graph.json", graph_to_json(graph))
    anchors = AnchorSets(
        ingress=identify_ingress(graph, forest, extra_globals),
        egress=identify_egress(graph),
    )
    reach = forward_reach(graph, anchors.ingress)
    enumeration = prune_and_enumerate(graph, reach, anchors, config.limits())
    if persist:
        write_json(out, "paths.json", paths_to_json(enumeration))
    indicators = compute_indicators(forest)
    if persist:
        write_json(out, "indicators.json", indicators.to_json())
    return StaticArtifacts(
        forest=forest,
        graph=graph,
        anchors=anchors,
        enumeration=enumeration,
        indicators=indicators,
    )


def assemble_bundle(
    desc: ContractDescription, static: StaticArtifacts, stage1
) -> AnalysisBundle:
    reasons = {f.name: f.reason for f in stage1.functions}
    unknown = []
    for chunk in desc.functions:
        if not is_unknown_function(chunk.name):
            continue
        unknown.append(
            UnknownFunction(
                name=chunk.name,
                parameters=", ".join(chunk.parameters) or "(no parameters)",
                description="; ".join(s.text for s in chunk.sentences),
                reason=reasons.get(chunk.name, ""),
            )
        )
    return AnalysisBundle(
        contract_summary=stage1.contract_summary,
        functions=stage1.functions,
        unknown_functions=unknown,
        indicators=static.indicators,
        paths=[render_path(p) for p in static.enumeration.paths],
    )


def run_detect(
    desc: ContractDescription,
    config: RunConfig,
    transport=None,
    extra_globals: frozenset[str] = frozenset(),
) -> tuple[Verdict, AnalysisBundle]:
    """Full pipeline for one contract; artifacts land in config.out_dir."""
    out = config.out_dir
    static = run_static(desc, config, extra_globals)
    if transport is None:
        transport = make_transport(config)

    stage1 = run_stage1(desc, transport, config.concurrency)
    bundle = assemble_bundle(desc, static, stage1)
    write_json(out, "bundle.json", bundle.to_json())

    stage2 = run_stage2(bundle, transport, config.concurrency, config.retries)
    write_json(
        out,
        "probes.json",
        {
            "distributions": [d.to_json() for d in stage2.distributions],
            "failed": list(stage2.failed),
        },
    )

    fusion = fuse(stage2.distributions)
    write_json(out, "fusion.json", fusion.to_json())

    verdict = decide(fusion, config.threshold)
    write_json(out, "verdict.json", verdict.to_json())
    return verdict, bundle


def run_batch(
    descriptions: list[ContractDescription], config: RunConfig
) -> dict[str, Verdict]:
    """Detect over many contracts with a bounded worker pool; each contract
    writes into its own subdirectory of the configured output directory."""

    def worker(desc: ContractDescription) -> tuple[str, Verdict]:
        sub = replace(config, out_dir=os.path.join(config.out_dir, desc.contract_id))
        verdict, _ = run_detect(desc, sub)
        return desc.contract_id, verdict

    with ThreadPoolExecutor(max_workers=max(1, config.concurrency)) as pool:
        results = list(pool.map(worker, descriptions))
    return dict(results)

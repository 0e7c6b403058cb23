"""Command-line interface: staged analysis commands that compose via JSON.

Exit codes: 0 benign or success, 3 adversarial, 1 runtime error, 2 usage.
API keys are read from the environment only; config files and flags never
carry secrets.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

from .description import load_description
from .errors import FundflowError
from .forest import build_forest, forest_to_json
from .fusion import decide, fuse
from .metrics import compute_metrics, sweep_to_csv, threshold_sweep
from .pipeline import RunConfig, make_transport, run_batch, run_detect, run_static, write_json
from .probing import ProbeDistribution, run_stage1, run_stage2
from .reachability import render_path


_CONFIG_FIELDS = {f.name: f.type for f in dataclasses.fields(RunConfig)}
_INT_KEYS = {"concurrency", "retries", "max_depth", "max_paths", "max_tokens"}
_FLOAT_KEYS = {"threshold", "temperature"}


def read_config_file(path: str) -> dict:
    """key=value lines; blank lines and #-comments ignored."""
    values: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _CONFIG_FIELDS:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            else:
                values[key] = value
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    """Defaults, overridden by the config file, overridden by flags."""
    values: dict = {}
    if getattr(args, "config", None):
        values.update(read_config_file(args.config))
    flag_map = {
        "transport": "transport",
        "store": "store",
        "model": "model",
        "endpoint": "endpoint",
        "api_key_env": "api_key_env",
        "threshold": "threshold",
        "max_depth": "max_depth",
        "max_paths": "max_paths",
        "concurrency": "concurrency",
        "retries": "retries",
        "out_dir": "out_dir",
    }
    for attr, key in flag_map.items():
        value = getattr(args, attr, None)
        if value is not None:
            values[key] = value
    return RunConfig(**values)


def add_common_flags(p: argparse.ArgumentParser, io: bool = True) -> None:
    if io:
        p.add_argument("-i", "--input", required=True, help="description file (flat text or JSON)")
    p.add_argument("-o", "--out-dir", dest="out_dir", default=None, help="artifact directory")
    p.add_argument("--config", default=None, help="key=value config file")


def add_transport_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--transport", choices=["live", "record", "replay"], default=None)
    p.add_argument("--store", default=None, help="JSONL response store (record/replay)")
    p.add_argument("--model", default=None)
    p.add_argument("--endpoint", default=None)
    p.add_argument("--api-key-env", dest="api_key_env", default=None)
    p.add_argument("--concurrency", type=int, default=None)
    p.add_argument("--retries", type=int, default=None)


def add_reach_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--max-depth", dest="max_depth", type=int, default=None)
    p.add_argument("--max-paths", dest="max_paths", type=int, default=None)


def _load_inputs(path: str):
    """A file is one description; a directory is a batch of them."""
    p = Path(path)
    if p.is_dir():
        files = sorted(
            f for f in p.iterdir() if f.suffix in {".txt", ".json"} and f.is_file()
        )
        if not files:
            raise FundflowError(f"no .txt or .json descriptions in {path}")
        return [load_description(str(f)) for f in files]
    return [load_description(str(p))]


def cmd_parse(args: argparse.Namespace) -> int:
    config = build_config(args)
    desc = load_description(args.input)
    forest = build_forest(desc)
    write_json(config.out_dir, "forest.json", forest_to_json(forest))
    sentences = sum(len(c.sentences) for c in desc.functions)
    print(
        f"{desc.contract_id}: {len(desc.functions)} function(s), "
        f"{sentences} sentence(s), {len(forest.nodes)} node(s)"
    )
    return 0


def cmd_flow(args: argparse.Namespace) -> int:
    config = build_config(args)
    desc = load_description(args.input)
    static = run_static(desc, config)
    for path in static.enumeration.paths:
        print(render_path(path))
    if static.enumeration.truncated:
        print("warning: enumeration truncated by limits", file=sys.stderr)
    return 0


def cmd_indicators(args: argparse.Namespace) -> int:
    config = build_config(args)
    desc = load_description(args.input)
    static = run_static(desc, config)
    print(json.dumps(static.indicators.to_json(), indent=2))
    return 0


def cmd_probe(args: argparse.Namespace) -> int:
    from .pipeline import assemble_bundle

    config = build_config(args)
    desc = load_description(args.input)
    static = run_static(desc, config)
    transport = make_transport(config)
    stage1 = run_stage1(desc, transport, config.concurrency)
    bundle = assemble_bundle(desc, static, stage1)
    write_json(config.out_dir, "bundle.json", bundle.to_json())
    stage2 = run_stage2(bundle, transport, config.concurrency, config.retries)
    payload = {
        "distributions": [d.to_json() for d in stage2.distributions],
        "failed": list(stage2.failed),
    }
    write_json(config.out_dir, "probes.json", payload)
    print(json.dumps(payload, indent=2))
    return 0


def cmd_fuse(args: argparse.Namespace) -> int:
    config = build_config(args)
    with open(args.input, encoding="utf-8") as fh:
        payload = json.load(fh)
    probes = [ProbeDistribution.from_json(d) for d in payload["distributions"]]
    result = fuse(probes)
    verdict = decide(result, config.threshold)
    write_json(config.out_dir, "fusion.json", result.to_json())
    write_json(config.out_dir, "verdict.json", verdict.to_json())
    print(json.dumps({**result.to_json(), "verdict": verdict.to_json()}, indent=2))
    return 3 if verdict.label == "adversarial" else 0


def cmd_detect(args: argparse.Namespace) -> int:
    config = build_config(args)
    descriptions = _load_inputs(args.input)
    if len(descriptions) == 1:
        verdict, _ = run_detect(descriptions[0], config)
        print(json.dumps(verdict.to_json(), indent=2))
        return 3 if verdict.label == "adversarial" else 0
    verdicts = run_batch(descriptions, config)
    any_adversarial = False
    for contract_id in sorted(verdicts):
        verdict = verdicts[contract_id]
        any_adversarial |= verdict.label == "adversarial"
        print(f"{contract_id}\t{verdict.label}\t{verdict.adv_score:.4f}")
    return 3 if any_adversarial else 0


def _read_jsonl(path: str) -> list[dict]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                rows.append(json.loads(line))
    return rows


def cmd_eval(args: argparse.Namespace) -> int:
    predictions = [(r["id"], r["label"]) for r in _read_jsonl(args.predictions)]
    truth = [(r["id"], r["label"]) for r in _read_jsonl(args.truth)]
    metrics = compute_metrics(predictions, truth)
    print(json.dumps(metrics.to_json(), indent=2))
    return 0


def _parse_grid(raw: str) -> list[float]:
    return [float(tok) for tok in raw.split(",") if tok.strip()]


def cmd_sweep(args: argparse.Namespace) -> int:
    rows = _read_jsonl(args.input)
    scores = [(r["id"], float(r["adv_score"]), r["label"]) for r in rows]
    grid = _parse_grid(args.grid)
    for t in grid:
        if not 0.0 <= t <= 1.0:
            raise FundflowError(f"grid threshold {t} outside [0, 1]")
    csv_text = sweep_to_csv(threshold_sweep(scores, grid))
    if args.out_dir:
        os.makedirs(args.out_dir, exist_ok=True)
        out_path = os.path.join(args.out_dir, "sweep.csv")
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        print(out_path)
    else:
        sys.stdout.write(csv_text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fundflow",
        description="Fund-flow analysis and confidence-fusion detection "
        "for smart contract descriptions",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="build the control-dependency forest")
    add_common_flags(p)
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("flow", help="flow graph, anchors, and fund-flow paths")
    add_common_flags(p)
    add_reach_flags(p)
    p.set_defaults(func=cmd_flow)

    p = sub.add_parser("indicators", help="contract-level structural indicators")
    add_common_flags(p)
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("probe", help="run both model stages, write distributions")
    add_common_flags(p)
    add_reach_flags(p)
    add_transport_flags(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("fuse", help="fuse probe distributions into a verdict")
    add_common_flags(p)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_fuse)

    p = sub.add_parser("detect", help="full pipeline: file or directory input")
    add_common_flags(p)
    add_reach_flags(p)
    add_transport_flags(p)
    p.add_argument("--threshold", type=float, default=None)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("eval", help="confusion metrics from prediction/truth JSONL")
    p.add_argument("predictions", help="JSONL of {id, label}")
    p.add_argument("truth", help="JSONL of {id, label}")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="threshold sweep CSV from scored samples")
    add_common_flags(p)
    p.add_argument(
        "--grid",
        default=",".join(f"{i / 20:.2f}" for i in range(20)),
        help="comma-separated thresholds in [0, 1]",
    )
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FundflowError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

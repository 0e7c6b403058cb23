"""Prompt assembly for both analysis stages.

Stage-I prompts ask for free-text contract and function summaries. Stage-II
prompts prepend one of two context blocks (contract-level with structural
indicators, or function-level with fund-flow paths) to a fixed ranked-guess
question, optionally followed by a misleading hint line. The block and
question texts live in package assets so they stay byte-stable.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from importlib import resources

from .description import ContractDescription, FunctionChunk, render_flat_text
from .errors import MissingBundleField
from .indicators import Indicators

G_NORMAL = "g_normal"
S_NORMAL = "s_normal"
G_MISLEAD_ADV = "g_mislead_adv"
G_MISLEAD_BE = "g_mislead_be"
S_MISLEAD_ADV = "s_mislead_adv"
S_MISLEAD_BE = "s_mislead_be"

PROBE_KINDS = (
    G_NORMAL,
    S_NORMAL,
    G_MISLEAD_ADV,
    G_MISLEAD_BE,
    S_MISLEAD_ADV,
    S_MISLEAD_BE,
)

HINT_ADVERSARIAL = "Hint: I think the answer should be (A) adversarial."
HINT_BENIGN = "Hint: I think the answer should be (D) benign."

_HINTS = {
    G_MISLEAD_ADV: HINT_ADVERSARIAL,
    S_MISLEAD_ADV: HINT_ADVERSARIAL,
    G_MISLEAD_BE: HINT_BENIGN,
    S_MISLEAD_BE: HINT_BENIGN,
}


def _asset(name: str) -> str:
    return (
        resources.files("fundflow").joinpath("assets", name).read_text(encoding="utf-8")
    )


@dataclass
class FunctionSummary:
    name: str
    purpose: str
    suspicious: bool
    reason: str


@dataclass
class UnknownFunction:
    name: str
    parameters: str
    description: str
    reason: str


@dataclass
class AnalysisBundle:
    """Everything the ranked-guess prompts interpolate."""

    contract_summary: str
    functions: list[FunctionSummary] = field(default_factory=list)
    unknown_functions: list[UnknownFunction] = field(default_factory=list)
    indicators: Indicators | None = None
    paths: list[str] = field(default_factory=list)  # rendered fund-flow paths

    def to_json(self) -> dict:
        return {
            "contract_summary": self.contract_summary,
            "functions": [asdict(f) for f in self.functions],
            "unknown_functions": [asdict(u) for u in self.unknown_functions],
            "indicators": self.indicators.to_json() if self.indicators else None,
            "paths": list(self.paths),
        }

    @classmethod
    def from_json(cls, data: dict) -> "AnalysisBundle":
        return cls(
            contract_summary=data["contract_summary"],
            functions=[FunctionSummary(**f) for f in data["functions"]],
            unknown_functions=[UnknownFunction(**u) for u in data["unknown_functions"]],
            indicators=(
                Indicators.from_json(data["indicators"]) if data["indicators"] else None
            ),
            paths=list(data["paths"]),
        )


def build_stage1_prompts(desc: ContractDescription) -> tuple[str, list[str]]:
    """One contract-level prompt plus one prompt per function."""
    general = _asset("stage1_general.txt").format(description=render_flat_text(desc))
    per_function = [
        _asset("stage1_function.txt").format(
            function_description=_render_function(chunk)
        )
        for chunk in desc.functions
    ]
    return general, per_function


def _render_function(chunk: FunctionChunk) -> str:
    single = ContractDescription(contract_id="", functions=[chunk])
    return render_flat_text(single)


def ordinal(n: int) -> str:
    if 10 <= n % 100 <= 13:
        suffix = "th"
    else:
        suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def _yes_no(flag: bool) -> str:
    return "Yes" if flag else "No"


def _ratio(value: float) -> str:
    return f"{value:.4f}"


def _function_summaries_block(functions: list[FunctionSummary]) -> str:
    lines = [
        f"- ({ordinal(i)} function) {f.name}: {f.purpose}, "
        f"Suspicious: {_yes_no(f.suspicious)}, Reason: {f.reason}"
        for i, f in enumerate(functions, start=1)
    ]
    return "\n".join(lines) if lines else "(none)"


def _unknown_functions_block(unknown: list[UnknownFunction]) -> str:
    lines = [
        f"- ({ordinal(i)} function) {u.name}: {u.parameters}, "
        f"Description: {u.description}, Reason: {u.reason}"
        for i, u in enumerate(unknown, start=1)
    ]
    return "\n".join(lines) if lines else "(none)"


def build_stage2_context(kind: str, bundle: AnalysisBundle) -> str:
    if kind.startswith("g_"):
        if bundle.contract_summary is None or bundle.indicators is None:
            raise MissingBundleField(
                "contract-level context needs contract_summary and indicators"
            )
        ind = bundle.indicators
        return _asset("stage2_context_general.txt").format(
            contract_summary=bundle.contract_summary,
            external_call_count=ind.external_call_count,
            external_call_ratio=_ratio(ind.external_call_ratio),
            unknown_fn_count=ind.unknown_fn_count,
            unknown_fn_ratio=_ratio(ind.unknown_fn_ratio),
            transfers_in_unknown_fns=_yes_no(ind.transfers_in_unknown_fns),
            bot_fn_count=ind.bot_fn_count,
            bot_fn_ratio=_ratio(ind.bot_fn_ratio),
        )
    return _asset("stage2_context_specific.txt").format(
        function_summaries=_function_summaries_block(bundle.functions),
        unknown_function_descriptions=_unknown_functions_block(
            bundle.unknown_functions
        ),
        fund_flow_paths="\n".join(bundle.paths) if bundle.paths else "(none)",
    )


def build_stage2_prompt(kind: str, bundle: AnalysisBundle) -> str:
    """Context block, then the ranked-guess question, then an optional hint."""
    if kind not in PROBE_KINDS:
        raise ValueError(f"unknown probe kind: {kind!r}")
    parts = [build_stage2_context(kind, bundle).rstrip("\n")]
    parts.append(_asset("stage2_question.txt").rstrip("\n"))
    if kind in _HINTS:
        parts.append(_HINTS[kind])
    return "\n\n".join(parts) + "\n"

"""Shared fixtures: the two-function toy forest, recorded probe tables, and
a scripted offline transport for pipeline tests."""

from __future__ import annotations

import pytest

from fundflow.behavior import parse_behavior
from fundflow.forest import ContractForest, DepNode
from fundflow.probing import LETTER_TO_LABEL, ProbeDistribution

# ranked rows (letter, confidence) per probe kind, adversarial fixture
ADVERSARIAL_ROWS = {
    "g_normal": (("B", 60), ("A", 25), ("C", 10), ("D", 5)),
    "s_normal": (("B", 60), ("A", 30), ("C", 8), ("D", 2)),
    "g_mislead_adv": (("A", 60), ("B", 30), ("C", 8), ("D", 2)),
    "g_mislead_be": (("D", 70), ("C", 20), ("B", 8), ("A", 2)),
    "s_mislead_adv": (("A", 80), ("B", 15), ("C", 5), ("D", 0)),
    "s_mislead_be": (("D", 60), ("C", 30), ("B", 10), ("A", 0)),
}

# benign fixture
BENIGN_ROWS = {
    "g_normal": (("D", 50), ("C", 30), ("B", 15), ("A", 5)),
    "s_normal": (("B", 50), ("C", 30), ("A", 15), ("D", 5)),
    "g_mislead_adv": (("C", 40), ("D", 30), ("B", 20), ("A", 10)),
    "g_mislead_be": (("D", 70), ("C", 20), ("B", 8), ("A", 2)),
    "s_mislead_adv": (("A", 70), ("B", 20), ("C", 8), ("D", 2)),
    "s_mislead_be": (("D", 70), ("C", 20), ("B", 8), ("A", 2)),
}


def distribution(kind: str, rows) -> ProbeDistribution:
    return ProbeDistribution(
        probe=kind,
        ranked=tuple((LETTER_TO_LABEL[letter], float(conf)) for letter, conf in rows),
    )


def distributions(table: dict) -> list[ProbeDistribution]:
    return [distribution(kind, rows) for kind, rows in table.items()]


def ranked_text(rows) -> str:
    """Render a table row as a model answer in the expected format."""
    lines = ["Reasoning: the evidence points one way."]
    for i, (letter, conf) in enumerate(rows, start=1):
        lines.append(f"G{i}: {letter}")
        lines.append(f"P{i}: {conf}%")
    return "\n".join(lines)


def make_toy_forest() -> ContractForest:
    """Two functions sharing the global v3.

    F1(v1, v2): under c2, call op1(v1); under c3, v3 := v2.
    F2(): under c1, call op2(v3).
    Condition labels are bare tokens, so nodes are built directly.
    """
    forest = ContractForest(contract_id="toy")

    def add(kind: str, text: str, parent: int | None) -> int:
        node = DepNode(id=len(forest.nodes), kind=kind, text=text)
        if kind == "behavior":
            node.behavior = parse_behavior(text)
        forest.nodes.append(node)
        if parent is None:
            forest.roots.append(node.id)
        else:
            forest.nodes[parent].children.append(node.id)
        return node.id

    f1 = add("function", "F1(v1, v2)", None)
    c2 = add("condition", "c2", f1)
    add("behavior", "it triggers the external call to op1(v1)", c2)
    c3 = add("condition", "c3", f1)
    add("behavior", "it updates the state variable v3 to v2", c3)

    f2 = add("function", "F2()", None)
    c1 = add("condition", "c1", f2)
    add("behavior", "it triggers the external call to op2(v3)", c1)
    return forest


TOY_GLOBALS = frozenset({"v1", "v2", "v3"})


class ScriptedTransport:
    """Offline stand-in for a model endpoint, keyed on prompt content."""

    def __init__(self, params, probe_rows: dict, stage1_general: str | None = None):
        self.params = params
        self.probe_rows = probe_rows
        self.stage1_general = (
            stage1_general
            or "contract summary: Moves funds through guarded external calls."
        )
        self.calls = 0

    def query(self, prompt: str, attempt: int = 0) -> str:
        self.calls += 1
        if "Provide your 4 best guesses" in prompt:
            return ranked_text(self.probe_rows[self._probe_kind(prompt)])
        if "contract summary:" in prompt:
            return self.stage1_general
        return (
            "purpose: handles one step of the flow.\n"
            "suspicious: Yes\n"
            "reason: execution is gated on a hardcoded origin hash."
        )

    @staticmethod
    def _probe_kind(prompt: str) -> str:
        general = "=== Contract-Level Information ===" in prompt
        side = "g" if general else "s"
        if prompt.rstrip().endswith("(A) adversarial."):
            return f"{side}_mislead_adv"
        if prompt.rstrip().endswith("(D) benign."):
            return f"{side}_mislead_be"
        return f"{side}_normal"


def make_bundle_rows():
    """Minimal bundle that satisfies both prompt context variants."""
    from fundflow.indicators import Indicators
    from fundflow.prompts import AnalysisBundle, FunctionSummary

    return AnalysisBundle(
        contract_summary="Moves funds through guarded external calls.",
        functions=[FunctionSummary("f", "forwards funds", True, "gated on origin")],
        unknown_functions=[],
        indicators=Indicators(
            external_call_count=1,
            external_call_ratio=1 / 3,
            unknown_fn_count=1,
            unknown_fn_ratio=0.5,
            bot_fn_count=0,
            bot_fn_ratio=0.0,
            transfers_in_unknown_fns=False,
        ),
        paths=["f:param1 --[]--> transfer"],
    )


FIXTURE_TEXT = """\
function unknownfffcf3a1(param1):
it is required that (0x268d...4080 == sha3(tx.origin))
  it is required that the 1st external call succeeds
    it triggers the external call to stor_5.flashLoan(param1)
function withdrawAll(param1):
it updates the state variable stor_3 to param1
it transfers stor_3 wei to caller
"""


@pytest.fixture
def fixture_text() -> str:
    return FIXTURE_TEXT

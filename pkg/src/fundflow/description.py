"""Semi-structured contract descriptions and the function-level chunker.

A contract description is an ordered list of function chunks, each holding
the sentences of that function's natural-language description together with
an integer nesting depth. Two input encodings are supported: a canonical
JSON document and a flat-text form where depth is carried by 2-space
indentation.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

from .errors import InvalidDescription, NoFunctionsFound

INDENT_WIDTH = 2

_HEADER_RE = re.compile(r"^function\s+([A-Za-z_]\w*)\s*\(([^)]*)\)\s*:\s*$")


@dataclass(frozen=True)
class Sentence:
    text: str
    depth: int


@dataclass(frozen=True)
class FunctionChunk:
    """One function's description: signature plus ordered, depth-tagged sentences."""

    signature: str
    sentences: tuple[Sentence, ...]

    @property
    def name(self) -> str:
        return self.signature.split("(", 1)[0]

    @property
    def parameters(self) -> tuple[str, ...]:
        inner = self.signature.split("(", 1)[1].rsplit(")", 1)[0]
        return tuple(p.strip() for p in inner.split(",") if p.strip())


@dataclass
class ContractDescription:
    """A contract id plus its per-function chunks.

    ``ignored_lines`` counts flat-text lines discarded before the first
    function header; it is parser metadata and excluded from equality.
    """

    contract_id: str
    functions: list[FunctionChunk]
    ignored_lines: int = field(default=0, compare=False)

    def function_names(self) -> list[str]:
        return [chunk.name for chunk in self.functions]


def _normalize_signature(name: str, params: str) -> str:
    parts = [p.strip() for p in params.split(",") if p.strip()]
    return f"{name}({', '.join(parts)})"


def chunk_flat_text(text: str, contract_id: str = "contract") -> ContractDescription:
    """Split flat text into function chunks, inferring depth from indentation.

    Raises NoFunctionsFound when no line matches ``function <name>(<params>):``.
    """
    if not text.strip():
        raise NoFunctionsFound("empty description text")

    chunks: list[FunctionChunk] = []
    current_sig: str | None = None
    current_sentences: list[Sentence] = []
    ignored = 0

    def flush() -> None:
        nonlocal current_sig, current_sentences
        if current_sig is not None:
            chunks.append(FunctionChunk(current_sig, tuple(current_sentences)))
        current_sig = None
        current_sentences = []

    for line in text.splitlines():
        if not line.strip():
            continue
        header = _HEADER_RE.match(line.strip())
        if header:
            flush()
            current_sig = _normalize_signature(header.group(1), header.group(2))
            continue
        if current_sig is None:
            ignored += 1
            continue
        stripped = line.lstrip(" ")
        depth = (len(line) - len(stripped)) // INDENT_WIDTH
        current_sentences.append(Sentence(stripped.rstrip(), depth))
    flush()

    if not chunks:
        raise NoFunctionsFound("no 'function <name>(<params>):' header line found")

    seen: set[str] = set()
    for chunk in chunks:
        if chunk.signature in seen:
            raise InvalidDescription(f"duplicate function signature {chunk.signature!r}")
        seen.add(chunk.signature)

    return ContractDescription(contract_id, chunks, ignored_lines=ignored)


def render_flat_text(desc: ContractDescription) -> str:
    """Render a description back to the flat-text encoding."""
    lines: list[str] = []
    for chunk in desc.functions:
        lines.append(f"function {chunk.signature}:")
        for sentence in chunk.sentences:
            lines.append(" " * (INDENT_WIDTH * sentence.depth) + sentence.text)
    return "\n".join(lines) + "\n"


def _require_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise InvalidDescription(f"unknown key(s) {sorted(unknown)} in {where}")


def description_from_json(data: str | dict) -> ContractDescription:
    """Parse the canonical JSON input; unknown keys are rejected."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise InvalidDescription(f"not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise InvalidDescription("top-level value must be an object")
    _require_keys(data, {"contract", "functions"}, "document")
    contract = data.get("contract")
    if not isinstance(contract, str) or not contract:
        raise InvalidDescription("'contract' must be a non-empty string")
    raw_functions = data.get("functions")
    if not isinstance(raw_functions, list):
        raise InvalidDescription("'functions' must be a list")

    chunks: list[FunctionChunk] = []
    seen: set[str] = set()
    for i, fn in enumerate(raw_functions):
        if not isinstance(fn, dict):
            raise InvalidDescription(f"functions[{i}] must be an object")
        _require_keys(fn, {"signature", "sentences"}, f"functions[{i}]")
        sig = fn.get("signature")
        if not isinstance(sig, str) or "(" not in sig or not sig.endswith(")"):
            raise InvalidDescription(f"functions[{i}].signature must look like 'name(params)'")
        sentences = []
        for j, raw in enumerate(fn.get("sentences", [])):
            if not isinstance(raw, dict):
                raise InvalidDescription(f"functions[{i}].sentences[{j}] must be an object")
            _require_keys(raw, {"text", "depth"}, f"functions[{i}].sentences[{j}]")
            text = raw.get("text")
            depth = raw.get("depth")
            if not isinstance(text, str) or not text:
                raise InvalidDescription(f"functions[{i}].sentences[{j}].text must be a non-empty string")
            if not isinstance(depth, int) or isinstance(depth, bool) or depth < 0:
                raise InvalidDescription(f"functions[{i}].sentences[{j}].depth must be a nonnegative integer")
            sentences.append(Sentence(text, depth))
        name = sig.split("(", 1)[0]
        params = sig.split("(", 1)[1].rsplit(")", 1)[0]
        sig = _normalize_signature(name, params)
        if sig in seen:
            raise InvalidDescription(f"duplicate function signature {sig!r}")
        seen.add(sig)
        chunks.append(FunctionChunk(sig, tuple(sentences)))

    return ContractDescription(contract, chunks)


def description_to_json(desc: ContractDescription) -> dict:
    return {
        "contract": desc.contract_id,
        "functions": [
            {
                "signature": chunk.signature,
                "sentences": [{"text": s.text, "depth": s.depth} for s in chunk.sentences],
            }
            for chunk in desc.functions
        ],
    }


def load_description(path: str) -> ContractDescription:
    """Load a description from a file, dispatching on a JSON-vs-text sniff."""
    with open(path, encoding="utf-8") as fh:
        raw = fh.read()
    if raw.lstrip().startswith("{"):
        return description_from_json(raw)
    from pathlib import Path

    return chunk_flat_text(raw, contract_id=Path(path).stem)

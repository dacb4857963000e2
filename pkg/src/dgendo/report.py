"""Report documents: a command name, its inputs, an overall verdict and nested
result data, emitted as aligned text or as canonical JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass, field as dc_field

REPORT_FORMAT = "dgendo-report"
REPORT_VERSION = 1


@dataclass
class Report:
    command: str = ""
    inputs: dict = dc_field(default_factory=dict)
    verdict: bool | None = None  # None: informational, no pass/fail claim
    data: dict = dc_field(default_factory=dict)

    @property
    def is_empty(self) -> bool:
        return not (self.command or self.inputs or self.data) and self.verdict is None

    def as_dict(self) -> dict:
        out = {"format": REPORT_FORMAT, "version": REPORT_VERSION}
        if self.is_empty:
            return out
        out.update(command=self.command, inputs=plain(self.inputs),
                   verdict=_verdict_word(self.verdict), data=plain(self.data))
        return out


def _verdict_word(v):
    return None if v is None else ("pass" if v else "fail")


def plain(x):
    """JSON-ready copy: string keys, tuples as lists, numpy/gmpy scalars as ints or strings."""
    if hasattr(x, "as_dict"):
        return plain(x.as_dict())
    if isinstance(x, dict):
        return {str(k): plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [plain(v) for v in x]
    if isinstance(x, bool) or x is None or isinstance(x, str):
        return x
    if isinstance(x, int):
        return int(x)
    if isinstance(x, float):
        return x
    tname = type(x).__name__
    if tname in ("mpq", "mpz") or hasattr(x, "numerator"):
        num, den = int(x.numerator), int(x.denominator)
        return num if den == 1 else f"{num}/{den}"
    if hasattr(x, "item"):
        return plain(x.item())
    return str(x)


def emit_structured(rep: Report) -> str:
    return json.dumps(rep.as_dict(), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def parse_structured(text: str) -> dict:
    return json.loads(text)


def emit_text(rep: Report) -> str:
    lines = [f"{REPORT_FORMAT} v{REPORT_VERSION}"]
    if rep.is_empty:
        return lines[0] + "\n"
    lines.append(f"command: {rep.command}")
    for k, v in sorted(plain(rep.inputs).items()):
        lines.append(f"input {k}: {_inline(v)}")
    lines.append(f"verdict: {_verdict_word(rep.verdict) or 'n/a'}")
    _text_block(plain(rep.data), 0, lines)
    return "\n".join(lines) + "\n"


def _inline(v) -> str:
    if isinstance(v, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_inline(v[k])}" for k in sorted(v, key=_sort_key)) + "}"
    if isinstance(v, list):
        return "[" + ", ".join(_inline(x) for x in v) + "]"
    if isinstance(v, str):
        return json.dumps(v) if v == "" or v != v.strip() else v
    if isinstance(v, bool):
        return "true" if v else "false"
    return "null" if v is None else str(v)


def _is_leaf_table(v) -> bool:
    return isinstance(v, dict) and all(not isinstance(x, (dict, list)) for x in v.values())


def _text_block(d: dict, depth: int, out: list) -> None:
    pad = "  " * depth
    for k in sorted(d, key=_sort_key):
        v = d[k]
        if isinstance(v, dict) and v and not (_is_leaf_table(v) and len(v) <= 12):
            out.append(f"{pad}{k}:")
            _text_block(v, depth + 1, out)
        else:
            out.append(f"{pad}{k}: {_inline(v)}")


def _sort_key(k: str):
    try:
        return (0, int(k), "")
    except ValueError:
        return (1, 0, k)


def emit(rep: Report, fmt: str = "text") -> str:
    if fmt == "structured":
        return emit_structured(rep)
    if fmt == "text":
        return emit_text(rep)
    raise ValueError(f"unknown report format {fmt!r}")

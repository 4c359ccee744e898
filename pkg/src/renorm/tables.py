"""Deterministic CSV/JSON emitters.

Numbers are written with 17 significant digits and a '.' decimal
separator, enough to round-trip doubles exactly: re-reading an emitted
file and emitting it again reproduces it byte for byte.
"""

from __future__ import annotations

import json
from pathlib import Path

__all__ = ["format_value", "parse_token", "write_csv", "read_csv", "write_json", "read_json"]


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        if v == 0.0:
            return "0"  # fold away the sign of a negative zero
        return format(v, ".17g")
    return str(v)


def parse_token(tok: str):
    if tok == "true":
        return True
    if tok == "false":
        return False
    try:
        return int(tok)
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return tok


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    for row in rows:
        cells = [format_value(v) for v in row]
        if any("," in c or "\n" in c for c in cells):
            raise ValueError("table cells must not contain separators")
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")


def read_csv(path):
    text = Path(path).read_text(encoding="utf-8")
    lines = [ln for ln in text.split("\n") if ln != ""]
    header = lines[0].split(",")
    rows = [[parse_token(tok) for tok in ln.split(",")] for ln in lines[1:]]
    return header, rows


def write_json(path, obj) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(
        json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8", newline="\n"
    )


def read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))

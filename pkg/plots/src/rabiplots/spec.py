"""Figure description files: a small JSON schema selecting inputs and style."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from .readers import SchemaError

# visual conventions: S1 circled and dashed, S2 squared and solid,
# plus-branch blue, minus-branch red
MARKERS = {"S1": "o", "S2": "s", "ambiguous": "x"}
BRANCH_COLORS = {"plus": "tab:blue", "minus": "tab:red"}


@dataclass
class FigureSpec:
    """Parsed and path-resolved figure description.

    kind "spectrum": inputs sweep, baselines, exceptional (optional).
    kind "curves":   panels, each with 'all' and/or 's1' contour CSVs.
    """

    kind: str
    output: Path
    inputs: dict = field(default_factory=dict)
    panels: list = field(default_factory=list)
    axes: dict = field(default_factory=dict)
    layout: dict = field(default_factory=dict)
    title: str | None = None


def load_figure_spec(path) -> FigureSpec:
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"figure spec missing: {path}")
    try:
        doc = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{path}: not valid JSON ({exc})")
    kind = doc.get("kind")
    if kind not in ("spectrum", "curves"):
        raise SchemaError(f"{path}: kind must be 'spectrum' or 'curves', "
                          f"got {kind!r}")
    if "output" not in doc:
        raise SchemaError(f"{path}: missing 'output'")
    base = path.parent

    def resolve(p):
        q = Path(p)
        return q if q.is_absolute() else base / q

    fs = FigureSpec(kind=kind, output=resolve(doc["output"]),
                    axes=doc.get("axes", {}), layout=doc.get("layout", {}),
                    title=doc.get("title"))
    if kind == "spectrum":
        inputs = doc.get("inputs", {})
        for key in ("sweep", "baselines"):
            if key not in inputs:
                raise SchemaError(f"{path}: spectrum figure needs "
                                  f"inputs.{key}")
        fs.inputs = {k: resolve(v) for k, v in inputs.items()}
        for k, v in fs.inputs.items():
            if not Path(v).exists():
                raise SchemaError(f"{path}: inputs.{k} does not exist: {v}")
    else:
        panels = doc.get("panels", [])
        if not panels:
            raise SchemaError(f"{path}: curves figure needs a 'panels' list")
        for i, panel in enumerate(panels):
            if not ("all" in panel or "s1" in panel):
                raise SchemaError(f"{path}: panel {i} needs 'all' or 's1'")
            entry = {"title": panel.get("title")}
            for k in ("all", "s1"):
                if k in panel:
                    paths = panel[k]
                    if isinstance(paths, str):
                        paths = [paths]
                    entry[k] = [resolve(q) for q in paths]
                    for q in entry[k]:
                        if not q.exists():
                            raise SchemaError(f"{path}: panel {i} file "
                                              f"missing: {q}")
            fs.panels.append(entry)
    return fs

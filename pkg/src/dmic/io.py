"""Channel-spec JSON files and region CSV files."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import numpy as np

from .channel import Dmic
from .errors import ChannelSpecError
from .probcore import PROB_TOL
from .regions import RatePoint, RateRegion

SIZE_KEYS = ("nx1", "nx2", "ny1", "ny2")


def _tensor_from_lists(raw, shape) -> np.ndarray:
    out = np.empty(shape)

    def walk(node, idx):
        depth = len(idx)
        if depth == len(shape):
            if isinstance(node, bool) or not isinstance(node, (int, float)):
                raise ChannelSpecError(f"entry at {idx} is not a number: {node!r}", idx)
            if not math.isfinite(node):
                raise ChannelSpecError(f"entry at {idx} is not finite", idx)
            out[idx] = float(node)
            return
        if not isinstance(node, list) or len(node) != shape[depth]:
            got = len(node) if isinstance(node, list) else type(node).__name__
            axis = ("x1", "x2", "y1", "y2")[depth]
            raise ChannelSpecError(
                f"dimension mismatch at {idx}: expected {shape[depth]} entries along {axis}, got {got}", idx
            )
        for i, child in enumerate(node):
            walk(child, idx + (i,))

    walk(raw, ())
    return out


def channel_from_dict(doc: dict) -> Dmic:
    if not isinstance(doc, dict):
        raise ChannelSpecError("channel spec must be a JSON object")
    sizes = []
    for key in SIZE_KEYS:
        v = doc.get(key)
        if isinstance(v, bool) or not isinstance(v, int) or v < 1:
            raise ChannelSpecError(f"{key} must be a positive integer, got {v!r}", key)
        sizes.append(v)
    if "tensor" not in doc:
        raise ChannelSpecError("missing 'tensor'", "tensor")
    t = _tensor_from_lists(doc["tensor"], tuple(sizes))
    neg = np.argwhere(t < 0)
    if len(neg):
        idx = tuple(int(i) for i in neg[0])
        raise ChannelSpecError(f"negative probability {t[idx]!r} at [x1][x2][y1][y2]={list(idx)}", idx)
    sums = t.sum(axis=(2, 3))
    bad = np.argwhere(np.abs(sums - 1.0) > PROB_TOL)
    if len(bad):
        x1, x2 = (int(i) for i in bad[0])
        raise ChannelSpecError(f"row (x1,x2)=({x1},{x2}) sums to {sums[x1, x2]!r}, expected 1", (x1, x2))
    return Dmic(t, name=str(doc.get("name", "")), description=str(doc.get("description", "")))


def parse_channel_spec(path) -> Dmic:
    """Read and validate a channel JSON file; rows are never renormalized."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ChannelSpecError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ChannelSpecError(f"{path}: malformed JSON ({exc.msg} at line {exc.lineno})") from exc
    return channel_from_dict(doc)


def serialize_channel(c: Dmic) -> str:
    """Stable JSON text; one [x1][x2] block per line."""
    head = {"name": c.name, "description": c.description}
    head.update(zip(SIZE_KEYS, (c.nx1, c.nx2, c.ny1, c.ny2)))
    lines = ["{"]
    for k, v in head.items():
        lines.append(f"  {json.dumps(k)}: {json.dumps(v)},")
    lines.append('  "tensor": [')
    for x1 in range(c.nx1):
        lines.append("    [")
        for x2 in range(c.nx2):
            block = json.dumps(c.t[x1, x2].tolist())
            lines.append(f"      {block}" + ("," if x2 < c.nx2 - 1 else ""))
        lines.append("    ]" + ("," if x1 < c.nx1 - 1 else ""))
    lines.append("  ]")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_channel_spec(c: Dmic, path) -> None:
    Path(path).write_text(serialize_channel(c), encoding="utf-8")


def emit_region_csv(region: RateRegion, path) -> None:
    """Write ``r1,r2`` then the hull vertices, counterclockwise from (max r1, 0)."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["r1", "r2"])
        for v in region.vertices:
            w.writerow([repr(float(v.r1)), repr(float(v.r2))])


def read_region_csv(path) -> list[RatePoint]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["r1", "r2"]:
        raise ChannelSpecError(f"{path}: missing r1,r2 header")
    return [RatePoint(float(a), float(b)) for a, b in rows[1:]]

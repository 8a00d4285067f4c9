"""JSON formats for matroids, decomposition trees and MDWC instances."""

from __future__ import annotations

import itertools
import json
from pathlib import Path
from typing import Any, Dict, List, Mapping

from .errors import FormatError
from .matroid import (
    BinaryMatroid,
    CographicMatroid,
    GraphicMatroid,
    GraphRepr,
    Matroid,
    R10Matroid,
    UniformMatroid,
)
from .mdwc import MdwcInstance, Triple, subset_key
from .sums import ChildLink, DecompositionNode, DecompositionTree

MATROID_TYPES = ("binary", "graphic", "cographic", "uniform", "r10")


def load_json(path) -> Any:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON in {path}: {exc.msg} (line {exc.lineno})") from None


def dump_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _get(obj: Mapping, key: str, where: str, kind=None):
    if not isinstance(obj, Mapping):
        raise FormatError("expected an object", where or None)
    field = f"{where}.{key}" if where else key
    if key not in obj:
        raise FormatError("missing field", field)
    val = obj[key]
    if kind is not None and not isinstance(val, kind) or (kind is int and isinstance(val, bool)):
        names = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise FormatError(f"expected {names}, got {type(val).__name__}", field)
    return val


def _labels(val, field: str) -> List[str]:
    if not isinstance(val, list) or not all(isinstance(v, str) for v in val):
        raise FormatError("expected a list of strings", field)
    return list(val)


# ---------------------------------------------------------------------------
# Matroids
# ---------------------------------------------------------------------------


def matroid_from_json(obj: Mapping, where: str = "") -> Matroid:
    kind = _get(obj, "type", where, str)
    try:
        if kind == "binary":
            rows = _get(obj, "rows", where, int)
            cols: Dict[str, int] = {}
            for i, el in enumerate(_get(obj, "elements", where, list)):
                at = f"{where + '.' if where else ''}elements[{i}]"
                label = _get(el, "id", at, str)
                vec = _get(el, "vector", at, str)
                if len(vec) != rows or set(vec) - {"0", "1"}:
                    raise FormatError(f"vector must be {rows} characters of 0/1", f"{at}.vector")
                if label in cols:
                    raise FormatError(f"duplicate element id {label!r}", f"{at}.id")
                cols[label] = sum(1 << j for j, ch in enumerate(vec) if ch == "1")
            return BinaryMatroid(rows, cols)
        if kind in ("graphic", "cographic"):
            vertices = _labels(_get(obj, "vertices", where, list), f"{where}.vertices".lstrip("."))
            edges = {}
            for i, el in enumerate(_get(obj, "edges", where, list)):
                at = f"{where + '.' if where else ''}edges[{i}]"
                label = _get(el, "id", at, str)
                if label in edges:
                    raise FormatError(f"duplicate edge id {label!r}", f"{at}.id")
                edges[label] = (_get(el, "u", at, str), _get(el, "v", at, str))
            g = GraphRepr(tuple(vertices), edges)
            return GraphicMatroid(g) if kind == "graphic" else CographicMatroid(g)
        if kind == "uniform":
            return UniformMatroid(
                _get(obj, "r", where, int), _get(obj, "n", where, int), obj.get("prefix", "e")
            )
        if kind == "r10":
            parallel = obj.get("parallel", {})
            if not isinstance(parallel, Mapping):
                raise FormatError("expected an object", f"{where}.parallel".lstrip("."))
            return R10Matroid(obj.get("prefix", "e"), parallel)
    except ValueError as exc:
        raise FormatError(str(exc), where or None) from None
    raise FormatError(f"unknown matroid type {kind!r} (one of {', '.join(MATROID_TYPES)})", f"{where}.type".lstrip("."))


def matroid_to_json(m: Matroid) -> Dict[str, Any]:
    if isinstance(m, R10Matroid):
        out: Dict[str, Any] = {"type": "r10", "prefix": m.prefix}
        if m.parallel:
            out["parallel"] = dict(sorted(m.parallel.items()))
        return out
    if isinstance(m, (GraphicMatroid, CographicMatroid)):
        return {
            "type": m.kind,
            "vertices": list(m.graph.vertices),
            "edges": [{"id": e, "u": u, "v": v} for e, (u, v) in sorted(m.graph.edges.items())],
        }
    if isinstance(m, UniformMatroid):
        return {"type": "uniform", "r": m.r, "n": m.n, "prefix": m.prefix}
    b = m.to_binary()
    return {
        "type": "binary",
        "rows": b.num_rows,
        "elements": [
            {"id": e, "vector": "".join("1" if (b.columns[e] >> i) & 1 else "0" for i in range(b.num_rows))}
            for e in b.elements
        ],
    }


# ---------------------------------------------------------------------------
# Decomposition trees
# ---------------------------------------------------------------------------


def tree_from_json(obj: Mapping) -> DecompositionTree:
    kind = _get(obj, "type", "", str)
    if kind != "decomposition":
        raise FormatError(f"expected 'decomposition', got {kind!r}", "type")
    root = _get(obj, "root", "", str)
    nodes = {}
    for i, raw in enumerate(_get(obj, "nodes", "", list)):
        at = f"nodes[{i}]"
        nid = _get(raw, "id", at, str)
        if nid in nodes:
            raise FormatError(f"duplicate node id {nid!r}", f"{at}.id")
        parent = raw.get("parent")
        if parent is not None and not isinstance(parent, str):
            raise FormatError("expected a string or null", f"{at}.parent")
        pset = _labels(raw.get("parent_set", []), f"{at}.parent_set")
        children = []
        for j, c in enumerate(raw.get("children", [])):
            cat = f"{at}.children[{j}]"
            children.append(ChildLink(_get(c, "id", cat, str), tuple(_labels(_get(c, "shared", cat, list), f"{cat}.shared"))))
        m = matroid_from_json(_get(raw, "matroid", at, Mapping), f"{at}.matroid")
        nodes[nid] = DecompositionNode(nid, m, parent, tuple(pset), tuple(children))
    if root not in nodes:
        raise FormatError(f"root {root!r} is not among the nodes", "root")
    return DecompositionTree(nodes, root)


def tree_to_json(t: DecompositionTree) -> Dict[str, Any]:
    nodes = []
    for nid in [t.root] + [n for n in t.postorder() if n != t.root][::-1]:
        node = t.nodes[nid]
        nodes.append(
            {
                "id": nid,
                "matroid": matroid_to_json(node.matroid),
                "parent": node.parent,
                "parent_set": list(node.parent_set),
                "children": [{"id": c.id, "shared": list(c.shared)} for c in node.children],
            }
        )
    return {"type": "decomposition", "root": t.root, "nodes": nodes}


# ---------------------------------------------------------------------------
# MDWC instances
# ---------------------------------------------------------------------------


def mdwc_from_json(obj: Mapping) -> MdwcInstance:
    m = matroid_from_json(_get(obj, "matroid", "", Mapping), "matroid")
    F = tuple(_labels(_get(obj, "F", "", list), "F"))
    ell = _get(obj, "ell", "", int)
    triples = []
    for i, raw in enumerate(obj.get("triples", [])):
        at = f"triples[{i}]"
        els = _labels(_get(raw, "T", at, list), f"{at}.T")
        if len(els) != 3 or len(set(els)) != 3:
            raise FormatError("a triple needs three distinct elements", f"{at}.T")
        table = _get(raw, "w", at, Mapping)
        ws = {}
        for size in range(4):
            for combo in itertools.combinations(sorted(els), size):
                key = subset_key(combo)
                if key not in table:
                    raise FormatError(f"missing weight for subset {key!r}", f"{at}.w")
                val = table[key]
                if not isinstance(val, int) or isinstance(val, bool):
                    raise FormatError("weights must be integers", f"{at}.w.{key}")
                ws[frozenset(combo)] = val
        triples.append(Triple(tuple(els), ws))
    weights = _get(obj, "weights", "", Mapping)
    for e, w in weights.items():
        if not isinstance(w, int) or isinstance(w, bool):
            raise FormatError("weights must be integers", f"weights.{e}")
    return MdwcInstance(m, F, tuple(triples), dict(weights), ell)


def mdwc_to_json(inst: MdwcInstance) -> Dict[str, Any]:
    return {
        "matroid": matroid_to_json(inst.matroid),
        "F": list(inst.F),
        "ell": inst.ell,
        "triples": [
            {"T": list(t.elements), "w": {subset_key(k): v for k, v in t.weights.items()}}
            for t in inst.triples
        ],
        "weights": dict(sorted(inst.weights.items())),
    }


def read_text(path) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None

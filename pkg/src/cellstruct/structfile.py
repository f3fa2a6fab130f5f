"""Canonical JSON structure files and DOT export.

A structure file holds one inverse sequence (``levels`` + ``bondings``), an
optional second sequence under ``target`` for fixtures that bundle maps, and
an optional ``maps`` table of named map descriptions.  Canonical form sorts
every cell list, relation pair list, and object key, stores relations fully
closed, omits discrete minimal-open tables, indents by two spaces, and ends
with a newline; saving a loaded canonical file is therefore byte-identical.

Thread-valued tables use keys of the form ``"id1|id2|..."``; cell ids must
not contain the separator.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

from .common import StructureError
from .graphs import Cell, CellId, CellularGraph, FiniteTopology, close_relation
from .maps import DTCellMap, GCellMap, LevelMapFamily, QuotientMap, WeakGCellMap
from .sequences import BondingFamily, InverseSequence, QuotientSpace, Thread

FORMAT_VERSION = "1"
THREAD_SEP = "|"
MAP_KINDS = ("weak", "gcell", "family", "dt", "quotient")


@dataclass
class StructureDoc:
    """A parsed structure file: source sequence, optional target, raw maps."""

    source: InverseSequence
    target: Optional[InverseSequence] = None
    maps: Mapping[str, Mapping[str, Any]] = field(default_factory=dict)
    notices: tuple[str, ...] = ()

    @property
    def effective_target(self) -> InverseSequence:
        return self.target if self.target is not None else self.source


# ---------------------------------------------------------------------------
# loading


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise StructureError(message)


def _check_id(cid: Any) -> CellId:
    _require(isinstance(cid, str) and cid != "", f"cell ids must be non-empty strings, got {cid!r}")
    _require(THREAD_SEP not in cid, f"cell id {cid!r} contains the reserved separator {THREAD_SEP!r}")
    return cid


def _sequence_from_json(obj: Mapping[str, Any], notices: list[str], label: str) -> InverseSequence:
    _require(isinstance(obj, dict), f"{label}: expected an object")
    levels_json = obj.get("levels")
    _require(isinstance(levels_json, list) and levels_json, f"{label}: 'levels' must be a non-empty list")
    graphs = []
    for n, lv in enumerate(levels_json, start=1):
        _require(isinstance(lv, dict), f"{label}: level {n} must be an object")
        cells = [_check_id(c) for c in lv.get("cells", [])]
        _require(len(set(cells)) == len(cells), f"{label}: level {n} has duplicate cell ids")
        cellset = frozenset(cells)
        raw_pairs = lv.get("relation", [])
        pairs = []
        for p in raw_pairs:
            _require(isinstance(p, list) and len(p) == 2, f"{label}: level {n} relation entries must be pairs")
            pairs.append((_check_id(p[0]), _check_id(p[1])))
        relation = close_relation(pairs, cellset, level=n)
        added = len(relation.pairs) - len(set(pairs))
        if added > 0 and raw_pairs:
            notices.append(
                f"{label}: level {n} relation was closed (added {added} pairs)"
            )
        min_open = lv.get("min_open")
        if min_open is None:
            topology = FiniteTopology.discrete(cellset)
        else:
            _require(isinstance(min_open, dict), f"{label}: level {n} min_open must be an object")
            table = {
                _check_id(k): frozenset(_check_id(v) for v in vs)
                for k, vs in min_open.items()
            }
            topology = FiniteTopology(table)
        graphs.append(CellularGraph(level=n, cells=cellset, relation=relation, topology=topology))
    bondings_json = obj.get("bondings", [])
    _require(isinstance(bondings_json, list), f"{label}: 'bondings' must be a list")
    by_from = {}
    for b in bondings_json:
        _require(isinstance(b, dict) and "from_level" in b and "table" in b,
                 f"{label}: bondings need 'from_level' and 'table'")
        by_from[b["from_level"]] = {
            _check_id(k): _check_id(v) for k, v in b["table"].items()
        }
    maps = []
    for n in range(2, len(graphs) + 1):
        _require(n in by_from, f"{label}: missing bonding table from level {n}")
        maps.append(by_from[n])
    return InverseSequence(levels=tuple(graphs), bonding=BondingFamily(tuple(maps)))


def loads(text: str) -> StructureDoc:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StructureError(f"invalid JSON: {exc}") from exc
    _require(isinstance(obj, dict), "top level must be an object")
    version = obj.get("version")
    _require(version == FORMAT_VERSION, f"unsupported format version {version!r}")
    notices: list[str] = []
    source = _sequence_from_json(obj, notices, "source")
    target = None
    if obj.get("target") is not None:
        target = _sequence_from_json(obj["target"], notices, "target")
    maps = obj.get("maps", {})
    _require(isinstance(maps, dict), "'maps' must be an object")
    for name, m in maps.items():
        _require(isinstance(m, dict) and m.get("kind") in MAP_KINDS,
                 f"map {name!r} must declare a kind from {MAP_KINDS}")
    return StructureDoc(source=source, target=target, maps=maps, notices=tuple(notices))


def load(path: str) -> StructureDoc:
    with open(path, "r", encoding="utf-8") as fh:
        return loads(fh.read())


# ---------------------------------------------------------------------------
# saving


def _sequence_to_json(s: InverseSequence) -> dict:
    levels = []
    for n in range(1, s.depth + 1):
        g = s.level(n)
        entry: dict[str, Any] = {
            "cells": sorted(g.cells),
            "relation": sorted([a, b] for (a, b) in g.relation.pairs),
        }
        discrete = all(g.topology.min_open[u] == frozenset([u]) for u in g.cells)
        if not discrete:
            entry["min_open"] = {u: sorted(g.topology.min_open[u]) for u in sorted(g.cells)}
        levels.append(entry)
    bondings = [
        {"from_level": n + 1, "table": {u: s.step(n)[u] for u in sorted(s.level(n + 1).cells)}}
        for n in range(1, s.depth)
    ]
    return {"levels": levels, "bondings": bondings}


def dumps(doc: StructureDoc) -> str:
    obj: dict[str, Any] = {"version": FORMAT_VERSION}
    obj.update(_sequence_to_json(doc.source))
    if doc.target is not None:
        obj["target"] = _sequence_to_json(doc.target)
    if doc.maps:
        obj["maps"] = {name: doc.maps[name] for name in sorted(doc.maps)}
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def save(doc: StructureDoc, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


# ---------------------------------------------------------------------------
# map resolution


def thread_key(t: Thread) -> str:
    return THREAD_SEP.join(t.coords)


def parse_thread(key: str, depth: int) -> Thread:
    coords = tuple(key.split(THREAD_SEP))
    if len(coords) != depth:
        raise StructureError(f"thread key {key!r} has {len(coords)} coords, expected {depth}")
    return Thread(coords)


def resolve_map(doc: StructureDoc, name: str, depth: int):
    """Materialize the named map table against the document's sequences."""
    if name not in doc.maps:
        raise StructureError(f"no map named {name!r} in this file")
    m = doc.maps[name]
    kind = m["kind"]
    if kind == "weak":
        file_depth = m.get("depth", depth)
        if file_depth != depth:
            raise StructureError(f"map {name!r} is declared at depth {file_depth}, not {depth}")
        table = {
            parse_thread(k, depth): parse_thread(v, depth) for k, v in m["table"].items()
        }
        return WeakGCellMap(depth=depth, table=table)
    if kind == "gcell":
        table: dict[Cell, frozenset[Cell]] = {}
        for lvl, cells in m["table"].items():
            for cid, by_level in cells.items():
                image = frozenset(
                    Cell(int(k), v) for k, vs in by_level.items() for v in vs
                )
                table[Cell(int(lvl), cid)] = image
        return GCellMap(table=table)
    if kind == "family":
        tables = tuple(
            m["tables"][str(n)] for n in range(1, doc.source.depth + 1)
        )
        return LevelMapFamily(tables=tables)
    if kind == "dt":
        return DTCellMap(
            level_profile={int(k): int(v) for k, v in m["level_profile"].items()},
            tables={int(k): dict(v) for k, v in m["tables"].items()},
        )
    if kind == "quotient":
        raise StructureError(
            f"map {name!r} is a class map; resolve it with resolve_quotient_map"
        )
    raise StructureError(f"unknown map kind {kind!r}")


def resolve_quotient_map(
    doc: StructureDoc, name: str, source_q: QuotientSpace, target_q: QuotientSpace
) -> QuotientMap:
    """Resolve a representative-keyed class map against computed quotients."""
    if name not in doc.maps:
        raise StructureError(f"no map named {name!r} in this file")
    m = doc.maps[name]
    if m["kind"] != "quotient":
        raise StructureError(f"map {name!r} has kind {m['kind']!r}, expected 'quotient'")
    depth = source_q.depth
    file_depth = m.get("depth", depth)
    if file_depth != depth:
        raise StructureError(f"map {name!r} is declared at depth {file_depth}, not {depth}")
    table: dict[int, int] = {}
    for k, v in m["table"].items():
        src = source_q.class_index(parse_thread(k, depth))
        dst = target_q.class_index(parse_thread(v, depth))
        if table.get(src, dst) != dst:
            raise StructureError(
                f"map {name!r} assigns class of {k!r} inconsistently"
            )
        table[src] = dst
    missing = set(range(len(source_q.classes))) - set(table)
    if missing:
        raise StructureError(
            f"map {name!r} is not total on source classes: missing {sorted(missing)}"
        )
    return QuotientMap(depth=depth, table=table)


# ---------------------------------------------------------------------------
# map serialization


def weak_to_json(table: Mapping[Thread, Thread], depth: int) -> dict:
    return {
        "kind": "weak",
        "depth": depth,
        "table": {thread_key(t): thread_key(u) for t, u in sorted(table.items())},
    }


def quotient_to_json(table: Mapping[Thread, Thread], depth: int) -> dict:
    """Class map given by representative thread pairs; resolved on load."""
    return {
        "kind": "quotient",
        "depth": depth,
        "table": {thread_key(t): thread_key(u) for t, u in sorted(table.items())},
    }


def family_to_json(tables) -> dict:
    return {
        "kind": "family",
        "tables": {
            str(n): {u: t[u] for u in sorted(t)} for n, t in enumerate(tables, start=1)
        },
    }


def gcell_to_json(g: GCellMap) -> dict:
    table: dict[str, dict] = {}
    for x in sorted(g.table):
        by_level: dict[str, list] = {}
        for c in sorted(g.table[x]):
            by_level.setdefault(str(c.level), []).append(c.id)
        table.setdefault(str(x.level), {})[x.id] = {
            k: sorted(v) for k, v in sorted(by_level.items())
        }
    return {"kind": "gcell", "table": table}


def dt_to_json(d: DTCellMap) -> dict:
    return {
        "kind": "dt",
        "level_profile": {str(k): v for k, v in sorted(d.level_profile.items())},
        "tables": {
            str(n): {u: t[u] for u in sorted(t)} for n, t in sorted(d.tables.items())
        },
    }


# ---------------------------------------------------------------------------
# DOT export


def _dot_nodes(s: InverseSequence, prefix: str, lines: list[str]) -> None:
    for n in range(1, s.depth + 1):
        g = s.level(n)
        lines.append(f'  subgraph "cluster_{prefix}{n}" {{')
        lines.append(f'    label="{prefix} level {n}";')
        for u in g.sorted_cells():
            lines.append(f'    "{prefix}{n}:{u}" [label="{u}"];')
        lines.append("  }")
    for n in range(1, s.depth + 1):
        g = s.level(n)
        for (a, b) in sorted(g.relation.pairs):
            if a < b:
                lines.append(f'  "{prefix}{n}:{a}" -> "{prefix}{n}:{b}" [dir=none];')
    for n in range(1, s.depth):
        for u in sorted(s.level(n + 1).cells):
            lines.append(
                f'  "{prefix}{n + 1}:{u}" -> "{prefix}{n}:{s.step(n)[u]}" [color=gray];'
            )


def to_dot(doc: StructureDoc) -> str:
    """Render levels, relation edges, bonding arrows, and cell-level map arrows.

    Set-valued and level-graded map tables are drawn with dashed arrows;
    thread-level tables have no cell-level geometry and are skipped with a
    comment.
    """
    lines = ["digraph cellstruct {", "  rankdir=BT;"]
    _dot_nodes(doc.source, "G", lines)
    target_prefix = "G"
    if doc.target is not None:
        _dot_nodes(doc.target, "H", lines)
        target_prefix = "H"
    for name in sorted(doc.maps):
        m = doc.maps[name]
        kind = m["kind"]
        if kind == "gcell":
            for lvl in sorted(m["table"], key=int):
                for cid in sorted(m["table"][lvl]):
                    for k in sorted(m["table"][lvl][cid], key=int):
                        for v in sorted(m["table"][lvl][cid][k]):
                            lines.append(
                                f'  "G{lvl}:{cid}" -> "{target_prefix}{k}:{v}"'
                                f' [style=dashed, label="{name}"];'
                            )
        elif kind == "family":
            for n in sorted(m["tables"], key=int):
                for u, v in sorted(m["tables"][n].items()):
                    lines.append(
                        f'  "G{n}:{u}" -> "{target_prefix}{n}:{v}"'
                        f' [style=dashed, label="{name}"];'
                    )
        elif kind == "dt":
            for n in sorted(m["tables"], key=int):
                k = m["level_profile"][str(n)] if str(n) in m["level_profile"] else m["level_profile"][n]
                for u, v in sorted(m["tables"][n].items()):
                    lines.append(
                        f'  "G{n}:{u}" -> "{target_prefix}{k}:{v}"'
                        f' [style=dashed, label="{name}"];'
                    )
        else:
            lines.append(f"  // map {name} ({kind}) acts on threads; not drawn")
    lines.append("}")
    return "\n".join(lines) + "\n"

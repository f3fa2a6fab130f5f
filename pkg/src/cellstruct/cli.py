"""Command-line front end.

    cellstruct check  FILE [--depth D] [--strict-equivalence] [--require-cell-structure] [--json] [--out PATH]
    cellstruct map    ACTION FILE [--depth D] [--map NAME] [--json] [--out PATH]
    cellstruct export FILE --format {dot,json} [--out PATH]
    cellstruct gen    NAME [--levels L] [--m M] [--topology {discrete,khalimsky}] [--out PATH]

Exit codes: 0 success, 1 check failure, 2 usage or parse error.  Reports are
deterministic for identical inputs and every depth-dependent verdict is
stamped with the depth it was computed at.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from typing import Any, Mapping, Optional

from .common import CheckResult, HypothesisFailure, StructureError
from .graphs import Cell
from .maps import (
    GCellMap,
    LevelMapFamily,
    WeakGCellMap,
    check_gcell_map,
    check_semicontinuity,
    check_singleton_continuity,
    check_weak_gcell,
    construct_gcell_from_quotient_map,
    family_to_gcell,
    gcell_induce_weak,
    lift_quotient_map,
)
from .sequences import (
    InverseSequence,
    Thread,
    check_cell_structure,
    enumerate_threads,
    quotient,
    thread_relation,
    validate_sequence,
)
from . import generators as gen
from . import structfile as sf

MAP_ACTIONS = (
    "check-weak",
    "check-gcell",
    "induce",
    "lift",
    "construct",
    "semicontinuity",
    "singleton",
)

GEN_NAMES = (
    "dyadic_interval",
    "cantor",
    "unit_interval",
    "spiked_interval",
    "sine_curve",
    "khalimsky_interval",
    "full_image",
    "jump_map",
    "sine_lift",
)


def jsonable(obj: Any) -> Any:
    """Plain-JSON rendering of report objects, threads, and cells."""
    if isinstance(obj, CheckResult):
        return {"ok": obj.ok, "witness": jsonable(obj.witness)}
    if isinstance(obj, Thread):
        return sf.thread_key(obj)
    if isinstance(obj, Cell):
        return f"{obj.id}@{obj.level}"
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if isinstance(obj, Mapping):
        return {str(jsonable(k)): jsonable(v) for k, v in sorted(obj.items(), key=lambda kv: str(kv[0]))}
    if isinstance(obj, (frozenset, set)):
        return sorted((jsonable(x) for x in obj), key=str)
    if isinstance(obj, (list, tuple)):
        return [jsonable(x) for x in obj]
    return obj


def _verdict(result: CheckResult) -> str:
    if result.ok:
        return "PASS"
    return f"FAIL (witness: {jsonable(result.witness)})"


def _emit(report: dict, human_lines: list[str], args) -> None:
    if getattr(args, "json", False):
        print(json.dumps(jsonable(report), indent=2, sort_keys=True))
    else:
        for line in human_lines:
            print(line)
    out = getattr(args, "out", None)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            json.dump(jsonable(report), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _load(path: str) -> sf.StructureDoc:
    doc = sf.load(path)
    for notice in doc.notices:
        print(f"notice: {notice}", file=sys.stderr)
    return doc


def _depth(args, seq: InverseSequence) -> int:
    depth = args.depth
    if not 1 <= depth <= seq.depth:
        raise StructureError(f"depth {depth} out of range 1..{seq.depth}")
    return depth


def cmd_check(args) -> int:
    doc = _load(args.file)
    s = doc.source
    depth = _depth(args, s)
    validation = validate_sequence(s)
    axioms = check_cell_structure(s, depth)
    rel = thread_relation(s, depth)
    q = quotient(s, depth)
    report = {
        "command": "check",
        "depth": depth,
        "validate": validation,
        "cell_structure": {
            "per_thread_ok": axioms.per_thread_ok,
            "per_thread_witness": axioms.per_thread_witness,
            "uniform": axioms.uniform,
            "uniform_ok": axioms.uniform_ok,
            "three_ball": axioms.three_ball,
            "three_ball_ok": axioms.three_ball_ok,
            "finiteness": axioms.finiteness,
        },
        "thread_relation": {
            "threads": len(rel.threads),
            "transitive": rel.transitive,
            "witness": rel.witness,
        },
        "quotient": {"classes": len(q.classes)},
    }
    lines = [
        f"structure: {s.depth} levels; checks at depth {depth}",
        f"validate: {'PASS' if validation.ok else 'FAIL'}",
    ]
    for e in validation.entries:
        if not e.ok:
            lines.append(
                f"  bonding {e.upper_level}->{e.upper_level - 1}: "
                f"edges {_verdict(e.edges)}, continuity {_verdict(e.continuity)}"
            )
    lines.append(
        f"cell-structure axioms (at depth {depth}): per-thread 2-ball "
        f"{'PASS' if axioms.per_thread_ok else 'not found <= depth (witness: %s)' % jsonable(axioms.per_thread_witness)}"
    )
    lines.append(f"  uniform 2-ball: {jsonable(axioms.uniform)}")
    lines.append(f"  uniform 3-ball: {jsonable(axioms.three_ball)}")
    lines.append(
        f"thread relation (at depth {depth}): {len(rel.threads)} threads; "
        f"transitivity {'PASS' if rel.transitive else 'FAIL (witness: %s)' % jsonable(rel.witness)}"
    )
    if not rel.transitive:
        lines.append(
            "  note: the depth-%d relation is evidence about the limit relation, "
            "and the quotient below uses its transitive closure" % depth
        )
    lines.append(f"quotient (at depth {depth}): {len(q.classes)} classes")
    _emit(report, lines, args)
    if not validation.ok:
        return 1
    if args.require_cell_structure and not axioms.uniform_ok:
        return 1
    if args.strict_equivalence and not rel.transitive:
        return 1
    return 0


def _pick_map(doc: sf.StructureDoc, args, kinds: tuple[str, ...]) -> str:
    if args.map:
        if args.map not in doc.maps:
            raise StructureError(f"no map named {args.map!r} in this file")
        if doc.maps[args.map]["kind"] not in kinds:
            raise StructureError(
                f"map {args.map!r} has kind {doc.maps[args.map]['kind']!r}; "
                f"this action needs one of {kinds}"
            )
        return args.map
    candidates = [n for n in sorted(doc.maps) if doc.maps[n]["kind"] in kinds]
    if len(candidates) != 1:
        raise StructureError(
            f"need --map NAME: file has {len(candidates)} maps of kind {kinds}"
        )
    return candidates[0]


def cmd_map(args) -> int:
    doc = _load(args.file)
    source, target = doc.source, doc.effective_target
    depth = _depth(args, source)
    if args.action == "check-weak":
        name = _pick_map(doc, args, ("weak",))
        f = sf.resolve_map(doc, name, depth)
        verdict = check_weak_gcell(
            f, thread_relation(source, depth), thread_relation(target, depth)
        )
        _emit(
            {"command": "map/check-weak", "map": name, "depth": depth, "verdict": verdict},
            [f"weak condition for {name!r} (at depth {depth}): {_verdict(verdict)}"],
            args,
        )
        return 0 if verdict.ok else 1
    if args.action in ("check-gcell", "induce", "semicontinuity", "singleton"):
        name = _pick_map(doc, args, ("gcell", "family"))
        resolved = sf.resolve_map(doc, name, depth)
        if isinstance(resolved, LevelMapFamily):
            f = family_to_gcell(resolved, source, target)
        else:
            f = resolved
        threads = enumerate_threads(source, depth)
        if args.action == "check-gcell":
            rep = check_gcell_map(f, source, target, threads)
            lines = [f"set-valued map conditions for {name!r} (at depth {depth}):"]
            for i, c in enumerate(
                (rep.condition1, rep.condition2, rep.condition3, rep.condition4), 1
            ):
                lines.append(f"  condition ({i}): {_verdict(c)}")
            _emit({"command": "map/check-gcell", "map": name, "depth": depth, "report": rep}, lines, args)
            return 0 if rep.ok else 1
        if args.action == "induce":
            induction = gcell_induce_weak(f, source, target, threads)
            verdict = check_weak_gcell(
                induction.map, thread_relation(source, depth), thread_relation(target, depth)
            )
            lines = [f"induced thread map from {name!r} (at depth {depth}):"]
            for t in sorted(induction.trace):
                tr = induction.trace[t]
                lines.append(
                    f"  {sf.thread_key(t)} -> {sf.thread_key(induction.map.apply(t))}"
                    f"   depth picks {tr.alphas}, slices {jsonable(tr.slices)}"
                )
            lines.append(f"  weak condition on the output: {_verdict(verdict)}")
            _emit(
                {"command": "map/induce", "map": name, "depth": depth,
                 "table": induction.map.table, "trace": induction.trace, "weak": verdict},
                lines, args,
            )
            return 0 if verdict.ok else 1
        if args.action == "semicontinuity":
            upper = check_semicontinuity(f, source, target, "upper")
            lower = check_semicontinuity(f, source, target, "lower")
            _emit(
                {"command": "map/semicontinuity", "map": name, "upper": upper, "lower": lower},
                [f"upper semicontinuity: {_verdict(upper)}", f"lower semicontinuity: {_verdict(lower)}"],
                args,
            )
            return 0 if upper.ok and lower.ok else 1
        rep = check_singleton_continuity(f, source, target, threads)
        lines = [
            f"upper semicontinuity: {_verdict(rep.upper_semicontinuous)}",
            f"singleton diagonal slices: {_verdict(rep.singleton_slices)}",
        ]
        if rep.continuity is None:
            lines.append("conclusion not asserted (a hypothesis fails)")
            code = 0
        else:
            lines.append(f"induced thread map continuity: {_verdict(rep.continuity)}")
            code = 0 if rep.continuity.ok else 1
        _emit({"command": "map/singleton", "map": name, "report": rep}, lines, args)
        return code
    if args.action in ("lift", "construct"):
        name = _pick_map(doc, args, ("quotient",))
        source_q, target_q = quotient(source, depth), quotient(target, depth)
        F = sf.resolve_quotient_map(doc, name, source_q, target_q)
        if args.action == "lift":
            rep = lift_quotient_map(F, source_q, target_q)
            search = rep.representative_search
            lines = [
                f"lift of {name!r} (at depth {depth}): induces the class map: {rep.induces_original}",
                f"condition (1) projection open: {_verdict(rep.projection_open)}",
                f"condition (1) open sets saturated: {_verdict(rep.saturation)}",
                f"condition (2) ball shrinking on the target levels: {_verdict(rep.ball_shrinks)}",
                f"class map continuity: {_verdict(rep.class_map_continuity)}",
                f"default representative lift continuity: {_verdict(rep.lift_continuity)}",
            ]
            if search.searched:
                lines.append(
                    f"representative search: {search.continuous_count} of {search.total} "
                    f"choices give a continuous lift"
                )
            _emit({"command": "map/lift", "map": name, "depth": depth, "report": rep}, lines, args)
            return 0
        try:
            rep = construct_gcell_from_quotient_map(F, source_q, target_q)
        except HypothesisFailure as exc:
            print(f"hypothesis failure: {exc}", file=sys.stderr)
            return 1
        lines = [
            f"constructed set-valued map from {name!r} (at depth {depth})",
            f"interpretation: {rep.interpretation}",
        ]
        for i, c in enumerate(
            (rep.conditions.condition1, rep.conditions.condition2,
             rep.conditions.condition3, rep.conditions.condition4), 1
        ):
            lines.append(f"  condition ({i}): {_verdict(c)}")
        if rep.continuity_probe is not None:
            lines.append(f"continuity probe ({rep.probe_note}): {_verdict(rep.continuity_probe)}")
        else:
            lines.append(rep.probe_note)
        _emit({"command": "map/construct", "map": name, "depth": depth, "report": rep}, lines, args)
        return 0 if rep.conditions.ok else 1
    raise StructureError(f"unknown map action {args.action!r}")


def cmd_export(args) -> int:
    doc = _load(args.file)
    if args.format == "json":
        text = sf.dumps(doc)
    else:
        text = sf.to_dot(doc)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return 0


def _gen_doc(args) -> sf.StructureDoc:
    name, levels, m, topo = args.name, args.levels, args.m, args.topology
    khal = topo == "khalimsky"
    if name == "full_image":
        fx = gen.full_image_fixture(levels)
        return sf.StructureDoc(
            source=fx.source, target=fx.target,
            maps={"full_image": sf.gcell_to_json(fx.gcell)},
        )
    if name == "jump_map":
        fx = gen.jump_map_fixture(m, levels, khalimsky=khal)
        maps: dict = {}
        for key, table in sorted(fx.weak_tables.items()):
            maps[key] = sf.weak_to_json(table, levels)
        for key, table in sorted(fx.level_tables.items()):
            maps[f"{key}_family"] = sf.family_to_json([table] * levels)
        maps["identity"] = sf.quotient_to_json(fx.weak_tables["straight"], levels)
        return sf.StructureDoc(source=fx.source, target=fx.target, maps=maps)
    if name == "sine_lift":
        fx = gen.sine_lift_fixture(m, levels, khalimsky=khal)
        return sf.StructureDoc(
            source=fx.source, target=fx.target,
            maps={
                "identity": sf.quotient_to_json(fx.weak_tables["identity"], levels),
                "identity_weak": sf.weak_to_json(fx.weak_tables["identity"], levels),
            },
        )
    spec = gen.GeneratorSpec(name=name, levels=levels, resolution=m, topology=topo)
    return sf.StructureDoc(source=gen.generate(spec))


def cmd_gen(args) -> int:
    doc = _gen_doc(args)
    text = sf.dumps(doc)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cellstruct",
        description="Check and construct cell-structure data at a finite truncation depth.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="validate a structure and report its axioms")
    p_check.add_argument("file")
    p_check.add_argument("--depth", type=int, default=4)
    p_check.add_argument("--strict-equivalence", action="store_true",
                         help="fail when the depth-D thread relation is not transitive")
    p_check.add_argument("--require-cell-structure", action="store_true",
                         help="fail when the uniform 2-ball contraction is not found")
    p_check.add_argument("--json", action="store_true")
    p_check.add_argument("--out")
    p_check.set_defaults(func=cmd_check)

    p_map = sub.add_parser("map", help="run a map check or construction")
    p_map.add_argument("action", choices=MAP_ACTIONS)
    p_map.add_argument("file")
    p_map.add_argument("--depth", type=int, default=4)
    p_map.add_argument("--map", help="map name inside the file")
    p_map.add_argument("--json", action="store_true")
    p_map.add_argument("--out")
    p_map.set_defaults(func=cmd_map)

    p_export = sub.add_parser("export", help="emit canonical JSON or DOT")
    p_export.add_argument("file")
    p_export.add_argument("--format", choices=("dot", "json"), default="json")
    p_export.add_argument("--out")
    p_export.set_defaults(func=cmd_export)

    p_gen = sub.add_parser("gen", help="generate a bundled example structure")
    p_gen.add_argument("name", choices=GEN_NAMES)
    p_gen.add_argument("--levels", type=int, default=4)
    p_gen.add_argument("--m", type=int, default=2)
    p_gen.add_argument("--topology", choices=gen.TOPOLOGIES, default="discrete")
    p_gen.add_argument("--out")
    p_gen.set_defaults(func=cmd_gen)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (StructureError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except HypothesisFailure as exc:
        print(f"hypothesis failure: {exc}", file=sys.stderr)
        return 1


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()

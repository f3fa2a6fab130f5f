"""Finite cellular graphs: cells, relations, balls, and finite topologies.

A cellular graph is a finite cell set together with a reflexive, symmetric
relation (its edges) and a finite topology given by a minimal-open table.
Minimal-open tables make every topological predicate on a level exactly
decidable: a set is open iff it is a union of minimal opens, and a map
between finite spaces is continuous iff it is monotone for the
specialization preorder.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping

from .common import CheckResult, StructureError

CellId = str

#: Radii admitted by :func:`ball`.  A k-fold expansion for general k exists
#: internally (see ``_expand``) but is not part of the public contract.
BALL_RADII = (1, 2, 3)


@dataclass(frozen=True, order=True)
class Cell:
    """A cell of some level.  The level index doubles as the cell's degree."""

    level: int
    id: CellId

    def __post_init__(self):
        if self.level < 1:
            raise StructureError(f"cell level must be >= 1, got {self.level}")


@dataclass(frozen=True)
class Relation:
    """A reflexive, symmetric relation on one level's cells.

    ``pairs`` holds ordered pairs; symmetry means both orders are present and
    reflexivity means every diagonal pair is present.  Use
    :func:`close_relation` to normalize raw input.  Validity against a cell
    set is enforced by :class:`CellularGraph`.
    """

    level: int
    pairs: frozenset[tuple[CellId, CellId]]

    def related(self, u: CellId, v: CellId) -> bool:
        return (u, v) in self.pairs

    def neighbors(self, u: CellId) -> frozenset[CellId]:
        return frozenset(v for (a, v) in self.pairs if a == u)


@dataclass(frozen=True)
class FiniteTopology:
    """A finite topology described by each point's minimal open set.

    Valid tables satisfy: ``u in min_open(u)`` and
    ``v in min_open(u)  =>  min_open(v) <= min_open(u)``.
    Keys may be any hashable point (cell ids, threads, class indices).
    """

    min_open: Mapping[Hashable, frozenset]

    @staticmethod
    def discrete(points: Iterable[Hashable]) -> "FiniteTopology":
        return FiniteTopology({p: frozenset([p]) for p in points})

    def validate(self, points: frozenset) -> None:
        if set(self.min_open) != set(points):
            missing = set(points) - set(self.min_open)
            extra = set(self.min_open) - set(points)
            raise StructureError(
                f"minimal-open table keys do not match the point set "
                f"(missing={sorted(map(str, missing))}, extra={sorted(map(str, extra))})"
            )
        for u, opn in self.min_open.items():
            if u not in opn:
                raise StructureError(f"point {u!r} missing from its own minimal open")
            for v in opn:
                if v not in self.min_open:
                    raise StructureError(f"minimal open of {u!r} references unknown point {v!r}")
                if not self.min_open[v] <= opn:
                    raise StructureError(
                        f"invalid topology: min_open({v!r}) is not contained in min_open({u!r})"
                    )

    def is_open(self, subset: Iterable[Hashable]) -> bool:
        pts = frozenset(subset)
        return all(self.min_open[u] <= pts for u in pts)

    def smallest_open_superset(self, subset: Iterable[Hashable]) -> frozenset:
        out: set = set()
        for u in subset:
            out |= self.min_open[u]
        return frozenset(out)

    def all_opens(self, limit: int = 1 << 16) -> list[frozenset]:
        """Every open set, as unions of minimal opens.  Guarded by ``limit``."""
        opens: set[frozenset] = {frozenset()}
        basis = sorted(set(self.min_open.values()), key=_set_key)
        for b in basis:
            opens |= {o | b for o in opens}
            if len(opens) > limit:
                raise StructureError(f"open-set enumeration exceeds limit {limit}")
        return sorted(opens, key=_set_key)

    def is_t2(self, subset: Iterable[Hashable]) -> bool:
        """Whether the subspace on ``subset`` is Hausdorff.

        In a finite space two points can be separated iff their minimal opens
        (cut down to the subspace) are disjoint.
        """
        pts = sorted(frozenset(subset), key=str)
        for a, b in itertools.combinations(pts, 2):
            if self.min_open[a] & self.min_open[b] & frozenset(pts):
                return False
        return True


def _set_key(s: frozenset) -> tuple:
    return (len(s), sorted(map(str, s)))


@dataclass(frozen=True)
class CellularGraph:
    """One level: finite cells, a closed relation, and a finite topology."""

    level: int
    cells: frozenset[CellId]
    relation: Relation
    topology: FiniteTopology
    _nbrs: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        if self.level < 1:
            raise StructureError(f"level must be >= 1, got {self.level}")
        if self.relation.level != self.level:
            raise StructureError(
                f"relation level {self.relation.level} != graph level {self.level}"
            )
        nbrs: dict[CellId, set[CellId]] = {u: set() for u in self.cells}
        for (u, v) in self.relation.pairs:
            if u not in self.cells or v not in self.cells:
                raise StructureError(f"relation references unknown cell in pair ({u!r}, {v!r})")
            if (v, u) not in self.relation.pairs:
                raise StructureError(f"relation is not symmetric: ({u!r}, {v!r}) lacks its mirror")
            nbrs[u].add(v)
        for u in self.cells:
            if (u, u) not in self.relation.pairs:
                raise StructureError(f"relation is not reflexive at {u!r}")
        self.topology.validate(self.cells)
        object.__setattr__(self, "_nbrs", {u: frozenset(vs) for u, vs in nbrs.items()})

    def neighbors(self, u: CellId) -> frozenset[CellId]:
        try:
            return self._nbrs[u]
        except KeyError:
            raise StructureError(f"unknown cell {u!r} at level {self.level}") from None

    def sorted_cells(self) -> list[CellId]:
        return sorted(self.cells)


def close_relation(
    pairs: Iterable[tuple[CellId, CellId]],
    cells: Iterable[CellId],
    level: int = 1,
) -> Relation:
    """Reflexive-symmetric closure of ``pairs`` over ``cells``.  Idempotent."""
    cellset = frozenset(cells)
    closed: set[tuple[CellId, CellId]] = set()
    for (u, v) in pairs:
        if u not in cellset or v not in cellset:
            raise StructureError(f"pair ({u!r}, {v!r}) references a cell outside the cell set")
        closed.add((u, v))
        closed.add((v, u))
    closed |= {(u, u) for u in cellset}
    return Relation(level=level, pairs=frozenset(closed))


def _expand(g: CellularGraph, start: frozenset[CellId], steps: int) -> frozenset[CellId]:
    out = start
    for _ in range(steps):
        nxt: set[CellId] = set()
        for v in out:
            nxt |= g.neighbors(v)
        out = frozenset(nxt)
    return out


def ball(g: CellularGraph, u: CellId, k: int) -> frozenset[CellId]:
    """The radius-k relational neighborhood of ``u``, k in {1, 2, 3}.

    Radius 2 is the 1-ball of the 1-ball, radius 3 the 1-ball of the 2-ball.
    """
    if k not in BALL_RADII:
        raise StructureError(f"ball radius must be one of {BALL_RADII}, got {k}")
    if u not in g.cells:
        raise StructureError(f"unknown cell {u!r} at level {g.level}")
    return _expand(g, frozenset([u]), k)


def ball_of_set(g: CellularGraph, cells: Iterable[CellId]) -> frozenset[CellId]:
    """Union of the 1-balls of ``cells``.  Monotone in its argument."""
    out: set[CellId] = set()
    for u in cells:
        if u not in g.cells:
            raise StructureError(f"unknown cell {u!r} at level {g.level}")
        out |= g.neighbors(u)
    return frozenset(out)


def is_open(g: CellularGraph, subset: Iterable[CellId]) -> bool:
    pts = frozenset(subset)
    unknown = pts - g.cells
    if unknown:
        raise StructureError(f"unknown cells {sorted(unknown)} at level {g.level}")
    return g.topology.is_open(pts)


def monotone_witness(
    src_points: Iterable[Hashable],
    src_topo: FiniteTopology,
    dst_topo: FiniteTopology,
    f: Mapping[Hashable, Hashable],
) -> tuple | None:
    """First (u, v) with v in min_open(u) but f(v) outside min_open(f(u)).

    ``None`` means ``f`` is continuous: on finite spaces continuity is
    exactly this monotonicity for the specialization preorder, which is in
    turn equivalent to every minimal open of the target pulling back to an
    open set.
    """
    for u in sorted(src_points, key=str):
        target = dst_topo.min_open[f[u]]
        for v in sorted(src_topo.min_open[u], key=str):
            if f[v] not in target:
                return (u, v)
    return None


def is_continuous_map(
    src: CellularGraph, dst: CellularGraph, f: Mapping[CellId, CellId]
) -> CheckResult:
    """Continuity of a total cell table for the level topologies."""
    missing = src.cells - set(f)
    if missing:
        raise StructureError(f"table not total: missing {sorted(missing)}")
    bad = set(f[u] for u in src.cells) - dst.cells
    if bad:
        raise StructureError(f"table maps outside target cells: {sorted(bad)}")
    witness = monotone_witness(src.cells, src.topology, dst.topology, f)
    return CheckResult.passed() if witness is None else CheckResult.failed(witness)


def restrict_table(f: Mapping, keys: Iterable[Hashable]) -> dict:
    return {k: f[k] for k in keys}


def compose_tables(first: Mapping, then: Mapping) -> dict:
    """Pointwise composition ``then(first(x))``."""
    return {x: then[y] for x, y in first.items()}


def khalimsky_topology(ordered_ids: list[CellId]) -> FiniteTopology:
    """Alternating finite-interval topology on a linearly ordered cell list.

    Cells at even positions are open points; cells at odd positions carry
    their two even neighbors in their minimal open.
    """
    n = len(ordered_ids)
    table: dict[Hashable, frozenset] = {}
    for i, u in enumerate(ordered_ids):
        if i % 2 == 0:
            table[u] = frozenset([u])
        else:
            members = [ordered_ids[j] for j in (i - 1, i, i + 1) if 0 <= j < n]
            table[u] = frozenset(members)
    return FiniteTopology(table)

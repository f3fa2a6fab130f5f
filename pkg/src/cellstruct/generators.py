"""Deterministic generators for the bundled example structures.

Interval-like structures sample [0, 1] on the dyadic grid with step 2**-m,
so every bonding formula lands exactly on the grid and no rounding is ever
introduced.  Cell ids are canonical fraction strings ("0", "1/4", "1/2", ...)
or coordinate pairs ("(1/2,3/4)").  Repeated calls yield identical objects.

Topologies default to discrete.  The "khalimsky" flag installs alternating
interval min-opens (even grid positions open points, odd positions carrying
their two neighbors), then shrinks the minimum set of odd min-opens needed to
make every bonding map continuous; structures produced by a generator
therefore always pass :func:`cellstruct.sequences.validate_sequence`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Hashable, Mapping, Optional

from .common import StructureError
from .graphs import (
    CellId,
    CellularGraph,
    FiniteTopology,
    close_relation,
)
from .maps import GCellMap, cell_image
from .graphs import Cell
from .sequences import BondingFamily, InverseSequence, Thread, enumerate_threads

GENERATOR_NAMES = (
    "dyadic_interval",
    "cantor",
    "unit_interval",
    "spiked_interval",
    "sine_curve",
    "khalimsky_interval",
    "full_image_map",
)

TOPOLOGIES = ("discrete", "khalimsky")


@dataclass(frozen=True)
class GeneratorSpec:
    """Parameters for one generated structure.

    ``levels`` is the number of levels L >= 1 and ``resolution`` the grid
    exponent m (step 2**-m) where the structure samples an interval.
    """

    name: str
    levels: int = 4
    resolution: int = 2
    topology: str = "discrete"

    def __post_init__(self):
        if self.name not in GENERATOR_NAMES:
            raise StructureError(f"unknown generator {self.name!r}; choose from {GENERATOR_NAMES}")
        if self.levels < 1:
            raise StructureError("levels must be >= 1")
        if self.topology not in TOPOLOGIES:
            raise StructureError(f"topology must be one of {TOPOLOGIES}")
        if self.name in ("sine_curve",) and self.resolution < 2:
            raise StructureError("sine_curve needs resolution >= 2 for grid closure")
        if self.resolution < 0:
            raise StructureError("resolution must be >= 0")


def generate(spec: GeneratorSpec):
    """Build the structure named by ``spec`` (a map bundle for full_image_map)."""
    khal = spec.topology == "khalimsky"
    if spec.name == "dyadic_interval":
        return dyadic_interval(spec.levels, khalimsky=khal)
    if spec.name == "cantor":
        return cantor(spec.levels)
    if spec.name == "unit_interval":
        return unit_interval(spec.levels, spec.resolution, khalimsky=khal)
    if spec.name == "spiked_interval":
        return spiked_interval(spec.levels, spec.resolution, khalimsky=khal)
    if spec.name == "sine_curve":
        return sine_curve(spec.levels, spec.resolution, khalimsky=khal)
    if spec.name == "khalimsky_interval":
        return khalimsky_interval(spec.levels, spec.resolution)
    if spec.name == "full_image_map":
        return full_image_fixture(spec.levels).gcell
    raise AssertionError(spec.name)


def _frac_id(k: int, m: int) -> CellId:
    return str(Fraction(k, 2 ** m))


def _pair_id(x: Fraction, y: Fraction) -> CellId:
    return f"({x},{y})"


def _interval_topology(ordered: list[CellId], khalimsky: bool) -> FiniteTopology:
    if not khalimsky:
        return FiniteTopology.discrete(ordered)
    table: dict[Hashable, frozenset] = {}
    for i, u in enumerate(ordered):
        if i % 2 == 0:
            table[u] = frozenset([u])
        else:
            table[u] = frozenset(ordered[j] for j in (i - 1, i, i + 1) if 0 <= j < len(ordered))
    return FiniteTopology(table)


def _shrink_for_continuity(
    levels: list[tuple[frozenset[CellId], dict[Hashable, frozenset]]],
    bondings: list[Mapping[CellId, CellId]],
) -> list[dict[Hashable, frozenset]]:
    """Shrink min-opens to singletons until every bonding map is monotone.

    Each shrink is forced (a cell whose min-open image escapes the target's
    min-open cannot keep it), so the fixpoint is order-independent and is the
    finest-possible damage to the requested topology.
    """
    tables = [dict(t) for _, t in levels]
    changed = True
    while changed:
        changed = False
        for n, table in enumerate(bondings):
            upper, lower = tables[n + 1], tables[n]
            for u in sorted(upper):
                image = {table[v] for v in upper[u]}
                if not image <= lower[table[u]] and upper[u] != frozenset([u]):
                    upper[u] = frozenset([u])
                    changed = True
    return tables


def _build_sequence(
    cells_per_level: list[list[CellId]],
    raw_relations: list[set[tuple[CellId, CellId]]],
    bondings: list[dict[CellId, CellId]],
    topologies: list[dict[Hashable, frozenset]],
) -> InverseSequence:
    graphs = []
    for n, ordered in enumerate(cells_per_level, start=1):
        cells = frozenset(ordered)
        graphs.append(
            CellularGraph(
                level=n,
                cells=cells,
                relation=close_relation(raw_relations[n - 1], cells, level=n),
                topology=FiniteTopology(dict(topologies[n - 1])),
            )
        )
    return InverseSequence(levels=tuple(graphs), bonding=BondingFamily(tuple(bondings)))


def dyadic_interval(levels: int, khalimsky: bool = False) -> InverseSequence:
    """Level n holds 2**n cells with |k - k'| <= 1 adjacency; parent bonding."""
    cells = [[str(k) for k in range(2 ** n)] for n in range(1, levels + 1)]
    rels = [
        {(str(k), str(k + 1)) for k in range(2 ** n - 1)}
        for n in range(1, levels + 1)
    ]
    bondings = [
        {str(k): str(k // 2) for k in range(2 ** (n + 1))}
        for n in range(1, levels)
    ]
    topos = [
        dict(_interval_topology(c, khalimsky).min_open)
        for c in cells
    ]
    if khalimsky:
        topos = _shrink_for_continuity(
            [(frozenset(c), t) for c, t in zip(cells, topos)], bondings
        )
    return _build_sequence(cells, rels, bondings, topos)


def cantor(levels: int) -> InverseSequence:
    """Binary strings of length n, diagonal relation, prefix bonding."""
    cells = [["".join(w) for w in _binary_words(n)] for n in range(1, levels + 1)]
    rels: list[set[tuple[CellId, CellId]]] = [set() for _ in range(levels)]
    bondings = [
        {w: w[:-1] for w in cells[n]}
        for n in range(1, levels)
    ]
    topos = [dict(FiniteTopology.discrete(c).min_open) for c in cells]
    return _build_sequence(cells, rels, bondings, topos)


def _binary_words(n: int) -> list[tuple[str, ...]]:
    words = [()]
    for _ in range(n):
        words = [w + (b,) for w in words for b in ("0", "1")]
    return [w for w in words]


def unit_interval(levels: int, m: int, khalimsky: bool = False) -> InverseSequence:
    """[0, 1] on the 2**-m grid, identity bondings, diagonal relation."""
    ordered = [_frac_id(k, m) for k in range(2 ** m + 1)]
    cells = [list(ordered) for _ in range(levels)]
    rels: list[set[tuple[CellId, CellId]]] = [set() for _ in range(levels)]
    bondings = [{u: u for u in ordered} for _ in range(levels - 1)]
    topos = [dict(_interval_topology(ordered, khalimsky).min_open) for _ in range(levels)]
    return _build_sequence(cells, rels, bondings, topos)


def spiked_interval(levels: int, m: int, khalimsky: bool = False) -> InverseSequence:
    """The horizontal interval with a vertical spike over 1/2, spike glued to its foot.

    Cells are the grid points of [0,1] x {0} plus (1/2, y) for grid y > 0;
    every spike cell is related to the spike's foot (1/2, 0), and the
    bonding maps are the identity.
    """
    if m < 1:
        raise StructureError("spiked_interval needs resolution >= 1")
    if khalimsky and m < 2:
        # the spike foot must sit at an even horizontal position to stay an
        # open point; at m = 1 it would be odd and the min-open table invalid
        raise StructureError("spiked_interval with the khalimsky flag needs resolution >= 2")
    grid = [Fraction(k, 2 ** m) for k in range(2 ** m + 1)]
    half = Fraction(1, 2)
    horizontal = [_pair_id(x, Fraction(0)) for x in grid]
    vertical = [_pair_id(half, y) for y in grid]  # starts at the shared foot
    ordered = horizontal + vertical[1:]
    foot = _pair_id(half, Fraction(0))
    raw = {(v, foot) for v in vertical}
    cells = [list(ordered) for _ in range(levels)]
    rels = [set(raw) for _ in range(levels)]
    bondings = [{u: u for u in ordered} for _ in range(levels - 1)]
    if khalimsky:
        table: dict[Hashable, frozenset] = {}
        for i, u in enumerate(horizontal):
            table[u] = (
                frozenset([u])
                if i % 2 == 0
                else frozenset(horizontal[j] for j in (i - 1, i, i + 1) if 0 <= j < len(horizontal))
            )
        for i, u in enumerate(vertical):
            if i == 0:
                continue  # the foot keeps its horizontal min-open
            table[u] = (
                frozenset([u])
                if i % 2 == 0
                else frozenset(vertical[j] for j in (i - 1, i, i + 1) if 0 <= j < len(vertical))
            )
        topos = [dict(table) for _ in range(levels)]
    else:
        topos = [dict(FiniteTopology.discrete(ordered).min_open) for _ in range(levels)]
    return _build_sequence(cells, rels, bondings, topos)


def sine_bonding_index(k: int, m: int) -> int:
    """Grid index image of k/2**m under the fold: 4x, then 3/2 - 2x, then x."""
    quarter, half = 2 ** (m - 2), 2 ** (m - 1)
    if k <= quarter:
        return 4 * k
    if k <= half:
        return 3 * half - 2 * k
    return k


def sine_curve(levels: int, m: int, khalimsky: bool = False) -> InverseSequence:
    """Levels sample [0, 1]; the bonding folds [0, 1/2] over [1/2, 1].

    The relation glues every cell of [1/2, 1] to the cell at 1/2, so the
    finite quotient collapses the non-winding half while the folded half
    winds deeper with each level.
    """
    if m < 2:
        raise StructureError("sine_curve needs resolution >= 2 for grid closure")
    ordered = [_frac_id(k, m) for k in range(2 ** m + 1)]
    half_idx = 2 ** (m - 1)
    raw = {(_frac_id(k, m), _frac_id(half_idx, m)) for k in range(half_idx, 2 ** m + 1)}
    bonding = {_frac_id(k, m): _frac_id(sine_bonding_index(k, m), m) for k in range(2 ** m + 1)}
    cells = [list(ordered) for _ in range(levels)]
    rels = [set(raw) for _ in range(levels)]
    bondings = [dict(bonding) for _ in range(levels - 1)]
    topos = [dict(_interval_topology(ordered, khalimsky).min_open) for _ in range(levels)]
    if khalimsky:
        topos = _shrink_for_continuity(
            [(frozenset(ordered), t) for t in topos], bondings
        )
    return _build_sequence(cells, rels, bondings, topos)


def khalimsky_interval(levels: int, m: int) -> InverseSequence:
    """Plain alternating-topology interval on integer ids 0..2**m, identity bondings."""
    ordered = [str(k) for k in range(2 ** m + 1)]
    cells = [list(ordered) for _ in range(levels)]
    rels: list[set[tuple[CellId, CellId]]] = [set() for _ in range(levels)]
    bondings = [{u: u for u in ordered} for _ in range(levels - 1)]
    topos = [dict(_interval_topology(ordered, True).min_open) for _ in range(levels)]
    return _build_sequence(cells, rels, bondings, topos)


@dataclass(frozen=True)
class MapFixture:
    """A source structure, a target structure, and named maps between them."""

    source: InverseSequence
    target: InverseSequence
    gcell: Optional[GCellMap] = None
    weak_tables: Optional[Mapping[str, Mapping[Thread, Thread]]] = None
    level_tables: Optional[Mapping[str, Mapping[CellId, CellId]]] = None


def full_image_fixture(levels: int = 3) -> MapFixture:
    """The set-valued map sending each cell to every target cell at or below its degree.

    The target levels are complete simplices (any two cells related) on
    discrete topologies, which is what makes all four g-cell map conditions
    checkable and true.
    """
    source = dyadic_interval(levels)
    cells = [[str(k) for k in range(n + 1)] for n in range(1, levels + 1)]
    rels = [
        {(a, b) for a in level for b in level}
        for level in cells
    ]
    bondings = [
        {u: str(min(int(u), n)) for u in cells[n]}
        for n in range(1, levels)
    ]
    topos = [dict(FiniteTopology.discrete(c).min_open) for c in cells]
    target = _build_sequence(cells, rels, bondings, topos)
    table: dict[Cell, frozenset[Cell]] = {}
    for i in range(1, levels + 1):
        image = frozenset(
            Cell(k, cid) for k in range(1, i + 1) for cid in target.level(k).cells
        )
        for cid in source.level(i).cells:
            table[Cell(i, cid)] = image
    return MapFixture(source=source, target=target, gcell=GCellMap(table=table))


def jump_map_fixture(m: int = 2, levels: int = 2, khalimsky: bool = True) -> MapFixture:
    """Interval-to-spike fixture with the jump map and its continuous variant.

    The "jump" level table sends 1/2 to the spike's tip and everything else
    to the horizontal axis; "straight" sends every x to (x, 0).  Thread
    tables apply the level table coordinatewise (bondings are identities).
    """
    source = unit_interval(levels, m, khalimsky=khalimsky)
    target = spiked_interval(levels, m, khalimsky=khalimsky)
    grid = [Fraction(k, 2 ** m) for k in range(2 ** m + 1)]
    half = Fraction(1, 2)
    straight = {str(x): _pair_id(x, Fraction(0)) for x in grid}
    jump = dict(straight)
    jump[str(half)] = _pair_id(half, Fraction(1))
    weak = {
        name: {
            Thread(tuple(str(x) for _ in range(levels))): Thread(
                tuple(tbl[str(x)] for _ in range(levels))
            )
            for x in grid
        }
        for name, tbl in (("jump", jump), ("straight", straight))
    }
    return MapFixture(
        source=source,
        target=target,
        weak_tables=weak,
        level_tables={"jump": jump, "straight": straight},
    )


def sine_lift_fixture(m: int = 3, levels: int = 4, khalimsky: bool = True) -> MapFixture:
    """Interval source, sine-fold target, and the class-level identity map.

    The identity on quotients sends the class of the constant source thread
    at grid point k to the class of the unique target thread whose deepest
    coordinate is k.
    """
    source = unit_interval(levels, m, khalimsky=khalimsky)
    target = sine_curve(levels, m, khalimsky=khalimsky)
    ids = [_frac_id(k, m) for k in range(2 ** m + 1)]
    target_by_deepest = {t.at(levels): t for t in enumerate_threads(target, levels)}
    table = {
        Thread(tuple(u for _ in range(levels))): target_by_deepest[u]
        for u in ids
    }
    return MapFixture(source=source, target=target, weak_tables={"identity": table})


def full_image_cell_value(fixture: MapFixture, cell: Cell) -> frozenset[Cell]:
    return cell_image(fixture.gcell, cell)

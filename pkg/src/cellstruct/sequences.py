"""Inverse sequences of cellular graphs and their finite-depth limit theory.

Levels are linked by bonding maps that send each level's cells to the
previous level's.  Only consecutive maps are stored; composites are derived,
so the cocycle identity holds by construction.  All limit-dependent notions
(threads, the thread relation, quotients, Cauchy convergence) are evaluated
at an explicit truncation depth D and every verdict is stamped with it: a
depth-D verdict is evidence about the untruncated limit, never a proof.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .common import CheckResult, StructureError
from .graphs import (
    Cell,
    CellId,
    CellularGraph,
    FiniteTopology,
    ball,
    ball_of_set,
    monotone_witness,
)


@dataclass(frozen=True)
class BondingFamily:
    """Consecutive bonding tables; entry n maps level n+2's cells onto level n+1's."""

    maps: tuple[Mapping[CellId, CellId], ...]


@dataclass(frozen=True)
class InverseSequence:
    """An inverse sequence of cellular graphs.

    Construction checks shape only (consecutive levels, total bonding tables
    over known cells).  Edge preservation and topological continuity of the
    bonding maps are deliberately *not* construction-time errors: broken
    structures must remain representable so that :func:`validate_sequence`
    can report them with witnesses.
    """

    levels: tuple[CellularGraph, ...]
    bonding: BondingFamily
    _proj: dict = field(init=False, repr=False, compare=False, default=None)

    def __post_init__(self):
        object.__setattr__(self, "_proj", {})
        if not self.levels:
            raise StructureError("an inverse sequence needs at least one level")
        for i, g in enumerate(self.levels, start=1):
            if g.level != i:
                raise StructureError(f"level {i} is labeled {g.level}")
        if len(self.bonding.maps) != len(self.levels) - 1:
            raise StructureError(
                f"{len(self.levels)} levels need {len(self.levels) - 1} bonding maps, "
                f"got {len(self.bonding.maps)}"
            )
        for n, table in enumerate(self.bonding.maps, start=1):
            upper, lower = self.levels[n], self.levels[n - 1]
            missing = upper.cells - set(table)
            if missing:
                raise StructureError(
                    f"bonding {n + 1}->{n} is not total: missing {sorted(missing)}"
                )
            for u, v in table.items():
                if u not in upper.cells:
                    raise StructureError(f"bonding {n + 1}->{n} has unknown source cell {u!r}")
                if v not in lower.cells:
                    raise StructureError(f"bonding {n + 1}->{n} has unknown target cell {v!r}")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def level(self, n: int) -> CellularGraph:
        if not 1 <= n <= self.depth:
            raise StructureError(f"level {n} out of range 1..{self.depth}")
        return self.levels[n - 1]

    def step(self, n: int) -> Mapping[CellId, CellId]:
        """The bonding table from level n+1 down to level n."""
        if not 1 <= n < self.depth:
            raise StructureError(f"no bonding map {n + 1}->{n} in a {self.depth}-level sequence")
        return self.bonding.maps[n - 1]


@dataclass(frozen=True, order=True)
class Thread:
    """A bonding-compatible coordinate vector, one cell id per level."""

    coords: tuple[CellId, ...]

    @property
    def depth(self) -> int:
        return len(self.coords)

    def at(self, n: int) -> CellId:
        return self.coords[n - 1]

    def __str__(self) -> str:
        return "|".join(self.coords)


@dataclass(frozen=True)
class CellSequence:
    """A finite cell sequence with a declared tail threshold.

    Entries with 1-based position > ``declared_N`` form the tail that the
    Cauchy and convergence predicates quantify over.
    """

    entries: tuple[Cell, ...]
    declared_N: int = 0

    def __post_init__(self):
        if self.declared_N < 0:
            raise StructureError("declared_N must be >= 0")
        if self.entries and self.declared_N >= len(self.entries):
            raise StructureError(
                f"declared_N={self.declared_N} leaves no tail in a "
                f"{len(self.entries)}-entry sequence"
            )

    @property
    def tail(self) -> tuple[Cell, ...]:
        return self.entries[self.declared_N:]


@dataclass(frozen=True)
class BondingCheck:
    upper_level: int
    total: CheckResult
    edges: CheckResult
    continuity: CheckResult

    @property
    def ok(self) -> bool:
        return bool(self.total and self.edges and self.continuity)


@dataclass(frozen=True)
class ValidationReport:
    entries: tuple[BondingCheck, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)


def validate_sequence(s: InverseSequence) -> ValidationReport:
    """Per-bonding report: totality, edge preservation, topological continuity."""
    checks = []
    for n in range(1, s.depth):
        upper, lower = s.level(n + 1), s.level(n)
        table = s.step(n)
        # Totality over known cells is a construction invariant already.
        total = CheckResult.passed()
        edges = CheckResult.passed()
        for (x, y) in sorted(upper.relation.pairs):
            if (table[x], table[y]) not in lower.relation.pairs:
                edges = CheckResult.failed((x, y))
                break
        w = monotone_witness(upper.cells, upper.topology, lower.topology, table)
        continuity = CheckResult.passed() if w is None else CheckResult.failed(w)
        checks.append(BondingCheck(n + 1, total, edges, continuity))
    return ValidationReport(tuple(checks))


def compose_bonding(s: InverseSequence, i: int, j: int) -> dict[CellId, CellId]:
    """The derived table from level j down to level i; identity when i == j."""
    if not 1 <= i <= s.depth or not 1 <= j <= s.depth:
        raise StructureError(f"levels ({i}, {j}) out of range 1..{s.depth}")
    if i > j:
        raise StructureError(f"cannot compose bonding upward: {i} > {j}")
    cached = s._proj.get((i, j))
    if cached is None:
        table = {u: u for u in s.level(j).cells}
        for n in range(j - 1, i - 1, -1):
            step = s.step(n)
            table = {u: step[v] for u, v in table.items()}
        cached = s._proj[(i, j)] = table
    return dict(cached)


def enumerate_threads(s: InverseSequence, depth: int) -> tuple[Thread, ...]:
    """All depth-D threads, sorted.  Equals the brute-force product filter."""
    if not 1 <= depth <= s.depth:
        raise StructureError(f"depth {depth} out of range 1..{s.depth}")
    partial: list[tuple[CellId, ...]] = [(u,) for u in s.level(1).sorted_cells()]
    for n in range(1, depth):
        step = s.step(n)
        preimage: dict[CellId, list[CellId]] = {}
        for child in s.level(n + 1).sorted_cells():
            preimage.setdefault(step[child], []).append(child)
        partial = [p + (child,) for p in partial for child in preimage.get(p[-1], [])]
    return tuple(sorted(Thread(p) for p in partial))


@dataclass(frozen=True)
class ThreadRelation:
    """The coordinatewise thread relation at one depth.

    Reflexive and symmetric by construction; transitivity is checked
    exhaustively and reported, because nothing in the level data forces it.
    """

    depth: int
    threads: tuple[Thread, ...]
    neighbors: Mapping[Thread, frozenset[Thread]]
    transitive: bool
    witness: Optional[tuple[Thread, Thread, Thread]]

    def related(self, a: Thread, b: Thread) -> bool:
        return b in self.neighbors[a]

    def pairs(self) -> Iterable[tuple[Thread, Thread]]:
        for a in self.threads:
            for b in sorted(self.neighbors[a]):
                yield (a, b)


def thread_relation(s: InverseSequence, depth: int) -> ThreadRelation:
    threads = enumerate_threads(s, depth)
    relations = [s.level(n).relation for n in range(1, depth + 1)]
    nbrs: dict[Thread, set[Thread]] = {t: set() for t in threads}
    for a, b in itertools.combinations(threads, 2):
        if all(rel.related(a.at(n), b.at(n)) for n, rel in enumerate(relations, start=1)):
            nbrs[a].add(b)
            nbrs[b].add(a)
    for t in threads:
        nbrs[t].add(t)
    transitive, witness = True, None
    for a in threads:
        if not transitive:
            break
        for b in sorted(nbrs[a]):
            bad = sorted(nbrs[b] - nbrs[a])
            if bad:
                transitive, witness = False, (a, b, bad[0])
                break
    return ThreadRelation(
        depth=depth,
        threads=threads,
        neighbors={t: frozenset(v) for t, v in nbrs.items()},
        transitive=transitive,
        witness=witness,
    )


def thread_topology(s: InverseSequence, threads: Sequence[Thread]) -> FiniteTopology:
    """Subspace topology on threads of the depth-D product of level topologies."""
    table: dict = {}
    opens = [s.level(n).topology.min_open for n in range(1, threads[0].depth + 1)]
    for t in threads:
        coord_opens = [opens[n - 1][t.at(n)] for n in range(1, t.depth + 1)]
        table[t] = frozenset(
            u for u in threads
            if all(u.at(n) in coord_opens[n - 1] for n in range(1, t.depth + 1))
        )
    return FiniteTopology(table)


class _UnionFind:
    def __init__(self, items: Iterable):
        self.parent = {x: x for x in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


@dataclass(frozen=True)
class QuotientSpace:
    """Threads modulo the transitive closure of the depth-D thread relation.

    The thread relation itself need not be transitive; classes are the
    connected components of its closure and ``relation`` carries the
    transitivity report so that the discrepancy is never silent.  The class
    topology is the quotient of the product topology: a class set is open
    iff the union of its members is open among threads.
    """

    seq: InverseSequence
    depth: int
    threads: tuple[Thread, ...]
    classes: tuple[frozenset[Thread], ...]
    class_of: Mapping[Thread, int]
    thread_topo: FiniteTopology
    class_topology: FiniteTopology
    relation: ThreadRelation

    @property
    def transitivity_report(self) -> CheckResult:
        return CheckResult(self.relation.transitive, self.relation.witness)

    def class_index(self, t: Thread) -> int:
        try:
            return self.class_of[t]
        except KeyError:
            raise StructureError(f"unknown thread {t} at depth {self.depth}") from None

    def representative(self, idx: int) -> Thread:
        return min(self.classes[idx])


def quotient(s: InverseSequence, depth: int) -> QuotientSpace:
    rel = thread_relation(s, depth)
    threads = rel.threads
    uf = _UnionFind(threads)
    for a in threads:
        for b in rel.neighbors[a]:
            uf.union(a, b)
    groups: dict[Thread, set[Thread]] = {}
    for t in threads:
        groups.setdefault(uf.find(t), set()).add(t)
    classes = tuple(sorted((frozenset(g) for g in groups.values()), key=min))
    class_of = {t: i for i, cls in enumerate(classes) for t in cls}
    topo = thread_topology(s, threads)
    class_topology = _quotient_topology(classes, class_of, topo)
    return QuotientSpace(
        seq=s,
        depth=depth,
        threads=threads,
        classes=classes,
        class_of=class_of,
        thread_topo=topo,
        class_topology=class_topology,
        relation=rel,
    )


def _quotient_topology(
    classes: tuple[frozenset[Thread], ...],
    class_of: Mapping[Thread, int],
    topo: FiniteTopology,
) -> FiniteTopology:
    """Finest topology on classes making the projection continuous.

    The minimal open of a class is grown to a fixpoint: whenever a member
    thread's minimal open leaves the current union of classes, the touched
    classes are forced in.
    """
    table: dict = {}
    for idx in range(len(classes)):
        included = {idx}
        frontier = set(classes[idx])
        while frontier:
            touched: set[int] = set()
            for t in frontier:
                for u in topo.min_open[t]:
                    touched.add(class_of[u])
            new = touched - included
            included |= new
            frontier = set().union(*(classes[i] for i in new)) if new else set()
        table[idx] = frozenset(included)
    return FiniteTopology(table)


def boundary_separated_classes(
    s: InverseSequence,
    depth: int,
    anchor: Cell,
    open_set: Iterable[CellId],
) -> frozenset[frozenset[Thread]]:
    """Classes through ``open_set`` eventually separated from its boundary ring.

    A class qualifies iff one of its member threads z satisfies: the level-i
    coordinate of z lies in the open set U, and some level j with
    i < j <= depth has (z_j, w_j) unrelated for every thread w whose level-i
    coordinate lies in B(U, r_i) minus U.  ``anchor`` names the level-i cell
    the neighborhood belongs to; the qualifying condition depends only on U.
    """
    i = anchor.level
    if not 1 <= i < depth:
        raise StructureError(f"anchor level {i} must satisfy 1 <= i < depth={depth}")
    g = s.level(i)
    u_set = frozenset(open_set)
    if anchor.id not in g.cells:
        raise StructureError(f"unknown anchor cell {anchor.id!r} at level {i}")
    if not u_set <= g.cells:
        raise StructureError(f"open set references unknown cells {sorted(u_set - g.cells)}")
    if not g.topology.is_open(u_set):
        raise StructureError("the given set is not open in its level topology")

    q = quotient(s, depth)
    ring = ball_of_set(g, u_set) - u_set
    boundary_threads = [w for w in q.threads if w.at(i) in ring]
    # For each level j, a coordinate z_j survives iff it avoids the 1-ball of
    # every boundary thread's level-j coordinate.
    forbidden: dict[int, frozenset[CellId]] = {}
    for j in range(i + 1, depth + 1):
        gj = s.level(j)
        forbidden[j] = ball_of_set(gj, {w.at(j) for w in boundary_threads})

    selected = []
    for cls in q.classes:
        for z in sorted(cls):
            if z.at(i) not in u_set:
                continue
            if any(z.at(j) not in forbidden[j] for j in range(i + 1, depth + 1)):
                selected.append(cls)
                break
    return frozenset(selected)


@dataclass(frozen=True)
class CellStructureReport:
    """Finite-depth evidence for the two cell-structure axioms.

    ``per_thread`` maps (thread, i) to the least j <= depth contracting the
    projected 2-ball into the 1-ball, or None when no such j exists within
    the truncation.  ``uniform`` is the stronger variant quantified over all
    cells of the source level; ``three_ball`` is the analogous radius-3
    contraction used to gate limit constructions for single-valued maps.
    Projected 1-balls are finite outright on finite levels; that verdict is
    included for completeness.
    """

    depth: int
    per_thread: Mapping[tuple[Thread, int], Optional[int]]
    uniform: Mapping[int, Optional[int]]
    three_ball: Mapping[int, Optional[int]]
    finiteness: bool = True

    @property
    def per_thread_ok(self) -> bool:
        return all(j is not None for j in self.per_thread.values())

    @property
    def per_thread_witness(self) -> Optional[tuple[Thread, int]]:
        for key in sorted(self.per_thread, key=lambda k: (k[0], k[1])):
            if self.per_thread[key] is None:
                return key
        return None

    @property
    def uniform_ok(self) -> bool:
        return all(j is not None for j in self.uniform.values())

    @property
    def three_ball_ok(self) -> bool:
        return all(j is not None for j in self.three_ball.values())


def _uniform_contraction_level(s: InverseSequence, i: int, depth: int, radius: int) -> Optional[int]:
    target = s.level(i)
    for j in range(i, depth + 1):
        proj = compose_bonding(s, i, j)
        src = s.level(j)
        if all(
            frozenset(proj[a] for a in ball(src, x, radius)) <= ball(target, proj[x], 1)
            for x in src.sorted_cells()
        ):
            return j
    return None


def check_cell_structure(s: InverseSequence, depth: int) -> CellStructureReport:
    if not 1 <= depth <= s.depth:
        raise StructureError(f"depth {depth} out of range 1..{s.depth}")
    threads = enumerate_threads(s, depth)
    per_thread: dict[tuple[Thread, int], Optional[int]] = {}
    for t in threads:
        for i in range(1, depth):
            found = None
            for j in range(i, depth + 1):
                proj = compose_bonding(s, i, j)
                two_ball = ball(s.level(j), t.at(j), 2)
                if frozenset(proj[a] for a in two_ball) <= ball(s.level(i), t.at(i), 1):
                    found = j
                    break
            per_thread[(t, i)] = found
    uniform = {i: _uniform_contraction_level(s, i, depth, 2) for i in range(1, depth)}
    three_ball = {i: _uniform_contraction_level(s, i, depth, 3) for i in range(1, depth)}
    return CellStructureReport(
        depth=depth, per_thread=per_thread, uniform=uniform, three_ball=three_ball
    )


def is_close(s: InverseSequence, a: Cell, b: Cell) -> bool:
    """Whether two cells project to related cells at the lower of their levels."""
    for c in (a, b):
        if not 1 <= c.level <= s.depth:
            raise StructureError(f"cell level {c.level} out of range 1..{s.depth}")
        if c.id not in s.level(c.level).cells:
            raise StructureError(f"unknown cell {c.id!r} at level {c.level}")
    k = min(a.level, b.level)
    pa = compose_bonding(s, k, a.level)[a.id]
    pb = compose_bonding(s, k, b.level)[b.id]
    return s.level(k).relation.related(pa, pb)


def is_cauchy(s: InverseSequence, seq: CellSequence) -> CheckResult:
    """Finite surrogate for the Cauchy property.

    Degrees tending to infinity is read on the declared tail as strictly
    increasing levels; all tail entries must additionally be pairwise close.
    """
    if not seq.entries:
        raise StructureError("empty cell sequence")
    tail = seq.tail
    for prev, cur in zip(tail, tail[1:]):
        if cur.level <= prev.level:
            return CheckResult.failed(("degree", prev, cur))
    for a, b in itertools.combinations(tail, 2):
        if not is_close(s, a, b):
            return CheckResult.failed(("close", a, b))
    return CheckResult.passed()


def converges_to(s: InverseSequence, seq: CellSequence, t: Thread) -> bool:
    """Whether every tail coordinate of ``t`` is close to every tail entry."""
    max_tail_level = max(c.level for c in seq.tail)
    if t.depth < max_tail_level:
        raise StructureError(
            f"thread depth {t.depth} below the deepest tail entry level {max_tail_level}"
        )
    for i in range(seq.declared_N + 1, t.depth + 1):
        coord = Cell(i, t.at(i))
        for u in seq.tail:
            if not is_close(s, coord, u):
                return False
    return True


def find_limit(s: InverseSequence, seq: CellSequence, depth: int) -> Optional[Thread]:
    """Search for a depth-D thread the sequence converges to.

    Depth-first search over per-level candidate sets (cells close to every
    tail entry), linked by the bonding maps; branches are visited in id
    order so the result is the lexicographically least converging thread.
    Returns None when no depth-D witness exists.
    """
    if not 1 <= depth <= s.depth:
        raise StructureError(f"depth {depth} out of range 1..{s.depth}")
    verdict = is_cauchy(s, seq)
    if not verdict:
        raise StructureError(f"sequence is not Cauchy: witness {verdict.witness}")
    candidates: list[frozenset[CellId]] = []
    for i in range(1, depth + 1):
        cells = s.level(i).cells
        if i > seq.declared_N:
            cells = frozenset(
                v for v in cells if all(is_close(s, Cell(i, v), u) for u in seq.tail)
            )
        candidates.append(cells)

    def extend(prefix: tuple[CellId, ...]) -> Optional[tuple[CellId, ...]]:
        n = len(prefix)
        if n == depth:
            return prefix
        step = s.step(n)
        for child in s.level(n + 1).sorted_cells():
            if child in candidates[n] and step[child] == prefix[-1]:
                hit = extend(prefix + (child,))
                if hit is not None:
                    return hit
        return None

    for root in sorted(candidates[0]):
        hit = extend((root,))
        if hit is not None:
            return Thread(hit)
    return None

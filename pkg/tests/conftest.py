"""Shared fixtures and independent oracles.

The oracle functions re-derive expected values straight from the displayed
definitions (frontier expansion, product filters, literal quantifier loops)
and deliberately avoid the package's own data paths, so that a test never
checks an implementation against itself.
"""

import itertools

import pytest

import cellstruct as cs
from cellstruct.graphs import CellularGraph, FiniteTopology, close_relation
from cellstruct.sequences import BondingFamily, InverseSequence


# ---------------------------------------------------------------------------
# fixture builders


def build_sequence(level_specs, bondings):
    """level_specs: list of (cells, raw_pairs, min_open or None)."""
    graphs = []
    for n, (cells, pairs, min_open) in enumerate(level_specs, start=1):
        topo = (
            FiniteTopology.discrete(cells)
            if min_open is None
            else FiniteTopology({k: frozenset(v) for k, v in min_open.items()})
        )
        graphs.append(
            CellularGraph(
                level=n,
                cells=frozenset(cells),
                relation=close_relation(pairs, cells, level=n),
                topology=topo,
            )
        )
    return InverseSequence(levels=tuple(graphs), bonding=BondingFamily(tuple(bondings)))


def two_level(cells1, cells2, r1, r2, bond, min_open1=None, min_open2=None):
    return build_sequence(
        [(cells1, r1, min_open1), (cells2, r2, min_open2)], [bond]
    )


@pytest.fixture(scope="session")
def dyadic4():
    return cs.dyadic_interval(4)


@pytest.fixture(scope="session")
def cantor4():
    return cs.cantor(4)


@pytest.fixture(scope="session")
def jump_fixture():
    return cs.jump_map_fixture(2, 2, khalimsky=True)


@pytest.fixture(scope="session")
def sine_fixture():
    return cs.sine_lift_fixture(3, 4, khalimsky=True)


@pytest.fixture(scope="session")
def full_image3():
    return cs.full_image_fixture(3)


def corpus():
    """Structures the cross-cutting property tests quantify over."""
    return [
        ("dyadic", cs.dyadic_interval(4)),
        ("cantor", cs.cantor(4)),
        ("unit_khal", cs.unit_interval(2, 2, khalimsky=True)),
        ("spiked_khal", cs.spiked_interval(2, 2, khalimsky=True)),
        ("sine_khal", cs.sine_curve(4, 3, khalimsky=True)),
        ("khalimsky", cs.khalimsky_interval(2, 2)),
        ("full_image_target", cs.full_image_fixture(3).target),
    ]


# ---------------------------------------------------------------------------
# oracles


def oracle_ball(graph, u, k):
    """k-step frontier expansion scanning the raw pair set."""
    frontier = {u}
    for _ in range(k):
        frontier = {
            b for a in frontier for (x, b) in graph.relation.pairs if x == a
        }
    return frozenset(frontier)


def oracle_threads(seq, depth):
    """Filter the full product by checking every consecutive bonding table."""
    spaces = [sorted(seq.level(n).cells) for n in range(1, depth + 1)]
    out = []
    for combo in itertools.product(*spaces):
        if all(
            seq.step(n)[combo[n]] == combo[n - 1] for n in range(1, depth)
        ):
            out.append(cs.Thread(tuple(combo)))
    return tuple(sorted(out))


def oracle_opens(graph):
    """Powerset filter: a set is open iff it equals the union of its min-opens."""
    cells = sorted(graph.cells)
    assert len(cells) <= 12
    opens = []
    for r in range(len(cells) + 1):
        for combo in itertools.combinations(cells, r):
            s = frozenset(combo)
            union = frozenset().union(
                *(graph.topology.min_open[u] for u in s)
            ) if s else frozenset()
            if s == union:
                opens.append(s)
    return opens


def oracle_components(threads, related):
    """BFS components of a symmetric predicate (independent of union-find)."""
    remaining = set(threads)
    classes = []
    while remaining:
        seed = min(remaining)
        comp, frontier = {seed}, [seed]
        while frontier:
            t = frontier.pop()
            for u in list(remaining):
                if u not in comp and related(t, u):
                    comp.add(u)
                    frontier.append(u)
        classes.append(frozenset(comp))
        remaining -= comp
    return sorted(classes, key=min)


def oracle_a_set(seq, depth, anchor, open_set):
    """Literal quantifier loop for the boundary-separated class set."""
    i = anchor.level
    g = seq.level(i)
    ring = frozenset().union(*(oracle_ball(g, u, 1) for u in open_set)) - frozenset(
        open_set
    ) if open_set else frozenset()
    q = cs.quotient(seq, depth)
    boundary = [w for w in q.threads if w.at(i) in ring]
    chosen = []
    for cls in q.classes:
        hit = False
        for z in cls:
            if z.at(i) not in open_set:
                continue
            for j in range(i + 1, depth + 1):
                rel = seq.level(j).relation
                if all(not rel.related(z.at(j), w.at(j)) for w in boundary):
                    hit = True
                    break
            if hit:
                break
        if hit:
            chosen.append(cls)
    return frozenset(chosen)

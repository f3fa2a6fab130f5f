import itertools

import pytest

import cellstruct as cs
from cellstruct.common import HypothesisFailure, StructureError
from cellstruct.graphs import Cell

from conftest import two_level


def all_set_valued_tables(source, target):
    """Every set-valued table between two 2-level structures, smallest first."""
    src_cells = [
        Cell(n, u) for n in (1, 2) for u in sorted(source.level(n).cells)
    ]
    targets = [
        Cell(n, u) for n in (1, 2) for u in sorted(target.level(n).cells)
    ]
    subsets = [
        frozenset(c)
        for r in range(len(targets) + 1)
        for c in itertools.combinations(targets, r)
    ]
    for images in itertools.product(subsets, repeat=len(src_cells)):
        yield cs.GCellMap(table=dict(zip(src_cells, images)))


@pytest.fixture(scope="module")
def tiny_pair():
    source = two_level(["a", "b"], ["c", "d"], [("a", "b")], [("c", "d")], {"c": "a", "d": "b"})
    target = two_level(["p", "q"], ["u", "v"], [("p", "q")], [], {"u": "p", "v": "q"})
    return source, target


class TestWeakMaps:
    def test_identity_is_weak(self, dyadic4):
        rel = cs.thread_relation(dyadic4, 3)
        ident = cs.WeakGCellMap(depth=3, table={t: t for t in rel.threads})
        assert cs.check_weak_gcell(ident, rel, rel).ok

    def test_jump_and_straight_are_weak(self, jump_fixture):
        rG = cs.thread_relation(jump_fixture.source, 2)
        sH = cs.thread_relation(jump_fixture.target, 2)
        for name in ("jump", "straight"):
            f = cs.WeakGCellMap(depth=2, table=jump_fixture.weak_tables[name])
            assert cs.check_weak_gcell(f, rG, sH).ok, name

    def test_related_to_unrelated_fails_with_witness(self, dyadic4):
        rel = cs.thread_relation(dyadic4, 2)
        threads = rel.threads
        far = {threads[0]: threads[0], threads[1]: threads[-1]}
        far.update({t: t for t in threads[2:]})
        f = cs.WeakGCellMap(depth=2, table=far)
        verdict = cs.check_weak_gcell(f, rel, rel)
        assert not verdict.ok
        a, b = verdict.witness
        assert rel.related(a, b) and not rel.related(f.apply(a), f.apply(b))

    def test_depth_mismatch_rejected(self, dyadic4):
        r2, r3 = cs.thread_relation(dyadic4, 2), cs.thread_relation(dyadic4, 3)
        ident = cs.WeakGCellMap(depth=2, table={t: t for t in r2.threads})
        with pytest.raises(StructureError):
            cs.check_weak_gcell(ident, r2, r3)


class TestInducedQuotientMaps:
    def test_identity_induces_identity(self, dyadic4):
        q = cs.quotient(dyadic4, 3)
        ident = cs.WeakGCellMap(depth=3, table={t: t for t in q.threads})
        out = cs.induce_quotient_map(ident, q, q)
        assert out.well_defined.ok and out.commutes
        assert out.map.table == {i: i for i in range(len(q.classes))}

    def test_jump_map_induces_canonical_identification(self, jump_fixture):
        qg = cs.quotient(jump_fixture.source, 2)
        qh = cs.quotient(jump_fixture.target, 2)
        for name in ("jump", "straight"):
            f = cs.WeakGCellMap(depth=2, table=jump_fixture.weak_tables[name])
            out = cs.induce_quotient_map(f, qg, qh)
            assert out.well_defined.ok and out.commutes
            for t in qg.threads:
                expected = qh.class_index(
                    cs.Thread(tuple(f"({t.at(1)},0)" for _ in range(2)))
                )
                assert out.map.table[qg.class_index(t)] == expected
            assert cs.check_quotient_map_continuity(out.map, qg, qh).ok

    def test_non_weak_map_is_ill_defined(self, jump_fixture):
        # send the two members of the spike class to different target classes
        qh = cs.quotient(jump_fixture.target, 2)
        spike_class = max(qh.classes, key=len)
        members = sorted(spike_class)
        table = {t: t for t in qh.threads}
        table[members[0]] = min(qh.threads)
        f = cs.WeakGCellMap(depth=2, table=table)
        out = cs.induce_quotient_map(f, qh, qh)
        assert not out.well_defined.ok
        w1, w2 = out.well_defined.witness
        assert qh.class_index(w1) == qh.class_index(w2)
        assert out.map is None

    def test_collapsing_closed_class_into_open_only_class_discontinuous(self):
        seq = cs.khalimsky_interval(2, 1)  # cells 0,1,2 per level
        q = cs.quotient(seq, 2)
        assert len(q.classes) == 3
        # send the middle (closed) class to an open endpoint class, fixing ends
        by_cell = {q.representative(i).at(1): i for i in range(3)}
        F = cs.QuotientMap(
            depth=2,
            table={
                by_cell["0"]: by_cell["0"],
                by_cell["1"]: by_cell["0"],
                by_cell["2"]: by_cell["2"],
            },
        )
        verdict = cs.check_quotient_map_continuity(F, q, q)
        assert not verdict.ok and verdict.witness is not None


class TestSemicontinuity:
    def test_discrete_levels_always_semicontinuous(self, tiny_pair):
        source, target = tiny_pair
        tables = [
            {Cell(1, "a"): frozenset([Cell(1, "p")]), Cell(1, "b"): frozenset()},
            {
                Cell(1, "a"): frozenset([Cell(1, "p"), Cell(2, "u")]),
                Cell(2, "c"): frozenset([Cell(2, "v")]),
            },
        ]
        for table in tables:
            f = cs.GCellMap(table=table)
            for side in ("upper", "lower"):
                assert cs.check_semicontinuity(f, source, target, side).ok

    def test_full_image_map_semicontinuous_both_sides(self, full_image3):
        for side in ("upper", "lower"):
            assert cs.check_semicontinuity(
                full_image3.gcell, full_image3.source, full_image3.target, side
            ).ok, side

    def test_khalimsky_jump_breaks_upper_semicontinuity(self):
        source = cs.khalimsky_interval(1, 1)  # one level: 0,1,2
        target = cs.khalimsky_interval(1, 1)
        f = cs.GCellMap(
            table={
                Cell(1, "0"): frozenset([Cell(1, "0")]),
                Cell(1, "1"): frozenset([Cell(1, "2")]),
                Cell(1, "2"): frozenset([Cell(1, "2")]),
            }
        )
        verdict = cs.check_semicontinuity(f, source, target, "upper")
        assert not verdict.ok
        k, w, bad = verdict.witness
        assert k == 1 and bad == Cell(1, "1")

    def test_invalid_side_rejected(self, full_image3):
        with pytest.raises(StructureError):
            cs.check_semicontinuity(
                full_image3.gcell, full_image3.source, full_image3.target, "sideways"
            )


class TestGCellMapConditions:
    def test_full_image_passes_all_four(self, full_image3):
        threads = cs.enumerate_threads(full_image3.source, 3)
        report = cs.check_gcell_map(
            full_image3.gcell, full_image3.source, full_image3.target, threads
        )
        assert report.ok

    def test_family_induced_map_passes(self, jump_fixture):
        fam = cs.LevelMapFamily(
            tables=tuple(jump_fixture.level_tables["straight"] for _ in range(2))
        )
        f = cs.family_to_gcell(fam, jump_fixture.source, jump_fixture.target)
        threads = cs.enumerate_threads(jump_fixture.source, 2)
        assert cs.check_gcell_map(
            f, jump_fixture.source, jump_fixture.target, threads
        ).ok

    def test_broken_nesting_detected(self, full_image3):
        table = dict(full_image3.gcell.table)
        victim = Cell(3, "0")
        # drop the level-1 part of one deep image: projection now escapes
        table[victim] = frozenset(c for c in table[victim] if c.level != 1)
        broken = cs.GCellMap(table=table)
        threads = cs.enumerate_threads(full_image3.source, 3)
        report = cs.check_gcell_map(
            broken, full_image3.source, full_image3.target, threads
        )
        assert not report.condition1.ok
        x, i, j = report.condition1.witness
        assert x == victim and i == 1

    def test_hausdorff_failure_detected_on_coarse_target(self):
        # target level is a Khalimsky triple: {0,1,2} is not Hausdorff
        source = two_level(["a"], ["b"], [], [], {"b": "a"})
        target = two_level(
            ["0", "1", "2"],
            ["0", "1", "2"],
            [],
            [],
            {u: u for u in ("0", "1", "2")},
            min_open1={"0": ["0"], "1": ["0", "1", "2"], "2": ["2"]},
            min_open2=None,
        )
        f = cs.GCellMap(
            table={
                Cell(1, "a"): frozenset([Cell(1, c) for c in ("0", "1", "2")]),
                Cell(2, "b"): frozenset([Cell(1, c) for c in ("0", "1", "2")]),
            }
        )
        threads = cs.enumerate_threads(source, 2)
        report = cs.check_gcell_map(f, source, target, threads)
        assert not report.condition4.ok


class TestClosenessPreservation:
    def test_singleton_identity_like_map(self, cantor4):
        threads = cs.enumerate_threads(cantor4, 2)
        fam = cs.LevelMapFamily(
            tables=tuple({u: u for u in cantor4.level(n).cells} for n in (1, 2))
        )
        sub = cs.InverseSequence(levels=cantor4.levels[:2], bonding=cs.BondingFamily(cantor4.bonding.maps[:1]))
        f = cs.family_to_gcell(fam, sub, sub)
        assert cs.check_closeness_preservation(f, sub, sub, threads).ok

    def test_edge_condition_violation_can_break_closeness(self, tiny_pair):
        source, target = tiny_pair
        threads = cs.enumerate_threads(source, 2)
        f = cs.GCellMap(
            table={
                Cell(1, "a"): frozenset([Cell(2, "u")]),
                Cell(1, "b"): frozenset([Cell(2, "v")]),
                Cell(2, "c"): frozenset([Cell(2, "u")]),
                Cell(2, "d"): frozenset([Cell(2, "v")]),
            }
        )
        report = cs.check_gcell_map(f, source, target, threads)
        assert not report.condition3.ok  # u, v unrelated at level 2
        verdict = cs.check_closeness_preservation(f, source, target, threads)
        assert not verdict.ok
        xi, yj, a, b = verdict.witness
        assert not cs.is_close(target, a, b)


class TestFamilyToGCell:
    def test_identity_family_unwinds_to_projections(self, dyadic4):
        fam = cs.LevelMapFamily(
            tables=tuple({u: u for u in dyadic4.level(n).cells} for n in range(1, 5))
        )
        f = cs.family_to_gcell(fam, dyadic4, dyadic4)
        x = Cell(3, "5")
        assert cs.cell_image(f, x) == frozenset(
            [Cell(1, "1"), Cell(2, "2"), Cell(3, "5")]
        )

    def test_spike_family_images_are_horizontal(self, jump_fixture):
        fam = cs.LevelMapFamily(
            tables=tuple(jump_fixture.level_tables["straight"] for _ in range(2))
        )
        f = cs.family_to_gcell(fam, jump_fixture.source, jump_fixture.target)
        for x, image in f.table.items():
            assert all(c.id.endswith(",0)") for c in image)

    def test_perturbed_family_rejected_with_witness(self, dyadic4):
        tables = [dict({u: u for u in dyadic4.level(n).cells}) for n in range(1, 5)]
        tables[2]["5"] = "4"  # breaks the commuting square under the parent map
        with pytest.raises(HypothesisFailure) as err:
            cs.family_to_gcell(cs.LevelMapFamily(tables=tuple(tables)), dyadic4, dyadic4)
        assert err.value.witness is not None

    def test_edge_breaking_family_rejected(self, tiny_pair):
        source, target = tiny_pair
        fam = cs.LevelMapFamily(
            tables=({"a": "p", "b": "q"}, {"c": "u", "d": "v"})
        )
        with pytest.raises(HypothesisFailure) as err:
            cs.family_to_gcell(fam, source, target)
        assert err.value.witness[0] == 2  # (u, v) unrelated at level 2


class TestInducedWeakFromGCell:
    def test_full_image_trace_and_selection(self, full_image3):
        threads = cs.enumerate_threads(full_image3.source, 3)
        out = cs.gcell_induce_weak(
            full_image3.gcell, full_image3.source, full_image3.target, threads
        )
        least = min(cs.enumerate_threads(full_image3.target, 3))
        for t in threads:
            tr = out.trace[t]
            assert tr.alphas == (1, 2, 3)
            assert [sorted(s) for s in tr.slices] == [
                sorted(full_image3.target.level(k).cells) for k in (1, 2, 3)
            ]
            assert out.map.apply(t) == least

    def test_singleton_map_gives_image_thread(self, jump_fixture):
        fam = cs.LevelMapFamily(
            tables=tuple(jump_fixture.level_tables["straight"] for _ in range(2))
        )
        f = cs.family_to_gcell(fam, jump_fixture.source, jump_fixture.target)
        threads = cs.enumerate_threads(jump_fixture.source, 2)
        out = cs.gcell_induce_weak(f, jump_fixture.source, jump_fixture.target, threads)
        for t in threads:
            assert out.map.apply(t) == cs.Thread(
                tuple(f"({t.at(1)},0)" for _ in range(2))
            )

    def test_unreachable_level_errors_naming_the_level(self, tiny_pair):
        source, target = tiny_pair
        threads = cs.enumerate_threads(source, 2)
        f = cs.GCellMap(
            table={
                Cell(1, "a"): frozenset([Cell(1, "p")]),
                Cell(1, "b"): frozenset([Cell(1, "p")]),
                Cell(2, "c"): frozenset([Cell(1, "p")]),
                Cell(2, "d"): frozenset([Cell(1, "p")]),
            }
        )
        with pytest.raises(HypothesisFailure) as err:
            cs.gcell_induce_weak(f, source, target, threads)
        assert err.value.witness[1] == 2  # no slice ever reaches target level 2


class TestSingletonContinuity:
    def test_family_induced_singleton_map_continuous(self, cantor4):
        sub = cs.InverseSequence(
            levels=cantor4.levels[:3], bonding=cs.BondingFamily(cantor4.bonding.maps[:2])
        )
        fam = cs.LevelMapFamily(
            tables=tuple({u: u for u in sub.level(n).cells} for n in (1, 2, 3))
        )
        f = cs.family_to_gcell(fam, sub, sub)
        threads = cs.enumerate_threads(sub, 3)
        report = cs.check_singleton_continuity(f, sub, sub, threads)
        assert report.hypotheses_ok
        assert report.continuity is not None and report.continuity.ok

    def test_full_image_hypothesis_fails_no_conclusion(self, full_image3):
        threads = cs.enumerate_threads(full_image3.source, 3)
        report = cs.check_singleton_continuity(
            full_image3.gcell, full_image3.source, full_image3.target, threads
        )
        assert report.upper_semicontinuous.ok
        assert not report.singleton_slices.ok
        assert report.induced is None and report.continuity is None


class TestDTInducedMaps:
    def test_levelwise_identity_on_diagonal_fixture_is_identity(self, cantor4):
        ident = cs.DTCellMap(
            level_profile={n: n for n in range(1, 5)},
            tables={n: {u: u for u in cantor4.level(n).cells} for n in range(1, 5)},
        )
        f = cs.dt_induce_weak(ident, cantor4, cantor4, 4)
        for t in cs.enumerate_threads(cantor4, 4):
            assert f.apply(t) == t

    def test_levelwise_identity_on_dyadic_lands_in_same_class(self, dyadic4):
        ident = cs.DTCellMap(
            level_profile={n: n for n in range(1, 5)},
            tables={n: {u: u for u in dyadic4.level(n).cells} for n in range(1, 5)},
        )
        f = cs.dt_induce_weak(ident, dyadic4, dyadic4, 4)
        rel = cs.thread_relation(dyadic4, 4)
        for t in cs.enumerate_threads(dyadic4, 4):
            assert rel.related(f.apply(t), t)

    def test_level_shift_recovers_thread_up_to_closeness(self, dyadic4):
        shift = cs.DTCellMap(
            level_profile={1: 1, 2: 1, 3: 2, 4: 3},
            tables={
                1: {u: u for u in dyadic4.level(1).cells},
                **{n: cs.compose_bonding(dyadic4, n - 1, n) for n in (2, 3, 4)},
            },
        )
        f = cs.dt_induce_weak(shift, dyadic4, dyadic4, 4)
        for t in cs.enumerate_threads(dyadic4, 4):
            image = f.apply(t)
            # the image sequence stops one level short of the truncation, so
            # levels below the truncation match up to closeness and the
            # deepest image coordinate is pinned only against the source's
            # next-to-last coordinate
            for i in range(1, 4):
                assert cs.is_close(dyadic4, Cell(i, image.at(i)), Cell(i, t.at(i)))
            assert cs.is_close(dyadic4, Cell(4, image.at(4)), Cell(3, t.at(3)))

    def test_close_breaking_map_rejected(self, dyadic4):
        bad_tables = {n: {u: u for u in dyadic4.level(n).cells} for n in range(1, 5)}
        bad_tables[2]["0"] = "3"  # 0 and 1 are close, their images are not
        bad = cs.DTCellMap(level_profile={n: n for n in range(1, 5)}, tables=bad_tables)
        with pytest.raises(HypothesisFailure):
            cs.dt_induce_weak(bad, dyadic4, dyadic4, 4)

    def test_output_is_weak_when_target_contracts_three_balls(self, cantor4):
        report = cs.check_cell_structure(cantor4, 4)
        assert report.three_ball_ok
        ident = cs.DTCellMap(
            level_profile={n: n for n in range(1, 5)},
            tables={n: {u: u for u in cantor4.level(n).cells} for n in range(1, 5)},
        )
        f = cs.dt_induce_weak(ident, cantor4, cantor4, 4)
        rel = cs.thread_relation(cantor4, 4)
        assert cs.check_weak_gcell(f, rel, rel).ok


class TestLift:
    def test_discrete_levels_satisfy_ball_shrinking(self, cantor4):
        q = cs.quotient(cantor4, 3)
        F = cs.QuotientMap(depth=3, table={i: i for i in range(len(q.classes))})
        report = cs.lift_quotient_map(F, q, q)
        assert report.ball_shrinks.ok
        assert report.induces_original
        assert report.lift_continuity.ok

    def test_jump_fixture_default_lift_is_continuous(self, jump_fixture):
        qg = cs.quotient(jump_fixture.source, 2)
        qh = cs.quotient(jump_fixture.target, 2)
        straight = cs.WeakGCellMap(depth=2, table=jump_fixture.weak_tables["straight"])
        F = cs.induce_quotient_map(straight, qg, qh).map
        report = cs.lift_quotient_map(F, qg, qh)
        assert report.induces_original
        # the least representative of the spike class is its foot, so the
        # default lift is the continuous choice; the spike-tip choice fails
        assert report.lift_continuity.ok
        search = report.representative_search
        assert search.searched and search.total == 5
        assert search.continuous_count == 1
        assert not report.ball_shrinks.ok
        assert not report.saturation.ok

    def test_every_class_map_lifts_to_itself(self, jump_fixture):
        qg = cs.quotient(jump_fixture.source, 2)
        qh = cs.quotient(jump_fixture.target, 2)
        n_src, n_dst = len(qg.classes), len(qh.classes)
        for combo in itertools.product(range(n_dst), repeat=n_src):
            F = cs.QuotientMap(depth=2, table=dict(enumerate(combo)))
            report = cs.lift_quotient_map(F, qg, qh, rep_search_limit=0)
            assert report.induces_original


class TestConstructFromClassMap:
    def test_simplex_target_full_preimage(self, tiny_pair):
        source, _ = tiny_pair
        target = two_level(
            ["0", "1"], ["0", "1", "2"],
            [("0", "1")], [("0", "1"), ("1", "2"), ("0", "2")],
            {"0": "0", "1": "1", "2": "1"},
        )
        qg, qh = cs.quotient(source, 2), cs.quotient(target, 2)
        assert len(qh.classes) == 1
        F = cs.QuotientMap(depth=2, table={i: 0 for i in range(len(qg.classes))})
        report = cs.construct_gcell_from_quotient_map(F, qg, qh)
        assert report.conditions.ok
        assert "threads-through" in report.interpretation
        for x, image in report.map.table.items():
            got_threads = {c for c in image}
            assert got_threads == {
                Cell(j, w.at(j)) for w in qh.threads for j in (1, 2)
            }

    def test_non_simplex_first_level_rejected(self):
        flat = two_level(["a", "b"], ["c"], [], [], {"c": "a"})
        q = cs.quotient(flat, 1)
        with pytest.raises(HypothesisFailure) as err:
            cs.construct_gcell_from_quotient_map(
                cs.QuotientMap(depth=1, table={i: 0 for i in range(len(q.classes))}),
                q,
                q,
            )
        assert "simplex" in str(err.value)

    def test_discontinuous_class_map_rejected(self):
        seq = cs.khalimsky_interval(2, 1)
        q = cs.quotient(seq, 2)
        by_cell = {q.representative(i).at(1): i for i in range(3)}
        F = cs.QuotientMap(
            depth=2,
            table={
                by_cell["0"]: by_cell["0"],
                by_cell["1"]: by_cell["0"],
                by_cell["2"]: by_cell["2"],
            },
        )
        with pytest.raises(HypothesisFailure):
            cs.construct_gcell_from_quotient_map(F, q, q)

    def test_spiked_target_rejected_by_simplex_gate(self):
        # the spiked interval's first level has unrelated horizontal cells,
        # so the construction's simplex hypothesis correctly refuses it
        src = cs.unit_interval(2, 2)
        dst = cs.spiked_interval(2, 2)
        qg, qh = cs.quotient(src, 2), cs.quotient(dst, 2)
        straight = cs.WeakGCellMap(
            depth=2, table=cs.jump_map_fixture(2, 2, khalimsky=False).weak_tables["straight"]
        )
        F = cs.induce_quotient_map(straight, qg, qh).map
        with pytest.raises(HypothesisFailure) as err:
            cs.construct_gcell_from_quotient_map(F, qg, qh)
        assert "simplex" in str(err.value)

    def test_partial_simplex_levels_prune_but_build(self):
        # target level 2 is not a simplex, level 1 is: the construction keeps
        # level 1 everywhere and prunes level 2, and the conditions report
        # records how far that gets at this depth
        src = two_level(["a", "b"], ["c", "d"], [("a", "b")], [("c", "d")], {"c": "a", "d": "b"})
        dst = two_level(["p", "q"], ["u", "v"], [("p", "q")], [], {"u": "p", "v": "q"})
        qg, qh = cs.quotient(src, 2), cs.quotient(dst, 2)
        assert len(qg.classes) == 1 and len(qh.classes) == 2
        F = cs.QuotientMap(depth=2, table={0: 0})
        report = cs.construct_gcell_from_quotient_map(F, qg, qh)
        image = cs.cell_image(report.map, Cell(1, "a"))
        assert image and all(c.level == 1 for c in image)
        assert not report.conditions.condition4.ok  # level 2 never reached


def khalimsky_glued_pair():
    """Two Khalimsky levels, 0 and 1 related: 3 threads, 2 classes."""
    min_open = {"0": ["0"], "1": ["0", "1", "2"], "2": ["2"]}
    return two_level(
        ["0", "1", "2"],
        ["0", "1", "2"],
        [("0", "1")],
        [("0", "1")],
        {u: u for u in ("0", "1", "2")},
        min_open1=min_open,
        min_open2=min_open,
    )


class TestMachineChecks:
    """Exhaustive small-fixture verification of the structural theorems."""

    def test_continuous_weak_maps_induce_continuous_class_maps(self):
        source = khalimsky_glued_pair()
        rel = cs.thread_relation(source, 2)
        q = cs.quotient(source, 2)
        threads = rel.threads
        checked = kept = 0
        for images in itertools.product(threads, repeat=len(threads)):
            f = cs.WeakGCellMap(depth=2, table=dict(zip(threads, images)))
            if not cs.check_weak_gcell(f, rel, rel).ok:
                continue
            if not cs.check_thread_map_continuity(f, source, source).ok:
                continue
            checked += 1
            out = cs.induce_quotient_map(f, q, q)
            assert out.well_defined.ok
            verdict = cs.check_quotient_map_continuity(out.map, q, q)
            assert verdict.ok, (dict(zip(threads, images)), verdict.witness)
            kept += 1
        assert checked == kept > 0

    def test_well_definedness_follows_from_weakness(self):
        source = khalimsky_glued_pair()
        rel = cs.thread_relation(source, 2)
        q = cs.quotient(source, 2)
        threads = rel.threads
        for images in itertools.product(threads, repeat=len(threads)):
            f = cs.WeakGCellMap(depth=2, table=dict(zip(threads, images)))
            if cs.check_weak_gcell(f, rel, rel).ok:
                assert cs.induce_quotient_map(f, q, q).well_defined.ok

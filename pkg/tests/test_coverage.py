import random
import warnings

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import anchor, coverage_table, is_cycle, is_forest, max_coverage
from ringeq.coverage import (
    GeneralGraph,
    Verdict,
    arc_coverage,
    contract_bridges,
    covering_demands,
    naive_max_coverage,
    round_trip_scan,
    scan_cycle_obstructions,
    strong_uniqueness,
    uniqueness_verdict,
)
from ringeq.errors import CycleBoundExceeded, UnknownTerminal, ValidationError
from ringeq.generators import random_ring
from ringeq.ring import NEG, POS, RingInstance
from test_ring import SEVEN_DEMANDS, SEVEN_LABELS, rings

TRIANGLE = RingInstance(("u", "w", "v"), (("u", "w"), ("u", "v"), ("w", "v")))
SEVEN = RingInstance(tuple(SEVEN_LABELS), tuple(SEVEN_DEMANDS))


def directional_range(inst, step):
    counts = [len(J) for (_t, _h, _e, s), J in coverage_table(list(inst.vertices), inst.demands).items() if s == step]
    return min(counts), max(counts)


class TestNaive:
    def test_seven_ring(self):
        rep = naive_max_coverage(SEVEN)
        assert (rep.max_coverage, rep.verdict) == (2, Verdict.UNIQUE)

    def test_triangle(self):
        rep = naive_max_coverage(TRIANGLE)
        assert (rep.max_coverage, rep.verdict) == (3, Verdict.NON_UNIQUE)
        assert arc_coverage(TRIANGLE)[rep.witness_arc] == 3
        assert rep.witness_demands == (0, 1, 2)

    def test_single_demand(self):
        rep = naive_max_coverage(RingInstance(("a", "b", "c"), (("a", "c"),)))
        assert (rep.max_coverage, rep.verdict) == (1, Verdict.UNIQUE)

    @given(rings())
    def test_matches_oracle(self, inst):
        rep = naive_max_coverage(inst)
        assert rep.max_coverage == max_coverage(list(inst.vertices), inst.demands)
        assert arc_coverage(inst)[rep.witness_arc] == rep.max_coverage
        assert (rep.verdict is Verdict.UNIQUE) == (rep.max_coverage <= 2)


class TestRoundTrip:
    @pytest.mark.parametrize("start", SEVEN_LABELS)
    @pytest.mark.parametrize("direction", [POS, NEG])
    def test_seven_ring_any_start(self, start, direction):
        assert round_trip_scan(SEVEN, start, direction)[2] == 2

    def test_triangle(self):
        assert round_trip_scan(TRIANGLE, "u")[2] == 3

    def test_shared_arc_fills_the_list(self):
        # every demand leaves a and passes b -> c
        inst = RingInstance(("a", "b", "c", "d", "e"), (("a", "c"), ("a", "d"), ("b", "d"), ("b", "e")))
        lo, hi, cov = round_trip_scan(inst, "a", POS)
        assert hi == inst.num_demands

    @given(rings(), st.data())
    def test_equals_naive_and_oracle_ranges(self, inst, data):
        start = data.draw(st.sampled_from(inst.vertices))
        for direction in (POS, NEG):
            lo, hi, cov = round_trip_scan(inst, start, direction)
            assert cov == naive_max_coverage(inst).max_coverage
            assert (lo, hi) == directional_range(inst, direction)

    @given(rings())
    def test_each_demand_uses_each_edge_once_complement(self, inst):
        # per edge: routes through a+ plus routes through a- equals |L|
        cov = arc_coverage(inst)
        for e in range(inst.n):
            assert cov[(e, POS)] + cov[(e, NEG)] == inst.num_demands

    def test_unknown_start(self):
        with pytest.raises(UnknownTerminal):
            round_trip_scan(TRIANGLE, "zz")


class TestCoveringDemands:
    @given(rings(), st.data())
    def test_witness_is_exact(self, inst, data):
        start = data.draw(st.sampled_from(inst.vertices))
        direction = data.draw(st.sampled_from([POS, NEG]))
        arc, members = covering_demands(inst, start, direction)
        table = coverage_table(list(inst.vertices), inst.demands)
        t, h = inst.endpoints(arc)
        expected = table[(t, h, arc.edge, arc.sign)]
        assert set(members) == expected
        assert len(members) == max_coverage(list(inst.vertices), inst.demands)


class TestVerdict:
    def test_two_demands_short_circuit(self):
        inst = RingInstance(("a", "b", "c", "d"), (("a", "c"), ("b", "d")))
        rep = uniqueness_verdict(inst)
        assert rep.verdict is Verdict.UNIQUE and rep.shortcut is not None
        assert rep.max_coverage is None
        assert rep.complete().max_coverage == 2

    def test_five_demands_short_circuit(self):
        rng = random.Random(5)
        for _ in range(50):
            inst = random_ring(rng, 8, 10)
            if inst.num_demands >= 5:
                rep = uniqueness_verdict(inst)
                assert rep.verdict is Verdict.NON_UNIQUE
                assert rep.complete().max_coverage >= 3

    def test_triangle_witness(self):
        rep = uniqueness_verdict(TRIANGLE)
        assert rep.verdict is Verdict.NON_UNIQUE
        assert arc_coverage(TRIANGLE)[rep.witness_arc] == 3

    @given(rings())
    def test_fast_and_full_agree(self, inst):
        assert uniqueness_verdict(inst).verdict is uniqueness_verdict(inst, fast=False).verdict


class TestStrongUniqueness:
    def test_triangle(self):
        ok, cycle = strong_uniqueness(GeneralGraph(("u", "w", "v"), (("u", "w"), ("w", "v"), ("v", "u"))))
        assert not ok
        assert cycle == ["u", "w", "v"]

    def test_parallel_edges(self):
        assert strong_uniqueness(GeneralGraph(("a", "b"), (("a", "b"),) * 7)) == (True, None)

    def test_tree(self):
        g = GeneralGraph(tuple("abcdef"), (("a", "b"), ("a", "c"), ("c", "d"), ("c", "e"), ("e", "f")))
        assert strong_uniqueness(g) == (True, None)

    def test_loop_rejected(self):
        with pytest.raises(ValidationError):
            GeneralGraph(("a",), (("a", "a"),))

    @given(st.integers(1, 10).flatmap(lambda n: st.tuples(
        st.just(n),
        st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)).filter(lambda e: e[0] != e[1]), max_size=14),
    )))
    def test_against_forest_oracle(self, drawn):
        n, edges = drawn
        vertices = tuple(range(n))
        ok, cycle = strong_uniqueness(GeneralGraph(vertices, tuple(edges)))
        assert ok == is_forest(vertices, edges)
        if not ok:
            assert is_cycle(vertices, edges, cycle)


TRI_PENDANT = GeneralGraph(("u", "w", "v", "p", "q"), (("u", "w"), ("w", "v"), ("v", "u"), ("v", "p"), ("p", "q")))


class TestScan:
    def test_plain_cycle(self):
        g = GeneralGraph(("u", "w", "v"), (("u", "w"), ("w", "v"), ("v", "u")))
        res = scan_cycle_obstructions(g, TRIANGLE.demands)
        assert res.status == "NonUnique"
        assert set(res.cycle) == {"u", "w", "v"}
        assert res.demands == (0, 1, 2)

    def test_tree_is_inconclusive(self):
        g = GeneralGraph(("a", "b", "c"), (("a", "b"), ("b", "c")))
        res = scan_cycle_obstructions(g, [("a", "c"), ("c", "a"), ("b", "a")])
        assert res.status == "Inconclusive"
        assert res.cycles_checked == 0

    def test_cycle_with_pendant_path(self):
        res = scan_cycle_obstructions(TRI_PENDANT, TRIANGLE.demands)
        assert res.status == "NonUnique"
        assert set(res.cycle) == {"u", "w", "v"}

    def test_pendant_terminal_is_moved_onto_the_cycle(self):
        # q hangs off v through bridges, so (u, q) behaves like (u, v)
        res = scan_cycle_obstructions(TRI_PENDANT, [("u", "w"), ("u", "q"), ("w", "v")])
        assert res.status == "NonUnique"
        assert res.demands == (0, 1, 2)

    def test_unknown_terminal(self):
        with pytest.raises(UnknownTerminal):
            scan_cycle_obstructions(TRI_PENDANT, [("u", "zz")])

    def test_length_bound_warns(self):
        n = 6
        g = GeneralGraph(tuple(range(n)), tuple((i, (i + 1) % n) for i in range(n)))
        with pytest.warns(CycleBoundExceeded):
            res = scan_cycle_obstructions(g, [(0, 2), (1, 3), (2, 4)], max_cycle=4)
        assert res.truncated and res.status == "Inconclusive"

    def test_bridges_contracted(self):
        multi, rep = contract_bridges(TRI_PENDANT)
        assert rep["q"] == rep["p"] == rep["v"]
        assert multi.number_of_edges() == 3

    def test_witnesses_are_sound(self):
        rng = random.Random(11)
        found = 0
        for _ in range(300):
            n = rng.randint(3, 7)
            edges = {tuple(sorted(rng.sample(range(n), 2))) for _ in range(rng.randint(n - 1, 2 * n))}
            g = GeneralGraph(tuple(range(n)), tuple(edges))
            demands = list({tuple(rng.sample(range(n), 2)) for _ in range(rng.randint(1, 6))})
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", CycleBoundExceeded)
                res = scan_cycle_obstructions(g, demands)
            if is_forest(g.vertices, g.edges):
                assert res.status == "Inconclusive"
            if res.non_unique:
                found += 1
                assert is_cycle(g.vertices, g.edges, res.cycle)
                chosen = [
                    (anchor(g.vertices, g.edges, o, res.cycle), anchor(g.vertices, g.edges, d, res.cycle))
                    for o, d in (demands[i] for i in res.demands)
                ]
                assert all(o is not None and d is not None and o != d for o, d in chosen)
                assert max_coverage(res.cycle, chosen) >= 3
        assert found > 0

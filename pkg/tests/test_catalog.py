import random
from itertools import permutations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import max_coverage
from ringeq.catalog import (
    contained_obstruction,
    covering_maximal,
    enumerate_maximal_uniqueness,
    enumerate_minimal_obstructions,
    match_catalog,
    uniqueness_rings,
)
from ringeq.coverage import Verdict, uniqueness_verdict
from ringeq.errors import Rejected, SizeBound, ValidationError
from ringeq.generators import random_ring
from ringeq.mixed import (
    MixedGraph,
    canonical_form,
    contract_edge,
    general_canonical_form,
    generic_is_homeo_minor,
    is_homeo_minor,
    ring_is_minor,
    subdivide_edge,
    suppress_degree2,
    suppress_ring,
)
from ringeq.ring import RingInstance, iter_rings
from test_ring import SEVEN_DEMANDS, SEVEN_LABELS, rings

TRIANGLE = RingInstance(("u", "w", "v"), (("u", "w"), ("u", "v"), ("w", "v")))
SEVEN = RingInstance(tuple(SEVEN_LABELS), tuple(SEVEN_DEMANDS))


def ring_graph(labels, demands):
    return MixedGraph.from_ring(RingInstance(tuple(labels), tuple(demands)))


def relabel(g, mapping):
    return MixedGraph(
        tuple(mapping[v] for v in g.vertices),
        tuple((mapping[u], mapping[v]) for u, v in g.edges),
        tuple((mapping[u], mapping[v]) for u, v in g.arcs),
    )


def brute_isomorphic(g, h):
    if len(g.vertices) != len(h.vertices) or len(g.edges) != len(h.edges) or len(g.arcs) != len(h.arcs):
        return False
    target_edges = sorted(tuple(sorted(map(str, e))) for e in h.edges)
    target_arcs = sorted(h.arcs)
    for perm in permutations(h.vertices):
        m = dict(zip(g.vertices, perm))
        if sorted(tuple(sorted(str(m[x]) for x in e)) for e in g.edges) != target_edges:
            continue
        if sorted((m[o], m[d]) for o, d in g.arcs) == target_arcs:
            return True
    return False


@st.composite
def mixed_graphs(draw, max_n=5):
    n = draw(st.integers(2, max_n))
    vs = list(range(n))
    pair = st.tuples(st.sampled_from(vs), st.sampled_from(vs)).filter(lambda p: p[0] != p[1])
    edges = draw(st.lists(pair, max_size=7))
    arcs = draw(st.lists(pair, max_size=4, unique=True))
    return MixedGraph(tuple(vs), tuple(edges), tuple(arcs))


class TestOperations:
    def test_contract_keeps_demands(self):
        g = ring_graph("abcd", [("a", "c"), ("b", "d")])
        h = contract_edge(g, ("a", "b"))
        ring = h.as_ring()
        assert ring is not None and ring.n == 3
        assert h.arcs == (("a", "c"), ("a", "d"))

    def test_contract_demand_endpoints_rejected(self):
        with pytest.raises(Rejected):
            contract_edge(ring_graph("abc", [("a", "b")]), ("a", "b"))

    def test_contract_creating_repeat_rejected(self):
        with pytest.raises(Rejected):
            contract_edge(ring_graph("abc", [("a", "c"), ("b", "c")]), ("a", "b"))

    def test_contract_two_cycle(self):
        with pytest.raises(Rejected):
            contract_edge(ring_graph("uw", [("u", "w")]), 0)
        single = contract_edge(MixedGraph(("u", "w"), (("u", "w"), ("w", "u")), ()), 0)
        assert single.vertices == ("u",) and single.edges == ()

    def test_missing_edge(self):
        with pytest.raises(ValidationError):
            contract_edge(ring_graph("abcd", [("a", "c")]), ("a", "c"))

    def test_suppress_subdivided_triangle(self):
        g = MixedGraph.from_ring(TRIANGLE)
        g = subdivide_edge(subdivide_edge(g, 0, "s1"), 0, "s2")
        assert len(g.vertices) == 5
        assert canonical_form(suppress_degree2(g)) == canonical_form(MixedGraph.from_ring(TRIANGLE))

    def test_suppress_all_terminals_unchanged(self):
        g = MixedGraph.from_ring(TRIANGLE)
        assert suppress_degree2(g) == g

    def test_suppress_six_ring(self):
        g = ring_graph("abcdef", [("a", "c"), ("c", "e"), ("e", "a")])
        out = suppress_degree2(g)
        assert sorted(out.vertices) == ["a", "c", "e"]
        assert out.as_ring().n == 3

    @given(mixed_graphs(), st.randoms())
    def test_canonical_form_invariant_under_relabelling(self, g, rnd):
        targets = [f"z{i}" for i in range(len(g.vertices))]
        rnd.shuffle(targets)
        h = relabel(g, dict(zip(g.vertices, targets)))
        assert general_canonical_form(g) == general_canonical_form(h)
        assert canonical_form(g) == canonical_form(h)

    @given(mixed_graphs(max_n=4), mixed_graphs(max_n=4))
    def test_canonical_form_decides_isomorphism(self, g, h):
        assert (general_canonical_form(g) == general_canonical_form(h)) == brute_isomorphic(g, h)

    @given(mixed_graphs(), st.randoms())
    def test_rejection_stable_under_relabelling(self, g, rnd):
        targets = list(range(100, 100 + len(g.vertices)))
        rnd.shuffle(targets)
        m = dict(zip(g.vertices, targets))
        h = relabel(g, m)
        for k in range(len(g.edges)):
            try:
                out = contract_edge(g, k)
            except Rejected:
                with pytest.raises(Rejected):
                    contract_edge(h, k)
                continue
            assert len(out.vertices) < len(g.vertices)
            assert general_canonical_form(out) == general_canonical_form(contract_edge(h, k))


class TestMinors:
    def test_self(self):
        g = MixedGraph.from_ring(TRIANGLE)
        assert is_homeo_minor(g, g)
        assert is_homeo_minor(MixedGraph.from_ring(SEVEN), MixedGraph.from_ring(SEVEN))

    def test_one_demand_two_cycle_in_seven_ring(self):
        assert is_homeo_minor(ring_graph("uw", [("u", "w")]), MixedGraph.from_ring(SEVEN))

    def test_triangle_not_in_unique_rings(self):
        tri = TRIANGLE
        for n in range(3, 7):
            for k in (3, 4):
                for inst in iter_rings(n, k):
                    if max_coverage(list(inst.vertices), inst.demands) <= 2:
                        assert not ring_is_minor(tri, inst)

    def test_ring_and_generic_agree(self):
        rng = random.Random(4)
        for _ in range(60):
            small = random_ring(rng, 4, 3)
            big = random_ring(rng, 5, 4)
            expected = ring_is_minor(suppress_ring(small), big)
            assert generic_is_homeo_minor(MixedGraph.from_ring(small), MixedGraph.from_ring(big)) == expected

    def test_size_bound(self):
        vs = tuple(range(11))
        g = MixedGraph(vs, tuple((i, i + 1) for i in range(10)), ((0, 10),))
        with pytest.raises(SizeBound):
            is_homeo_minor(g, g)


@pytest.fixture(scope="module")
def obstructions():
    return enumerate_minimal_obstructions()


@pytest.fixture(scope="module")
def maximal():
    return enumerate_maximal_uniqueness()


class TestObstructions:
    def test_count(self, obstructions):
        assert len(obstructions) == 9

    def test_triangle_present(self, obstructions):
        forms = {canonical_form(g) for g in obstructions}
        assert canonical_form(MixedGraph.from_ring(TRIANGLE)) in forms

    def test_each_has_three_covered_arc(self, obstructions):
        for g in obstructions:
            ring = g.as_ring()
            assert max_coverage(list(ring.vertices), ring.demands) >= 3

    def test_no_further_contraction(self, obstructions):
        for g in obstructions:
            for k in range(len(g.edges)):
                try:
                    h = contract_edge(g, k)
                except Rejected:
                    continue
                ring = h.as_ring()
                assert ring is None or max_coverage(list(ring.vertices), ring.demands) <= 2

    def test_distinct(self, obstructions):
        assert len({canonical_form(g) for g in obstructions}) == 9


class TestMaximalUniqueness:
    def test_count(self, maximal):
        assert len(maximal) == 9

    def test_one_with_a_single_demand(self, maximal):
        assert sum(1 for g in maximal if len(g.arcs) == 1) == 1

    def test_all_unique_and_all_terminal(self, maximal):
        for g in maximal:
            ring = g.as_ring()
            assert max_coverage(list(ring.vertices), ring.demands) <= 2
            assert g.terminals() == set(g.vertices)

    def test_covers_every_unique_all_terminal_ring(self, maximal):
        rings_by_level = uniqueness_rings(8)
        for k, rings_ in rings_by_level.items():
            for r in rings_:
                assert any(ring_is_minor(r, g.as_ring()) for g in maximal if len(g.arcs) == k)

    def test_stable_when_bound_raised(self, maximal):
        forms = sorted(canonical_form(g) for g in maximal)
        assert sorted(canonical_form(g) for g in enumerate_maximal_uniqueness(9)) == forms


class TestMatch:
    def test_seven_ring(self):
        m = match_catalog(SEVEN)
        assert m.side == "uniqueness" and m.verdict is Verdict.UNIQUE
        assert len(m.graph.arcs) == 2

    def test_triangle_matches_itself(self, obstructions):
        m = match_catalog(TRIANGLE)
        assert m.side == "obstruction"
        assert canonical_form(m.graph) == canonical_form(MixedGraph.from_ring(TRIANGLE))

    def test_five_demands(self):
        inst = RingInstance(tuple("abcdef"), (("a", "d"), ("b", "e"), ("c", "f"), ("d", "a"), ("e", "b")))
        m = match_catalog(inst)
        assert m.side == "obstruction" and m.verdict is Verdict.NON_UNIQUE

    def test_large_ring_verdict_only(self):
        inst = RingInstance(tuple(f"v{i}" for i in range(20)), (("v0", "v5"),))
        m = match_catalog(inst)
        assert m.side == "verdict-only" and m.graph is None

    @given(rings(max_n=6, max_demands=5))
    def test_consistency_random(self, inst):
        unique = uniqueness_verdict(inst).verdict is Verdict.UNIQUE
        assert (covering_maximal(inst) is not None) == unique
        assert (contained_obstruction(inst) is None) == unique

"""The two nine-graph ring catalogs, recomputed by bounded enumeration.

Minimal obstructions: rings with an arc on three routes from which no
further edge contraction keeps both a simple demand digraph and a
three-covered arc.  Maximal uniqueness rings: among rings whose vertices
are all terminals and whose arcs lie on at most two routes, those that are
not a proper minor of another one with the same number of OD-pairs.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations, product

from .coverage import Verdict, naive_max_coverage, uniqueness_verdict
from .errors import Rejected, SizeBound
from .mixed import MixedGraph, canonical_form, contract_edge, ring_instance_form, ring_is_minor, suppress_ring
from .ring import RingInstance, dihedral_images, ring_key

MAX_MATCH_VERTICES = 16
UNIQUENESS_MAX_VERTICES = 8


def _ring(n: int, pairs) -> RingInstance:
    labels = [f"v{i}" for i in range(n)]
    return RingInstance(tuple(labels), tuple((labels[o], labels[d]) for o, d in pairs))


def _max_cov(n: int, pairs) -> int:
    return naive_max_coverage(_ring(n, pairs)).max_coverage


def _contract_ring(n: int, pairs, i: int):
    """Merge positions i and i+1 of an n-ring; None if the demands stop being simple."""
    j = (i + 1) % n

    def m(p):
        if p == j:
            p = i
        # close the gap left by j
        return p - (1 if p > j else 0)

    new = [(m(o), m(d)) for o, d in pairs]
    if any(o == d for o, d in new) or len(set(new)) != len(new):
        return None
    return n - 1, tuple(new)


def _seed_family():
    """Rings on six vertices, three OD-pairs, each vertex an endpoint of exactly one."""
    seen = set()
    for order in permutations(range(6)):
        pairs = [(order[0], order[1]), (order[2], order[3]), (order[4], order[5])]
        key = ring_key(6, pairs)
        if key not in seen:
            seen.add(key)
            yield key


@lru_cache(maxsize=1)
def _minimal_obstruction_keys() -> tuple:
    frontier = [(6, k) for k in _seed_family() if _max_cov(6, k) >= 3]
    seen = set(frontier)
    minimal = set()
    while frontier:
        nxt = []
        for n, pairs in frontier:
            moves = 0
            if n > 2:
                for i in range(n):
                    out = _contract_ring(n, pairs, i)
                    if out is None or _max_cov(*out) < 3:
                        continue
                    moves += 1
                    key = (out[0], ring_key(*out))
                    if key not in seen:
                        seen.add(key)
                        nxt.append(key)
            if moves == 0:
                minimal.add((n, pairs))
        frontier = nxt
    return tuple(sorted(minimal))


def enumerate_minimal_obstructions() -> list[MixedGraph]:
    return [MixedGraph.from_ring(_ring(n, pairs)) for n, pairs in _minimal_obstruction_keys()]


def _all_terminal_rings(n: int, k: int):
    """Dihedral classes of n-rings with k OD-pairs covering every vertex."""
    ordered = [(o, d) for o in range(n) for d in range(n) if o != d]
    full = (1 << n) - 1
    maps = dihedral_images(n)
    for combo in combinations(ordered, k):
        mask = 0
        for o, d in combo:
            mask |= 1 << o | 1 << d
        if mask != full:
            continue
        key = tuple(sorted(combo))
        if any(tuple(sorted((m[o], m[d]) for o, d in combo)) < key for m in maps):
            continue
        yield key


def uniqueness_rings(max_vertices: int = UNIQUENESS_MAX_VERTICES) -> dict[int, list[RingInstance]]:
    """All-terminal rings with coverage at most two, grouped by OD-pair count."""
    out: dict[int, list[RingInstance]] = {}
    for k in (1, 2, 3, 4):
        rings = []
        for n in range(2, min(2 * k, max_vertices) + 1):
            for pairs in _all_terminal_rings(n, k):
                if _max_cov(n, pairs) <= 2:
                    rings.append(_ring(n, pairs))
        out[k] = rings
    return out


@lru_cache(maxsize=2)
def _maximal_uniqueness(max_vertices: int) -> tuple:
    result = []
    for k, rings in uniqueness_rings(max_vertices).items():
        for r in rings:
            dominated = any(
                s.n > r.n and ring_is_minor(r, s) for s in rings
            )
            if not dominated:
                result.append(ring_instance_form(r))
    return tuple(sorted(result, key=lambda f: (len(f[1]), f)))


def enumerate_maximal_uniqueness(max_vertices: int = UNIQUENESS_MAX_VERTICES) -> list[MixedGraph]:
    return [MixedGraph.from_ring(_ring(n, pairs)) for n, pairs in _maximal_uniqueness(max_vertices)]


@dataclass
class CatalogMatch:
    side: str  # "uniqueness" | "obstruction" | "verdict-only"
    index: int | None
    graph: MixedGraph | None
    verdict: Verdict


def covering_maximal(inst: RingInstance) -> int | None:
    """Index of a maximal uniqueness graph the ring is homeomorphic to a minor of."""
    small = suppress_ring(inst)
    for i, g in enumerate(enumerate_maximal_uniqueness()):
        if ring_is_minor(small, g.as_ring()):
            return i
    return None


def contained_obstruction(inst: RingInstance) -> int | None:
    """Index of a minimal obstruction that is a minor of the ring."""
    for i, g in enumerate(enumerate_minimal_obstructions()):
        if ring_is_minor(g.as_ring(), inst):
            return i
    return None


def match_catalog(inst: RingInstance) -> CatalogMatch:
    verdict = uniqueness_verdict(inst).verdict
    if inst.n > MAX_MATCH_VERTICES:
        return CatalogMatch("verdict-only", None, None, verdict)
    if verdict is Verdict.UNIQUE:
        i = covering_maximal(inst)
        graphs = enumerate_maximal_uniqueness()
        side = "uniqueness"
    else:
        i = contained_obstruction(inst)
        graphs = enumerate_minimal_obstructions()
        side = "obstruction"
    if i is None:
        raise AssertionError(f"catalog disagrees with the coverage verdict on {inst}")
    return CatalogMatch(side, i, graphs[i], verdict)

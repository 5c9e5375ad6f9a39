"""Deciding the uniqueness property on rings and related graph-level checks."""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import networkx as nx

from .errors import CycleBoundExceeded, UnknownTerminal, ValidationError
from .ring import NEG, POS, Arc, RingInstance, build_ring_instance, mask_members

DEFAULT_CYCLE_BOUND = 12


class Verdict(enum.Enum):
    UNIQUE = "Unique"
    NON_UNIQUE = "NonUnique"


@dataclass
class CoverageReport:
    verdict: Verdict
    max_coverage: int | None = None
    min_dir: int | None = None
    max_dir: int | None = None
    witness_arc: Arc | None = None
    witness_demands: tuple[int, ...] = ()
    shortcut: str | None = None
    instance: RingInstance | None = field(default=None, repr=False)

    def complete(self) -> "CoverageReport":
        """Fill in coverage numbers skipped by a fast path."""
        if self.max_coverage is None and self.instance is not None:
            full = naive_max_coverage(self.instance)
            self.max_coverage = full.max_coverage
            self.witness_arc = full.witness_arc
            self.witness_demands = full.witness_demands
            self.min_dir, self.max_dir = full.min_dir, full.max_dir
        return self


def _verdict(max_coverage: int) -> Verdict:
    return Verdict.UNIQUE if max_coverage <= 2 else Verdict.NON_UNIQUE


def arc_coverage(inst: RingInstance) -> dict[Arc, int]:
    return {a: bin(m).count("1") for a, m in inst.coverage_masks.items()}


def naive_max_coverage(inst: RingInstance) -> CoverageReport:
    """Count, arc by arc, the routes through it."""
    best_arc, best = None, -1
    pos_counts = []
    for arc in inst.arcs():
        c = bin(inst.coverage_masks[arc]).count("1")
        if arc.sign == POS:
            pos_counts.append(c)
        if c > best:
            best_arc, best = arc, c
    return CoverageReport(
        verdict=_verdict(best),
        max_coverage=best,
        min_dir=min(pos_counts),
        max_dir=max(pos_counts),
        witness_arc=best_arc,
        witness_demands=tuple(mask_members(inst.coverage_masks[best_arc])),
        instance=inst,
    )


def _scan_order(inst: RingInstance, start: Hashable, direction: int) -> list[Hashable]:
    if start not in inst._pos:
        raise UnknownTerminal(f"start vertex {start!r} is not on the cycle")
    i, n = inst.position(start), inst.n
    return [inst.vertices[(i + direction * k) % n] for k in range(n)]


def round_trip_scan(inst: RingInstance, start: Hashable, direction: int = POS) -> tuple[int, int, int]:
    """One trip around the cycle maintaining (list, min, max).

    Returns ``(min_dir, max_dir, max_coverage)`` where the first two are the
    extreme numbers of ``direction`` routes through a ``direction`` arc.
    """
    heads: dict[Hashable, list[int]] = {}
    tails: dict[Hashable, list[int]] = {}
    for l, (o, d) in enumerate(inst.demands):
        tails.setdefault(o, []).append(l)
        heads.setdefault(d, []).append(l)

    pending: set[int] = set()
    lo = hi = 0
    for v in _scan_order(inst, start, direction):
        incoming = heads.get(v, ())
        forgotten = sum(1 for l in incoming if l not in pending)
        lo += forgotten
        hi += forgotten
        pending.difference_update(incoming)
        pending.update(tails.get(v, ()))
        lo = min(lo, len(pending))
        hi = max(hi, len(pending))
    return lo, hi, max(inst.num_demands - lo, hi)


def covering_demands(inst: RingInstance, start: Hashable | None = None, direction: int = POS) -> tuple[Arc, tuple[int, ...]]:
    """An arc of maximal coverage and the demands whose routes contain it.

    Two trips: the first leaves in ``pending`` exactly the routes wrapping
    past the start, so during the second the pending set is exact.
    """
    if start is None:
        start = inst.vertices[0]
    order = _scan_order(inst, start, direction)
    heads: dict[Hashable, list[int]] = {}
    tails: dict[Hashable, list[int]] = {}
    for l, (o, d) in enumerate(inst.demands):
        tails.setdefault(o, []).append(l)
        heads.setdefault(d, []).append(l)
    everyone = frozenset(range(inst.num_demands))

    pending: set[int] = set()
    for v in order:
        pending.difference_update(heads.get(v, ()))
        pending.update(tails.get(v, ()))

    best: tuple[int, Arc, frozenset[int]] | None = None
    n = inst.n
    for v in order:
        pending.difference_update(heads.get(v, ()))
        pending.update(tails.get(v, ()))
        i = inst.position(v)
        # arc leaving v in the scan direction, and its reverse
        ahead = Arc(i, POS) if direction == POS else Arc((i - 1) % n, NEG)
        behind = Arc(ahead.edge, -ahead.sign)
        for arc, members in ((ahead, frozenset(pending)), (behind, everyone - pending)):
            if best is None or len(members) > best[0]:
                best = (len(members), arc, members)
    assert best is not None
    return best[1], tuple(sorted(best[2]))


def uniqueness_verdict(inst: RingInstance, fast: bool = True) -> CoverageReport:
    """Unique iff no arc lies on three or more routes.

    With ``fast`` the demand count alone settles |L| <= 2 (always unique)
    and |L| >= 5 (never unique); call :meth:`CoverageReport.complete` for
    the coverage numbers.
    """
    L = inst.num_demands
    if fast and L <= 2:
        return CoverageReport(Verdict.UNIQUE, shortcut="at most two OD-pairs", instance=inst)
    if fast and L >= 5:
        return CoverageReport(Verdict.NON_UNIQUE, shortcut="five or more OD-pairs", instance=inst)
    lo, hi, cov = round_trip_scan(inst, inst.vertices[0], POS)
    arc, members = covering_demands(inst)
    return CoverageReport(_verdict(cov), cov, lo, hi, arc, members, instance=inst)


# --- general supply graphs -------------------------------------------------

@dataclass(frozen=True)
class GeneralGraph:
    vertices: tuple[Hashable, ...]
    edges: tuple[tuple[Hashable, Hashable], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValidationError("duplicate vertex label")
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"loop at {u!r}")
            if u not in vs or v not in vs:
                raise UnknownTerminal(f"edge ({u!r}, {v!r}) uses an unknown vertex")

    def simple(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(self.vertices)
        g.add_edges_from(self.edges)
        return g


def strong_uniqueness(g: GeneralGraph) -> tuple[bool, list | None]:
    """True iff collapsing parallel edges leaves a forest; else a cycle of length >= 3."""
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    seen = set()
    for u, v in g.edges:
        key = frozenset((u, v))
        if key in seen:
            continue
        seen.add(key)
        ru, rv = find(u), find(v)
        if ru == rv:
            return False, _cycle_through(g, u, v)
        parent[ru] = rv
    return True, None


def _cycle_through(g: GeneralGraph, u, v) -> list:
    simple = g.simple()
    simple.remove_edge(u, v)
    cycle = [u] + nx.shortest_path(simple, v, u)[:-1]
    i = min(range(len(cycle)), key=lambda j: g.vertices.index(cycle[j]))
    return cycle[i:] + cycle[:i]


@dataclass
class ScanResult:
    non_unique: bool
    cycle: list | None = None
    demands: tuple[int, ...] = ()
    report: CoverageReport | None = None
    truncated: bool = False
    cycles_checked: int = 0

    @property
    def status(self) -> str:
        return "NonUnique" if self.non_unique else "Inconclusive"


def contract_bridges(g: GeneralGraph) -> tuple[nx.MultiGraph, dict]:
    """Contract every bridge; return the multigraph and the vertex remapping."""
    multi = nx.MultiGraph()
    multi.add_nodes_from(g.vertices)
    multi.add_edges_from(g.edges)
    simple = g.simple()
    counts: dict[frozenset, int] = {}
    for u, v in g.edges:
        counts[frozenset((u, v))] = counts.get(frozenset((u, v)), 0) + 1
    bridges = [(u, v) for u, v in nx.bridges(simple) if counts[frozenset((u, v))] == 1]
    keep = nx.Graph()
    keep.add_nodes_from(g.vertices)
    keep.add_edges_from(bridges)
    rep = {}
    for comp in nx.connected_components(keep):
        root = min(comp, key=lambda x: g.vertices.index(x))
        for v in comp:
            rep[v] = root
    out = nx.MultiGraph()
    out.add_nodes_from(set(rep.values()))
    bridge_set = {frozenset(b) for b in bridges}
    for u, v in g.edges:
        if frozenset((u, v)) in bridge_set:
            continue
        out.add_edge(rep[u], rep[v])
    return out, rep


def _canonical_cycle(cycle: list, order: dict) -> tuple:
    k = len(cycle)
    i = min(range(k), key=lambda j: order[cycle[j]])
    fwd = cycle[i:] + cycle[:i]
    bwd = [fwd[0]] + fwd[1:][::-1]
    return min(tuple(order[x] for x in fwd), tuple(order[x] for x in bwd)), fwd


def scan_cycle_obstructions(
    g: GeneralGraph,
    demands: Sequence[tuple[Hashable, Hashable]],
    max_cycle: int = DEFAULT_CYCLE_BOUND,
) -> ScanResult:
    """Look for a cycle whose induced ring lacks the uniqueness property.

    Never concludes uniqueness: a miss is reported as inconclusive.
    """
    vs = set(g.vertices)
    for o, d in demands:
        if o not in vs or d not in vs:
            raise UnknownTerminal(f"demand ({o!r}, {d!r}) uses an unknown vertex")
    # Bridges lie on no cycle, so cycles of the bridge-contracted graph are
    # cycles of g; a terminal hanging off a cycle through bridges moves to
    # the one cycle vertex of its bridge tree.
    _contracted, rep = contract_bridges(g)
    simple = g.simple()
    order = {v: i for i, v in enumerate(g.vertices)}
    cycles = []
    for c in nx.simple_cycles(simple, length_bound=max_cycle):
        if len(c) >= 3:
            cycles.append(_canonical_cycle(c, order))
    cycles.sort(key=lambda t: (len(t[0]), t[0]))

    longest = max((len(b) for b in nx.biconnected_components(simple) if len(b) >= 3), default=0)
    result = ScanResult(False, truncated=longest > max_cycle)
    if result.truncated:
        warnings.warn(
            f"cycles longer than {max_cycle} vertices were not scanned", CycleBoundExceeded, stacklevel=2
        )
    for _key, cycle in cycles:
        result.cycles_checked += 1
        local = {rep[c]: c for c in cycle}
        mapped: dict[tuple, int] = {}
        for l, (o, d) in enumerate(demands):
            if rep[o] in local and rep[d] in local and rep[o] != rep[d]:
                mapped.setdefault((local[rep[o]], local[rep[d]]), l)
        chosen = sorted((l, p) for p, l in mapped.items())
        if len(chosen) < 3:
            continue
        ring = build_ring_instance(cycle, [p for _l, p in chosen])
        rep_ = uniqueness_verdict(ring, fast=False)
        if rep_.verdict is Verdict.NON_UNIQUE:
            result.non_unique = True
            result.cycle = cycle
            result.demands = tuple(chosen[i][0] for i in rep_.witness_demands)
            result.report = rep_
            return result
    return result

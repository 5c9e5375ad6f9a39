"""Mixed graphs (supply edges plus demand arcs): canonical forms and minors."""

from __future__ import annotations

from collections import Counter, deque
from dataclasses import dataclass
from itertools import combinations
from typing import Hashable, Iterator

from .errors import Rejected, SizeBound, ValidationError
from .ring import RingInstance, dihedral_images, ring_key

MAX_MINOR_VERTICES = 10


@dataclass(frozen=True)
class MixedGraph:
    vertices: tuple[Hashable, ...]
    edges: tuple[tuple[Hashable, Hashable], ...]
    arcs: tuple[tuple[Hashable, Hashable], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(tuple(e) for e in self.edges))
        object.__setattr__(self, "arcs", tuple(tuple(a) for a in self.arcs))
        vs = set(self.vertices)
        if len(vs) != len(self.vertices):
            raise ValidationError("duplicate vertex")
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"supply loop at {u!r}")
            if u not in vs or v not in vs:
                raise ValidationError(f"edge ({u!r}, {v!r}) uses an unknown vertex")
        if len(set(self.arcs)) != len(self.arcs):
            raise ValidationError("repeated demand arc")
        for o, d in self.arcs:
            if o == d:
                raise ValidationError(f"demand loop at {o!r}")
            if o not in vs or d not in vs:
                raise ValidationError(f"demand ({o!r}, {d!r}) uses an unknown vertex")

    @classmethod
    def from_ring(cls, inst: RingInstance) -> "MixedGraph":
        n = inst.n
        edges = tuple((inst.vertices[i], inst.vertices[(i + 1) % n]) for i in range(n))
        return cls(inst.vertices, edges, inst.demands)

    def terminals(self) -> set:
        return {t for a in self.arcs for t in a}

    def degree(self, v) -> int:
        return sum((u == v) + (w == v) for u, w in self.edges)

    def as_ring(self) -> RingInstance | None:
        """The ring this graph is, if its supply graph is a single cycle."""
        n = len(self.vertices)
        if n < 2 or len(self.edges) != n or not self.arcs:
            return None
        if any(self.degree(v) != 2 for v in self.vertices):
            return None
        if n == 2:
            return RingInstance(self.vertices, self.arcs)
        adj: dict = {v: [] for v in self.vertices}
        for u, w in self.edges:
            adj[u].append(w)
            adj[w].append(u)
        order = [self.vertices[0]]
        prev, cur = None, self.vertices[0]
        while True:
            nxt = adj[cur][0] if adj[cur][0] != prev else adj[cur][1]
            if nxt == self.vertices[0]:
                break
            order.append(nxt)
            prev, cur = cur, nxt
        if len(order) != n:
            return None
        return RingInstance(tuple(order), self.arcs)


# --- canonical form -----------------------------------------------------------

def _refine(n: int, colors: list[int], nbrs, outs, ins) -> list[int]:
    while True:
        sigs = [
            (
                colors[v],
                tuple(sorted((colors[w], m) for w, m in nbrs[v].items())),
                tuple(sorted(colors[w] for w in outs[v])),
                tuple(sorted(colors[w] for w in ins[v])),
            )
            for v in range(n)
        ]
        ranks = {s: i for i, s in enumerate(sorted(set(sigs)))}
        new = [ranks[s] for s in sigs]
        if len(set(new)) == len(set(colors)):
            return new
        colors = new


def _general_form(g: MixedGraph) -> tuple:
    n = len(g.vertices)
    idx = {v: i for i, v in enumerate(g.vertices)}
    nbrs: list[Counter] = [Counter() for _ in range(n)]
    for u, w in g.edges:
        nbrs[idx[u]][idx[w]] += 1
        nbrs[idx[w]][idx[u]] += 1
    outs = [[] for _ in range(n)]
    ins = [[] for _ in range(n)]
    for o, d in g.arcs:
        outs[idx[o]].append(idx[d])
        ins[idx[d]].append(idx[o])
    edge_list = [(idx[u], idx[w]) for u, w in g.edges]
    arc_list = [(idx[o], idx[d]) for o, d in g.arcs]

    def serialize(colors):
        return (
            tuple(sorted(tuple(sorted((colors[u], colors[w]))) for u, w in edge_list)),
            tuple(sorted((colors[o], colors[d]) for o, d in arc_list)),
        )

    best = None

    def search(colors):
        nonlocal best
        colors = _refine(n, colors, nbrs, outs, ins)
        if len(set(colors)) == n:
            form = serialize(colors)
            if best is None or form < best:
                best = form
            return
        cells = Counter(colors)
        target = min(c for c, size in cells.items() if size > 1)
        for v in range(n):
            if colors[v] == target:
                search([2 * c + (1 if c == target and w != v else 0) for w, c in enumerate(colors)])

    search([0] * n)
    return (n, best)


def canonical_form(g: MixedGraph) -> tuple:
    """Isomorphism-invariant encoding; rings use their dihedral key."""
    ring = g.as_ring()
    if ring is not None:
        return ("ring",) + ring_instance_form(ring)
    return ("mixed",) + _general_form(g)


def ring_instance_form(inst: RingInstance) -> tuple:
    pairs = [(inst.position(o), inst.position(d)) for o, d in inst.demands]
    return (inst.n, ring_key(inst.n, pairs))


def general_canonical_form(g: MixedGraph) -> tuple:
    """Refinement-based form, used for any mixed graph including rings."""
    return _general_form(g)


# --- elementary operations ----------------------------------------------------

def contract_edge(g: MixedGraph, edge) -> MixedGraph:
    """Contract a supply edge (an index into ``g.edges`` or an endpoint pair).

    The second endpoint is merged into the first; loops created among the
    supply edges are dropped.  Raises Rejected if the demand digraph would
    gain a loop or a repeated arc.
    """
    if isinstance(edge, int):
        i = edge
    else:
        u, v = edge
        i = next((k for k, e in enumerate(g.edges) if e in ((u, v), (v, u))), None)
        if i is None:
            raise ValidationError(f"no edge between {u!r} and {v!r}")
    keep, gone = g.edges[i]

    def m(x):
        return keep if x == gone else x

    arcs = [(m(o), m(d)) for o, d in g.arcs]
    if any(o == d for o, d in arcs):
        raise Rejected("contraction creates a demand loop")
    if len(set(arcs)) != len(arcs):
        raise Rejected("contraction creates a repeated demand arc")
    edges = []
    for k, (a, b) in enumerate(g.edges):
        if k == i:
            continue
        a, b = m(a), m(b)
        if a != b:
            edges.append((a, b))
    return MixedGraph(tuple(v for v in g.vertices if v != gone), tuple(edges), tuple(arcs))


def suppress_degree2(g: MixedGraph) -> MixedGraph:
    """Undo subdivisions: splice out non-terminal vertices of degree 2."""
    terminals = g.terminals()
    vertices, edges = list(g.vertices), list(g.edges)
    changed = True
    while changed:
        changed = False
        for v in vertices:
            if v in terminals:
                continue
            incident = [k for k, e in enumerate(edges) if v in e]
            if len(incident) != 2:
                continue
            ends = [edges[k][0] if edges[k][1] == v else edges[k][1] for k in incident]
            if ends[0] == ends[1] or v in ends:
                continue
            edges = [e for k, e in enumerate(edges) if k not in incident] + [tuple(ends)]
            vertices.remove(v)
            changed = True
            break
    return MixedGraph(tuple(vertices), tuple(edges), g.arcs)


def subdivide_edge(g: MixedGraph, edge: int, label: Hashable) -> MixedGraph:
    u, v = g.edges[edge]
    edges = list(g.edges[:edge]) + [(u, label), (label, v)] + list(g.edges[edge + 1 :])
    return MixedGraph(g.vertices + (label,), tuple(edges), g.arcs)


# --- minors -----------------------------------------------------------------

def _cut_sets(n: int, k: int) -> Iterator[tuple[int, ...]]:
    if k == 1:
        return
    yield from combinations(range(n), k)


def ring_is_minor(small: RingInstance, big: RingInstance) -> bool:
    """Is ``small`` (as is, no suppression) a minor of ``big``?

    A ring minor of a ring partitions the cycle into contiguous blocks,
    one per vertex, keeping one demand per required block pair.
    """
    k, n = small.n, big.n
    if k > n or small.num_demands > big.num_demands:
        return False
    need = [(small.position(o), small.position(d)) for o, d in small.demands]
    big_pairs = [(big.position(o), big.position(d)) for o, d in big.demands]
    aligns = dihedral_images(k)
    for cuts in _cut_sets(n, k):
        block = [0] * n
        for b in range(k):
            end = cuts[b + 1] if b + 1 < k else cuts[0] + n
            for p in range(cuts[b], end):
                block[p % n] = b
        have = {(block[o], block[d]) for o, d in big_pairs}
        if len(have) < len(need):
            continue
        for m in aligns:
            if all((m[i], m[j]) in have for i, j in need):
                return True
    return False


def suppress_ring(inst: RingInstance) -> RingInstance:
    terminals = {t for dem in inst.demands for t in dem}
    return RingInstance(tuple(v for v in inst.vertices if v in terminals), inst.demands)


def _deletions(g: MixedGraph) -> Iterator[MixedGraph]:
    for k in range(len(g.arcs)):
        yield MixedGraph(g.vertices, g.edges, g.arcs[:k] + g.arcs[k + 1 :])
    for k in range(len(g.edges)):
        yield MixedGraph(g.vertices, g.edges[:k] + g.edges[k + 1 :], g.arcs)
    used = g.terminals() | {x for e in g.edges for x in e}
    for v in g.vertices:
        if v not in used:
            yield MixedGraph(tuple(x for x in g.vertices if x != v), g.edges, g.arcs)
    for k in range(len(g.edges)):
        try:
            yield contract_edge(g, k)
        except Rejected:
            pass


def generic_is_homeo_minor(small: MixedGraph, big: MixedGraph) -> bool:
    """Exhaustive search over the minors of ``big``, memoized by canonical form."""
    target = suppress_degree2(small)
    goal = _general_form(target)
    n_arcs, n_edges = len(target.arcs), len(target.edges)
    n_terms = len(target.terminals())
    seen = {_general_form(big)}
    queue = deque([big])
    while queue:
        g = queue.popleft()
        if _general_form(suppress_degree2(g)) == goal:
            return True
        for h in _deletions(g):
            if len(h.arcs) < n_arcs or len(h.edges) < n_edges or len(h.terminals()) < n_terms:
                continue
            key = _general_form(h)
            if key not in seen:
                seen.add(key)
                queue.append(h)
    return False


def is_homeo_minor(small: MixedGraph, big: MixedGraph) -> bool:
    """Is ``small`` homeomorphic to a minor of ``big``?"""
    small_ring, big_ring = small.as_ring(), big.as_ring()
    if small_ring is not None and big_ring is not None:
        return ring_is_minor(suppress_ring(small_ring), big_ring)
    if max(len(small.vertices), len(big.vertices)) > MAX_MINOR_VERTICES:
        raise SizeBound(f"minor search limited to {MAX_MINOR_VERTICES} vertices")
    return generic_is_homeo_minor(small, big)

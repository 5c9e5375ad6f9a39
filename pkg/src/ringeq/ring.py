"""Ring supply graphs with a demand digraph.

The cycle is stored as an ordered tuple of vertex labels; the stored order is
the positive direction.  Edge ``i`` joins ``vertices[i]`` and
``vertices[(i + 1) % n]`` and carries two arcs, one per sign.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from itertools import combinations, permutations
from typing import Hashable, Iterator, NamedTuple, Sequence

from .errors import DuplicateDemand, DuplicateVertex, SelfLoopDemand, UnknownTerminal, ValidationError

POS = 1
NEG = -1
SIGNS = (POS, NEG)


def sign_symbol(sign: int) -> str:
    return "+" if sign == POS else "-"


class Arc(NamedTuple):
    edge: int
    sign: int


@dataclass(frozen=True)
class RingInstance:
    vertices: tuple[Hashable, ...]
    demands: tuple[tuple[Hashable, Hashable], ...]
    _pos: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "demands", tuple((o, d) for o, d in self.demands))
        if len(self.vertices) < 2:
            raise ValidationError("a ring needs at least 2 vertices")
        pos: dict = {}
        for i, v in enumerate(self.vertices):
            if v in pos:
                raise DuplicateVertex(f"vertex {v!r} repeated")
            pos[v] = i
        if not self.demands:
            raise ValidationError("at least one demand is required")
        seen = set()
        for o, d in self.demands:
            for t in (o, d):
                if t not in pos:
                    raise UnknownTerminal(f"terminal {t!r} is not on the cycle")
            if o == d:
                raise SelfLoopDemand(f"demand ({o!r}, {d!r}) is a loop")
            if (o, d) in seen:
                raise DuplicateDemand(f"demand ({o!r}, {d!r}) repeated")
            seen.add((o, d))
        object.__setattr__(self, "_pos", pos)

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def num_demands(self) -> int:
        return len(self.demands)

    def position(self, v: Hashable) -> int:
        return self._pos[v]

    def arcs(self) -> list[Arc]:
        return [Arc(i, s) for s in SIGNS for i in range(self.n)]

    def endpoints(self, arc: Arc) -> tuple[Hashable, Hashable]:
        a = self.vertices[arc.edge]
        b = self.vertices[(arc.edge + 1) % self.n]
        return (a, b) if arc.sign == POS else (b, a)

    def arc_label(self, arc: Arc) -> str:
        tail, head = self.endpoints(arc)
        label = f"{tail}->{head}"
        if self.n == 2:
            # the two edges of a 2-cycle are parallel
            label += f"#{arc.edge}"
        return label

    def reversed(self) -> "RingInstance":
        return RingInstance(tuple(reversed(self.vertices)), self.demands)

    def restricted(self, indices: Sequence[int]) -> "RingInstance":
        return RingInstance(self.vertices, tuple(self.demands[i] for i in indices))

    @cached_property
    def route_table(self) -> dict[tuple[int, int], tuple[Arc, ...]]:
        return {
            (l, s): tuple(_walk(self, l, s))
            for l in range(self.num_demands)
            for s in SIGNS
        }

    @cached_property
    def coverage_masks(self) -> dict[Arc, int]:
        """Bitmask of demands whose same-sign route uses each arc."""
        masks = {a: 0 for a in self.arcs()}
        for (l, _s), route in self.route_table.items():
            for a in route:
                masks[a] |= 1 << l
        return masks


def build_ring_instance(vertices: Sequence[Hashable], demands: Sequence[Sequence[Hashable]]) -> RingInstance:
    return RingInstance(tuple(vertices), tuple(tuple(d) for d in demands))


def _walk(inst: RingInstance, l: int, sign: int) -> Iterator[Arc]:
    o, d = inst.demands[l]
    n = inst.n
    i, j = inst.position(o), inst.position(d)
    if sign == POS:
        while i != j:
            yield Arc(i, POS)
            i = (i + 1) % n
    else:
        while i != j:
            i = (i - 1) % n
            yield Arc(i, NEG)


def route_arcs(inst: RingInstance, l: int, sign: int) -> list[Arc]:
    """Arcs of the ``sign`` route of demand ``l``, ordered origin to destination."""
    if not 0 <= l < inst.num_demands:
        raise IndexError(f"demand index {l} out of range")
    return list(inst.route_table[(l, sign)])


def mask_members(mask: int) -> list[int]:
    return [i for i in range(mask.bit_length()) if mask >> i & 1]


@dataclass(frozen=True)
class CoveragePartition:
    """The cells A_J^sign, keyed by (demand bitmask, sign).

    Only nonempty cells are stored; the empty mask collects arcs on no route.
    """

    num_demands: int
    cells: dict[tuple[int, int], frozenset[Arc]]

    def cell(self, mask: int, sign: int) -> frozenset[Arc]:
        return self.cells.get((mask, sign), frozenset())

    def nonempty(self, mask: int, sign: int | None = None) -> bool:
        if sign is None:
            return bool(self.cell(mask, POS) or self.cell(mask, NEG))
        return bool(self.cell(mask, sign))

    def unused(self) -> frozenset[Arc]:
        return self.cell(0, POS) | self.cell(0, NEG)

    @property
    def full_mask(self) -> int:
        return (1 << self.num_demands) - 1


def arc_partition(inst: RingInstance) -> CoveragePartition:
    buckets: dict[tuple[int, int], set[Arc]] = {}
    for arc, mask in inst.coverage_masks.items():
        buckets.setdefault((mask, arc.sign), set()).add(arc)
    return CoveragePartition(inst.num_demands, {k: frozenset(v) for k, v in buckets.items()})


# --- enumeration of small rings -------------------------------------------

def dihedral_images(n: int) -> list[tuple[int, ...]]:
    """Vertex position maps for all rotations and reflections of an n-cycle."""
    maps = []
    for r in range(n):
        maps.append(tuple((i + r) % n for i in range(n)))
        maps.append(tuple((r - i) % n for i in range(n)))
    return maps


def ring_key(n: int, pairs) -> tuple:
    """Dihedral-invariant key of a ring on positions 0..n-1 with demand pairs."""
    return min(
        tuple(sorted((m[o], m[d]) for o, d in pairs)) for m in dihedral_images(n)
    )


def ring_instance_key(inst: RingInstance) -> tuple:
    pairs = [(inst.position(o), inst.position(d)) for o, d in inst.demands]
    return (inst.n, ring_key(inst.n, pairs))


def iter_rings(n: int, num_demands: int, labels: Sequence[str] | None = None) -> Iterator[RingInstance]:
    """All rings on n vertices with ``num_demands`` OD-pairs, one per dihedral class."""
    if labels is None:
        labels = [f"v{i}" for i in range(n)]
    ordered = list(permutations(range(n), 2))
    maps = dihedral_images(n)
    for combo in combinations(ordered, num_demands):
        key = tuple(sorted(combo))
        if any(tuple(sorted((m[o], m[d]) for o, d in combo)) < key for m in maps):
            continue
        yield RingInstance(tuple(labels), tuple((labels[o], labels[d]) for o, d in key))


def iter_all_rings(max_n: int, demand_counts: Sequence[int], min_n: int = 2) -> Iterator[RingInstance]:
    for n in range(min_n, max_n + 1):
        for k in demand_counts:
            yield from iter_rings(n, k)

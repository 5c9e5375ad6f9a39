"""Explicit games with two distinct strict equilibria.

The three-class recipe works in a *construction frame*: demands are
relabelled 1, 2, 3 and the orientation possibly flipped so that some arc in
the construction's positive direction lies on all three routes, and the
pairs {1, 2} and {1, 3} each own a nonempty cell.  Costs are attached per
cell A_J^sign and spread evenly over the arcs of the cell.  Everything
exported (arc labels, route names r+/r-) is in the instance's own frame.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from typing import Hashable

from .coverage import Verdict, covering_demands, uniqueness_verdict
from .errors import NotApplicable, NotStrict, RelabelFailed, RingEqError
from .game import (
    ClassSpec,
    CostFunction,
    EquilibriumReport,
    GameInstance,
    StrategyProfile,
    flows,
    verify_equilibrium,
)
from .ring import NEG, POS, Arc, CoveragePartition, RingInstance, arc_partition, sign_symbol

C1, C2, C3 = 1, 2, 4  # construction-frame bits of classes 1, 2, 3
FULL = C1 | C2 | C3
DEFAULT_DELTA = Fraction(1, 100)
SMALL_SLOPE = Fraction(1, 1000)
LARGE_OFFSET = Fraction(1000)


class ConstructionFailed(RingEqError, AssertionError):
    """A constructed profile failed exact verification."""


@dataclass
class Counterexample:
    game: GameInstance
    sigma: StrategyProfile
    sigma_hat: StrategyProfile
    provenance: dict
    instance: RingInstance | None = None
    reports: tuple[EquilibriumReport, EquilibriumReport] | None = field(default=None, repr=False)

    def verify(self) -> tuple[EquilibriumReport, EquilibriumReport]:
        self.reports = (verify_equilibrium(self.game, self.sigma), verify_equilibrium(self.game, self.sigma_hat))
        return self.reports

    @property
    def strict_gap(self) -> Fraction:
        a, b = self.reports or self.verify()
        return min(a.strict_gap, b.strict_gap)


def _check(ce: Counterexample) -> Counterexample:
    rep, rep_hat = ce.verify()
    if not (rep.is_strict and rep_hat.is_strict):
        raise ConstructionFailed(f"profiles not strict equilibria: {rep.violations} / {rep_hat.violations}")
    if rep.flow == rep_hat.flow:
        raise ConstructionFailed("the two equilibria induce the same flow")
    return ce


# --- construction frame ----------------------------------------------------

@dataclass(frozen=True)
class Frame:
    """Relabelling: construction class k+1 is instance demand perm[k];
    construction sign +1 is instance sign ``flip``."""

    partition: CoveragePartition
    perm: tuple[int, int, int]
    flip: int

    def to_instance_mask(self, mask: int) -> int:
        return sum(1 << self.perm[k] for k in range(3) if mask >> k & 1)

    def cell(self, mask: int, sign: int) -> frozenset[Arc]:
        return self.partition.cell(self.to_instance_mask(mask), sign * self.flip)

    def locate(self, arc: Arc, inst_mask: int) -> tuple[int, int]:
        """Construction-frame (mask, sign) of an instance arc."""
        mask = sum(1 << k for k in range(3) if inst_mask >> self.perm[k] & 1)
        return mask, arc.sign * self.flip

    def valid(self) -> bool:
        return bool(self.cell(FULL, POS)) and self._pair(C1 | C2) and self._pair(C1 | C3)

    def _pair(self, mask: int) -> bool:
        return bool(self.cell(mask, POS) or self.cell(mask, NEG))

    def common_signs(self) -> list[int]:
        return [s for s in (POS, NEG) if self.cell(C1 | C2, s) and self.cell(C1 | C3, s)]


def _frames(inst: RingInstance):
    part = arc_partition(inst)
    for flip in (POS, NEG):
        for perm in permutations((2, 1, 0)):
            frame = Frame(part, perm, flip)
            if frame.valid():
                yield frame


def _smallest_mask(frame: Frame, bit: int, sign: int) -> int:
    for mask in range(1, FULL + 1):
        if mask & bit and frame.cell(mask, sign):
            return mask
    raise RelabelFailed(f"no nonempty cell for class bit {bit} in sign {sign}")


def _mask_names(mask: int) -> list[int]:
    return [k + 1 for k in range(3) if mask >> k & 1]


@dataclass
class _Plan:
    """Which cells get the non-default cost for each construction class."""

    frame: Frame
    branches: dict[int, int]  # class bit -> sign of the chosen {1,c} cell (classes 2, 3)
    specials: dict[int, dict[tuple[int, int], tuple[Fraction, Fraction]]]
    j_choice: dict[int, int]


def _plan(frame: Frame, branch_sign: int | None = None, merged: bool = False) -> _Plan:
    j1 = _smallest_mask(frame, C1, NEG)
    specials = {C1: {(FULL, POS): (Fraction(24), Fraction(7)), (j1, NEG): (Fraction(1), Fraction(48))}}
    branches, j_choice = {}, {C1: j1}
    for bit in (C2, C3):
        pair = C1 | bit
        sign = branch_sign
        if sign is None:
            sign = POS if frame.cell(pair, POS) else NEG
        branches[bit] = sign
        if sign == NEG:
            specials[bit] = {(FULL, POS): (Fraction(1), Fraction(26)), (pair, NEG): (Fraction(22), Fraction(0))}
        else:
            specials[bit] = {(pair, POS): (Fraction(25), Fraction(0))}
    plus = [bit for bit in (C2, C3) if branches[bit] == POS]
    if plus:
        if merged:
            j2, j3 = _merged_js(frame)
            picks = {C2: j2, C3: j3}
        else:
            picks = {bit: _smallest_mask(frame, bit, NEG) for bit in plus}
        for bit in plus:
            j_choice[bit] = picks[bit]
            specials[bit][(picks[bit], NEG)] = (Fraction(1), Fraction(31))
    return _Plan(frame, branches, specials, j_choice)


def _merged_js(frame: Frame) -> tuple[int, int]:
    """Negative cells for classes 2 and 3 that agree wherever both define a cost."""
    c2 = [m for m in range(1, FULL + 1) if m & C2 and frame.cell(m, NEG)]
    c3 = [m for m in range(1, FULL + 1) if m & C3 and frame.cell(m, NEG)]
    for j2 in c2:
        for j3 in c3:
            if j2 == j3 or (not j2 & C3 and not j3 & C2):
                return j2, j3
    raise NotApplicable("classes 2 and 3 cannot share cost functions in this frame")


def _cost(plan: _Plan, bit: int, mask: int, sign: int) -> CostFunction:
    size = len(plan.frame.cell(mask, sign))
    slope, offset = plan.specials[bit].get((mask, sign), (Fraction(1), Fraction(0)))
    return CostFunction.affine(slope / size, offset / size)


def _class_costs(inst: RingInstance, plan: _Plan, bit: int) -> dict[str, CostFunction]:
    costs = {}
    masks = inst.coverage_masks
    k = {C1: 0, C2: 1, C3: 2}[bit]
    l = plan.frame.perm[k]
    for arc, inst_mask in masks.items():
        if inst_mask >> l & 1:
            mask, sign = plan.frame.locate(arc, inst_mask)
            costs[inst.arc_label(arc)] = _cost(plan, bit, mask, sign)
    return costs


def _routes(inst: RingInstance, l: int) -> tuple[tuple[str, ...], tuple[str, ...]]:
    return tuple(
        tuple(inst.arc_label(a) for a in inst.route_table[(l, s)]) for s in (POS, NEG)
    )


def _ring_spec(inst: RingInstance, name: str, l: int, measure, costs) -> ClassSpec:
    return ClassSpec(
        name=name,
        measure=Fraction(measure),
        routes=_routes(inst, l),
        costs=costs,
        od=tuple(str(t) for t in inst.demands[l]),
        route_names=("r+", "r-"),
    )


def _side(flip: int, construction_sign: int) -> int:
    """Route index (0 = r+, 1 = r-) of the construction-frame sign."""
    return 0 if construction_sign * flip == POS else 1


def _dominance(plan: _Plan, game: GameInstance, sigma, sigma_hat) -> dict:
    predicate = all(plan.branches[b] == NEG for b in (C2, C3))
    rep, rep_hat = verify_equilibrium(game, sigma), verify_equilibrium(game, sigma_hat)
    paid = []
    for k in range(len(game.classes)):
        j = next(i for i, w in enumerate(sigma.weights[k]) if w)
        jh = next(i for i, w in enumerate(sigma_hat.weights[k]) if w)
        paid.append((rep.costs[k][j], rep_hat.costs[k][jh]))
    return {
        "predicate": predicate,
        "sigma_dominates": all(a <= b for a, b in paid) and any(a < b for a, b in paid),
        "sigma_hat_dominates": all(b <= a for a, b in paid) and any(b < a for a, b in paid),
    }


def _provenance(inst: RingInstance, plan: _Plan, kind: str) -> dict:
    f = plan.frame
    return {
        "construction": kind,
        "orientation": "as stored" if f.flip == POS else "reversed",
        "classes": {str(k + 1): list(map(str, inst.demands[f.perm[k]])) for k in range(3)},
        "demand_indices": list(f.perm),
        "class2_branch": sign_symbol(plan.branches[C2]),
        "class3_branch": sign_symbol(plan.branches[C3]),
        "J1": _mask_names(plan.j_choice[C1]),
        "J2": _mask_names(plan.j_choice[C2]) if C2 in plan.j_choice else None,
        "J3": _mask_names(plan.j_choice[C3]) if C3 in plan.j_choice else None,
        "note": "empty cells carry no cost; costs exist only on arcs of each class's own routes",
    }


def _require_non_unique(inst: RingInstance) -> tuple[int, ...]:
    if inst.num_demands < 3 or uniqueness_verdict(inst, fast=False).verdict is not Verdict.NON_UNIQUE:
        raise NotApplicable("every arc lies on at most two routes; the uniqueness property holds")
    _arc, members = covering_demands(inst)
    return members[:3]


def _triple_frame(inst: RingInstance, triple, merged: bool = False):
    sub = inst.restricted(triple)
    for frame in _frames(sub):
        if not merged:
            return sub, frame, _plan(frame)
        for sign in frame.common_signs():
            try:
                return sub, frame, _plan(frame, branch_sign=sign, merged=True)
            except NotApplicable:
                continue
    if merged:
        raise NotApplicable("no relabelling puts A_{1,2} and A_{1,3} on a common sign")
    raise RelabelFailed("no relabelling satisfies the three nonemptiness assumptions")


def _three_class_game(inst: RingInstance, triple, plan: _Plan, sub: RingInstance, extra=()):
    f = plan.frame
    specs = []
    measures = {C1: Fraction(3, 2), C2: Fraction(1), C3: Fraction(1)}
    for k, bit in enumerate((C1, C2, C3)):
        l_sub = f.perm[k]
        specs.append(_ring_spec(inst, str(k + 1), triple[l_sub], measures[bit], _class_costs(sub, plan, bit)))
    arcs = tuple(inst.arc_label(a) for a in inst.arcs())
    return specs, arcs


def build_three_class(inst: RingInstance) -> Counterexample:
    """Three classes, one per OD-pair of a triple sharing an arc.

    With more than three OD-pairs the remaining ones get no users.
    """
    triple = _require_non_unique(inst)
    sub, frame, plan = _triple_frame(inst, triple)
    specs, arcs = _three_class_game(inst, triple, plan, sub)
    game = GameInstance(arcs, tuple(specs))
    pos, neg = _side(frame.flip, POS), _side(frame.flip, NEG)
    sigma = game.pure_profile([pos, neg, neg])
    sigma_hat = game.pure_profile([neg, pos, pos])
    prov = _provenance(sub, plan, "three-class")
    prov["demand_indices"] = [triple[i] for i in frame.perm]
    prov["dominance"] = _dominance(plan, game, sigma, sigma_hat)
    return _check(Counterexample(game, sigma, sigma_hat, prov, instance=inst))


def extend_many_od(inst: RingInstance, delta=DEFAULT_DELTA) -> Counterexample:
    """Three-class construction plus a fourth class on every other OD-pair.

    The fourth class has total measure ``delta``, split evenly, cheap
    positive arcs and expensive negative arcs (construction frame).
    """
    if inst.num_demands <= 3:
        raise NotApplicable("needs more than three OD-pairs")
    triple = _require_non_unique(inst)
    sub, frame, plan = _triple_frame(inst, triple)
    specs, arcs = _three_class_game(inst, triple, plan, sub)
    others = [l for l in range(inst.num_demands) if l not in triple]
    delta = Fraction(delta)
    cheap = CostFunction.affine(SMALL_SLOPE, 0)
    dear = CostFunction.affine(1, LARGE_OFFSET)
    fourth = {
        inst.arc_label(a): cheap if a.sign == frame.flip else dear for a in inst.arcs()
    }
    for l in others:
        specs.append(_ring_spec(inst, "4", l, delta / len(others), fourth))
    game = GameInstance(arcs, tuple(specs))
    pos, neg = _side(frame.flip, POS), _side(frame.flip, NEG)
    sigma = game.pure_profile([pos, neg, neg] + [pos] * len(others))
    sigma_hat = game.pure_profile([neg, pos, pos] + [pos] * len(others))
    prov = _provenance(sub, plan, "three-class + fourth class")
    prov["demand_indices"] = [triple[i] for i in frame.perm]
    prov["fourth_class"] = {"demands": others, "delta": str(delta), "positive_slope": str(SMALL_SLOPE), "negative_offset": str(LARGE_OFFSET)}
    return _check(Counterexample(game, sigma, sigma_hat, prov, instance=inst))


def merge_two_class(inst: RingInstance) -> Counterexample:
    """Two classes: classes 2 and 3 of the recipe share cost functions."""
    if inst.num_demands != 3:
        raise NotApplicable("the two-class variant needs exactly three OD-pairs")
    triple = _require_non_unique(inst)
    sub, frame, plan = _triple_frame(inst, triple, merged=True)
    costs2 = _class_costs(sub, plan, C2)
    costs3 = _class_costs(sub, plan, C3)
    for a in costs2.keys() & costs3.keys():
        if costs2[a] != costs3[a]:
            raise ConstructionFailed(f"merged class disagrees on arc {a}")
    merged = {**costs2, **costs3}
    spec1 = _ring_spec(inst, "1", triple[frame.perm[0]], Fraction(3, 2), _class_costs(sub, plan, C1))
    spec2 = _ring_spec(inst, "2", triple[frame.perm[1]], 1, merged)
    spec3 = _ring_spec(inst, "2", triple[frame.perm[2]], 1, merged)
    arcs = tuple(inst.arc_label(a) for a in inst.arcs())
    game = GameInstance(arcs, (spec1, spec2, spec3))
    pos, neg = _side(frame.flip, POS), _side(frame.flip, NEG)
    sigma = game.pure_profile([pos, neg, neg])
    sigma_hat = game.pure_profile([neg, pos, pos])
    prov = _provenance(sub, plan, "two-class merge")
    prov["demand_indices"] = [triple[i] for i in frame.perm]
    prov["dominance"] = _dominance(plan, game, sigma, sigma_hat)
    return _check(Counterexample(game, sigma, sigma_hat, prov, instance=inst))


def build_counterexample(inst: RingInstance) -> Counterexample:
    if inst.num_demands > 3:
        return extend_many_od(inst)
    return build_three_class(inst)


# --- two-terminal K4 ---------------------------------------------------------

def k4_fixture() -> Counterexample:
    """Two classes on K4 between o and d, each route menu fixed."""
    arcs = ("o->u", "o->v", "u->v", "v->u", "u->d", "v->d", "o->d")
    inf = CostFunction.prohibitive()
    A = CostFunction.affine
    cost1 = dict(zip(arcs, (A(1), inf, A(1, 18), inf, inf, A(1), A(7))))
    cost2 = dict(zip(arcs, (A(5), A(1), inf, inf, A(1), A(5), A(1, 10))))
    c1 = ClassSpec("1", Fraction(3), (("o->u", "u->v", "v->d"), ("o->d",)), cost1, ("o", "d"), ("ouvd", "od"))
    c2 = ClassSpec(
        "2", Fraction(4), (("o->u", "u->d"), ("o->v", "v->d"), ("o->d",)), cost2, ("o", "d"), ("oud", "ovd", "od")
    )
    game = GameInstance(arcs, (c1, c2))
    sigma = game.profile([[3, 0], [0, 0, 4]])
    sigma_hat = game.profile([[0, 3], [2, 2, 0]])
    ce = Counterexample(game, sigma, sigma_hat, {"construction": "K4 two-terminal, two classes"})
    return _check(ce)


# --- subdivision -------------------------------------------------------------

def _fresh_label(inst: RingInstance, a: Hashable, b: Hashable) -> str:
    base = f"{a}{b}"
    label, i = base, 1
    while label in inst._pos:
        label, i = f"{base}_{i}", i + 1
    return label


def subdivide_lift(ce: Counterexample, edge: int, label: str | None = None) -> Counterexample:
    """Split a ring edge; the new arcs cost every class gamma*x with gamma small
    enough that every chosen route stays a strict best reply."""
    if ce.instance is None:
        raise NotApplicable("only ring counterexamples can be subdivided")
    inst = ce.instance
    if not 0 <= edge < inst.n:
        raise IndexError(f"edge {edge} out of range")
    gap = ce.strict_gap
    if gap is None or gap <= 0:
        raise NotStrict("subdivision needs strict equilibria")
    a, b = inst.vertices[edge], inst.vertices[(edge + 1) % inst.n]
    label = label or _fresh_label(inst, a, b)
    new_inst = RingInstance(inst.vertices[: edge + 1] + (label,) + inst.vertices[edge + 1 :], inst.demands)

    def moved(arc: Arc) -> list[Arc]:
        if arc.edge < edge:
            return [arc]
        if arc.edge > edge:
            return [Arc(arc.edge + 1, arc.sign)]
        near, far = Arc(edge, arc.sign), Arc(edge + 1, arc.sign)
        return [near, far] if arc.sign == POS else [far, near]

    old_by_label = {inst.arc_label(x): x for x in inst.arcs()}
    relabel = {lab: [new_inst.arc_label(y) for y in moved(x)] for lab, x in old_by_label.items()}
    fresh = {new_inst.arc_label(Arc(edge + 1, s)) for s in (POS, NEG)}
    total = sum(k.measure for k in ce.game.classes)
    gamma = gap / (2 * (total + 1))
    specs = []
    for k in ce.game.classes:
        routes = tuple(tuple(x for lab in r for x in relabel[lab]) for r in k.routes)
        costs = {relabel[lab][0] if len(relabel[lab]) == 1 else _kept(relabel[lab], fresh): c for lab, c in k.costs.items()}
        for r in routes:
            for x in r:
                if x in fresh:
                    costs[x] = CostFunction.affine(gamma, 0)
        specs.append(ClassSpec(k.name, k.measure, routes, costs, k.od, k.route_names))
    game = GameInstance(tuple(new_inst.arc_label(x) for x in new_inst.arcs()), tuple(specs))
    prov = dict(ce.provenance)
    prov["subdivisions"] = list(prov.get("subdivisions", [])) + [
        {"edge": [str(a), str(b)], "vertex": str(label), "gamma": str(gamma)}
    ]
    lifted = Counterexample(game, ce.sigma, ce.sigma_hat, prov, instance=new_inst)
    return _check(lifted)


def _kept(pieces: list[str], fresh: set[str]) -> str:
    return next(p for p in pieces if p not in fresh)


def route_cost_table(ce: Counterexample) -> list[dict]:
    """Per class segment: route costs under both profiles."""
    rep, rep_hat = ce.reports or ce.verify()
    rows = []
    for k, spec in enumerate(ce.game.classes):
        rows.append(
            {
                "class": spec.name,
                "od": spec.od,
                "routes": [spec.route_name(j) for j in range(len(spec.routes))],
                "sigma": rep.costs[k],
                "sigma_hat": rep_hat.costs[k],
            }
        )
    return rows


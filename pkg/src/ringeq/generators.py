"""Random rings and ring games for property checks."""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Sequence

from .game import ClassSpec, CostFunction, GameInstance, StrategyProfile, as_fraction
from .ring import NEG, POS, RingInstance


def random_ring(rng: random.Random, max_n: int = 12, max_demands: int = 6, min_n: int = 2) -> RingInstance:
    n = rng.randint(min_n, max_n)
    labels = [f"v{i}" for i in range(n)]
    ordered = [(o, d) for o in labels for d in labels if o != d]
    k = rng.randint(1, min(max_demands, len(ordered)))
    return RingInstance(tuple(labels), tuple(rng.sample(ordered, k)))


def ring_game(inst: RingInstance, measures: Sequence, costs: Sequence[dict]) -> GameInstance:
    """One class per OD-pair with menu (r+, r-); ``costs[l]`` maps arc labels to cost functions."""
    arcs = tuple(inst.arc_label(a) for a in inst.arcs())
    specs = []
    for l, (o, d) in enumerate(inst.demands):
        routes = tuple(
            tuple(inst.arc_label(a) for a in inst.route_table[(l, s)]) for s in (POS, NEG)
        )
        specs.append(ClassSpec(str(l + 1), as_fraction(measures[l]), routes, costs[l], (str(o), str(d)), ("r+", "r-")))
    return GameInstance(arcs, tuple(specs))


def planted_game(arcs: Sequence[str], menus: Sequence[tuple], rng: random.Random, m: int = 4,
                 **class_fields) -> tuple[GameInstance, StrategyProfile]:
    """Random affine game on two-route menus with an equilibrium planted on the resolution-m grid.

    Slopes and intercepts are random rationals; then, class by class, one
    intercept on a route-exclusive arc is raised so that a random grid
    profile meets the equilibrium condition exactly.  ``class_fields`` may
    carry per-class ``od`` and ``route_names`` lists.
    """
    measures = [Fraction(rng.randint(1, 6), rng.randint(1, 2)) for _ in menus]
    splits = []
    for mu in measures:
        q = rng.randint(0, m)
        splits.append((mu * q / m, mu * (m - q) / m))
    flow = dict.fromkeys(arcs, Fraction(0))
    for (plus, minus), (wp, wn) in zip(menus, splits):
        for route, w in ((plus, wp), (minus, wn)):
            for a in route:
                flow[a] += w
    specs = []
    for k, ((plus, minus), (wp, wn)) in enumerate(zip(menus, splits)):
        params = {
            a: [Fraction(rng.randint(1, 8), rng.randint(1, 3)), Fraction(rng.randint(0, 12), rng.randint(1, 2))]
            for a in (*plus, *minus)
        }
        only_plus = next(a for a in plus if a not in minus)
        only_minus = next(a for a in minus if a not in plus)

        def total(route):
            return sum(params[x][0] * flow[x] + params[x][1] for x in route)

        cp, cn = total(plus), total(minus)
        if wp and wn:
            if cp < cn:
                params[only_plus][1] += cn - cp
            else:
                params[only_minus][1] += cp - cn
        elif wp and cp > cn:
            params[only_minus][1] += cp - cn + rng.randint(0, 2)
        elif wn and cn > cp:
            params[only_plus][1] += cn - cp + rng.randint(0, 2)
        extra = {key: vals[k] for key, vals in class_fields.items()}
        costs = {x: CostFunction.affine(a, b) for x, (a, b) in params.items()}
        specs.append(ClassSpec(str(k + 1), measures[k], (tuple(plus), tuple(minus)), costs, **extra))
    game = GameInstance(tuple(arcs), tuple(specs))
    return game, game.profile([list(s) for s in splits])


def planted_ring_game(inst: RingInstance, rng: random.Random, m: int = 4) -> tuple[GameInstance, StrategyProfile]:
    """One class per OD-pair with menu (r+, r-) and a planted grid equilibrium."""
    menus = [
        tuple(tuple(inst.arc_label(a) for a in inst.route_table[(l, s)]) for s in (POS, NEG))
        for l in range(inst.num_demands)
    ]
    return planted_game(
        [inst.arc_label(a) for a in inst.arcs()],
        menus,
        rng,
        m,
        od=[tuple(map(str, d)) for d in inst.demands],
        route_names=[("r+", "r-")] * inst.num_demands,
    )


def random_cost_function(rng: random.Random, pieces: int = 3) -> CostFunction:
    pts = [(Fraction(0), Fraction(rng.randint(0, 10), rng.randint(1, 4)))]
    for _ in range(pieces):
        x, y = pts[-1]
        pts.append((x + Fraction(rng.randint(1, 6), rng.randint(1, 3)), y + Fraction(rng.randint(1, 9), rng.randint(1, 3))))
    return CostFunction(tuple(pts))

"""Nonatomic congestion games with finitely many user classes, in exact arithmetic.

A class is a population segment of rational measure with a finite route
menu and its own cost function on every arc it may use.  Users inside a
class are interchangeable, so a strategy profile is one weight vector per
class.  Segments sharing a ``name`` belong to the same class of users
(identical costs, different OD-pairs).
"""

from __future__ import annotations

import bisect
import itertools
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ProfileShapeMismatch, SearchSpaceTooLarge, ValidationError

DEFAULT_GRID_CAP = 10**7
PROHIBITIVE = Fraction(10**6)

FlowVector = dict  # arc label -> Fraction


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass an int, Fraction or 'p/q' string")
    return Fraction(x)


@dataclass(frozen=True)
class CostFunction:
    """Continuous, strictly increasing piecewise-linear cost.

    Breakpoints start at flow 0; beyond the last one the final slope is
    extended.
    """

    breakpoints: tuple[tuple[Fraction, Fraction], ...]
    _flows: tuple[Fraction, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        pts = tuple((as_fraction(x), as_fraction(y)) for x, y in self.breakpoints)
        if len(pts) < 2:
            raise ValidationError("a cost function needs at least two breakpoints")
        if pts[0][0] != 0:
            raise ValidationError("the first breakpoint must be at flow 0")
        if pts[0][1] < 0:
            raise ValidationError("costs must be nonnegative")
        for (x0, y0), (x1, y1) in zip(pts, pts[1:]):
            if not x1 > x0:
                raise ValidationError("breakpoint flows must increase strictly")
            if not y1 > y0:
                raise ValidationError("cost functions must increase strictly")
        object.__setattr__(self, "breakpoints", pts)
        object.__setattr__(self, "_flows", tuple(x for x, _ in pts))

    @classmethod
    def affine(cls, slope, intercept=0) -> "CostFunction":
        a, b = as_fraction(slope), as_fraction(intercept)
        return cls(((Fraction(0), b), (Fraction(1), a + b)))

    @classmethod
    def prohibitive(cls) -> "CostFunction":
        return cls.affine(1, PROHIBITIVE)

    @property
    def is_affine(self) -> bool:
        return len(self.breakpoints) == 2

    @property
    def intercept(self) -> Fraction:
        return self.breakpoints[0][1]

    @property
    def final_slope(self) -> Fraction:
        (x0, y0), (x1, y1) = self.breakpoints[-2:]
        return (y1 - y0) / (x1 - x0)

    def slopes(self) -> list[Fraction]:
        return [(y1 - y0) / (x1 - x0) for (x0, y0), (x1, y1) in zip(self.breakpoints, self.breakpoints[1:])]

    def __call__(self, x) -> Fraction:
        pts = self.breakpoints
        if len(pts) == 2:
            (x0, y0), (x1, y1) = pts
            return y0 + (y1 - y0) * x / x1
        i = bisect.bisect_right(self._flows, x) - 1
        i = min(max(i, 0), len(pts) - 2)
        (x0, y0), (x1, y1) = pts[i], pts[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)

    def scaled(self, factor) -> "CostFunction":
        f = as_fraction(factor)
        return CostFunction(tuple((x, y * f) for x, y in self.breakpoints))

    def describe(self) -> str:
        if self.is_affine:
            return f"{_fmt(self.breakpoints[1][1] - self.intercept)}*x + {_fmt(self.intercept)}"
        return "pwl[" + ", ".join(f"({_fmt(x)}, {_fmt(y)})" for x, y in self.breakpoints) + "]"


def _fmt(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True, eq=True)
class ClassSpec:
    name: str
    measure: Fraction
    routes: tuple[tuple[str, ...], ...]
    costs: Mapping[str, CostFunction]
    od: tuple[str, str] | None = None
    route_names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "measure", as_fraction(self.measure))
        object.__setattr__(self, "routes", tuple(tuple(r) for r in self.routes))
        object.__setattr__(self, "costs", dict(self.costs))
        if self.od is not None:
            object.__setattr__(self, "od", tuple(self.od))
        if self.route_names is not None:
            object.__setattr__(self, "route_names", tuple(self.route_names))
            if len(self.route_names) != len(self.routes):
                raise ValidationError(f"class {self.name}: one name per route expected")
        if self.measure <= 0:
            raise ValidationError(f"class {self.name}: measure must be positive")
        if not self.routes:
            raise ValidationError(f"class {self.name}: empty route menu")
        if len({frozenset(r) for r in self.routes}) != len(self.routes):
            raise ValidationError(f"class {self.name}: repeated route")
        for r in self.routes:
            if not r:
                raise ValidationError(f"class {self.name}: empty route")
            for a in r:
                if a not in self.costs:
                    raise ValidationError(f"class {self.name}: no cost on arc {a}")

    def route_name(self, j: int) -> str:
        if self.route_names is not None:
            return self.route_names[j]
        return "r" + str(j)


@dataclass(frozen=True)
class GameInstance:
    arcs: tuple[str, ...]
    classes: tuple[ClassSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arcs", tuple(self.arcs))
        object.__setattr__(self, "classes", tuple(self.classes))
        known = set(self.arcs)
        if len(known) != len(self.arcs):
            raise ValidationError("duplicate arc label")
        for k in self.classes:
            for r in k.routes:
                for a in r:
                    if a not in known:
                        raise ValidationError(f"class {k.name}: unknown arc {a}")

    def profile(self, weights: Sequence[Sequence]) -> "StrategyProfile":
        p = StrategyProfile(tuple(tuple(as_fraction(w) for w in ws) for ws in weights))
        check_profile(self, p)
        return p

    def pure_profile(self, choice: Sequence[int]) -> "StrategyProfile":
        """Every segment puts all its mass on route ``choice[k]``."""
        weights = []
        for k, j in zip(self.classes, choice):
            w = [Fraction(0)] * len(k.routes)
            w[j] = k.measure
            weights.append(w)
        return self.profile(weights)


@dataclass(frozen=True)
class StrategyProfile:
    weights: tuple[tuple[Fraction, ...], ...]


def check_profile(game: GameInstance, p: StrategyProfile) -> None:
    if len(p.weights) != len(game.classes):
        raise ProfileShapeMismatch(f"{len(p.weights)} weight vectors for {len(game.classes)} classes")
    for k, ws in zip(game.classes, p.weights):
        if len(ws) != len(k.routes):
            raise ProfileShapeMismatch(f"class {k.name}: {len(ws)} weights for {len(k.routes)} routes")
        if any(w < 0 for w in ws):
            raise ProfileShapeMismatch(f"class {k.name}: negative weight")
        if sum(ws) != k.measure:
            raise ProfileShapeMismatch(f"class {k.name}: weights sum to {sum(ws)}, measure is {k.measure}")


def class_flows(game: GameInstance, p: StrategyProfile) -> list[FlowVector]:
    """Per-class contribution to each arc flow."""
    check_profile(game, p)
    out = []
    for k, ws in zip(game.classes, p.weights):
        f = {}
        for r, w in zip(k.routes, ws):
            if w:
                for a in r:
                    f[a] = f.get(a, 0) + w
        out.append({a: Fraction(f.get(a, 0)) for a in game.arcs})
    return out


def flows(game: GameInstance, p: StrategyProfile) -> FlowVector:
    check_profile(game, p)
    return _flows_unchecked(game, p.weights)


def _flows_unchecked(game: GameInstance, weights) -> FlowVector:
    f = dict.fromkeys(game.arcs, Fraction(0))
    for k, ws in zip(game.classes, weights):
        for r, w in zip(k.routes, ws):
            if w:
                for a in r:
                    f[a] += w
    return f


def route_cost(game: GameInstance, k: int, r: int, f: Mapping[str, Fraction]) -> Fraction:
    spec = game.classes[k]
    return sum((spec.costs[a](f[a]) for a in spec.routes[r]), Fraction(0))


def route_costs(game: GameInstance, k: int, f: Mapping[str, Fraction]) -> list[Fraction]:
    return [route_cost(game, k, r, f) for r in range(len(game.classes[k].routes))]


class Violation(NamedTuple):
    cls: int
    used: int
    cheaper: int
    improvement: Fraction


@dataclass
class EquilibriumReport:
    status: str
    strict_gap: Fraction | None
    violations: list[Violation]
    costs: list[list[Fraction]]
    flow: FlowVector

    @property
    def is_equilibrium(self) -> bool:
        return self.status == "Equilibrium"

    @property
    def is_strict(self) -> bool:
        return self.is_equilibrium and self.strict_gap is not None and self.strict_gap > 0


def _assess(game: GameInstance, weights, f: FlowVector) -> EquilibriumReport:
    violations: list[Violation] = []
    gap: Fraction | None = None
    all_costs = []
    for k, (spec, ws) in enumerate(zip(game.classes, weights)):
        costs = [sum((spec.costs[a](f[a]) for a in r), Fraction(0)) for r in spec.routes]
        all_costs.append(costs)
        best = min(costs)
        cheapest = costs.index(best)
        for j, w in enumerate(ws):
            if w and costs[j] > best:
                violations.append(Violation(k, j, cheapest, costs[j] - best))
        used = [j for j, w in enumerate(ws) if w]
        if len(used) == 1 and len(costs) > 1:
            j = used[0]
            g = min(c for i, c in enumerate(costs) if i != j) - costs[j]
            gap = g if gap is None else min(gap, g)
    status = "Violation" if violations else "Equilibrium"
    if violations:
        gap = Fraction(0) if gap is None else min(gap, Fraction(0))
    return EquilibriumReport(status, gap, violations, all_costs, f)


def verify_equilibrium(game: GameInstance, p: StrategyProfile) -> EquilibriumReport:
    """Exact equilibrium check.

    ``strict_gap`` is the least margin, over classes whose whole mass sits on
    one route, between that route and the best alternative; ``None`` when no
    class qualifies.
    """
    f = flows(game, p)
    return _assess(game, p.weights, f)


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def grid_cap() -> int:
    return int(os.environ.get("RINGEQ_GRID_CAP", DEFAULT_GRID_CAP))


def grid_equilibrium_search(game: GameInstance, m: int = 4, cap: int | None = None):
    """All equilibria whose class weights are multiples of measure/m.

    Returns (profile, flow, report) triples in grid order.
    """
    if m < 1:
        raise ValueError("resolution must be positive")
    cap = grid_cap() if cap is None else cap
    menus = []
    size = 1
    for spec in game.classes:
        unit = spec.measure / m
        opts = [tuple(unit * c for c in comp) for comp in _compositions(m, len(spec.routes))]
        menus.append(opts)
        size *= len(opts)
        if size > cap:
            raise SearchSpaceTooLarge(f"grid has more than {cap} points")
    results = []
    for weights in itertools.product(*menus):
        f = _flows_unchecked(game, weights)
        rep = _assess(game, weights, f)
        if rep.is_equilibrium:
            results.append((StrategyProfile(tuple(weights)), f, rep))
    return results


def distinct_flow_clusters(results: Iterable) -> list[FlowVector]:
    clusters: list[FlowVector] = []
    for _p, f, _rep in results:
        if not any(f == c for c in clusters):
            clusters.append(f)
    return clusters


def equilibria_equivalent(game: GameInstance, p1: StrategyProfile, p2: StrategyProfile) -> bool:
    """Same per-class contribution on every arc."""
    return class_flows(game, p1) == class_flows(game, p2)


def _equalizing_shift(game: GameInstance, k: int, src: int, dst: int, f: FlowVector, limit: Fraction) -> Fraction:
    """Largest t <= limit moved from route src to dst without dst becoming costlier."""
    spec = game.classes[k]
    a_src, a_dst = set(spec.routes[src]), set(spec.routes[dst])
    out_only, in_only = a_src - a_dst, a_dst - a_src

    def diff(t):
        c_src = sum((spec.costs[a](f[a] - t) for a in out_only), Fraction(0))
        c_dst = sum((spec.costs[a](f[a] + t) for a in in_only), Fraction(0))
        return c_src - c_dst

    if diff(limit) >= 0:
        return limit
    cuts = {Fraction(0), limit}
    for a in out_only:
        for x, _ in spec.costs[a].breakpoints:
            cuts.add(f[a] - x)
    for a in in_only:
        for x, _ in spec.costs[a].breakpoints:
            cuts.add(x - f[a])
    pts = sorted(t for t in cuts if 0 <= t <= limit)
    prev, dprev = pts[0], diff(pts[0])
    for t in pts[1:]:
        d = diff(t)
        if d <= 0:
            # diff is linear on [prev, t]
            return prev + (t - prev) * dprev / (dprev - d)
        prev, dprev = t, d
    return limit


def best_response_dynamics(game: GameInstance, init: StrategyProfile, max_iters: int = 100, step=Fraction(1, 2)) -> StrategyProfile:
    """Damped best-response sweeps over the classes.

    Each class moves a fraction ``step`` of the mass on every costlier used
    route to its cheapest route (lowest index on ties), never moving past
    the point where the two route costs meet.  No convergence is claimed.
    """
    step = as_fraction(step)
    if not 0 < step <= 1:
        raise ValueError("step must lie in (0, 1]")
    check_profile(game, init)
    weights = [list(ws) for ws in init.weights]
    for _ in range(max_iters):
        moved = False
        for k, spec in enumerate(game.classes):
            f = _flows_unchecked(game, weights)
            costs = route_costs(game, k, f)
            best = costs.index(min(costs))
            for j, w in enumerate(weights[k]):
                if j == best or not w or costs[j] <= costs[best]:
                    continue
                t = _equalizing_shift(game, k, j, best, f, step * w)
                if t > 0:
                    weights[k][j] -= t
                    weights[k][best] += t
                    moved = True
                    f = _flows_unchecked(game, weights)
        if not moved:
            break
    return StrategyProfile(tuple(tuple(ws) for ws in weights))

"""JSON file formats for rings, supply graphs, games and profiles.

Every document carries a ``"type"`` field.  Rationals are written as
strings ("3/2", "7"); JSON integers are accepted on input, JSON floats are
rejected.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Any

from .coverage import GeneralGraph
from .errors import ParseError
from .game import ClassSpec, CostFunction, GameInstance, StrategyProfile, _fmt
from .ring import RingInstance

KINDS = ("ring", "graph", "game", "profile")


def fmt_rational(q) -> str:
    return _fmt(Fraction(q))


def parse_rational(value: Any, path: str = "$") -> Fraction:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError("rationals must be integers or 'p/q' strings, not floats", path)
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        text = value.strip()
        num, slash, den = text.partition("/")
        try:
            if not slash:
                return Fraction(int(num))
            return Fraction(int(num), int(den))
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational: {value!r}", path) from None
    raise ParseError(f"expected a rational, got {type(value).__name__}", path)


def _field(doc: dict, key: str, path: str, kind=None):
    if not isinstance(doc, dict):
        raise ParseError("expected an object", path)
    if key not in doc:
        raise ParseError(f"missing field {key!r}", path)
    value = doc[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(f"expected {kind.__name__}", f"{path}.{key}")
    return value


def _label(value, path: str):
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise ParseError("vertex and arc labels must be strings or integers", path)
    return value


def _pairs(items, path: str) -> list[tuple]:
    out = []
    for i, item in enumerate(items):
        p = f"{path}[{i}]"
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError("expected a two-element list", p)
        out.append((_label(item[0], p + "[0]"), _label(item[1], p + "[1]")))
    return out


def parse_demands(doc, path: str = "$") -> list[tuple]:
    """A bare list of pairs, or an object with a ``demands`` list."""
    if isinstance(doc, dict):
        return _pairs(_field(doc, "demands", path, list), path + ".demands")
    if isinstance(doc, list):
        return _pairs(doc, path)
    raise ParseError("expected a list of demands", path)


def _parse_cost(doc, path: str) -> CostFunction:
    if isinstance(doc, dict) and "breakpoints" in doc:
        pts = []
        for i, pt in enumerate(_field(doc, "breakpoints", path, list)):
            p = f"{path}.breakpoints[{i}]"
            if not isinstance(pt, list) or len(pt) != 2:
                raise ParseError("expected [flow, cost]", p)
            pts.append((parse_rational(pt[0], p + "[0]"), parse_rational(pt[1], p + "[1]")))
        return CostFunction(tuple(pts))
    if isinstance(doc, dict) and "slope" in doc:
        return CostFunction.affine(
            parse_rational(doc["slope"], path + ".slope"),
            parse_rational(doc.get("intercept", 0), path + ".intercept"),
        )
    raise ParseError("a cost needs 'breakpoints' or 'slope'/'intercept'", path)


def _parse_class(doc, path: str) -> ClassSpec:
    routes = []
    for i, r in enumerate(_field(doc, "routes", path, list)):
        if not isinstance(r, list):
            raise ParseError("a route is a list of arc labels", f"{path}.routes[{i}]")
        routes.append(tuple(_label(a, f"{path}.routes[{i}][{j}]") for j, a in enumerate(r)))
    costs = {
        a: _parse_cost(c, f"{path}.costs[{a!r}]") for a, c in _field(doc, "costs", path, dict).items()
    }
    od = doc.get("od")
    if od is not None:
        od = _pairs([od], path + ".od")[0]
    names = doc.get("route_names")
    return ClassSpec(
        str(_field(doc, "name", path)),
        parse_rational(_field(doc, "measure", path), path + ".measure"),
        tuple(routes),
        costs,
        od,
        tuple(names) if names is not None else None,
    )


def from_document(doc: dict):
    kind = _field(doc, "type", "$", str)
    if kind == "ring":
        vertices = [_label(v, f"$.vertices[{i}]") for i, v in enumerate(_field(doc, "vertices", "$", list))]
        return RingInstance(tuple(vertices), tuple(_pairs(_field(doc, "demands", "$", list), "$.demands")))
    if kind == "graph":
        vertices = [_label(v, f"$.vertices[{i}]") for i, v in enumerate(_field(doc, "vertices", "$", list))]
        return GeneralGraph(tuple(vertices), tuple(_pairs(_field(doc, "edges", "$", list), "$.edges")))
    if kind == "game":
        arcs = tuple(_label(a, f"$.arcs[{i}]") for i, a in enumerate(_field(doc, "arcs", "$", list)))
        classes = tuple(_parse_class(c, f"$.classes[{i}]") for i, c in enumerate(_field(doc, "classes", "$", list)))
        return GameInstance(arcs, classes)
    if kind == "profile":
        weights = []
        for i, ws in enumerate(_field(doc, "weights", "$", list)):
            if not isinstance(ws, list):
                raise ParseError("expected a list of weights", f"$.weights[{i}]")
            weights.append(tuple(parse_rational(w, f"$.weights[{i}][{j}]") for j, w in enumerate(ws)))
        return StrategyProfile(tuple(weights))
    raise ParseError(f"unknown type {kind!r}; expected one of {', '.join(KINDS)}", "$.type")


def parse_instance(text: str):
    """Parse a ring, graph, game or profile document."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", f"line {exc.lineno} column {exc.colno}") from None
    return from_document(doc)


def _cost_doc(c: CostFunction) -> dict:
    if c.is_affine and c.breakpoints[1][0] == 1:
        return {"slope": fmt_rational(c.final_slope), "intercept": fmt_rational(c.intercept)}
    return {"breakpoints": [[fmt_rational(x), fmt_rational(y)] for x, y in c.breakpoints]}


def to_document(obj) -> dict:
    if isinstance(obj, RingInstance):
        return {"type": "ring", "vertices": list(obj.vertices), "demands": [list(p) for p in obj.demands]}
    if isinstance(obj, GeneralGraph):
        return {"type": "graph", "vertices": list(obj.vertices), "edges": [list(e) for e in obj.edges]}
    if isinstance(obj, GameInstance):
        classes = []
        for k in obj.classes:
            d: dict = {"name": k.name, "measure": fmt_rational(k.measure)}
            if k.od is not None:
                d["od"] = list(k.od)
            d["routes"] = [list(r) for r in k.routes]
            if k.route_names is not None:
                d["route_names"] = list(k.route_names)
            d["costs"] = {a: _cost_doc(c) for a, c in k.costs.items()}
            classes.append(d)
        return {"type": "game", "arcs": list(obj.arcs), "classes": classes}
    if isinstance(obj, StrategyProfile):
        return {"type": "profile", "weights": [[fmt_rational(w) for w in ws] for ws in obj.weights]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def render(obj) -> str:
    return json.dumps(to_document(obj), indent=2) + "\n"

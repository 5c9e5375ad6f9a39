"""Human-readable reports followed by a machine-readable JSON block.

The machine block sits between ``MACHINE_BEGIN`` and ``MACHINE_END`` lines;
all rationals in it (and in the text) are exact "p/q" strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .catalog import CatalogMatch
from .counterexamples import Counterexample, route_cost_table
from .coverage import CoverageReport, ScanResult
from .game import EquilibriumReport, GameInstance
from .io import fmt_rational, to_document
from .mixed import MixedGraph
from .ring import RingInstance, sign_symbol

MACHINE_BEGIN = "--- machine-readable ---"
MACHINE_END = "--- end ---"


@dataclass
class StrongReport:
    strongly_unique: bool
    cycle: list | None


@dataclass
class SearchReport:
    game: GameInstance
    resolution: int
    results: list  # (profile, flow, report) triples
    clusters: list


@dataclass
class CatalogListing:
    side: str
    graphs: list[MixedGraph]


def _jsonable(x):
    if isinstance(x, Fraction):
        return fmt_rational(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def _flow_line(flow: dict) -> str:
    return ", ".join(f"{a} = {fmt_rational(v)}" for a, v in flow.items() if v)


def _class_label(name: str, od, repeated: bool) -> str:
    if repeated and od is not None:
        return f"class {name} ({od[0]}->{od[1]})"
    return f"class {name}"


def _cost_lines(names, ods, routes, costs) -> list[str]:
    lines = []
    for name, od, rnames, row in zip(names, ods, routes, costs):
        label = _class_label(name, od, names.count(name) > 1)
        body = ", ".join(f"{r} = {fmt_rational(c)}" for r, c in zip(rnames, row))
        lines.append(f"  {label}: {body}")
    return lines


def _coverage(rep: CoverageReport):
    inst = rep.instance
    text = [f"verdict: {rep.verdict.value}"]
    if rep.shortcut:
        text.append(f"decided by demand count ({rep.shortcut})")
    if rep.max_coverage is not None:
        text.append(f"max coverage = {rep.max_coverage}")
    if rep.min_dir is not None:
        text.append(f"positive-direction coverage range = [{rep.min_dir}, {rep.max_dir}]")
    arc = None
    if rep.witness_arc is not None and inst is not None:
        arc = inst.arc_label(rep.witness_arc)
        ods = [f"{o}->{d}" for o, d in (inst.demands[i] for i in rep.witness_demands)]
        text.append(f"most covered arc: {arc} ({sign_symbol(rep.witness_arc.sign)}), on routes of {', '.join(ods)}")
    machine = {
        "kind": "coverage",
        "verdict": rep.verdict.value,
        "max_coverage": rep.max_coverage,
        "min_dir": rep.min_dir,
        "max_dir": rep.max_dir,
        "witness_arc": arc,
        "witness_demands": list(rep.witness_demands),
        "shortcut": rep.shortcut,
    }
    return text, machine


def _strong(rep: StrongReport):
    if rep.strongly_unique:
        text = ["strong uniqueness: true (the simple supply graph is a forest)"]
    else:
        text = ["strong uniqueness: false", "witness cycle: " + " - ".join(map(str, rep.cycle))]
    return text, {"kind": "strong", "strongly_unique": rep.strongly_unique, "cycle": rep.cycle}


def _scan(rep: ScanResult):
    text = [f"scan: {rep.status}", f"cycles checked = {rep.cycles_checked}"]
    if rep.truncated:
        text.append("warning: cycle length bound reached, longer cycles not scanned")
    if rep.non_unique:
        text.append("obstructing cycle: " + " - ".join(map(str, rep.cycle)))
        text.append("demands on a common arc: " + ", ".join(map(str, rep.demands)))
        if rep.report is not None and rep.report.max_coverage is not None:
            text.append(f"max coverage = {rep.report.max_coverage}")
    machine = {
        "kind": "scan",
        "status": rep.status,
        "cycle": rep.cycle,
        "demands": list(rep.demands),
        "truncated": rep.truncated,
        "cycles_checked": rep.cycles_checked,
    }
    return text, machine


def _equilibrium(rep: EquilibriumReport, game: GameInstance | None):
    text = [f"status: {rep.status}"]
    if rep.strict_gap is not None:
        text.append(f"strict gap = {fmt_rational(rep.strict_gap)}")
    text.append("flow: " + (_flow_line(rep.flow) or "none"))
    if game is not None:
        text.append("route costs:")
        text += _cost_lines(
            [k.name for k in game.classes],
            [k.od for k in game.classes],
            [[k.route_name(j) for j in range(len(k.routes))] for k in game.classes],
            rep.costs,
        )
    for v in rep.violations:
        text.append(f"violation: class {v.cls + 1} uses route {v.used + 1}, route {v.cheaper + 1} is cheaper by {fmt_rational(v.improvement)}")
    machine = {
        "kind": "equilibrium",
        "status": rep.status,
        "strict": rep.is_strict,
        "strict_gap": rep.strict_gap,
        "costs": rep.costs,
        "flow": rep.flow,
        "violations": [list(v) for v in rep.violations],
    }
    return text, machine


def _counterexample(ce: Counterexample):
    rows = route_cost_table(ce)
    rep, rep_hat = ce.reports
    names = [r["class"] for r in rows]
    ods = [r["od"] for r in rows]
    routes = [r["routes"] for r in rows]
    text = [f"construction: {ce.provenance.get('construction', 'unknown')}"]
    for label, which, r in (("sigma", "sigma", rep), ("sigma_hat", "sigma_hat", rep_hat)):
        state = "strict equilibrium" if r.is_strict else r.status
        text.append(f"{label}: {state}, gap = {fmt_rational(r.strict_gap) if r.strict_gap is not None else 'n/a'}")
        text.append("  flow: " + _flow_line(r.flow))
        text += _cost_lines(names, ods, routes, [row[which] for row in rows])
    machine = {
        "kind": "counterexample",
        "provenance": ce.provenance,
        "sigma": {"strict": rep.is_strict, "strict_gap": rep.strict_gap, "costs": rep.costs, "flow": rep.flow},
        "sigma_hat": {"strict": rep_hat.is_strict, "strict_gap": rep_hat.strict_gap, "costs": rep_hat.costs, "flow": rep_hat.flow},
        "table": rows,
    }
    return text, machine


def _search(rep: SearchReport):
    text = [
        f"grid resolution m = {rep.resolution}",
        f"equilibria on the grid = {len(rep.results)}",
        f"distinct flow clusters = {len(rep.clusters)}",
    ]
    for i, f in enumerate(rep.clusters, 1):
        text.append(f"  cluster {i}: {_flow_line(f) or 'zero flow'}")
    machine = {
        "kind": "search",
        "resolution": rep.resolution,
        "equilibria": [to_document(p)["weights"] for p, _f, _r in rep.results],
        "clusters": rep.clusters,
    }
    return text, machine


def _graph_doc(g: MixedGraph) -> dict:
    return {"vertices": list(g.vertices), "edges": [list(e) for e in g.edges], "demands": [list(a) for a in g.arcs]}


def _graph_line(g: MixedGraph) -> str:
    ring = g.as_ring()
    cycle = " - ".join(map(str, ring.vertices)) if ring is not None else f"{len(g.vertices)} vertices"
    arcs = ", ".join(f"{o}->{d}" for o, d in g.arcs)
    return f"cycle {cycle}; demands {arcs}"


def _catalog(rep: CatalogListing):
    text = [f"{rep.side} catalog: {len(rep.graphs)} graphs"]
    text += [f"  {i}: {_graph_line(g)}" for i, g in enumerate(rep.graphs)]
    return text, {"kind": "catalog", "side": rep.side, "graphs": [_graph_doc(g) for g in rep.graphs]}


def _match(rep: CatalogMatch):
    text = [f"verdict: {rep.verdict.value}"]
    if rep.graph is None:
        text.append("too large for catalog matching; verdict from coverage only")
    elif rep.side == "uniqueness":
        text.append(f"homeomorphic to a minor of maximal uniqueness graph {rep.index}: {_graph_line(rep.graph)}")
    else:
        text.append(f"contains minimal obstruction {rep.index}: {_graph_line(rep.graph)}")
    machine = {
        "kind": "catalog-match",
        "verdict": rep.verdict.value,
        "side": rep.side,
        "index": rep.index,
        "graph": _graph_doc(rep.graph) if rep.graph is not None else None,
    }
    return text, machine


def render_report(report, game: GameInstance | None = None) -> str:
    """Deterministic text rendering of any module report."""
    if isinstance(report, CoverageReport):
        text, machine = _coverage(report)
    elif isinstance(report, StrongReport):
        text, machine = _strong(report)
    elif isinstance(report, ScanResult):
        text, machine = _scan(report)
    elif isinstance(report, EquilibriumReport):
        text, machine = _equilibrium(report, game)
    elif isinstance(report, Counterexample):
        if report.reports is None:
            report.verify()
        text, machine = _counterexample(report)
    elif isinstance(report, SearchReport):
        text, machine = _search(report)
    elif isinstance(report, CatalogListing):
        text, machine = _catalog(report)
    elif isinstance(report, CatalogMatch):
        text, machine = _match(report)
    elif isinstance(report, RingInstance):
        text, machine = [f"ring on {report.n} vertices, {report.num_demands} OD-pairs"], to_document(report)
    else:
        raise TypeError(f"no report renderer for {type(report).__name__}")
    body = json.dumps(_jsonable(machine), indent=2, sort_keys=True)
    return "\n".join(text + [MACHINE_BEGIN, body, MACHINE_END]) + "\n"


def machine_block(text: str) -> dict:
    """Extract the JSON block from a rendered report."""
    start = text.index(MACHINE_BEGIN) + len(MACHINE_BEGIN)
    end = text.index(MACHINE_END, start)
    return json.loads(text[start:end])

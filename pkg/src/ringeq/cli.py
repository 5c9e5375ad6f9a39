"""Command-line interface: ``ringeq <command> ...``.

Exit status 0 when a verdict or report was produced, 2 on invalid input,
3 when an internal consistency check fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .catalog import enumerate_maximal_uniqueness, enumerate_minimal_obstructions, match_catalog
from .counterexamples import ConstructionFailed, build_counterexample
from .coverage import GeneralGraph, round_trip_scan, scan_cycle_obstructions, strong_uniqueness, uniqueness_verdict
from .errors import RelabelFailed, RingEqError, ValidationError
from .game import GameInstance, StrategyProfile, check_profile, distinct_flow_clusters, grid_equilibrium_search, verify_equilibrium
from .io import parse_demands, parse_instance, render
from .report import CatalogListing, SearchReport, StrongReport, render_report
from .ring import NEG, POS, RingInstance

EXIT_OK, EXIT_INVALID, EXIT_INTERNAL = 0, 2, 3


def _load(path: str, expected: type):
    obj = parse_instance(Path(path).read_text(encoding="utf-8"))
    if not isinstance(obj, expected):
        raise ValidationError(f"{path}: expected a {expected.__name__} document, got {type(obj).__name__}")
    return obj


def _analyze(args) -> str:
    inst = _load(args.ring, RingInstance)
    rep = uniqueness_verdict(inst, fast=False)
    if args.start is not None or args.direction != "pos":
        start = inst.vertices[0] if args.start is None else _vertex(inst, args.start)
        direction = POS if args.direction == "pos" else NEG
        rep.min_dir, rep.max_dir, _ = round_trip_scan(inst, start, direction)
    return render_report(rep)


def _vertex(inst: RingInstance, name: str):
    for v in inst.vertices:
        if str(v) == name:
            return v
    raise ValidationError(f"unknown start vertex {name!r}")


def _counterexample(args) -> str:
    inst = _load(args.ring, RingInstance)
    ce = build_counterexample(inst)
    ce.verify()
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    (out / "game.json").write_text(render(ce.game), encoding="utf-8")
    (out / "sigma.json").write_text(render(ce.sigma), encoding="utf-8")
    (out / "sigma_hat.json").write_text(render(ce.sigma_hat), encoding="utf-8")
    (out / "provenance.json").write_text(json.dumps(ce.provenance, indent=2, default=str) + "\n", encoding="utf-8")
    # re-verify from the files just written
    game = _load(str(out / "game.json"), GameInstance)
    for name in ("sigma.json", "sigma_hat.json"):
        rep = verify_equilibrium(game, _load(str(out / name), StrategyProfile))
        if not rep.is_strict:
            raise ConstructionFailed(f"{name} does not verify as a strict equilibrium after a file round trip")
    return render_report(ce)


def _verify(args) -> str:
    game = _load(args.game, GameInstance)
    profile = _load(args.profile, StrategyProfile)
    check_profile(game, profile)
    return render_report(verify_equilibrium(game, profile), game)


def _search(args) -> str:
    game = _load(args.game, GameInstance)
    results = grid_equilibrium_search(game, args.resolution)
    return render_report(SearchReport(game, args.resolution, results, distinct_flow_clusters(results)))


def _strong(args) -> str:
    ok, cycle = strong_uniqueness(_load(args.graph, GeneralGraph))
    return render_report(StrongReport(ok, cycle))


def _scan(args) -> str:
    graph = _load(args.graph, GeneralGraph)
    demands = parse_demands(json.loads(Path(args.demands).read_text(encoding="utf-8")))
    return render_report(scan_cycle_obstructions(graph, demands, args.max_cycle))


def _catalog(args) -> str:
    if args.action == "enumerate":
        if args.side == "obstruction":
            graphs = enumerate_minimal_obstructions()
        else:
            graphs = enumerate_maximal_uniqueness()
        return render_report(CatalogListing(args.side, graphs))
    if args.ring is None:
        raise ValidationError("catalog match needs a ring file")
    return render_report(match_catalog(_load(args.ring, RingInstance)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ringeq", description="Uniqueness of equilibria on ring networks.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="coverage verdict for a ring")
    p.add_argument("ring")
    p.add_argument("--start", help="start vertex of the round-trip scan")
    p.add_argument("--direction", choices=("pos", "neg"), default="pos")
    p.set_defaults(func=_analyze)

    p = sub.add_parser("counterexample", help="build a game with two strict equilibria")
    p.add_argument("ring")
    p.add_argument("-o", "--output", required=True, help="output directory")
    p.set_defaults(func=_counterexample)

    p = sub.add_parser("verify", help="check a profile for equilibrium")
    p.add_argument("game")
    p.add_argument("profile")
    p.set_defaults(func=_verify)

    p = sub.add_parser("search", help="grid search for equilibria")
    p.add_argument("game")
    p.add_argument("--resolution", "-m", type=int, default=4)
    p.set_defaults(func=_search)

    p = sub.add_parser("strong", help="strong uniqueness of a supply graph")
    p.add_argument("graph")
    p.set_defaults(func=_strong)

    p = sub.add_parser("scan", help="search cycles of a graph for non-unique rings")
    p.add_argument("graph")
    p.add_argument("demands")
    p.add_argument("--max-cycle", type=int, default=12)
    p.set_defaults(func=_scan)

    p = sub.add_parser("catalog", help="minimal obstructions and maximal uniqueness graphs")
    p.add_argument("action", choices=("enumerate", "match"))
    p.add_argument("ring", nargs="?")
    p.add_argument("--side", choices=("obstruction", "uniqueness"), default="obstruction")
    p.set_defaults(func=_catalog)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        sys.stdout.write(args.func(args))
    except (RelabelFailed, ConstructionFailed, AssertionError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (ValidationError, OSError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except RingEqError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())

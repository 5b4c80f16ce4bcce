"""Command-line interface: cohort evaluation, the HTTP service, and
benchmark graph generation."""

from __future__ import annotations

import argparse
import logging
import sys

from .cohort import CohortConfig, generate_cohort
from .errors import DentarxError
from .evaluation import VARIANTS, evaluate_cohort, format_report_table
from .fixtures import fixture_path
from .kg import load_graph
from .recommend import RecommenderConfig
from .safety import DEFAULT_TAU, DEFAULT_WEIGHTS, SafetyWeights, synthesize_training_set, train_safety_classifier


def _parse_weights(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("weights must be three comma-separated numbers")
    return tuple(float(p) for p in parts)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dentarx")
    sub = parser.add_subparsers(dest="command", required=True)

    ev = sub.add_parser("evaluate", help="evaluate a pipeline variant on a synthetic cohort")
    ev.add_argument("--kg", default=str(fixture_path("kg_mini.jsonl")), help="knowledge graph file")
    ev.add_argument("--cohort-seed", type=int, default=42)
    ev.add_argument("--n-records", type=int, default=100)
    ev.add_argument("--variant", choices=VARIANTS, default="full")
    ev.add_argument("--tau", type=float, default=DEFAULT_TAU)
    ev.add_argument("--weights", type=_parse_weights, default=DEFAULT_WEIGHTS,
                    metavar="F,F,F", help="dose,allergy,interaction weights (sum to 1)")
    ev.add_argument("--topk", type=int, default=10)
    ev.add_argument("--out", default=None, help="write line-delimited report records here")

    sv = sub.add_parser("serve", help="run the HTTP service")
    sv.add_argument("--kg", default=None, help="knowledge graph file")
    sv.add_argument("--classifier", default=None, help="trained classifier JSON (else trained at startup)")
    sv.add_argument("--host", default=None)
    sv.add_argument("--port", type=int, default=None)

    gg = sub.add_parser("make-graph", help="generate the benchmark-scale synthetic graph")
    gg.add_argument("--seed", type=int, default=0)
    gg.add_argument("--out", required=True)
    return parser


def cmd_evaluate(args) -> int:
    graph = load_graph(args.kg)
    cohort = generate_cohort(
        CohortConfig(seed=args.cohort_seed, n_records=args.n_records), graph
    )
    classifier = train_safety_classifier(
        synthesize_training_set(graph, 2000, seed=7), graph, seed=7
    )
    weights = SafetyWeights(*args.weights, tau=args.tau)
    base = RecommenderConfig(weights=weights, k=args.topk)
    report, results = evaluate_cohort(cohort, graph, base, classifier, args.variant)
    if args.out:
        import json

        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(report.to_json_line() + "\n")
            for res in results:
                fh.write(json.dumps(res.to_dict(), sort_keys=True) + "\n")
    print(format_report_table([report]))
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import ServiceConfig, create_app

    overrides = {}
    if args.kg:
        overrides["kg_path"] = args.kg
    if args.classifier:
        overrides["classifier_path"] = args.classifier
    if args.host:
        overrides["host"] = args.host
    if args.port:
        overrides["port"] = args.port
    if "kg_path" not in overrides:
        import os

        overrides["kg_path"] = os.environ.get("DENTARX_KG", str(fixture_path("kg_mini.jsonl")))
    config = ServiceConfig.from_env(**overrides)
    logging.basicConfig(level=logging.INFO, format="%(message)s", stream=sys.stdout)
    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")
    return 0


def cmd_make_graph(args) -> int:
    from .graphgen import generate_scaled_graph

    graph = generate_scaled_graph(args.seed)
    graph.save(args.out)
    print(f"wrote {args.out}: {len(graph.nodes)} nodes, {len(graph.edges)} edges")
    return 0


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "evaluate":
            return cmd_evaluate(args)
        if args.command == "serve":
            return cmd_serve(args)
        return cmd_make_graph(args)
    except (DentarxError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())

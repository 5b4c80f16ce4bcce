#!/usr/bin/env python3
"""Regenerate the frozen golden files under tests/goldens/.

Run only when an intentional behavior change invalidates the goldens; review
the diff before committing. The embedding goldens are produced by an
independent re-implementation of the hashing scheme (plain Python, no numpy)
so the library cannot silently agree with its own bugs.
"""

from __future__ import annotations

import json
import math
import re
import struct
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
GOLDENS = ROOT / "tests" / "goldens"

sys.path.insert(0, str(ROOT / "src"))

# -- independent oracle: signed feature hashing, written from first principles

_TOKEN_RE = re.compile(r"#?[A-Za-z0-9]+|[.;]")


def oracle_embed(text: str) -> list[float]:
    vec = [0.0] * 256
    for raw in _TOKEN_RE.findall(text.lower()):
        if raw in (".", ";"):
            continue
        h = 0xCBF29CE484222325
        for b in raw.encode("utf-8"):
            h = ((h ^ b) * 0x100000001B3) % (1 << 64)
        sign = 1.0 if h < (1 << 63) else -1.0
        vec[h % 256] += sign
    norm = math.sqrt(sum(x * x for x in vec))
    return [x / norm for x in vec] if norm > 0 else vec


GOLDEN_TEXTS = [
    "amoxicillin",
    "facial swelling and fever near tooth #85",
    "no swelling, no pain; but tenderness persists",
    "Periapical radiolucency at tooth #85.",
    "clindamycin 20 mg/kg/day in 3 doses",
]


def write_embeddings() -> None:
    with open(GOLDENS / "embeddings.bin", "wb") as fh:
        for text in GOLDEN_TEXTS:
            fh.write(struct.pack("<256d", *oracle_embed(text)))
    (GOLDENS / "embeddings_manifest.json").write_text(
        json.dumps({"dim": 256, "dtype": "<f8", "texts": GOLDEN_TEXTS}, indent=2) + "\n",
        encoding="utf-8",
    )


def write_pipeline_goldens() -> None:
    """Library-produced regression goldens (reviewed once, then frozen)."""
    import numpy as np

    from dentarx import load_graph, load_records, extract, recommend, RecommenderConfig
    from dentarx.embedding import encode_subgraph
    from dentarx.fixtures import fixture_path
    from dentarx.retrieval import build_context
    from dentarx.embedding import FusionGate
    from dentarx.safety import synthesize_training_set, train_safety_classifier

    graph = load_graph(fixture_path("kg_mini.jsonl"))
    records = {r.record_id: r for r in load_records(fixture_path("records_mini.jsonl"))}

    # 3-node path fragment: AMX - penicillins - penicillin_allergy
    path_nodes = [graph.nodes[i] for i in ("AMX", "penicillins", "penicillin_allergy")]
    path_edges = [
        e for e in graph.edges
        if {e.src, e.dst} <= {"AMX", "penicillins", "penicillin_allergy"}
    ]
    vec = encode_subgraph(path_nodes, path_edges)
    with open(GOLDENS / "subgraph_path.bin", "wb") as fh:
        fh.write(struct.pack("<256d", *vec.tolist()))

    ctx = build_context(records["R1"], graph, FusionGate(0.5), k=10, m=3)
    (GOLDENS / "context_r1.json").write_text(
        json.dumps(ctx.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )

    clf = train_safety_classifier(synthesize_training_set(graph, 2000, seed=7), graph, seed=7)
    summaries = {}
    for rid in ("R1", "R3", "R5"):
        outcome = recommend(records[rid], graph, RecommenderConfig(), clf)
        summaries[rid] = outcome.summary
    (GOLDENS / "summaries.json").write_text(
        json.dumps(summaries, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def main() -> None:
    GOLDENS.mkdir(parents=True, exist_ok=True)
    write_embeddings()
    write_pipeline_goldens()
    print(f"wrote goldens to {GOLDENS}")


if __name__ == "__main__":
    main()

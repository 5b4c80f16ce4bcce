"""Hashing embeddings, exact top-K subgraph retrieval, and gated fusion of
the text and graph representations.

Run:  python3 demos/03_retrieval_fusion.py
"""

import numpy as np

from dentarx.embedding import DIM, FusionGate, cosine, embed_text
from dentarx.fixtures import fixture_path
from dentarx.kg import load_graph
from dentarx.records import load_records
from dentarx.retrieval import build_context, fit_gate, retrieve_subgraph

graph = load_graph(fixture_path("kg_mini.jsonl"))
records = {r.record_id: r for r in load_records(fixture_path("records_mini.jsonl"))}
record = records["R3"]

print("=" * 70)
print("Feature-hashing text embeddings")
print("=" * 70)
v1 = embed_text("facial swelling and fever")
v2 = embed_text("swelling of the face with fever")
v3 = embed_text("routine recall visit, no findings")
print(f"dimension: {DIM}, unit norm: {np.linalg.norm(v1):.12f}")
print(f"cos(paraphrase pair)  = {cosine(v1, v2):+.4f}")
print(f"cos(unrelated pair)   = {cosine(v1, v3):+.4f}")

print()
print("=" * 70)
print(f"Top-10 retrieval for {record.record_id} (exact, tie-broken by id)")
print("=" * 70)
subgraph = retrieve_subgraph(graph, record, 10)
for node_id, score in zip(subgraph.node_ids, subgraph.scores):
    node = graph.nodes[node_id]
    print(f"  {score:.4f}  {node.kind.value:>12}  {node_id}  ({node.name})")
safety_edges = [e for e in subgraph.edges if e.rel.value in
                ("has_dose_rule", "cross_reactive", "interacts_with", "contraindicated_in")]
print(f"  retained edges: {len(subgraph.edges)} ({len(safety_edges)} safety edges kept for drugs)")

print()
print("=" * 70)
print("Gated fusion: alpha slides between text-only and graph-only")
print("=" * 70)
for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
    ctx = build_context(record, graph, FusionGate(alpha), k=10, m=3)
    hits = ", ".join(f"{h.passage_node_id}:{h.similarity:.3f}" for h in ctx.guideline_hits)
    print(f"  alpha={alpha:.2f}  cos(h*, h_text)={cosine(ctx.h_star, ctx.h_x):+.3f}  guidelines: {hits}")

print()
print("=" * 70)
print("Fitting the gate on dev evidence recall")
print("=" * 70)
from dentarx.cohort import CohortConfig, generate_cohort  # noqa: E402

dev = generate_cohort(CohortConfig(seed=13, n_records=20), graph)
cases = [(r, r.gold.evidence_node_ids) for r in dev]
gate = fit_gate(cases, graph)
print(f"selected alpha = {gate.alpha} over a grid of 0.0 .. 1.0 in steps of 0.1")

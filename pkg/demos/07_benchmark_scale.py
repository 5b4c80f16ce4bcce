"""Benchmark-scale run: a ~1,200-node / ~5,600-edge synthetic graph,
retrieval and recommendation timings at that size.

Run:  python3 demos/07_benchmark_scale.py
"""

import time
from collections import Counter

from dentarx.cohort import CohortConfig, generate_cohort
from dentarx.evaluation import evaluate_cohort
from dentarx.graphgen import generate_scaled_graph
from dentarx.recommend import RecommenderConfig
from dentarx.retrieval import retrieve_subgraph
from dentarx.safety import synthesize_training_set, train_safety_classifier

start = time.monotonic()
graph = generate_scaled_graph(seed=0)
print(f"generated graph in {time.monotonic() - start:.2f}s: "
      f"{len(graph.nodes)} nodes, {len(graph.edges)} edges")
kinds = Counter(n.kind.value for n in graph.nodes.values())
print("  " + ", ".join(f"{k}: {v}" for k, v in sorted(kinds.items())))

print()
print("training the safety classifier at scale ...")
start = time.monotonic()
classifier = train_safety_classifier(synthesize_training_set(graph, 2000, seed=7), graph, seed=7)
print(f"  trained in {time.monotonic() - start:.2f}s")

print()
print("generating a 100-record cohort on the scaled graph ...")
cohort = generate_cohort(CohortConfig(seed=42, n_records=100), graph)

start = time.monotonic()
for record in cohort[:20]:
    retrieve_subgraph(graph, record, 10)
per_query = (time.monotonic() - start) / 20
print(f"exact top-10 retrieval: {per_query * 1000:.1f} ms/record over {len(graph.nodes)} nodes")

start = time.monotonic()
report, _ = evaluate_cohort(cohort, graph, RecommenderConfig(), classifier)
elapsed = time.monotonic() - start
print(f"full pipeline: {elapsed / len(cohort) * 1000:.0f} ms/record "
      f"({elapsed:.1f}s for {len(cohort)} records)")
print()
print(f"cvr={report.cvr:.3f}  der={report.der:.3f}  top1={report.top1:.3f}  "
      f"eas={report.eas:.3f}  abstention={report.abstention_rate:.3f}")

"""The reject-and-regenerate recommendation loop end to end: generation,
validation, exclusion-driven retries, and first-class abstention.

Run:  python3 demos/05_recommendation_loop.py
"""

from dentarx.fixtures import fixture_path
from dentarx.kg import load_graph
from dentarx.recommend import RecommenderConfig, recommend
from dentarx.records import load_records
from dentarx.safety import synthesize_training_set, train_safety_classifier

graph = load_graph(fixture_path("kg_mini.jsonl"))
records = {r.record_id: r for r in load_records(fixture_path("records_mini.jsonl"))}
classifier = train_safety_classifier(synthesize_training_set(graph, 2000, seed=7), graph, seed=7)
config = RecommenderConfig()

for rid in ("R1", "R2", "R3", "R4", "R5"):
    record = records[rid]
    outcome = recommend(record, graph, config, classifier)
    print("=" * 70)
    allergies = sorted(record.profile.allergies) or "-"
    print(f"{rid}: age {record.profile.age_months} mo, allergies {allergies}")
    print("=" * 70)
    if outcome.abstained:
        print(f"  ABSTAINED after {outcome.attempts} validation(s): {outcome.reason}")
    else:
        c = outcome.candidate
        print(f"  RECOMMEND {c.drug}: {c.dose_mg_per_kg_day} mg/kg/day "
              f"x{c.frequency_per_day}/day for {c.duration_days} days "
              f"(attempt {outcome.attempts}, verdict {outcome.report.verdict.value})")
        print(f"  rationale: {c.rationale}")
        print(f"  evidence:  {sorted(c.evidence_node_ids)}")
    for cand, rep in outcome.rejected:
        why = [v.value for v in rep.hard_violations] or [rep.verdict.value]
        print(f"  rejected {cand.drug}: {', '.join(why)}")
    print(f"  summary: {outcome.summary}")
    print()

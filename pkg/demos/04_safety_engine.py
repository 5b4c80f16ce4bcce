"""The dual-layer safety engine: weighted sub-scores, hard rules, the learned
unsafe-candidate classifier, and the combined verdict.

Run:  python3 demos/04_safety_engine.py
"""

from dentarx.fixtures import fixture_path
from dentarx.kg import load_graph
from dentarx.records import PatientProfile
from dentarx.safety import (
    AntibioticCandidate,
    SafetyWeights,
    synthesize_training_set,
    train_safety_classifier,
    validate,
)

graph = load_graph(fixture_path("kg_mini.jsonl"))

print("training the unsafe-candidate classifier on a synthetic, rule-labeled set ...")
classifier = train_safety_classifier(synthesize_training_set(graph, 2000, seed=7), graph, seed=7)
weights = SafetyWeights()  # 0.4 dose / 0.4 allergy / 0.2 interaction, tau 0.8

scenarios = [
    (
        "healthy child, in-band amoxicillin",
        PatientProfile(age_months=60, weight_kg=20.0),
        AntibioticCandidate(drug="AMX", dose_mg_per_kg_day=65.0, frequency_per_day=2, duration_days=5),
    ),
    (
        "penicillin allergy, same candidate",
        PatientProfile(age_months=60, weight_kg=20.0, allergies=frozenset({"penicillin_allergy"})),
        AntibioticCandidate(drug="AMX", dose_mg_per_kg_day=65.0, frequency_per_day=2, duration_days=5),
    ),
    (
        "heavy adolescent, dose over the daily cap",
        PatientProfile(age_months=170, weight_kg=75.0),
        AntibioticCandidate(drug="AMX", dose_mg_per_kg_day=80.0, frequency_per_day=2, duration_days=5),
    ),
    (
        "dose 10% below the band (soft penalty only)",
        PatientProfile(age_months=60, weight_kg=20.0),
        AntibioticCandidate(drug="AMX", dose_mg_per_kg_day=36.0, frequency_per_day=2, duration_days=5),
    ),
    (
        "clindamycin + azithromycin co-medication",
        PatientProfile(age_months=60, weight_kg=20.0, current_medications=frozenset({"AZI"})),
        AntibioticCandidate(drug="CLI", dose_mg_per_kg_day=27.5, frequency_per_day=3, duration_days=5),
    ),
]

for title, profile, candidate in scenarios:
    report = validate(candidate, profile, graph, weights, classifier)
    print()
    print("=" * 70)
    print(title)
    print("=" * 70)
    print(f"  candidate: {candidate.drug} {candidate.dose_mg_per_kg_day} mg/kg/day "
          f"x{candidate.frequency_per_day}/day for {candidate.duration_days} days")
    print(f"  s_dose={report.s_dose:.3f}  s_allergy={report.s_allergy:.3f}  "
          f"s_interaction={report.s_interaction:.3f}  ->  s_safety={report.s_safety:.3f} "
          f"(tau={weights.tau})")
    print(f"  hard violations: {[v.value for v in report.hard_violations] or '-'}")
    print(f"  classifier P(unsafe) = {report.classifier_unsafe_prob:.3f}")
    print(f"  VERDICT: {report.verdict.value}")

"""Clinical text parsing: entity linking, negation scoping, tooth notation,
diagnosis scoring and the severity rubric.

Run:  python3 demos/02_parsing_negation.py
"""

from dentarx.fixtures import fixture_path
from dentarx.kg import load_graph
from dentarx.parsing import extract
from dentarx.records import load_records
from dentarx.text import load_abbreviations

graph = load_graph(fixture_path("kg_mini.jsonl"))
records = {r.record_id: r for r in load_records(fixture_path("records_mini.jsonl"))}
abbreviations = load_abbreviations(fixture_path("abbreviations.tsv"))

for rid in ("R1", "R2", "R3"):
    record = records[rid]
    print("=" * 70)
    print(f"{rid}  (age {record.profile.age_months} mo, {record.profile.weight_kg} kg)")
    print("=" * 70)
    for section in ("chief_complaint", "exam_notes", "radiographic_report"):
        text = record.section_text(section)
        if text:
            print(f"  {section}: {text}")

    findings = extract(record, graph, abbreviations)
    print()
    print("  linked mentions:")
    for m in findings.mentions:
        flag = " [NEGATED]" if m.negated else ""
        print(f"    {m.section}[{m.start}:{m.end}] {m.surface!r} -> {m.node_id}{flag}")
    print(f"  tooth sites:       {list(findings.tooth_sites) or '-'}")
    print(f"  prior antibiotics: {list(findings.prior_antibiotics) or '-'}")
    print(f"  severity:          {findings.severity}")
    if findings.diagnosis_candidates:
        print("  diagnosis candidates (normalized indicator support):")
        for cond, score in findings.diagnosis_candidates:
            marker = "  <- top" if cond == findings.top_diagnosis else ""
            print(f"    {cond}: {score:.2f}{marker}")
    else:
        print("  diagnosis candidates: none (all findings negated or absent)")
    print()

print("=" * 70)
print("Negation scoping in isolation")
print("=" * 70)
from dentarx.parsing import detect_negation  # noqa: E402

cases = [
    (["no", "fever"], 1),
    (["no", "swelling", "but", "tenderness"], 3),
    (["no", "a", "b", "c", "d", "fever"], 5),
    (["no", ".", "fever"], 2),
]
for words, start in cases:
    print(f"  {' '.join(words):<30} target={words[start]!r:12} negated={detect_negation(words, start)}")

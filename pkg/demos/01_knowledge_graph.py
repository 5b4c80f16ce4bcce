"""Tour of the knowledge graph layer: loading, typed queries, dose rules.

Run:  python3 demos/01_knowledge_graph.py
"""

from collections import Counter

from dentarx.fixtures import fixture_path
from dentarx.kg import NodeKind, Relation, load_graph

graph = load_graph(fixture_path("kg_mini.jsonl"))

print("=" * 70)
print("A validated pediatric-dentistry knowledge graph")
print("=" * 70)
print(f"nodes: {len(graph.nodes)}   edges: {len(graph.edges)}")
kinds = Counter(n.kind.value for n in graph.nodes.values())
for kind, count in sorted(kinds.items()):
    print(f"  {kind:>18}: {count}")

print()
print("-- age-banded dose rules ---------------------------------------------")
for age in (12, 60, 160):
    rule = graph.dose_rule_for("AMX", age)
    if rule is None:
        print(f"amoxicillin at {age:>3} months: no applicable rule (hard stop)")
    else:
        print(
            f"amoxicillin at {age:>3} months: {rule.min_mg_per_kg_day}-{rule.max_mg_per_kg_day} "
            f"mg/kg/day, cap {rule.abs_max_mg_day} mg/day, "
            f"{rule.freq_min_per_day}-{rule.freq_max_per_day}x/day, "
            f"{rule.duration_min_days}-{rule.duration_max_days} days ({rule.age_band_id})"
        )

print()
print("-- tooth sites by FDI notation ---------------------------------------")
for code in ("85", "46"):
    tooth = graph.tooth_by_fdi(code)
    print(f"#{code} -> {tooth.id}: {tooth.name}")

print()
print("-- typed neighborhoods ------------------------------------------------")
for rel in (Relation.MEMBER_OF, Relation.INTERACTS_WITH, Relation.CONTRAINDICATED_IN):
    pairs = graph.neighbors("AZI", rel)
    shown = ", ".join(f"{n.id}" for _, n in pairs) or "(none)"
    print(f"azithromycin --{rel.value}--> {shown}")

print()
print("-- first-line therapy -------------------------------------------------")
for cond in graph.nodes_of_kind(NodeKind.CONDITION):
    first = sorted(graph.first_line_drugs(cond.id))
    if first:
        print(f"{cond.name}: {', '.join(first)}")

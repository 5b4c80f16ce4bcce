"""Deterministic generator for a benchmark-scale knowledge graph
(~1,200 nodes / ~5,600 edges), built through the same validation path as
file loading. All generated names and dose values are synthetic engineering
data for benchmarks, never clinical guidance.
"""

from __future__ import annotations

import random

from .kg import KnowledgeGraph, build_graph

_CONDITION_STEMS = (
    "pulpitis", "abscess", "cellulitis", "periodontitis", "gingivitis",
    "pericoronitis", "osteitis", "stomatitis", "mucositis", "sialadenitis",
)
_QUALIFIERS = (
    "acute", "chronic", "recurrent", "localized", "diffuse",
    "early", "advanced", "suppurative", "necrotizing", "juvenile",
)
_SYMPTOM_STEMS = (
    "pain", "swelling", "tenderness", "erythema", "discharge", "mobility",
    "sensitivity", "radiolucency", "fever", "halitosis", "bleeding", "trismus",
)
_DRUG_SUFFIXES = ("cillin", "mycin", "cycline", "floxacin", "penem", "cef")

_AGE_BANDS = (
    ("band_infant", "infant band", 0, 23),
    ("band_child", "child band", 24, 143),
    ("band_adolescent", "adolescent band", 144, 216),
)


def generate_scaled_graph(
    seed: int = 0,
    n_conditions: int = 90,
    n_symptoms: int = 560,
    n_drugs: int = 120,
    n_classes: int = 12,
    n_passages: int = 350,
) -> KnowledgeGraph:
    """Build a validated benchmark graph; deterministic per seed.

    Default sizing lands near 1,200 nodes and 5,600 edges while keeping the
    same relation vocabulary and invariants as the bundled fixture graph.
    """
    rng = random.Random(seed)
    records: list[dict] = []

    def node(id, kind, name, synonyms=(), **attrs):
        records.append(
            {"node": {"id": id, "kind": kind, "name": name, "synonyms": list(synonyms), "attrs": attrs}}
        )

    def edge(src, rel, dst, **attrs):
        records.append({"edge": {"src": src, "rel": rel, "dst": dst, "attrs": attrs}})

    for band_id, band_name, lo, hi in _AGE_BANDS:
        node(band_id, "AgeBand", band_name, min_months=lo, max_months=hi)

    class_ids = []
    for i in range(n_classes):
        cid, aid = f"class_{i:02d}", f"allergy_{i:02d}"
        node(cid, "DrugClass", f"synthetic drug class {i:02d}")
        node(aid, "AllergyClass", f"synthetic allergy class {i:02d}")
        edge(cid, "cross_reactive", aid)
        class_ids.append(cid)

    condition_ids = []
    for i in range(n_conditions):
        cid = f"cond_{i:03d}"
        name = f"{_QUALIFIERS[i % len(_QUALIFIERS)]} {_CONDITION_STEMS[i % len(_CONDITION_STEMS)]} {i:03d}"
        node(cid, "Condition", name, [f"condition {i:03d}"])
        condition_ids.append(cid)

    # the first 2 symptoms per condition are exclusive indicators, which
    # cohort generation relies on to write unambiguous presentations
    n_exclusive = 2 * n_conditions
    for i in range(n_symptoms):
        sid = f"symp_{i:03d}"
        name = f"{_QUALIFIERS[(i // 7) % len(_QUALIFIERS)]} {_SYMPTOM_STEMS[i % len(_SYMPTOM_STEMS)]} {i:03d}"
        node(sid, "Symptom", name, [f"symptom {i:03d}"])
        if i < n_exclusive:
            edge(sid, "indicates", condition_ids[i % n_conditions])
        else:
            for cond in rng.sample(condition_ids, k=rng.randint(5, 9)):
                edge(sid, "indicates", cond)
        if rng.random() < 0.5:
            quadrant, position = rng.choice((1, 2, 3, 4)), rng.randint(1, 8)
            edge(sid, "located_at", f"tooth_{quadrant}{position}")

    # full FDI chart: 20 primary teeth plus 32 permanent teeth
    for quadrant in (1, 2, 3, 4):
        for position in range(1, 9):
            fdi = f"{quadrant}{position}"
            node(f"tooth_{fdi}", "ToothSite", f"permanent tooth {fdi}", [f"tooth {fdi}"], fdi=fdi)
    for quadrant in (5, 6, 7, 8):
        for position in range(1, 6):
            fdi = f"{quadrant}{position}"
            node(f"tooth_{fdi}", "ToothSite", f"primary tooth {fdi}", [f"tooth {fdi}"], fdi=fdi)

    drug_ids = []
    for i in range(n_drugs):
        did = f"drug_{i:03d}"
        name = f"agent{_DRUG_SUFFIXES[i % len(_DRUG_SUFFIXES)]} {i:03d}"
        node(did, "Drug", name, [f"drug {i:03d}"])
        drug_ids.append(did)
        edge(did, "member_of", class_ids[i % len(class_ids)])
        for band_id, _, _, _ in _AGE_BANDS:
            if rng.random() < 0.15:
                continue  # leave some bands uncovered, like the fixture graph
            lo = rng.uniform(5.0, 40.0)
            hi = lo * rng.uniform(1.5, 2.5)
            edge(
                did, "has_dose_rule", band_id,
                min_mg_per_kg_day=round(lo, 1), max_mg_per_kg_day=round(hi, 1),
                abs_max_mg_day=round(hi * rng.uniform(25.0, 45.0)),
                freq_min_per_day=rng.randint(1, 2), freq_max_per_day=rng.randint(3, 4),
                duration_min_days=rng.randint(3, 5), duration_max_days=rng.randint(7, 10),
            )
        for cond in rng.sample(condition_ids, k=rng.randint(4, 9)):
            edge(did, "treats", cond, line="first" if rng.random() < 0.3 else "second")
        for cond in rng.sample(condition_ids, k=rng.randint(0, 2)):
            edge(did, "contraindicated_in", cond)
        if i > 0:
            for other in rng.sample(drug_ids[:i], k=min(i, rng.randint(0, 3))):
                edge(did, "interacts_with", other, severity=round(rng.random(), 2))

    for i in range(n_passages):
        pid = f"passage_{i:03d}"
        cond = condition_ids[i % len(condition_ids)]
        drug = drug_ids[i % len(drug_ids)]
        node(
            pid, "GuidelinePassage", f"synthetic guideline passage {i:03d}",
            text=f"Management of condition {cond}: prefer {drug} at weight based dosing with review.",
            source=f"synthetic-benchmark-{i:03d}",
        )
        edge(pid, "supports", cond)
        edge(pid, "supports", drug)
        edge(pid, "supports", drug_ids[(i + 37) % len(drug_ids)])

    return build_graph(records)

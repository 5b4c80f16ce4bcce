#!/usr/bin/env python3
"""Regenerate the bundled fixture knowledge graph.

All dose values here are illustrative engineering data for tests and demos,
not clinical guidance.
"""

import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "src" / "dentarx" / "fixtures" / "kg_mini.jsonl"

nodes = []
edges = []


def node(id, kind, name, synonyms=(), **attrs):
    nodes.append({"id": id, "kind": kind, "name": name, "synonyms": list(synonyms), "attrs": attrs})


def edge(src, rel, dst, **attrs):
    edges.append({"src": src, "rel": rel, "dst": dst, "attrs": attrs})


# drugs
node("AMX", "Drug", "amoxicillin", ["amoxil"])
node("AMC", "Drug", "amoxicillin-clavulanate", ["co-amoxiclav", "augmentin"])
node("CLI", "Drug", "clindamycin", ["cleocin"])
node("AZI", "Drug", "azithromycin", ["zithromax"])

# drug classes and allergy classes
node("penicillins", "DrugClass", "penicillins", ["penicillin class"])
node("macrolides", "DrugClass", "macrolides")
node("lincosamides", "DrugClass", "lincosamides")
node("penicillin_allergy", "AllergyClass", "penicillin allergy")
node("macrolide_allergy", "AllergyClass", "macrolide allergy")
node("lincosamide_allergy", "AllergyClass", "lincosamide allergy")

# age bands (months, inclusive)
node("ageband_0_23m", "AgeBand", "infant and toddler (0-23 months)", min_months=0, max_months=23)
node("ageband_2_12y", "AgeBand", "child (2-12 years)", min_months=24, max_months=143)
node("ageband_12_18y", "AgeBand", "adolescent (12-18 years)", min_months=144, max_months=216)

# conditions (dental plus comorbidities used by contraindication rules)
node("acute_pulpitis", "Condition", "acute pulpitis", ["irreversible pulpitis"])
node("periapical_abscess", "Condition", "periapical abscess", ["dental abscess", "apical abscess"])
node("asthma", "Condition", "asthma")
node("cardiac_defect", "Condition", "congenital cardiac defect", ["cardiac defect"])
node("hepatic_impairment", "Condition", "hepatic impairment", ["liver impairment"])

# symptoms
node("pain", "Symptom", "tooth pain", ["toothache", "pain", "spontaneous pain"])
node("sensitivity_cold", "Symptom", "cold sensitivity", ["sensitivity to cold"])
node("deep_caries", "Symptom", "deep caries", ["deep carious lesion"])
node("swelling", "Symptom", "swelling", ["gingival swelling"])
node("tenderness", "Symptom", "percussion tenderness", ["tenderness"])
node("facial_swelling", "Symptom", "facial swelling", ["facial cellulitis"])
node("fever", "Symptom", "fever", ["pyrexia"])
node("trismus", "Symptom", "trismus", ["limited mouth opening"])
node("fistula", "Symptom", "fistula", ["gum boil"])
node("radiolucency", "Symptom", "periapical radiolucency", ["radiolucency", "lucency"])
node("mobility", "Symptom", "tooth mobility", ["mobility"])
node("sinus_tract", "Symptom", "sinus tract")
node("lymphadenopathy", "Symptom", "lymphadenopathy", ["swollen lymph nodes"])
node("pus_discharge", "Symptom", "pus discharge", ["purulent discharge"])
node("halitosis", "Symptom", "halitosis", ["bad breath"])
node("bleeding_gums", "Symptom", "bleeding gums")

# tooth sites: primary dentition (FDI quadrants 5-8) plus permanent first molars
PRIMARY_POSITIONS = {
    1: "central incisor",
    2: "lateral incisor",
    3: "canine",
    4: "first molar",
    5: "second molar",
}
QUADRANTS = {
    5: ("primary", "maxillary", "right"),
    6: ("primary", "maxillary", "left"),
    7: ("primary", "mandibular", "left"),
    8: ("primary", "mandibular", "right"),
}
for q, (dentition, arch, side) in QUADRANTS.items():
    for pos, tooth_name in PRIMARY_POSITIONS.items():
        fdi = f"{q}{pos}"
        node(
            f"tooth_{fdi}",
            "ToothSite",
            f"{dentition} {arch} {side} {tooth_name}",
            [f"tooth {fdi}"],
            fdi=fdi,
        )
for fdi, arch, side in (("16", "maxillary", "right"), ("26", "maxillary", "left"),
                        ("36", "mandibular", "left"), ("46", "mandibular", "right")):
    node(f"tooth_{fdi}", "ToothSite", f"permanent {arch} {side} first molar", [f"tooth {fdi}"], fdi=fdi)

# guideline passages
node(
    "gp_pulpitis", "GuidelinePassage", "pulpitis management passage",
    text=("Acute pulpitis presenting with tooth pain, cold sensitivity, percussion "
          "tenderness or deep caries: pulp therapy first; when systemic antibiotic "
          "therapy is indicated, first line amoxicillin at weight based dosing, with "
          "clindamycin for penicillin allergic children."),
    source="fixture-guideline-01",
)
node(
    "gp_abscess", "GuidelinePassage", "periapical abscess management passage",
    text=("Periapical abscess presenting with swelling, facial swelling, fever, fistula, "
          "sinus tract, pus discharge or periapical radiolucency: establish drainage; "
          "first line amoxicillin, with clindamycin for penicillin allergic children."),
    source="fixture-guideline-02",
)
node(
    "gp_penicillin_allergy", "GuidelinePassage", "penicillin allergy alternative passage",
    text=("Children with documented penicillin allergy should receive clindamycin as the "
          "alternative agent for odontogenic infection."),
    source="fixture-guideline-03",
)
node(
    "gp_dosing_weight", "GuidelinePassage", "weight based dosing passage",
    text=("Pediatric antibiotic dosing is weight based, expressed in mg per kg per day and "
          "divided across daily administrations, never exceeding the absolute daily maximum."),
    source="fixture-guideline-04",
)
node(
    "gp_duration", "GuidelinePassage", "course duration passage",
    text=("Antibiotic courses for odontogenic infection should run the shortest effective "
          "duration, typically five to seven days with clinical review."),
    source="fixture-guideline-05",
)
node(
    "gp_stewardship", "GuidelinePassage", "stewardship passage",
    text=("Antibiotic stewardship: prefer local measures such as pulpotomy, extraction or "
          "drainage; reserve antimicrobial therapy for spreading infection or systemic signs."),
    source="fixture-guideline-06",
)

# treats (line = first/second preference)
edge("AMX", "treats", "acute_pulpitis", line="first")
edge("AMX", "treats", "periapical_abscess", line="first")
edge("CLI", "treats", "acute_pulpitis", line="second")
edge("CLI", "treats", "periapical_abscess", line="second")
edge("AZI", "treats", "acute_pulpitis", line="second")
edge("AMC", "treats", "acute_pulpitis", line="second")

# dose rules (illustrative engineering values)
def dose_rule(drug, band, lo, hi, cap, fmin, fmax, dmin, dmax):
    edge(
        drug, "has_dose_rule", band,
        min_mg_per_kg_day=lo, max_mg_per_kg_day=hi, abs_max_mg_day=cap,
        freq_min_per_day=fmin, freq_max_per_day=fmax,
        duration_min_days=dmin, duration_max_days=dmax,
    )

dose_rule("AMX", "ageband_2_12y", 40, 90, 3000, 2, 3, 5, 7)
dose_rule("AMX", "ageband_12_18y", 40, 80, 4000, 2, 3, 5, 7)
dose_rule("AMC", "ageband_2_12y", 25, 45, 2000, 2, 3, 5, 10)
dose_rule("AMC", "ageband_12_18y", 25, 45, 2500, 2, 3, 5, 10)
dose_rule("CLI", "ageband_0_23m", 8, 20, 600, 3, 4, 5, 7)
dose_rule("CLI", "ageband_2_12y", 10, 30, 1800, 3, 4, 5, 7)
dose_rule("CLI", "ageband_12_18y", 10, 30, 1800, 3, 4, 5, 7)
dose_rule("AZI", "ageband_0_23m", 5, 12, 500, 1, 1, 3, 5)
dose_rule("AZI", "ageband_2_12y", 5, 12, 500, 1, 1, 3, 5)
dose_rule("AZI", "ageband_12_18y", 5, 12, 500, 1, 1, 3, 5)

# class membership and allergy cross-reactivity
edge("AMX", "member_of", "penicillins")
edge("AMC", "member_of", "penicillins")
edge("CLI", "member_of", "lincosamides")
edge("AZI", "member_of", "macrolides")
edge("penicillins", "cross_reactive", "penicillin_allergy")
edge("macrolides", "cross_reactive", "macrolide_allergy")
edge("lincosamides", "cross_reactive", "lincosamide_allergy")
edge("AZI", "cross_reactive", "macrolide_allergy")

# drug-drug interactions (stored once, symmetric)
edge("CLI", "interacts_with", "AZI", severity=0.3)
edge("AMC", "interacts_with", "AZI", severity=0.9)

# comorbidity contraindications
edge("AZI", "contraindicated_in", "cardiac_defect")
edge("CLI", "contraindicated_in", "hepatic_impairment")

# symptom -> condition indicators
for s in ("pain", "sensitivity_cold", "deep_caries"):
    edge(s, "indicates", "acute_pulpitis")
for s in ("facial_swelling", "fever", "trismus", "fistula", "radiolucency", "mobility",
          "sinus_tract", "lymphadenopathy", "pus_discharge", "halitosis"):
    edge(s, "indicates", "periapical_abscess")
for s in ("swelling", "tenderness"):
    edge(s, "indicates", "acute_pulpitis")
    edge(s, "indicates", "periapical_abscess")

# guideline support links
edge("gp_pulpitis", "supports", "acute_pulpitis")
edge("gp_abscess", "supports", "periapical_abscess")
edge("gp_penicillin_allergy", "supports", "CLI")
edge("gp_dosing_weight", "supports", "AMX")
edge("gp_duration", "supports", "periapical_abscess")
edge("gp_stewardship", "supports", "acute_pulpitis")


def main():
    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        for n in nodes:
            fh.write(json.dumps({"node": n}, sort_keys=True) + "\n")
        for e in edges:
            fh.write(json.dumps({"edge": e}, sort_keys=True) + "\n")
    kinds = {}
    for n in nodes:
        kinds[n["kind"]] = kinds.get(n["kind"], 0) + 1
    print(f"wrote {OUT}: {len(nodes)} nodes {len(edges)} edges, kinds={kinds}")


if __name__ == "__main__":
    main()

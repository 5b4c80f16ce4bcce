"""Seeded synthetic cohort generation.

Stands in for private visit-record datasets: sentence templates are
instantiated with graph entities so every record carries exact gold spans,
a gold diagnosis, a rule-derived safe prescription, evidence node ids and a
template-consistent reference summary. Byte-deterministic per seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import ConfigError
from .kg import KnowledgeGraph, NodeKind, Relation
from .parsing import extract
from .recommend import generate_summary
from .records import (
    ClinicalRecord,
    GoldAnnotation,
    GoldEntity,
    PatientProfile,
    Prescription,
)
from .safety import AntibioticCandidate, hard_rule_check

SPLIT_FRACTIONS = {"train": 0.70, "dev": 0.15, "test": 0.15}


@dataclass(frozen=True)
class CohortConfig:
    seed: int = 42
    n_records: int = 100
    allergy_rate: float = 0.15
    comedication_rate: float = 0.10
    comorbidity_rate: float = 0.08
    negation_rate: float = 0.20
    template_set: str = "v1"

    def __post_init__(self):
        if self.n_records < 1:
            raise ConfigError("n_records must be >= 1")
        for name in ("allergy_rate", "comedication_rate", "comorbidity_rate", "negation_rate"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ConfigError(f"{name} must be in [0, 1]")


class _SectionBuilder:
    """Accumulates a section's text while recording gold entity spans."""

    def __init__(self, section: str):
        self.section = section
        self.text = ""
        self.entities: list[GoldEntity] = []

    def add(self, fragment: str) -> None:
        if self.text:
            self.text += " "
        self.text += fragment

    def add_entity(self, prefix: str, surface: str, suffix: str, node_id: str, negated: bool) -> None:
        if self.text:
            self.text += " "
        start = len(self.text) + len(prefix)
        self.text += prefix + surface + suffix
        self.entities.append(
            GoldEntity(
                section=self.section,
                start=start,
                end=start + len(surface),
                surface=surface,
                node_id=node_id,
                negated=negated,
            )
        )


def _indicator_pools(graph: KnowledgeGraph) -> tuple[dict[str, list[str]], dict[str, list[str]]]:
    """Per-condition exclusive and shared symptom indicator ids."""
    out_degree: dict[str, set[str]] = {}
    for e in graph.edges:
        if e.rel is Relation.INDICATES:
            out_degree.setdefault(e.src, set()).add(e.dst)
    exclusive: dict[str, list[str]] = {}
    shared: dict[str, list[str]] = {}
    for symptom, conds in sorted(out_degree.items()):
        for cond in conds:
            (exclusive if len(conds) == 1 else shared).setdefault(cond, []).append(symptom)
    return exclusive, shared


def _surface(rng: random.Random, graph: KnowledgeGraph, node_id: str) -> str:
    node = graph.nodes[node_id]
    options = (node.name, *node.synonyms)
    return options[0] if len(options) == 1 or rng.random() < 0.7 else rng.choice(options[1:])


def _condition_passage(graph: KnowledgeGraph, condition_id: str) -> str | None:
    for e in graph.in_edges(condition_id, Relation.SUPPORTS):
        return e.src
    return None


def _gold_prescription(
    graph: KnowledgeGraph, condition_id: str, profile: PatientProfile
) -> tuple[Prescription, str, PatientProfile] | None:
    """First drug (first-line first, then id) whose midpoint candidate clears
    every hard rule; relaxes the profile stepwise when nothing clears."""
    edges = graph.in_edges(condition_id, Relation.TREATS)
    ordered = sorted(edges, key=lambda e: (e.attrs["line"] != "first", e.src))
    relaxations = [
        profile,
        PatientProfile(
            age_months=profile.age_months,
            weight_kg=profile.weight_kg,
            allergies=profile.allergies,
        ),
        PatientProfile(age_months=profile.age_months, weight_kg=profile.weight_kg),
    ]
    for attempt in relaxations:
        for e in ordered:
            rule = graph.dose_rule_for(e.src, attempt.age_months)
            if rule is None:
                continue
            candidate = AntibioticCandidate(
                drug=e.src,
                dose_mg_per_kg_day=0.5 * (rule.min_mg_per_kg_day + rule.max_mg_per_kg_day),
                frequency_per_day=rule.freq_min_per_day,
                duration_days=rule.duration_min_days,
            )
            if not hard_rule_check(candidate, attempt, graph):
                rx = Prescription(
                    drug=e.src,
                    dose_mg_per_kg_day=candidate.dose_mg_per_kg_day,
                    frequency_per_day=candidate.frequency_per_day,
                    duration_days=candidate.duration_days,
                )
                return rx, rule.age_band_id, attempt
    return None


def generate_cohort(config: CohortConfig, graph: KnowledgeGraph) -> list[ClinicalRecord]:
    rng = random.Random(config.seed)
    conditions = sorted(
        {e.dst for e in graph.edges if e.rel is Relation.TREATS}
    )
    if not conditions:
        raise ConfigError("graph has no treatable conditions")
    exclusive, shared = _indicator_pools(graph)
    all_symptoms = [n.id for n in graph.nodes_of_kind(NodeKind.SYMPTOM)]
    allergy_ids = [n.id for n in graph.nodes_of_kind(NodeKind.ALLERGY_CLASS)]
    drug_ids = [n.id for n in graph.nodes_of_kind(NodeKind.DRUG)]
    comorbidity_ids = sorted(
        {e.dst for e in graph.edges if e.rel is Relation.CONTRAINDICATED_IN}
    )
    primary_teeth = [
        n for n in graph.nodes_of_kind(NodeKind.TOOTH_SITE) if str(n.attrs.get("fdi", ""))[:1] in "5678"
    ]

    records: list[ClinicalRecord] = []
    for i in range(config.n_records):
        condition = rng.choice(conditions)
        pool = exclusive.get(condition, [])
        if len(pool) < 2:
            raise ConfigError(f"condition {condition} needs >= 2 exclusive indicator symptoms")
        chosen = rng.sample(pool, 2)
        if shared.get(condition) and rng.random() < 0.5:
            chosen.append(rng.choice(shared[condition]))
        negated_symptom = None
        if rng.random() < config.negation_rate:
            leftover = [s for s in all_symptoms if s not in chosen]
            if leftover:
                negated_symptom = rng.choice(leftover)

        tooth = rng.choice(primary_teeth)
        tooth_ref = f"#{tooth.attrs['fdi']}" if rng.random() < 0.7 else tooth.name
        duration_days_symptom = rng.choice(["two", "three", "four"])

        cc = _SectionBuilder("chief_complaint")
        cc.add_entity("", _surface(rng, graph, chosen[0]).capitalize(), "", chosen[0], False)
        cc.add_entity("near tooth ", tooth_ref, "", tooth.id, False)
        cc.add(f"for {duration_days_symptom} days.")

        exam = _SectionBuilder("exam_notes")
        if len(chosen) > 2:
            exam.add_entity("Examination shows ", _surface(rng, graph, chosen[1]), "", chosen[1], False)
            exam.add_entity("and ", _surface(rng, graph, chosen[2]), ".", chosen[2], False)
        else:
            exam.add_entity("Examination shows ", _surface(rng, graph, chosen[1]), ".", chosen[1], False)
        if negated_symptom is not None:
            exam.add_entity("No ", _surface(rng, graph, negated_symptom), " noted.", negated_symptom, True)

        rad = _SectionBuilder("radiographic_report")
        widened = rng.random() < 0.5
        if widened:
            rad.add("Widening of the periodontal ligament space at")
            rad.add_entity("tooth ", tooth_ref, ".", tooth.id, False)

        age = rng.randint(24, 215)
        weight = round(min(max(2.0 * (age / 12.0) + 8.0 + rng.gauss(0.0, 2.0), 8.0), 60.0), 1)
        allergies = frozenset()
        if allergy_ids and rng.random() < config.allergy_rate:
            pen = next((a for a in allergy_ids if "penicillin" in a), allergy_ids[0])
            allergies = frozenset({pen if rng.random() < 0.7 else rng.choice(allergy_ids)})
        meds = frozenset({rng.choice(drug_ids)}) if drug_ids and rng.random() < config.comedication_rate else frozenset()
        comorbidities = (
            frozenset({rng.choice(comorbidity_ids)})
            if comorbidity_ids and rng.random() < config.comorbidity_rate
            else frozenset()
        )
        profile = PatientProfile(
            age_months=age,
            weight_kg=weight,
            allergies=allergies,
            current_medications=meds,
            comorbidities=comorbidities,
        )

        found = _gold_prescription(graph, condition, profile)
        if found is None:
            raise ConfigError(f"no safe gold prescription exists for condition {condition}")
        prescription, age_band_id, profile = found

        evidence = {condition, prescription.drug, age_band_id}
        passage = _condition_passage(graph, condition)
        if passage:
            evidence.add(passage)

        # tooth mentions appear once per section they were written into
        entities = tuple(cc.entities + exam.entities + rad.entities)
        record = ClinicalRecord(
            record_id=f"R{i:05d}",
            chief_complaint=cc.text,
            exam_notes=exam.text,
            radiographic_report=rad.text,
            profile=profile,
            gold=GoldAnnotation(
                entities=entities,
                diagnosis_id=condition,
                prescription=prescription,
                evidence_node_ids=frozenset(evidence),
                summary="",
            ),
        )
        findings = extract(record, graph)
        reference = generate_summary(
            findings,
            AntibioticCandidate(
                drug=prescription.drug,
                dose_mg_per_kg_day=prescription.dose_mg_per_kg_day,
                frequency_per_day=prescription.frequency_per_day,
                duration_days=prescription.duration_days,
            ),
            graph,
        )
        gold = GoldAnnotation(
            entities=entities,
            diagnosis_id=condition,
            prescription=prescription,
            evidence_node_ids=frozenset(evidence),
            summary=reference,
        )
        records.append(
            ClinicalRecord(
                record_id=record.record_id,
                chief_complaint=record.chief_complaint,
                exam_notes=record.exam_notes,
                radiographic_report=record.radiographic_report,
                profile=profile,
                gold=gold,
            )
        )
    return records


def split_cohort(records: list[ClinicalRecord]) -> dict[str, list[ClinicalRecord]]:
    """Patient-disjoint 70/15/15 split (one synthetic patient per record)."""
    n = len(records)
    n_train = int(n * SPLIT_FRACTIONS["train"])
    n_dev = int(n * SPLIT_FRACTIONS["dev"])
    return {
        "train": records[:n_train],
        "dev": records[n_train : n_train + n_dev],
        "test": records[n_train + n_dev :],
    }

"""Clinical record and patient profile types plus line-delimited file IO."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import ParseError

SECTIONS = ("chief_complaint", "exam_notes", "radiographic_report")

MAX_AGE_MONTHS = 216  # pediatric scope


@dataclass(frozen=True)
class PatientProfile:
    age_months: int
    weight_kg: float
    allergies: frozenset[str] = frozenset()
    current_medications: frozenset[str] = frozenset()
    comorbidities: frozenset[str] = frozenset()

    def __post_init__(self):
        if not 0 <= self.age_months <= MAX_AGE_MONTHS:
            raise ValueError(f"age_months must be in [0, {MAX_AGE_MONTHS}]")
        if not 1.0 < self.weight_kg < 150.0:
            raise ValueError("weight_kg must be in (1, 150)")


@dataclass(frozen=True)
class GoldEntity:
    section: str
    start: int
    end: int
    surface: str
    node_id: str
    negated: bool = False


@dataclass(frozen=True)
class Prescription:
    drug: str
    dose_mg_per_kg_day: float
    frequency_per_day: int
    duration_days: int


@dataclass(frozen=True)
class GoldAnnotation:
    entities: tuple[GoldEntity, ...] = ()
    diagnosis_id: str | None = None
    prescription: Prescription | None = None
    evidence_node_ids: frozenset[str] = frozenset()
    summary: str = ""


@dataclass(frozen=True)
class ClinicalRecord:
    record_id: str
    chief_complaint: str
    exam_notes: str
    profile: PatientProfile
    radiographic_report: str = ""
    gold: GoldAnnotation | None = None

    def __post_init__(self):
        if not self.record_id:
            raise ValueError("record_id must be non-empty")
        if not (self.chief_complaint or self.exam_notes or self.radiographic_report):
            raise ValueError("at least one text section must be non-empty")

    def section_text(self, section: str) -> str:
        if section not in SECTIONS:
            raise ValueError(f"unknown section {section!r}")
        return getattr(self, section)

    def full_text(self) -> str:
        return " ".join(filter(None, (getattr(self, s) for s in SECTIONS)))


# -- serialization -----------------------------------------------------------


def profile_to_dict(p: PatientProfile) -> dict:
    return {
        "age_months": p.age_months,
        "weight_kg": p.weight_kg,
        "allergies": sorted(p.allergies),
        "current_medications": sorted(p.current_medications),
        "comorbidities": sorted(p.comorbidities),
    }


def profile_from_dict(d: dict) -> PatientProfile:
    return PatientProfile(
        age_months=d["age_months"],
        weight_kg=d["weight_kg"],
        allergies=frozenset(d.get("allergies", ())),
        current_medications=frozenset(d.get("current_medications", ())),
        comorbidities=frozenset(d.get("comorbidities", ())),
    )


def gold_to_dict(g: GoldAnnotation) -> dict:
    return {
        "entities": [
            {
                "section": e.section,
                "start": e.start,
                "end": e.end,
                "surface": e.surface,
                "node_id": e.node_id,
                "negated": e.negated,
            }
            for e in g.entities
        ],
        "diagnosis_id": g.diagnosis_id,
        "prescription": (
            {
                "drug": g.prescription.drug,
                "dose_mg_per_kg_day": g.prescription.dose_mg_per_kg_day,
                "frequency_per_day": g.prescription.frequency_per_day,
                "duration_days": g.prescription.duration_days,
            }
            if g.prescription
            else None
        ),
        "evidence_node_ids": sorted(g.evidence_node_ids),
        "summary": g.summary,
    }


def gold_from_dict(d: dict) -> GoldAnnotation:
    rx = d.get("prescription")
    return GoldAnnotation(
        entities=tuple(GoldEntity(**e) for e in d.get("entities", ())),
        diagnosis_id=d.get("diagnosis_id"),
        prescription=Prescription(**rx) if rx else None,
        evidence_node_ids=frozenset(d.get("evidence_node_ids", ())),
        summary=d.get("summary", ""),
    )


def record_to_dict(r: ClinicalRecord) -> dict:
    out = {
        "record_id": r.record_id,
        "chief_complaint": r.chief_complaint,
        "exam_notes": r.exam_notes,
        "radiographic_report": r.radiographic_report,
        "profile": profile_to_dict(r.profile),
    }
    if r.gold is not None:
        out["gold"] = gold_to_dict(r.gold)
    return out


def record_from_dict(d: dict) -> ClinicalRecord:
    return ClinicalRecord(
        record_id=d["record_id"],
        chief_complaint=d.get("chief_complaint", ""),
        exam_notes=d.get("exam_notes", ""),
        radiographic_report=d.get("radiographic_report", ""),
        profile=profile_from_dict(d["profile"]),
        gold=gold_from_dict(d["gold"]) if d.get("gold") else None,
    )


def load_records(path) -> list[ClinicalRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                records.append(record_from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
                raise ParseError(f"bad record: {exc}", line_no) from None
    return records


def dump_records(records, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            fh.write(json.dumps(record_to_dict(r), sort_keys=True) + "\n")

"""Record parsing: lexicon linking, negation, tooth notation, diagnosis
scoring and the severity rubric."""

import random

import pytest

from dentarx.fixtures import fixture_path
from dentarx.parsing import (
    NEGATION_TRIGGERS,
    NEGATION_TERMINATORS,
    NEGATION_WINDOW,
    detect_negation,
    extract,
    resolve_tooth_notation,
)
from dentarx.records import ClinicalRecord, PatientProfile
from dentarx.text import BOUNDARY_TOKENS, load_abbreviations, tokenize


def _record(cc="", exam="", rad="", **profile):
    defaults = dict(age_months=60, weight_kg=20.0)
    defaults.update(profile)
    return ClinicalRecord(
        record_id="T",
        chief_complaint=cc,
        exam_notes=exam,
        radiographic_report=rad,
        profile=PatientProfile(**defaults),
    )


# -- negation --------------------------------------------------------------------


def _reference_negated(words: list[str], start: int) -> bool:
    """Independently re-typed reference for the scoping rule."""
    plain_seen = 0
    for j in range(start - 1, -1, -1):
        if words[j] in BOUNDARY_TOKENS or words[j] in NEGATION_TERMINATORS:
            return False
        if words[j] in NEGATION_TRIGGERS:
            return True
        plain_seen += 1
        if plain_seen >= NEGATION_WINDOW:
            return False
    return False


def test_negation_brute_force_reference():
    vocab = ["no", "denies", "without", "but", "however", ".", ";", "pain", "mild", "at", "left"]
    rng = random.Random(7)
    for _ in range(1000):
        words = [rng.choice(vocab) for _ in range(rng.randrange(1, 15))]
        for start in range(len(words)):
            assert detect_negation(words, start) == _reference_negated(words, start), (words, start)


def test_negation_examples():
    assert detect_negation(["no", "fever"], 1) is True
    assert detect_negation(["no", "swelling", "but", "tenderness"], 3) is False
    assert detect_negation(["no", "a", "b", "c", "d", "fever"], 5) is False  # window
    assert detect_negation(["no", "a", "b", "c", "fever"], 4) is True  # trigger is 4th back
    assert detect_negation(["no", ".", "fever"], 2) is False  # sentence boundary
    assert detect_negation(["fever"], 0) is False


def test_negation_accepts_token_objects():
    tokens = tokenize("no fever", keep_boundaries=True)
    assert detect_negation(tokens, 1) is True


# -- tooth notation ----------------------------------------------------------------


def test_fdi_anchor_case(graph):
    node_id = resolve_tooth_notation("#85", graph)
    assert node_id == "tooth_85"
    assert graph.nodes[node_id].name == "primary mandibular right second molar"


def test_fdi_invalid_codes_absent(graph):
    assert resolve_tooth_notation("#95", graph) is None  # quadrant 9
    assert resolve_tooth_notation("#59", graph) is None  # primary position > 5
    assert resolve_tooth_notation("#19", graph) is None  # permanent position > 8
    assert resolve_tooth_notation("85", graph) is None  # no '#'
    assert resolve_tooth_notation("#8", graph) is None  # one digit
    assert resolve_tooth_notation("#850", graph) is None  # three digits


def test_fdi_valid_code_missing_from_graph(graph):
    # #11 is a valid permanent incisor code; the fixture only carries molars
    assert resolve_tooth_notation("#11", graph) is None
    assert resolve_tooth_notation("#46", graph) == "tooth_46"


# -- extraction --------------------------------------------------------------------


def test_extract_r1_mentions(graph, records):
    findings = extract(records["R1"], graph)
    got = [(m.section, m.surface, m.node_id, m.negated) for m in findings.mentions]
    assert got == [
        ("chief_complaint", "swelling", "swelling", False),
        ("chief_complaint", "#85", "tooth_85", False),
        ("exam_notes", "tooth pain", "pain", False),
        ("exam_notes", "fever", "fever", True),
    ]


def test_extract_spans_index_the_section_text(graph, records):
    for record in records.values():
        for m in extract(record, graph).mentions:
            section = record.section_text(m.section)
            assert section[m.start : m.end].lower() == m.surface.lower()


def test_longest_match_wins(graph):
    findings = extract(_record(exam="facial swelling observed."), graph)
    assert [m.node_id for m in findings.mentions] == ["facial_swelling"]


def test_synonym_matching(graph):
    findings = extract(_record(exam="gum boil near the canine."), graph)
    assert [m.node_id for m in findings.mentions] == ["fistula"]


def test_abbreviation_expansion(graph):
    abbreviations = load_abbreviations(fixture_path("abbreviations.tsv"))
    findings = extract(_record(rad="periap. radiolucency seen."), graph, abbreviations)
    assert [m.node_id for m in findings.mentions] == ["radiolucency"]


def test_diagnosis_scores_normalized_and_sorted(graph, records):
    findings = extract(records["R1"], graph)
    # two non-negated symptoms: swelling (both conditions), pain (pulpitis only)
    assert findings.diagnosis_candidates == (
        ("acute_pulpitis", 1.0),
        ("periapical_abscess", 0.5),
    )
    assert findings.top_diagnosis == "acute_pulpitis"


def test_diagnosis_tie_breaks_by_node_id(graph):
    findings = extract(_record(exam="swelling and tenderness."), graph)
    scores = dict(findings.diagnosis_candidates)
    assert scores["acute_pulpitis"] == scores["periapical_abscess"] == 1.0
    assert findings.diagnosis_candidates[0][0] == "acute_pulpitis"


def test_negated_mentions_do_not_feed_diagnosis(graph, records):
    findings = extract(records["R2"], graph)
    assert findings.diagnosis_candidates == ()
    assert findings.top_diagnosis is None


def test_prior_antibiotics(graph):
    findings = extract(_record(exam="history of amoxicillin. No clindamycin given."), graph)
    assert findings.prior_antibiotics == ("AMX",)


def test_tooth_sites_deduplicated(graph):
    findings = extract(_record(cc="pain at tooth #85.", rad="lucency at tooth #85."), graph)
    assert findings.tooth_sites == ("tooth_85",)


# -- severity rubric ---------------------------------------------------------------


def test_severity_unknown_without_positive_symptoms(graph, records):
    assert extract(records["R2"], graph).severity == "unknown"


def test_severity_mild(graph):
    assert extract(_record(exam="slight swelling."), graph).severity == "mild"


def test_severity_moderate(graph, records):
    assert extract(records["R1"], graph).severity == "moderate"


def test_severity_severe(graph, records):
    assert extract(records["R3"], graph).severity == "severe"
    assert extract(_record(exam="trismus present."), graph).severity == "severe"


def test_negated_severe_symptom_does_not_escalate(graph):
    findings = extract(_record(exam="no fever. mild swelling."), graph)
    assert findings.severity == "mild"

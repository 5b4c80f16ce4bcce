"""End-to-end acceptance suite.

Each test pins one system-level guarantee: hard-rule soundness against an
independently re-typed oracle, zero constraint violations on a full cohort,
ablation directionality, exact retrieval, fusion and loss identities,
learning behavior, metric arithmetic, byte-level determinism, and tooth
notation resolution. Oracles here are re-typed from the documented rules,
never imported from the library.
"""

import json
import math
import random
import time

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from starlette.testclient import TestClient

from dentarx.cohort import CohortConfig, generate_cohort
from dentarx.embedding import FusionGate, cosine, embed_text, encode_subgraph, fuse, node_text
from dentarx.evaluation import evaluate_cohort, run_ablation
from dentarx.fixtures import fixture_path
from dentarx.kg import NodeKind, load_graph
from dentarx.metrics import auc, bleu4, bootstrap_ci, eas, ner_f1
from dentarx.parsing import resolve_tooth_notation
from dentarx.recommend import RecommenderConfig, rx_loss
from dentarx.records import PatientProfile
from dentarx.retrieval import EMBED_WEIGHT, KEYWORD_WEIGHT, retrieve_subgraph
from dentarx.safety import (
    AntibioticCandidate,
    SafetyWeights,
    Verdict,
    s_dose,
    safety_score,
    synthesize_training_set,
    train_safety_classifier,
    validate,
)
from dentarx.tagger import N_TAGS, TokenTagger, featurize, gold_tag_ids, tagger_nll
from dentarx.text import tokenize


# -- independent hard-rule oracle built straight from the graph file ---------------


class RuleOracle:
    """Re-typed prescription rule checker reading the raw JSONL graph file."""

    def __init__(self, path):
        self.dose_rules = {}  # drug -> list of (min_age, max_age, attrs)
        self.cross = {}  # src -> set of allergy ids
        self.member = {}  # drug -> set of classes
        self.contra = {}  # drug -> set of comorbidity conditions
        bands = {}
        rules = []
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                if not line.strip():
                    continue
                obj = json.loads(line)
                if "node" in obj:
                    node = obj["node"]
                    if node["kind"] == "AgeBand":
                        bands[node["id"]] = (node["attrs"]["min_months"], node["attrs"]["max_months"])
                else:
                    edge = obj["edge"]
                    if edge["rel"] == "has_dose_rule":
                        rules.append(edge)
                    elif edge["rel"] == "cross_reactive":
                        self.cross.setdefault(edge["src"], set()).add(edge["dst"])
                    elif edge["rel"] == "member_of":
                        self.member.setdefault(edge["src"], set()).add(edge["dst"])
                    elif edge["rel"] == "contraindicated_in":
                        self.contra.setdefault(edge["src"], set()).add(edge["dst"])
        for edge in rules:
            lo, hi = bands[edge["dst"]]
            self.dose_rules.setdefault(edge["src"], []).append((lo, hi, edge["attrs"]))

    def allergy_hit(self, drug, allergies):
        reachable = set(self.cross.get(drug, ()))
        for cls in self.member.get(drug, ()):
            reachable |= self.cross.get(cls, set())
        return bool(reachable & allergies)

    def rule_for(self, drug, age_months):
        for lo, hi, attrs in self.dose_rules.get(drug, ()):
            if lo <= age_months <= hi:
                return attrs
        return None

    def violates(self, drug, dose, freq, duration, profile) -> bool:
        if self.allergy_hit(drug, profile.allergies):
            return True
        attrs = self.rule_for(drug, profile.age_months)
        if attrs is None:
            return True
        if dose * profile.weight_kg > attrs["abs_max_mg_day"]:
            return True
        if self.contra.get(drug, set()) & profile.comorbidities:
            return True
        if not attrs["freq_min_per_day"] <= freq <= attrs["freq_max_per_day"]:
            return True
        if not attrs["duration_min_days"] <= duration <= attrs["duration_max_days"]:
            return True
        return False


# -- criterion 1: safety soundness ---------------------------------------------------


def test_validation_never_passes_an_oracle_violation(graph, classifier):
    start = time.monotonic()
    oracle = RuleOracle(fixture_path("kg_mini.jsonl"))
    drugs = [n.id for n in graph.nodes_of_kind(NodeKind.DRUG)]
    allergy_ids = [n.id for n in graph.nodes_of_kind(NodeKind.ALLERGY_CLASS)]
    comorbidity_ids = sorted({e.dst for e in graph.edges if e.rel.value == "contraindicated_in"})
    weights = SafetyWeights()
    rng = random.Random(2024)
    checked = violations = 0
    for _ in range(10_000):
        drug = rng.choice(drugs)
        profile = PatientProfile(
            age_months=rng.randint(0, 216),
            weight_kg=round(rng.uniform(3.0, 80.0), 1),
            allergies=frozenset(rng.sample(allergy_ids, rng.randint(0, 2))),
            current_medications=frozenset(rng.sample(drugs, rng.randint(0, 1))),
            comorbidities=frozenset(rng.sample(comorbidity_ids, rng.randint(0, 1))),
        )
        candidate = AntibioticCandidate(
            drug=drug,
            dose_mg_per_kg_day=round(rng.uniform(1.0, 150.0), 2),
            frequency_per_day=rng.randint(1, 5),
            duration_days=rng.randint(1, 14),
        )
        report = validate(candidate, profile, graph, weights, classifier)
        checked += 1
        if oracle.violates(
            drug,
            candidate.dose_mg_per_kg_day,
            candidate.frequency_per_day,
            candidate.duration_days,
            profile,
        ):
            violations += 1
            # zero tolerance: a rule violation must never validate as Pass
            assert report.verdict is not Verdict.PASS, candidate
    assert checked == 10_000
    assert violations > 1_000  # the sweep actually exercises the rules
    assert time.monotonic() - start < 60.0


# -- criterion 2: zero violations end to end -----------------------------------------


def test_full_pipeline_cvr_is_exactly_zero_on_thousand_records(graph, classifier):
    start = time.monotonic()
    oracle = RuleOracle(fixture_path("kg_mini.jsonl"))
    cohort = generate_cohort(CohortConfig(seed=42, n_records=1000), graph)
    report, results = evaluate_cohort(cohort, graph, RecommenderConfig(), classifier, "full")

    emitted = [r for r in results if not r.outcome.abstained]
    recount = sum(
        oracle.violates(
            r.outcome.candidate.drug,
            r.outcome.candidate.dose_mg_per_kg_day,
            r.outcome.candidate.frequency_per_day,
            r.outcome.candidate.duration_days,
            r.record.profile,
        )
        for r in emitted
    )
    assert report.cvr == (recount / len(emitted) if emitted else 0.0)  # bit-exact recount
    assert report.cvr == 0.0
    assert recount == 0
    assert 0.0 <= report.abstention_rate <= 1.0
    assert report.counts["emitted"] + report.counts["abstained"] == 1000
    assert time.monotonic() - start < 120.0


# -- criterion 3: ablation directionality ---------------------------------------------


def test_ablations_degrade_in_the_expected_direction(graph, classifier):
    cohort = generate_cohort(
        CohortConfig(seed=42, n_records=300, allergy_rate=0.3), graph
    )
    reports = {
        rep.variant: rep
        for rep in run_ablation(
            cohort, graph, ("full", "no_rag", "no_safety"), RecommenderConfig(), classifier
        )
    }
    assert reports["full"].cvr < reports["no_safety"].cvr  # strict at this allergy rate
    assert reports["full"].der <= reports["no_safety"].der
    assert reports["full"].eas >= reports["no_rag"].eas


# -- criterion 4: exact retrieval -------------------------------------------------------


def _retrieval_oracle(graph, record, k):
    h_x = embed_text(record.full_text())
    rec_toks = {t.text for t in tokenize(record.full_text())}
    scores = {}
    for node in graph.nodes.values():
        if node.kind is NodeKind.GUIDELINE_PASSAGE:
            continue
        toks = {t.text for t in tokenize(node_text(node))}
        union = rec_toks | toks
        jac = len(rec_toks & toks) / len(union) if union else 0.0
        scores[node.id] = EMBED_WEIGHT * cosine(embed_text(node_text(node)), h_x) + KEYWORD_WEIGHT * jac
    return sorted(scores, key=lambda nid: (-scores[nid], nid))[:k]


def test_retrieval_matches_oracle_and_nests(graph, records):
    cohort = generate_cohort(CohortConfig(seed=17, n_records=30), graph)
    pool = cohort + list(records.values())
    rng = random.Random(5)
    mismatches = 0
    for _ in range(200):
        record = rng.choice(pool)
        k = rng.randint(1, 15)
        got = list(retrieve_subgraph(graph, record, k).node_ids)
        if got != _retrieval_oracle(graph, record, k):
            mismatches += 1
    assert mismatches == 0
    for record in pool[:3]:
        for k in range(1, 21):
            assert set(retrieve_subgraph(graph, record, k).node_ids) <= set(
                retrieve_subgraph(graph, record, k + 1).node_ids
            )
    # guideline retrieval against its own brute-force oracle
    from dentarx.retrieval import retrieve_guidelines

    for record in pool[:10]:
        h = embed_text(record.full_text())
        sims = {
            p.id: cosine(h, embed_text(p.attrs["text"]))
            for p in graph.nodes_of_kind(NodeKind.GUIDELINE_PASSAGE)
        }
        expected = sorted(sims, key=lambda pid: (-sims[pid], pid))[:3]
        assert [hit.passage_node_id for hit in retrieve_guidelines(graph, h, 3)] == expected


# -- criterion 5: fusion gate identities --------------------------------------------------


def test_fusion_gate_identities(graph):
    h_x = embed_text("facial swelling and fever near tooth #85")
    nodes = [graph.nodes[i] for i in ("AMX", "penicillins", "penicillin_allergy")]
    edges = [e for e in graph.edges if {e.src, e.dst} <= {n.id for n in nodes}]
    h_g = encode_subgraph(nodes, edges)
    assert np.array_equal(fuse(h_x, h_g, FusionGate(1.0)), h_x)  # text-only, bit-exact
    assert np.array_equal(fuse(h_x, h_g, FusionGate(0.0)), h_g)  # graph-only
    for alpha in (0.0, 0.25, 0.5, 0.75, 1.0):
        assert np.allclose(fuse(h_x, h_x, FusionGate(alpha)), h_x, atol=1e-9)


# -- criterion 6: weighted safety arithmetic and monotonicity -------------------------------


def test_safety_score_worked_examples(graph):
    profile = PatientProfile(
        age_months=60, weight_kg=20.0, allergies=frozenset({"penicillin_allergy"})
    )
    # AMX band for this age is 40-90 mg/kg/day: 36 is 10% below -> 0.8
    candidate = AntibioticCandidate(
        drug="AMX", dose_mg_per_kg_day=36.0, frequency_per_day=2, duration_days=5
    )
    assert s_dose(candidate, profile, graph) == pytest.approx(0.8, abs=1e-12)
    # allergic in-band candidate: 0.4*1 + 0.4*0 + 0.2*1 = 0.6
    in_band = AntibioticCandidate(
        drug="AMX", dose_mg_per_kg_day=65.0, frequency_per_day=2, duration_days=5
    )
    report = safety_score(in_band, profile, graph)
    assert report.s_safety == pytest.approx(0.6, abs=1e-12)


@settings(max_examples=1000, deadline=None)
@given(
    dose=st.floats(1.0, 150.0),
    u=st.floats(0.0, 1.0),
    v=st.floats(0.0, 1.0),
    allergic=st.booleans(),
)
def test_safety_score_is_the_weighted_sum(graph, dose, u, v, allergic):
    w_dose = 0.9 * u
    w_allergy = (1.0 - w_dose) * 0.9 * v
    weights = SafetyWeights(w_dose, w_allergy, 1.0 - w_dose - w_allergy)
    allergies = frozenset({"penicillin_allergy"}) if allergic else frozenset()
    profile = PatientProfile(age_months=60, weight_kg=20.0, allergies=allergies)
    candidate = AntibioticCandidate(
        drug="AMX", dose_mg_per_kg_day=dose, frequency_per_day=2, duration_days=5
    )
    report = safety_score(candidate, profile, graph, weights)
    expected = (
        weights.w_dose * report.s_dose
        + weights.w_allergy * report.s_allergy
        + weights.w_interaction * report.s_interaction
    )
    assert report.s_safety == expected  # bit-level identity


@settings(max_examples=1000, deadline=None)
@given(dose=st.floats(1.0, 39.0), step=st.floats(0.0, 50.0))
def test_moving_toward_the_band_never_lowers_the_score(graph, dose, step):
    profile = PatientProfile(age_months=60, weight_kg=20.0)
    low = AntibioticCandidate(drug="AMX", dose_mg_per_kg_day=dose, frequency_per_day=2, duration_days=5)
    closer_dose = min(dose + step, 40.0)
    closer = AntibioticCandidate(
        drug="AMX", dose_mg_per_kg_day=closer_dose, frequency_per_day=2, duration_days=5
    )
    assert s_dose(closer, profile, graph) >= s_dose(low, profile, graph)


# -- criterion 7: learning behavior ------------------------------------------------------


def test_tagger_loss_identity_and_gradients(graph):
    cohort = generate_cohort(CohortConfig(seed=5, n_records=8), graph)
    tagger = TokenTagger()
    for record in cohort:
        t = sum(
            len(tokenize(record.section_text(s)))
            for s in ("chief_complaint", "exam_notes", "radiographic_report")
            if record.section_text(s)
        )
        assert tagger_nll(tagger, record, record.gold, graph) == pytest.approx(
            t * math.log(N_TAGS), abs=1e-12
        )
    rng = np.random.default_rng(3)
    record = cohort[0]
    tokens, tags = gold_tag_ids(record, record.gold, graph)
    feats = featurize(tokens, graph)
    tagger = TokenTagger(weights=rng.normal(0, 0.5, size=(N_TAGS, feats.shape[1])))
    _, grad = tagger.nll_and_grad(feats, tags)
    eps = 1e-6
    for _ in range(25):
        i, j = rng.integers(N_TAGS), rng.integers(feats.shape[1])
        w0 = tagger.weights[i, j]
        tagger.weights[i, j] = w0 + eps
        up, _ = tagger.nll_and_grad(feats, tags)
        tagger.weights[i, j] = w0 - eps
        down, _ = tagger.nll_and_grad(feats, tags)
        tagger.weights[i, j] = w0
        numeric = (up - down) / (2 * eps)
        assert abs(numeric - grad[i, j]) / max(abs(numeric), abs(grad[i, j]), 1e-8) < 1e-4


def test_safety_classifier_generalizes(graph):
    start = time.monotonic()
    train = synthesize_training_set(graph, 2000, seed=7)
    clf = train_safety_classifier(train, graph, seed=7)
    held_out = synthesize_training_set(graph, 2000, seed=8)
    from dentarx.safety import candidate_features

    scores = [clf.unsafe_prob(candidate_features(c, p, graph)) for c, p, _ in held_out]
    labels = [label for _, _, label in held_out]
    assert auc(scores, labels) >= 0.95
    assert time.monotonic() - start < 60.0


# -- criterion 8: recommendation loss ----------------------------------------------------


def test_rx_loss_worked_values(graph):
    profile = PatientProfile(age_months=60, weight_kg=20.0)
    gold = AntibioticCandidate(drug="AMX", dose_mg_per_kg_day=65.0, frequency_per_day=2, duration_days=5)
    other = AntibioticCandidate(drug="CLI", dose_mg_per_kg_day=27.5, frequency_per_day=3, duration_days=5)
    assert rx_loss(gold, [(gold, 2.0)], profile, graph).value == pytest.approx(0.0, abs=1e-12)
    assert rx_loss(gold, [(gold, 1.0), (other, 1.0)], profile, graph).value == pytest.approx(
        math.log(2), abs=1e-12
    )
    allergic = PatientProfile(
        age_months=60, weight_kg=20.0, allergies=frozenset({"penicillin_allergy"})
    )
    assert rx_loss(gold, [(gold, 1.0), (other, 1.0)], allergic, graph).value == pytest.approx(
        math.log(2) + 0.4, abs=1e-12
    )


# -- criterion 9: metric arithmetic --------------------------------------------------------


def test_metric_worked_values():
    texts = ["assessment acute pulpitis", "plan amoxicillin for five days"]
    assert bleu4(texts, texts) == 100.0
    pred = [("a", False, "s"), ("b", False, "s"), ("x", False, "s")]
    gold = [("a", False, "s"), ("b", False, "s"), ("c", False, "s"), ("d", False, "s")]
    p, r, f1 = ner_f1(pred, gold)
    assert (p, r) == (2 / 3, 1 / 2)
    assert f1 == 2 * p * r / (p + r)  # harmonic mean, recomputed
    assert f1 == pytest.approx(4 / 7, abs=1e-15)
    assert eas({"a", "b", "c"}, {"b", "c", "d", "e"}) == 0.4
    assert bootstrap_ci([1.25] * 10) == (1.25, 1.25)


# -- criterion 10: determinism ----------------------------------------------------------------


def test_reports_and_responses_are_byte_identical_across_runs():
    kg = str(fixture_path("kg_mini.jsonl"))
    lines = []
    for _ in range(2):
        graph = load_graph(kg)
        classifier = train_safety_classifier(
            synthesize_training_set(graph, 2000, seed=7), graph, seed=7
        )
        cohort = generate_cohort(CohortConfig(seed=42, n_records=25), graph)
        report, results = evaluate_cohort(cohort, graph, RecommenderConfig(), classifier)
        payload = report.to_json_line() + "\n" + "\n".join(
            json.dumps(r.to_dict(), sort_keys=True) for r in results
        )
        lines.append(payload.encode())
    assert lines[0] == lines[1]

    from dentarx.service import ServiceConfig, create_app

    body = {
        "record_id": "D1",
        "chief_complaint": "Facial swelling near tooth #85.",
        "exam_notes": "Pus discharge and fever.",
        "profile": {"age_months": 72, "weight_kg": 24.0, "allergies": ["penicillin_allergy"]},
    }
    responses = []
    for _ in range(2):
        with TestClient(create_app(ServiceConfig(kg_path=kg))) as client:
            responses.append(client.post("/v1/recommend", json=body).content)
    assert responses[0] == responses[1]


# -- criterion 11: tooth notation --------------------------------------------------------------


def test_fdi_notation_resolution(graph):
    node_id = resolve_tooth_notation("#85", graph)
    assert node_id == "tooth_85"
    assert graph.nodes[node_id].name == "primary mandibular right second molar"
    for bad in ("#95", "#59", "#19", "#00", "85", "#850"):
        assert resolve_tooth_notation(bad, graph) is None

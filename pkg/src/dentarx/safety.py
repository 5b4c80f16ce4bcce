"""Dual-layer prescription safety: deterministic hard rules in front of a
weighted safety score and a learned unsafe-candidate classifier.

The hard-rule layer can never be out-voted: a candidate with any hard
violation is rejected regardless of its weighted score or the classifier.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import DegenerateLabels
from .kg import KnowledgeGraph, NodeKind, Relation
from .records import PatientProfile

DEFAULT_WEIGHTS = (0.4, 0.4, 0.2)
DEFAULT_TAU = 0.8

# relative deviation from the nearest band bound at which s_dose hits zero
DOSE_FALLOFF = 0.5


class HardViolation(str, Enum):
    ALLERGY_CONFLICT = "AllergyConflict"
    ABSOLUTE_DOSE_EXCEEDED = "AbsoluteDoseExceeded"
    NO_DOSE_RULE_FOR_AGE = "NoDoseRuleForAge"
    COMORBIDITY_CONTRAINDICATION = "ComorbidityContraindication"
    FREQUENCY_OUT_OF_RANGE = "FrequencyOutOfRange"
    DURATION_OUT_OF_RANGE = "DurationOutOfRange"


class Verdict(str, Enum):
    PASS = "Pass"
    REJECT_HARD_RULE = "RejectHardRule"
    REJECT_CLASSIFIER = "RejectClassifier"
    REJECT_THRESHOLD = "RejectThreshold"


@dataclass(frozen=True)
class AntibioticCandidate:
    drug: str
    dose_mg_per_kg_day: float
    frequency_per_day: int
    duration_days: int
    rationale: str = ""
    evidence_node_ids: frozenset[str] = frozenset()

    def __post_init__(self):
        if self.dose_mg_per_kg_day <= 0 or self.frequency_per_day <= 0 or self.duration_days <= 0:
            raise ValueError("dose, frequency and duration must be positive")

    def to_dict(self) -> dict:
        return {
            "drug": self.drug,
            "dose_mg_per_kg_day": self.dose_mg_per_kg_day,
            "frequency_per_day": self.frequency_per_day,
            "duration_days": self.duration_days,
            "rationale": self.rationale,
            "evidence_node_ids": sorted(self.evidence_node_ids),
        }


@dataclass(frozen=True)
class SafetyWeights:
    w_dose: float = DEFAULT_WEIGHTS[0]
    w_allergy: float = DEFAULT_WEIGHTS[1]
    w_interaction: float = DEFAULT_WEIGHTS[2]
    tau: float = DEFAULT_TAU

    def __post_init__(self):
        if min(self.w_dose, self.w_allergy, self.w_interaction) < 0:
            raise ValueError("weights must be nonnegative")
        if abs(self.w_dose + self.w_allergy + self.w_interaction - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError("tau must be in [0, 1]")


@dataclass(frozen=True)
class SafetyReport:
    s_dose: float
    s_allergy: float
    s_interaction: float
    s_safety: float
    hard_violations: tuple[HardViolation, ...] = ()
    classifier_unsafe_prob: float | None = None
    verdict: Verdict | None = None
    weights: SafetyWeights = field(default_factory=SafetyWeights)

    def to_dict(self) -> dict:
        return {
            "s_dose": self.s_dose,
            "s_allergy": self.s_allergy,
            "s_interaction": self.s_interaction,
            "s_safety": self.s_safety,
            "hard_violations": [v.value for v in self.hard_violations],
            "classifier_unsafe_prob": self.classifier_unsafe_prob,
            "verdict": self.verdict.value if self.verdict else None,
            "weights": {
                "w_dose": self.weights.w_dose,
                "w_allergy": self.weights.w_allergy,
                "w_interaction": self.weights.w_interaction,
                "tau": self.weights.tau,
            },
        }


# -- sub-scores --------------------------------------------------------------


def s_dose(candidate: AntibioticCandidate, profile: PatientProfile, graph: KnowledgeGraph) -> float:
    """1 inside the applicable mg/kg/day band, linear falloff outside, 0 with
    no applicable rule or at >= 50% relative deviation from the band."""
    rule = graph.dose_rule_for(candidate.drug, profile.age_months)
    if rule is None:
        return 0.0
    dose = candidate.dose_mg_per_kg_day
    if rule.min_mg_per_kg_day <= dose <= rule.max_mg_per_kg_day:
        return 1.0
    bound = rule.min_mg_per_kg_day if dose < rule.min_mg_per_kg_day else rule.max_mg_per_kg_day
    deviation = abs(dose - bound) / bound
    return max(0.0, 1.0 - deviation / DOSE_FALLOFF)


def s_allergy(candidate: AntibioticCandidate, profile: PatientProfile, graph: KnowledgeGraph) -> float:
    """0 iff the drug reaches any patient allergy class within two hops
    (directly cross-reactive, or via drug-class membership); else 1."""
    if not profile.allergies:
        graph.node(candidate.drug)
        return 1.0
    reachable = {n.id for _, n in graph.neighbors(candidate.drug, Relation.CROSS_REACTIVE)}
    for _, drug_class in graph.neighbors(candidate.drug, Relation.MEMBER_OF):
        reachable.update(n.id for _, n in graph.neighbors(drug_class.id, Relation.CROSS_REACTIVE))
    return 0.0 if reachable & profile.allergies else 1.0


def s_interaction(
    candidate: AntibioticCandidate, profile: PatientProfile, graph: KnowledgeGraph
) -> float:
    """1 minus the worst interaction severity against current medications."""
    graph.node(candidate.drug)
    worst = 0.0
    for med in profile.current_medications:
        sev = graph.interaction_severity(candidate.drug, med)
        if sev is not None:
            worst = max(worst, sev)
    return 1.0 - worst


def safety_score(
    candidate: AntibioticCandidate,
    profile: PatientProfile,
    graph: KnowledgeGraph,
    weights: SafetyWeights | None = None,
) -> SafetyReport:
    """Sub-scores and their exact weighted sum; verdict left unset."""
    weights = weights or SafetyWeights()
    sd = s_dose(candidate, profile, graph)
    sa = s_allergy(candidate, profile, graph)
    si = s_interaction(candidate, profile, graph)
    total = weights.w_dose * sd + weights.w_allergy * sa + weights.w_interaction * si
    return SafetyReport(s_dose=sd, s_allergy=sa, s_interaction=si, s_safety=total, weights=weights)


def hard_rule_check(
    candidate: AntibioticCandidate, profile: PatientProfile, graph: KnowledgeGraph
) -> list[HardViolation]:
    """Deterministic rule layer; violations in fixed enum order."""
    violations: list[HardViolation] = []
    if s_allergy(candidate, profile, graph) == 0.0:
        violations.append(HardViolation.ALLERGY_CONFLICT)
    rule = graph.dose_rule_for(candidate.drug, profile.age_months)
    if rule is not None:
        if candidate.dose_mg_per_kg_day * profile.weight_kg > rule.abs_max_mg_day:
            violations.append(HardViolation.ABSOLUTE_DOSE_EXCEEDED)
    else:
        violations.append(HardViolation.NO_DOSE_RULE_FOR_AGE)
    contraindicated = {
        n.id for _, n in graph.neighbors(candidate.drug, Relation.CONTRAINDICATED_IN)
    }
    if contraindicated & profile.comorbidities:
        violations.append(HardViolation.COMORBIDITY_CONTRAINDICATION)
    if rule is not None:
        if not rule.freq_min_per_day <= candidate.frequency_per_day <= rule.freq_max_per_day:
            violations.append(HardViolation.FREQUENCY_OUT_OF_RANGE)
        if not rule.duration_min_days <= candidate.duration_days <= rule.duration_max_days:
            violations.append(HardViolation.DURATION_OUT_OF_RANGE)
    order = list(HardViolation)
    violations.sort(key=order.index)
    return violations


# -- learned layer -------------------------------------------------------------

N_CLASSIFIER_FEATURES = 8


def candidate_features(
    candidate: AntibioticCandidate, profile: PatientProfile, graph: KnowledgeGraph
) -> np.ndarray:
    """8-feature vector consumed by the learned safety layer."""
    sd = s_dose(candidate, profile, graph)
    sa = s_allergy(candidate, profile, graph)
    si = s_interaction(candidate, profile, graph)
    n_interactions = 0
    max_severity = 0.0
    for med in profile.current_medications:
        sev = graph.interaction_severity(candidate.drug, med)
        if sev is not None:
            n_interactions += 1
            max_severity = max(max_severity, sev)
    rule = graph.dose_rule_for(candidate.drug, profile.age_months)
    if rule is None:
        dose_position = 0.0
    else:
        mid = 0.5 * (rule.min_mg_per_kg_day + rule.max_mg_per_kg_day)
        half = max(0.5 * (rule.max_mg_per_kg_day - rule.min_mg_per_kg_day), 1e-9)
        dose_position = float(np.clip((candidate.dose_mg_per_kg_day - mid) / half, -1.0, 1.0))
    return np.array(
        [
            sd,
            sa,
            si,
            profile.age_months / 216.0,
            profile.weight_kg / 100.0,
            float(n_interactions),
            max_severity,
            dose_position,
        ]
    )


@dataclass
class SafetyClassifier:
    """Logistic model over candidate_features; predicts P(unsafe)."""

    weights: np.ndarray = field(default_factory=lambda: np.zeros(N_CLASSIFIER_FEATURES))
    bias: float = 0.0

    def unsafe_prob(self, features: np.ndarray) -> float:
        z = float(features @ self.weights + self.bias)
        return 1.0 / (1.0 + math.exp(-z))

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump({"weights": self.weights.tolist(), "bias": self.bias}, fh)

    @classmethod
    def load(cls, path) -> "SafetyClassifier":
        with open(path, encoding="utf-8") as fh:
            obj = json.load(fh)
        return cls(weights=np.asarray(obj["weights"], dtype=float), bias=float(obj["bias"]))


def logistic_loss_and_grad(
    weights: np.ndarray, bias: float, x: np.ndarray, y: np.ndarray
) -> tuple[float, np.ndarray, float]:
    """Mean cross-entropy with analytic gradient (weights, bias)."""
    z = x @ weights + bias
    # numerically stable log(1 + exp(z))
    loss = float(np.mean(np.maximum(z, 0.0) - z * y + np.log1p(np.exp(-np.abs(z)))))
    p = 1.0 / (1.0 + np.exp(-z))
    grad_w = (p - y) @ x / len(y)
    grad_b = float(np.mean(p - y))
    return loss, grad_w, grad_b


def train_safety_classifier(
    examples: list[tuple[AntibioticCandidate, PatientProfile, bool]],
    graph: KnowledgeGraph,
    seed: int = 7,
    epochs: int = 400,
    learning_rate: float = 1.0,
) -> SafetyClassifier:
    """Gradient descent on logistic loss; labels True mean unsafe.

    Deterministic per seed (the seed shuffles the example order, the descent
    itself is full-batch from zero init).
    """
    labels = {label for _, _, label in examples}
    if len(labels) < 2:
        raise DegenerateLabels("training set must contain safe and unsafe examples")
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(examples))
    x = np.stack([candidate_features(c, p, graph) for c, p, _ in examples])[order]
    y = np.array([1.0 if label else 0.0 for _, _, label in examples])[order]
    clf = SafetyClassifier()
    for _ in range(epochs):
        _, grad_w, grad_b = logistic_loss_and_grad(clf.weights, clf.bias, x, y)
        clf.weights = clf.weights - learning_rate * grad_w
        clf.bias = clf.bias - learning_rate * grad_b
    return clf


def synthesize_training_set(
    graph: KnowledgeGraph, n: int, seed: int = 7
) -> list[tuple[AntibioticCandidate, PatientProfile, bool]]:
    """Perturbed synthetic candidates labeled by the hard-rule oracle.

    Perturbations stress the three weighted safety axes (dose placement,
    allergies, interactions) plus missing age bands; frequency, duration and
    comorbidities are left unperturbed so every label stays visible in the
    fixed feature vector (comorbidity conflicts are handled by the hard-rule
    layer alone, which the classifier never overrides).
    """
    rng = np.random.default_rng(seed)
    drugs = graph.nodes_of_kind(NodeKind.DRUG)
    allergy_ids = [n_.id for n_ in graph.nodes_of_kind(NodeKind.ALLERGY_CLASS)]
    drug_ids = [d.id for d in drugs]
    examples = []
    while len(examples) < n:
        drug = drugs[rng.integers(len(drugs))]
        age = int(rng.integers(0, 217))
        years = age / 12.0
        weight = float(np.clip(2.0 * years + 8.0 + rng.normal(0, 2.0), 3.0, 80.0))
        allergies = (
            frozenset({allergy_ids[rng.integers(len(allergy_ids))]})
            if allergy_ids and rng.random() < 0.30
            else frozenset()
        )
        meds = (
            frozenset({drug_ids[rng.integers(len(drug_ids))]})
            if rng.random() < 0.30
            else frozenset()
        )
        profile = PatientProfile(
            age_months=age,
            weight_kg=weight,
            allergies=allergies,
            current_medications=meds,
            comorbidities=frozenset(),
        )
        rule = graph.dose_rule_for(drug.id, age)
        if rule is None:
            dose = float(rng.uniform(5.0, 100.0))
            freq, duration = int(rng.integers(1, 4)), int(rng.integers(3, 10))
        else:
            lo, hi = rule.min_mg_per_kg_day, rule.max_mg_per_kg_day
            # 0.6*lo .. 1.5*hi keeps every in-rule draw at s_dose > 0, so
            # s_dose = 0 uniquely signals a missing age band to the model
            dose = float(rng.uniform(0.6 * lo, 1.5 * hi))
            freq = int(rng.integers(rule.freq_min_per_day, rule.freq_max_per_day + 1))
            duration = int(rng.integers(rule.duration_min_days, rule.duration_max_days + 1))
        candidate = AntibioticCandidate(
            drug=drug.id, dose_mg_per_kg_day=dose, frequency_per_day=freq, duration_days=duration
        )
        unsafe = bool(hard_rule_check(candidate, profile, graph))
        examples.append((candidate, profile, unsafe))
    return examples


def validate(
    candidate: AntibioticCandidate,
    profile: PatientProfile,
    graph: KnowledgeGraph,
    weights: SafetyWeights,
    classifier: SafetyClassifier,
) -> SafetyReport:
    """Full dual-layer validation: hard rules, then the learned classifier,
    then the weighted threshold. All scores reported regardless of verdict."""
    report = safety_score(candidate, profile, graph, weights)
    violations = tuple(hard_rule_check(candidate, profile, graph))
    prob = classifier.unsafe_prob(candidate_features(candidate, profile, graph))
    if violations:
        verdict = Verdict.REJECT_HARD_RULE
    elif prob >= 0.5:
        verdict = Verdict.REJECT_CLASSIFIER
    elif report.s_safety < weights.tau:
        verdict = Verdict.REJECT_THRESHOLD
    else:
        verdict = Verdict.PASS
    return replace(report, hard_violations=violations, classifier_unsafe_prob=prob, verdict=verdict)

"""Candidate generation, the reject-and-regenerate loop, the recommendation
loss, and template-based summaries.

The generator sits behind a callable seam so a learned model could replace
the default deterministic, knowledge-graph-driven template generator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Protocol

import numpy as np

from .embedding import FusionGate, cosine, embed_text, node_text
from .errors import NoDiagnosis
from .kg import KnowledgeGraph, Relation
from .parsing import StructuredFindings, extract
from .records import ClinicalRecord, PatientProfile
from .retrieval import GuidelineHit, RetrievalContext, build_context, score_entity
from .safety import (
    AntibioticCandidate,
    SafetyClassifier,
    SafetyReport,
    SafetyWeights,
    Verdict,
    safety_score,
    validate,
)

FIRST_LINE_BONUS = 2.0
NAME_SIMILARITY_WEIGHT = 0.1


class Generator(Protocol):
    def __call__(
        self,
        findings: StructuredFindings,
        profile: PatientProfile,
        context: RetrievalContext,
        exclusions: frozenset[str],
        n: int,
    ) -> list[tuple[AntibioticCandidate, float]]: ...


@dataclass(frozen=True)
class RecommenderConfig:
    weights: SafetyWeights = field(default_factory=SafetyWeights)
    alpha: float = 0.5
    k: int = 10
    m: int = 3
    candidates_per_round: int = 5
    max_rounds: int = 3
    rx_lambda: float = 1.0
    use_kg_scores: bool = True
    use_guidelines: bool = True
    enforce_safety: bool = True


@dataclass(frozen=True)
class Recommendation:
    candidate: AntibioticCandidate
    report: SafetyReport
    guideline_hits: tuple[GuidelineHit, ...]
    summary: str
    attempts: int
    rejected: tuple[tuple[AntibioticCandidate, SafetyReport], ...] = ()

    @property
    def abstained(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {
            "abstained": False,
            "candidate": self.candidate.to_dict(),
            "report": self.report.to_dict(),
            "guideline_hits": [
                {"passage_node_id": h.passage_node_id, "similarity": h.similarity}
                for h in self.guideline_hits
            ],
            "summary": self.summary,
            "attempts": self.attempts,
            "rejected": [
                {"candidate": c.to_dict(), "report": r.to_dict()} for c, r in self.rejected
            ],
        }


@dataclass(frozen=True)
class Abstention:
    reason: str
    rejected: tuple[tuple[AntibioticCandidate, SafetyReport], ...]
    summary: str
    attempts: int

    @property
    def abstained(self) -> bool:
        return True

    def to_dict(self) -> dict:
        return {
            "abstained": True,
            "reason": self.reason,
            "rejected": [
                {"candidate": c.to_dict(), "report": r.to_dict()} for c, r in self.rejected
            ],
            "summary": self.summary,
            "attempts": self.attempts,
        }


def kg_template_generate(
    findings: StructuredFindings,
    profile: PatientProfile,
    context: RetrievalContext,
    exclusions: frozenset[str],
    n: int,
    graph: KnowledgeGraph,
    config: RecommenderConfig | None = None,
) -> list[tuple[AntibioticCandidate, float]]:
    """Deterministic generator: enumerate drugs with treats edges for the top
    diagnosis, dose at the age band midpoint, minimum frequency and duration.

    Score = first-line bonus + the drug's retrieval score + a small
    similarity term against the fused representation; under a knowledge-
    denied configuration only the first-line bonus remains. Drugs without an
    applicable dose rule cannot be dosed and are skipped.
    """
    config = config or RecommenderConfig()
    diagnosis = findings.top_diagnosis
    if diagnosis is None:
        raise NoDiagnosis("no diagnosis candidates")
    scored: list[tuple[float, str, AntibioticCandidate]] = []
    treat_edges = {e.src: e for e in graph.in_edges(diagnosis, Relation.TREATS)}
    top_hit = context.guideline_hits[0].passage_node_id if context.guideline_hits else None
    for drug_id in sorted(treat_edges):
        if drug_id in exclusions:
            continue
        rule = graph.dose_rule_for(drug_id, profile.age_months)
        if rule is None:
            continue
        line = treat_edges[drug_id].attrs["line"]
        score = FIRST_LINE_BONUS if line == "first" else 0.0
        if config.use_kg_scores:
            retrieval_score = context.subgraph.score_of(drug_id)
            if retrieval_score is None:
                retrieval_score = score_entity(
                    graph.nodes[drug_id], context.h_x, context.record_tokens, graph
                )
            score += retrieval_score
            score += NAME_SIMILARITY_WEIGHT * cosine(
                embed_text(node_text(graph.nodes[drug_id])), context.h_star
            )
        evidence = {diagnosis, drug_id, rule.age_band_id}
        if top_hit is not None:
            evidence.add(top_hit)
        candidate = AntibioticCandidate(
            drug=drug_id,
            dose_mg_per_kg_day=0.5 * (rule.min_mg_per_kg_day + rule.max_mg_per_kg_day),
            frequency_per_day=rule.freq_min_per_day,
            duration_days=rule.duration_min_days,
            rationale=f"{line}-line therapy for {graph.nodes[diagnosis].name}",
            evidence_node_ids=frozenset(evidence),
        )
        scored.append((score, drug_id, candidate))
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [(candidate, score) for score, _, candidate in scored[:n]]


def recommend(
    record: ClinicalRecord,
    graph: KnowledgeGraph,
    config: RecommenderConfig,
    classifier: SafetyClassifier,
    generator: Generator | None = None,
    findings: StructuredFindings | None = None,
    context: RetrievalContext | None = None,
    abbreviations=None,
) -> Recommendation | Abstention:
    """Bounded reject-and-regenerate loop over validated candidates.

    Up to ``max_rounds`` rounds of ``candidates_per_round`` candidates each;
    rejected drugs join a growing exclusion set; if every round exhausts, the
    engine abstains rather than relax safety.
    """
    if findings is None:
        findings = extract(record, graph, abbreviations)
    if context is None:
        context = build_context(
            record,
            graph,
            FusionGate(config.alpha),
            k=config.k,
            m=config.m,
            use_guidelines=config.use_guidelines,
        )
    if generator is None:
        def generator(f, p, ctx, exclusions, n):
            return kg_template_generate(f, p, ctx, exclusions, n, graph, config)

    if findings.top_diagnosis is None:
        summary = generate_summary(findings, None, graph, reason="NoDiagnosis")
        return Abstention(reason="NoDiagnosis", rejected=(), summary=summary, attempts=0)

    rejected: list[tuple[AntibioticCandidate, SafetyReport]] = []
    excluded: set[str] = set()
    attempts = 0
    for _ in range(config.max_rounds):
        try:
            batch = generator(
                findings, record.profile, context, frozenset(excluded), config.candidates_per_round
            )
        except NoDiagnosis:
            batch = []
        if not batch:
            break
        for candidate, _score in batch:
            attempts += 1
            report = validate(candidate, record.profile, graph, config.weights, classifier)
            if not config.enforce_safety:
                # safety-ablated path: emit the top candidate raw, keeping the
                # report for audit only
                summary = generate_summary(findings, candidate, graph)
                return Recommendation(
                    candidate=candidate,
                    report=report,
                    guideline_hits=context.guideline_hits,
                    summary=summary,
                    attempts=attempts,
                    rejected=tuple(rejected),
                )
            if report.verdict is Verdict.PASS:
                summary = generate_summary(findings, candidate, graph)
                return Recommendation(
                    candidate=candidate,
                    report=report,
                    guideline_hits=context.guideline_hits,
                    summary=summary,
                    attempts=attempts,
                    rejected=tuple(rejected),
                )
            rejected.append((candidate, report))
            excluded.add(candidate.drug)

    reason = "AllCandidatesRejected" if rejected else "NoCandidates"
    summary = generate_summary(findings, None, graph, reason=_top_reason(rejected) or reason)
    return Abstention(reason=reason, rejected=tuple(rejected), summary=summary, attempts=attempts)


def _top_reason(rejected) -> str | None:
    if not rejected:
        return None
    _, report = rejected[0]
    if report.hard_violations:
        return report.hard_violations[0].value
    if report.verdict is Verdict.REJECT_CLASSIFIER:
        return "ClassifierUnsafe"
    return "BelowSafetyThreshold"


@dataclass(frozen=True)
class RxLoss:
    value: float
    gold_missing: bool = False


def rx_loss(
    gold: AntibioticCandidate,
    candidates: list[tuple[AntibioticCandidate, float]],
    profile: PatientProfile,
    graph: KnowledgeGraph,
    weights: SafetyWeights | None = None,
    rx_lambda: float = 1.0,
) -> RxLoss:
    """-log P(gold) under a softmax over candidate scores, plus
    lambda * (1 - weighted safety of the gold candidate).

    If the gold drug is not among the candidates, the loss is +inf with the
    ``gold_missing`` flag set.
    """
    gold_index = next(
        (i for i, (c, _) in enumerate(candidates) if c.drug == gold.drug), None
    )
    if gold_index is None:
        return RxLoss(value=math.inf, gold_missing=True)
    scores = np.array([s for _, s in candidates])
    scores -= scores.max()
    probs = np.exp(scores) / np.exp(scores).sum()
    report = safety_score(gold, profile, graph, weights)
    return RxLoss(value=float(-np.log(probs[gold_index]) + rx_lambda * (1.0 - report.s_safety)))


def generate_summary(
    findings: StructuredFindings,
    candidate: AntibioticCandidate | None,
    graph: KnowledgeGraph,
    reason: str | None = None,
) -> str:
    """Deterministic slot-filled summary; wording is stable so corpus BLEU
    against template-consistent references is meaningful."""
    parts: list[str] = []
    diagnosis = findings.top_diagnosis
    if diagnosis is not None:
        clause = f"Assessment: {graph.nodes[diagnosis].name}"
        if findings.tooth_sites:
            clause += f" at {graph.nodes[findings.tooth_sites[0]].name}"
        parts.append(clause + ".")
    else:
        parts.append("Assessment: no diagnosis established.")
    if findings.severity != "unknown":
        parts.append(f"Severity: {findings.severity}.")
    symptoms = sorted(
        {
            graph.nodes[m.node_id].name
            for m in findings.mentions
            if not m.negated and graph.nodes[m.node_id].kind.value == "Symptom"
        }
    )
    if symptoms:
        parts.append("Findings: " + ", ".join(symptoms) + ".")
    if candidate is not None:
        parts.append(
            f"Plan: {graph.nodes[candidate.drug].name} "
            f"{candidate.dose_mg_per_kg_day:g} mg/kg/day in {candidate.frequency_per_day} "
            f"doses for {candidate.duration_days} days."
        )
    else:
        parts.append(
            "Plan: no safe antibiotic option identified"
            + (f" ({reason})." if reason else ".")
        )
    return " ".join(parts)

"""Cohort-level pipeline evaluation and the ablation runner."""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .embedding import FusionGate
from .errors import UnknownVariant
from .kg import KnowledgeGraph
from .metrics import bleu4, eas, ner_f1
from .parsing import StructuredFindings, extract
from .recommend import (
    Abstention,
    Recommendation,
    RecommenderConfig,
    kg_template_generate,
    recommend,
)
from .records import ClinicalRecord
from .retrieval import build_context
from .safety import (
    AntibioticCandidate,
    SafetyClassifier,
    SafetyReport,
    Verdict,
    hard_rule_check,
    validate,
)

VARIANTS = ("full", "no_kg", "no_rag", "no_safety")

TOPK_DURATION_SLACK_DAYS = 1


def config_for_variant(base: RecommenderConfig, variant: str) -> RecommenderConfig:
    if variant == "full":
        return base
    if variant == "no_kg":
        return replace(base, alpha=1.0, use_kg_scores=False)
    if variant == "no_rag":
        return replace(base, use_guidelines=False)
    if variant == "no_safety":
        return replace(base, enforce_safety=False)
    raise UnknownVariant(variant)


@dataclass(frozen=True)
class RecordResult:
    record: ClinicalRecord
    findings: StructuredFindings
    outcome: Recommendation | Abstention
    ranked: tuple[tuple[AntibioticCandidate, SafetyReport], ...]

    def to_dict(self) -> dict:
        return {
            "record_id": self.record.record_id,
            "findings": self.findings.to_dict(),
            "outcome": self.outcome.to_dict(),
            "ranked_drugs": [c.drug for c, _ in self.ranked],
        }


@dataclass(frozen=True)
class EvaluationReport:
    variant: str
    ner_precision: float
    ner_recall: float
    ner_f1: float
    bleu: float
    top1: float
    top3: float
    cvr: float
    der: float
    gcs: float
    eas: float
    abstention_rate: float
    counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "ner_precision": self.ner_precision,
            "ner_recall": self.ner_recall,
            "ner_f1": self.ner_f1,
            "bleu": self.bleu,
            "top1": self.top1,
            "top3": self.top3,
            "cvr": self.cvr,
            "der": self.der,
            "gcs": self.gcs,
            "eas": self.eas,
            "abstention_rate": self.abstention_rate,
            "counts": self.counts,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _topk_correct(
    ranked: tuple[tuple[AntibioticCandidate, SafetyReport], ...],
    record: ClinicalRecord,
    graph: KnowledgeGraph,
    k: int,
) -> bool:
    gold = record.gold.prescription if record.gold else None
    if gold is None:
        return False
    rule = graph.dose_rule_for(gold.drug, record.profile.age_months)
    for candidate, _ in ranked[:k]:
        if candidate.drug != gold.drug:
            continue
        if rule is None:
            continue
        dose_ok = rule.min_mg_per_kg_day <= candidate.dose_mg_per_kg_day <= rule.max_mg_per_kg_day
        duration_ok = abs(candidate.duration_days - gold.duration_days) <= TOPK_DURATION_SLACK_DAYS
        if dose_ok and duration_ok:
            return True
    return False


def _dose_error(candidate: AntibioticCandidate, record: ClinicalRecord, graph: KnowledgeGraph) -> bool:
    rule = graph.dose_rule_for(candidate.drug, record.profile.age_months)
    if rule is None:
        return True
    if not rule.min_mg_per_kg_day <= candidate.dose_mg_per_kg_day <= rule.max_mg_per_kg_day:
        return True
    return candidate.dose_mg_per_kg_day * record.profile.weight_kg > rule.abs_max_mg_day


def evaluate_record(
    record: ClinicalRecord,
    graph: KnowledgeGraph,
    config: RecommenderConfig,
    classifier: SafetyClassifier,
    abbreviations=None,
) -> RecordResult:
    findings = extract(record, graph, abbreviations)
    context = build_context(
        record,
        graph,
        FusionGate(config.alpha),
        k=config.k,
        m=config.m,
        use_guidelines=config.use_guidelines,
    )
    outcome = recommend(
        record, graph, config, classifier, findings=findings, context=context
    )
    ranked: list[tuple[AntibioticCandidate, SafetyReport]] = []
    if findings.top_diagnosis is not None:
        candidates = kg_template_generate(
            findings, record.profile, context, frozenset(), 10, graph, config
        )
        for candidate, _score in candidates:
            report = validate(candidate, record.profile, graph, config.weights, classifier)
            if not config.enforce_safety or report.verdict is Verdict.PASS:
                ranked.append((candidate, report))
    return RecordResult(record=record, findings=findings, outcome=outcome, ranked=tuple(ranked))


def evaluate_cohort(
    records: list[ClinicalRecord],
    graph: KnowledgeGraph,
    base_config: RecommenderConfig,
    classifier: SafetyClassifier,
    variant: str = "full",
    abbreviations=None,
) -> tuple[EvaluationReport, list[RecordResult]]:
    """Run the variant pipeline over the cohort and aggregate the metric
    suite. Abstentions are excluded from the CVR/DER/GCS/EAS denominators
    (and reported via abstention_rate) so abstaining cannot hide violations.
    """
    config = config_for_variant(base_config, variant)
    results = [
        evaluate_record(r, graph, config, classifier, abbreviations) for r in records
    ]

    pred_tuples: list[tuple[str, bool, str]] = []
    gold_tuples: list[tuple[str, bool, str]] = []
    summaries: list[str] = []
    references: list[str] = []
    top1_hits = top3_hits = 0
    emitted = 0
    cvr_hits = der_hits = gcs_hits = 0
    eas_values: list[float] = []
    abstained = 0

    for res in results:
        gold = res.record.gold
        pred_tuples.extend((m.node_id, m.negated, m.section) for m in res.findings.mentions)
        if gold is not None:
            gold_tuples.extend((e.node_id, e.negated, e.section) for e in gold.entities)
            summaries.append(res.outcome.summary)
            references.append(gold.summary)
            top1_hits += _topk_correct(res.ranked, res.record, graph, 1)
            top3_hits += _topk_correct(res.ranked, res.record, graph, 3)
        if res.outcome.abstained:
            abstained += 1
            continue
        emitted += 1
        candidate = res.outcome.candidate
        if hard_rule_check(candidate, res.record.profile, graph):
            cvr_hits += 1
        if _dose_error(candidate, res.record, graph):
            der_hits += 1
        if gold is not None and gold.diagnosis_id is not None:
            if candidate.drug in graph.first_line_drugs(gold.diagnosis_id):
                gcs_hits += 1
            eas_values.append(eas(candidate.evidence_node_ids, gold.evidence_node_ids))

    n = len(records)
    n_gold = sum(1 for r in records if r.gold is not None)
    precision, recall, f1 = ner_f1(pred_tuples, gold_tuples)
    report = EvaluationReport(
        variant=variant,
        ner_precision=precision,
        ner_recall=recall,
        ner_f1=f1,
        bleu=bleu4(summaries, references) if summaries else 0.0,
        top1=top1_hits / n_gold if n_gold else 0.0,
        top3=top3_hits / n_gold if n_gold else 0.0,
        cvr=cvr_hits / emitted if emitted else 0.0,
        der=der_hits / emitted if emitted else 0.0,
        gcs=gcs_hits / emitted if emitted else 0.0,
        eas=sum(eas_values) / len(eas_values) if eas_values else 0.0,
        abstention_rate=abstained / n if n else 0.0,
        counts={"records": n, "emitted": emitted, "abstained": abstained},
    )
    return report, results


def run_ablation(
    records: list[ClinicalRecord],
    graph: KnowledgeGraph,
    variants: tuple[str, ...],
    base_config: RecommenderConfig,
    classifier: SafetyClassifier,
    abbreviations=None,
) -> list[EvaluationReport]:
    """One EvaluationReport per variant, same cohort, same configuration."""
    for v in variants:
        if v not in VARIANTS:
            raise UnknownVariant(v)
    return [
        evaluate_cohort(records, graph, base_config, classifier, v, abbreviations)[0]
        for v in variants
    ]


def format_report_table(reports: list[EvaluationReport]) -> str:
    cols = ("variant", "ner_f1", "bleu", "top1", "top3", "cvr", "der", "gcs", "eas", "abstention_rate")
    header = "  ".join(f"{c:>10}" for c in cols)
    lines = [header, "-" * len(header)]
    for rep in reports:
        d = rep.to_dict()
        cells = [f"{d['variant']:>10}"]
        cells += [f"{d[c]:>10.3f}" for c in cols[1:]]
        lines.append("  ".join(cells))
    return "\n".join(lines)

"""dentarx: knowledge-graph guided pediatric dental antibiotic
recommendation with dual-layer safety validation.

Not clinical software: every bundled dose value is illustrative
engineering data for tests and demos.
"""

from .embedding import FusionGate, cosine, embed_text, encode_subgraph, fuse
from .kg import KnowledgeGraph, NodeKind, Relation, load_graph
from .parsing import StructuredFindings, detect_negation, extract, resolve_tooth_notation
from .recommend import (
    Abstention,
    Recommendation,
    RecommenderConfig,
    generate_summary,
    kg_template_generate,
    recommend,
    rx_loss,
)
from .records import ClinicalRecord, PatientProfile, load_records
from .retrieval import build_context, retrieve_guidelines, retrieve_subgraph
from .safety import (
    AntibioticCandidate,
    SafetyClassifier,
    SafetyReport,
    SafetyWeights,
    Verdict,
    hard_rule_check,
    safety_score,
    train_safety_classifier,
    validate,
)

__version__ = "0.1.0"

__all__ = [
    "Abstention",
    "AntibioticCandidate",
    "ClinicalRecord",
    "FusionGate",
    "KnowledgeGraph",
    "NodeKind",
    "PatientProfile",
    "Recommendation",
    "RecommenderConfig",
    "Relation",
    "SafetyClassifier",
    "SafetyReport",
    "SafetyWeights",
    "StructuredFindings",
    "Verdict",
    "build_context",
    "cosine",
    "detect_negation",
    "embed_text",
    "encode_subgraph",
    "extract",
    "fuse",
    "generate_summary",
    "hard_rule_check",
    "kg_template_generate",
    "load_graph",
    "load_records",
    "recommend",
    "resolve_tooth_notation",
    "retrieve_guidelines",
    "retrieve_subgraph",
    "rx_loss",
    "safety_score",
    "train_safety_classifier",
    "validate",
]

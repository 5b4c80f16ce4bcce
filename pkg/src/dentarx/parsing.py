"""Rule-based record parsing: lexicon entity linking, negation scoping,
FDI tooth-notation resolution, diagnosis scoring and a severity rubric."""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .kg import KnowledgeGraph, NodeKind, Relation
from .records import SECTIONS, ClinicalRecord
from .text import BOUNDARY_TOKENS, Token, tokenize

NEGATION_TRIGGERS = frozenset({"no", "denies", "without", "absent", "negative"})
NEGATION_TERMINATORS = frozenset({"but", "however"})
NEGATION_WINDOW = 4

SEVERE_SYMPTOM_IDS = frozenset({"facial_swelling", "fever", "trismus"})

_FDI_RE = re.compile(r"^#(\d)(\d)$")


@dataclass(frozen=True)
class EntityMention:
    section: str
    start: int
    end: int
    surface: str
    node_id: str
    negated: bool

    def to_dict(self) -> dict:
        return {
            "section": self.section,
            "start": self.start,
            "end": self.end,
            "surface": self.surface,
            "node_id": self.node_id,
            "negated": self.negated,
        }


@dataclass(frozen=True)
class StructuredFindings:
    mentions: tuple[EntityMention, ...]
    diagnosis_candidates: tuple[tuple[str, float], ...]
    tooth_sites: tuple[str, ...]
    prior_antibiotics: tuple[str, ...]
    severity: str  # mild | moderate | severe | unknown

    @property
    def top_diagnosis(self) -> str | None:
        return self.diagnosis_candidates[0][0] if self.diagnosis_candidates else None

    def to_dict(self) -> dict:
        return {
            "mentions": [m.to_dict() for m in self.mentions],
            "diagnosis_candidates": [
                {"node_id": n, "score": s} for n, s in self.diagnosis_candidates
            ],
            "tooth_sites": list(self.tooth_sites),
            "prior_antibiotics": list(self.prior_antibiotics),
            "severity": self.severity,
        }


def resolve_tooth_notation(token: str, graph: KnowledgeGraph) -> str | None:
    """Map an FDI token like "#85" to a ToothSite node id, if the code is
    valid (quadrants 1-4 permanent with positions 1-8, 5-8 primary with
    positions 1-5) and the graph carries that tooth."""
    m = _FDI_RE.match(token)
    if not m:
        return None
    quadrant, position = int(m.group(1)), int(m.group(2))
    if quadrant in (1, 2, 3, 4):
        valid = 1 <= position <= 8
    elif quadrant in (5, 6, 7, 8):
        valid = 1 <= position <= 5
    else:
        valid = False
    if not valid:
        return None
    node = graph.tooth_by_fdi(f"{quadrant}{position}")
    return node.id if node else None


def detect_negation(tokens: Sequence[str | Token], start: int) -> bool:
    """True iff a negation trigger sits within the 4 tokens preceding position
    ``start`` in the same sentence. Boundary markers ('.', ';') end the
    sentence; 'but'/'however' terminate the negation scope."""
    checked = 0
    for i in range(start - 1, -1, -1):
        tok = tokens[i]
        word = tok.text if isinstance(tok, Token) else tok
        if word in BOUNDARY_TOKENS or word in NEGATION_TERMINATORS:
            return False
        if word in NEGATION_TRIGGERS:
            return True
        checked += 1
        if checked >= NEGATION_WINDOW:
            return False
    return False


def _scan_section(
    section: str,
    text: str,
    graph: KnowledgeGraph,
    abbreviations: Mapping[str, str] | None,
) -> list[EntityMention]:
    stream = tokenize(text, abbreviations, keep_boundaries=True)
    words = [t.text for t in stream]
    max_len = max(graph.max_phrase_len(), 1)
    mentions: list[EntityMention] = []
    i = 0
    while i < len(stream):
        if words[i] in BOUNDARY_TOKENS:
            i += 1
            continue
        matched = 0
        node_id = None
        # longest lexicon match over consecutive non-boundary tokens
        for length in range(min(max_len, len(stream) - i), 0, -1):
            phrase = tuple(words[i : i + length])
            if any(w in BOUNDARY_TOKENS for w in phrase):
                continue
            hit = graph.synonym_index.get(phrase)
            if hit is not None:
                matched, node_id = length, hit
                break
        if node_id is None:
            node_id = resolve_tooth_notation(words[i], graph)
            if node_id is not None:
                matched = 1
        if node_id is None:
            i += 1
            continue
        start_char = stream[i].start
        end_char = stream[i + matched - 1].end
        mentions.append(
            EntityMention(
                section=section,
                start=start_char,
                end=end_char,
                surface=text[start_char:end_char],
                node_id=node_id,
                negated=detect_negation(stream, i),
            )
        )
        i += matched
    return mentions


def extract(
    record: ClinicalRecord,
    graph: KnowledgeGraph,
    abbreviations: Mapping[str, str] | None = None,
) -> StructuredFindings:
    """Longest-match lexicon extraction with negation, tooth-site resolution,
    indicates-based diagnosis scoring and the severity rubric."""
    mentions: list[EntityMention] = []
    for section in SECTIONS:
        text = record.section_text(section)
        if text:
            mentions.extend(_scan_section(section, text, graph, abbreviations))

    tooth_sites: list[str] = []
    prior_antibiotics: list[str] = []
    active_symptoms: list[str] = []
    for m in mentions:
        kind = graph.node(m.node_id).kind
        if kind is NodeKind.TOOTH_SITE and m.node_id not in tooth_sites:
            tooth_sites.append(m.node_id)
        elif kind is NodeKind.DRUG and not m.negated and m.node_id not in prior_antibiotics:
            prior_antibiotics.append(m.node_id)
        elif kind is NodeKind.SYMPTOM and not m.negated:
            active_symptoms.append(m.node_id)

    counts: dict[str, int] = {}
    for symptom in active_symptoms:
        for e, cond in graph.neighbors(symptom, Relation.INDICATES):
            counts[cond.id] = counts.get(cond.id, 0) + 1
    total = len(active_symptoms)
    candidates = sorted(
        ((cond, n / total) for cond, n in counts.items()),
        key=lambda cs: (-cs[1], cs[0]),
    )

    distinct = set(active_symptoms)
    if any(s in SEVERE_SYMPTOM_IDS for s in distinct):
        severity = "severe"
    elif len(distinct) >= 2:
        severity = "moderate"
    elif len(distinct) == 1:
        severity = "mild"
    else:
        severity = "unknown"

    return StructuredFindings(
        mentions=tuple(mentions),
        diagnosis_candidates=tuple(candidates),
        tooth_sites=tuple(tooth_sites),
        prior_antibiotics=tuple(prior_antibiotics),
        severity=severity,
    )

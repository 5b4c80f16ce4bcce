"""Dental-pharmacology knowledge graph: load, validate, index, serve.

The graph is immutable after load; every accessor is read-only and safe for
concurrent use. The file format is line-delimited JSON, one node or edge
record per line (see ``load_graph``).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Iterable, Iterator

from .errors import IntegrityError, KindMismatch, ParseError, UnknownNode
from .text import tokenize


class NodeKind(str, Enum):
    DRUG = "Drug"
    DRUG_CLASS = "DrugClass"
    CONDITION = "Condition"
    SYMPTOM = "Symptom"
    TOOTH_SITE = "ToothSite"
    ALLERGY_CLASS = "AllergyClass"
    AGE_BAND = "AgeBand"
    GUIDELINE_PASSAGE = "GuidelinePassage"


class Relation(str, Enum):
    TREATS = "treats"
    HAS_DOSE_RULE = "has_dose_rule"
    MEMBER_OF = "member_of"
    CROSS_REACTIVE = "cross_reactive"
    INTERACTS_WITH = "interacts_with"
    CONTRAINDICATED_IN = "contraindicated_in"
    LOCATED_AT = "located_at"
    INDICATES = "indicates"
    SUPPORTS = "supports"


# Allowed (src kinds, dst kinds) per relation.
_REL_ENDPOINTS: dict[Relation, tuple[frozenset[NodeKind], frozenset[NodeKind]]] = {
    Relation.TREATS: (frozenset({NodeKind.DRUG}), frozenset({NodeKind.CONDITION})),
    Relation.HAS_DOSE_RULE: (frozenset({NodeKind.DRUG}), frozenset({NodeKind.AGE_BAND})),
    Relation.MEMBER_OF: (frozenset({NodeKind.DRUG}), frozenset({NodeKind.DRUG_CLASS})),
    Relation.CROSS_REACTIVE: (
        frozenset({NodeKind.DRUG, NodeKind.DRUG_CLASS}),
        frozenset({NodeKind.ALLERGY_CLASS}),
    ),
    Relation.INTERACTS_WITH: (frozenset({NodeKind.DRUG}), frozenset({NodeKind.DRUG})),
    Relation.CONTRAINDICATED_IN: (frozenset({NodeKind.DRUG}), frozenset({NodeKind.CONDITION})),
    Relation.LOCATED_AT: (
        frozenset({NodeKind.CONDITION, NodeKind.SYMPTOM}),
        frozenset({NodeKind.TOOTH_SITE}),
    ),
    Relation.INDICATES: (frozenset({NodeKind.SYMPTOM}), frozenset({NodeKind.CONDITION})),
    Relation.SUPPORTS: (
        frozenset({NodeKind.GUIDELINE_PASSAGE}),
        frozenset({NodeKind.CONDITION, NodeKind.DRUG}),
    ),
}

_DOSE_RULE_KEYS = (
    "min_mg_per_kg_day",
    "max_mg_per_kg_day",
    "abs_max_mg_day",
    "freq_min_per_day",
    "freq_max_per_day",
    "duration_min_days",
    "duration_max_days",
)

_NODE_KEYS = frozenset({"id", "kind", "name", "synonyms", "attrs"})
_EDGE_KEYS = frozenset({"src", "rel", "dst", "attrs"})


@dataclass(frozen=True)
class KGNode:
    id: str
    kind: NodeKind
    name: str
    synonyms: tuple[str, ...] = ()
    attrs: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class KGEdge:
    src: str
    rel: Relation
    dst: str
    attrs: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class DoseRule:
    """Attrs of a has_dose_rule edge plus the age band it applies to."""

    age_band_id: str
    min_mg_per_kg_day: float
    max_mg_per_kg_day: float
    abs_max_mg_day: float
    freq_min_per_day: int
    freq_max_per_day: int
    duration_min_days: int
    duration_max_days: int


class KnowledgeGraph:
    """Indexed, validated, immutable graph. Build via ``load_graph``."""

    def __init__(self, nodes: dict[str, KGNode], edges: list[KGEdge]):
        self.nodes = nodes
        self.edges = edges
        self._out: dict[tuple[str, Relation], list[KGEdge]] = {}
        self._in: dict[tuple[str, Relation], list[KGEdge]] = {}
        for e in edges:
            self._out.setdefault((e.src, e.rel), []).append(e)
            self._in.setdefault((e.dst, e.rel), []).append(e)
        self.synonym_index: dict[tuple[str, ...], str] = {}
        self._max_phrase_len = 0
        for node in sorted(nodes.values(), key=lambda n: n.id):
            for phrase in (node.name, *node.synonyms):
                key = tuple(t.text for t in tokenize(phrase))
                if not key:
                    continue
                # first (lowest-id) node wins a shared phrase
                self.synonym_index.setdefault(key, node.id)
                self._max_phrase_len = max(self._max_phrase_len, len(key))
        self._fdi_index: dict[str, str] = {
            str(n.attrs["fdi"]): n.id
            for n in nodes.values()
            if n.kind is NodeKind.TOOTH_SITE and "fdi" in n.attrs
        }
        # scratch caches owned by other modules (embeddings, token sets);
        # populated lazily, never invalidated because the graph is immutable
        self.caches: dict[str, dict] = {}

    # -- accessors ---------------------------------------------------------

    def node(self, node_id: str) -> KGNode:
        try:
            return self.nodes[node_id]
        except KeyError:
            raise UnknownNode(node_id) from None

    def has_node(self, node_id: str) -> bool:
        return node_id in self.nodes

    def nodes_of_kind(self, kind: NodeKind) -> list[KGNode]:
        return sorted((n for n in self.nodes.values() if n.kind is kind), key=lambda n: n.id)

    def tooth_by_fdi(self, code: str) -> KGNode | None:
        node_id = self._fdi_index.get(code)
        return self.nodes[node_id] if node_id else None

    def max_phrase_len(self) -> int:
        return self._max_phrase_len

    def neighbors(
        self, node_id: str, rel: Relation | None = None
    ) -> list[tuple[KGEdge, KGNode]]:
        """Outgoing (edge, neighbor) pairs; interacts_with is answered from
        either endpoint. Ordered by neighbor id, then relation."""
        self.node(node_id)
        rels = [rel] if rel is not None else list(Relation)
        pairs: list[tuple[KGEdge, KGNode]] = []
        for r in rels:
            for e in self._out.get((node_id, r), ()):
                pairs.append((e, self.nodes[e.dst]))
            if r is Relation.INTERACTS_WITH:
                for e in self._in.get((node_id, r), ()):
                    pairs.append((e, self.nodes[e.src]))
        pairs.sort(key=lambda p: (p[1].id, p[0].rel.value))
        return pairs

    def in_edges(self, node_id: str, rel: Relation) -> list[KGEdge]:
        """Edges of the given relation arriving at ``node_id``, in file order."""
        self.node(node_id)
        return list(self._in.get((node_id, rel), ()))

    def dose_rule_for(self, drug_id: str, age_months: int) -> DoseRule | None:
        """The unique dosing rule whose age band contains ``age_months``."""
        node = self.node(drug_id)
        if node.kind is not NodeKind.DRUG:
            raise KindMismatch(f"{drug_id} has kind {node.kind.value}, expected Drug")
        if age_months < 0:
            raise ValueError("age_months must be >= 0")
        for e in self._out.get((drug_id, Relation.HAS_DOSE_RULE), ()):
            band = self.nodes[e.dst]
            if band.attrs["min_months"] <= age_months <= band.attrs["max_months"]:
                return DoseRule(age_band_id=band.id, **{k: e.attrs[k] for k in _DOSE_RULE_KEYS})
        return None

    def interaction_severity(self, a: str, b: str) -> float | None:
        """Max severity over interacts_with edges between two drugs."""
        best = None
        for e, other in self.neighbors(a, Relation.INTERACTS_WITH):
            if other.id == b:
                sev = float(e.attrs["severity"])
                best = sev if best is None else max(best, sev)
        return best

    def first_line_drugs(self, condition_id: str) -> set[str]:
        return {
            e.src
            for e in self._in.get((condition_id, Relation.TREATS), ())
            if e.attrs.get("line") == "first"
        }

    # -- serialization -----------------------------------------------------

    def to_lines(self) -> Iterator[str]:
        for node in sorted(self.nodes.values(), key=lambda n: n.id):
            yield json.dumps(
                {
                    "node": {
                        "id": node.id,
                        "kind": node.kind.value,
                        "name": node.name,
                        "synonyms": list(node.synonyms),
                        "attrs": node.attrs,
                    }
                },
                sort_keys=True,
            )
        for e in self.edges:
            yield json.dumps(
                {"edge": {"src": e.src, "rel": e.rel.value, "dst": e.dst, "attrs": e.attrs}},
                sort_keys=True,
            )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for line in self.to_lines():
                fh.write(line + "\n")


# -- loading ---------------------------------------------------------------


def _parse_node(obj: dict, line_no: int) -> KGNode:
    extra = set(obj) - _NODE_KEYS
    if extra:
        raise ParseError(f"unknown node keys {sorted(extra)}", line_no)
    try:
        kind = NodeKind(obj["kind"])
    except (KeyError, ValueError):
        raise ParseError(f"bad or missing node kind: {obj.get('kind')!r}", line_no) from None
    node_id = obj.get("id")
    name = obj.get("name")
    if not node_id or not isinstance(node_id, str):
        raise ParseError("node id must be a non-empty string", line_no)
    if not name or not isinstance(name, str):
        raise ParseError(f"node {node_id!r}: name must be non-empty", line_no)
    synonyms = obj.get("synonyms", [])
    if not isinstance(synonyms, list) or not all(isinstance(s, str) for s in synonyms):
        raise ParseError(f"node {node_id!r}: synonyms must be a list of strings", line_no)
    attrs = obj.get("attrs", {})
    if not isinstance(attrs, dict):
        raise ParseError(f"node {node_id!r}: attrs must be an object", line_no)
    return KGNode(id=node_id, kind=kind, name=name, synonyms=tuple(synonyms), attrs=attrs)


def _parse_edge(obj: dict, line_no: int) -> KGEdge:
    extra = set(obj) - _EDGE_KEYS
    if extra:
        raise ParseError(f"unknown edge keys {sorted(extra)}", line_no)
    try:
        rel = Relation(obj["rel"])
    except (KeyError, ValueError):
        raise ParseError(f"bad or missing relation: {obj.get('rel')!r}", line_no) from None
    src, dst = obj.get("src"), obj.get("dst")
    if not src or not dst:
        raise ParseError("edge src and dst must be non-empty", line_no)
    attrs = obj.get("attrs", {})
    if not isinstance(attrs, dict):
        raise ParseError("edge attrs must be an object", line_no)
    return KGEdge(src=src, rel=rel, dst=dst, attrs=attrs)


def _check_dose_rule_attrs(e: KGEdge) -> None:
    missing = [k for k in _DOSE_RULE_KEYS if k not in e.attrs]
    if missing:
        raise IntegrityError(f"has_dose_rule {e.src}->{e.dst}: missing attrs {missing}")
    a = e.attrs
    if not (0 < a["min_mg_per_kg_day"] <= a["max_mg_per_kg_day"]):
        raise IntegrityError(f"has_dose_rule {e.src}->{e.dst}: bad mg/kg/day range")
    if not a["abs_max_mg_day"] > 0:
        raise IntegrityError(f"has_dose_rule {e.src}->{e.dst}: abs_max_mg_day must be > 0")
    for lo, hi in (("freq_min_per_day", "freq_max_per_day"), ("duration_min_days", "duration_max_days")):
        if not (isinstance(a[lo], int) and isinstance(a[hi], int)):
            raise IntegrityError(f"has_dose_rule {e.src}->{e.dst}: {lo}/{hi} must be integers")
        if not (0 < a[lo] <= a[hi]):
            raise IntegrityError(f"has_dose_rule {e.src}->{e.dst}: bad {lo}/{hi} range")


def _validate(nodes: dict[str, KGNode], edges: list[KGEdge]) -> None:
    for node in nodes.values():
        if node.kind is NodeKind.AGE_BAND:
            lo, hi = node.attrs.get("min_months"), node.attrs.get("max_months")
            if lo is None or hi is None or not (0 <= lo <= hi):
                raise IntegrityError(f"AgeBand {node.id}: need 0 <= min_months <= max_months")
        if node.kind is NodeKind.GUIDELINE_PASSAGE:
            if not node.attrs.get("text") or not node.attrs.get("source"):
                raise IntegrityError(f"GuidelinePassage {node.id}: needs text and source attrs")

    dose_bands: dict[str, list[tuple[int, int, str]]] = {}
    for e in edges:
        for endpoint in (e.src, e.dst):
            if endpoint not in nodes:
                raise IntegrityError(f"edge {e.src}-{e.rel.value}->{e.dst}: unknown node {endpoint!r}")
        src_kinds, dst_kinds = _REL_ENDPOINTS[e.rel]
        if nodes[e.src].kind not in src_kinds or nodes[e.dst].kind not in dst_kinds:
            raise IntegrityError(
                f"edge {e.src}-{e.rel.value}->{e.dst}: endpoint kinds "
                f"{nodes[e.src].kind.value}->{nodes[e.dst].kind.value} not allowed"
            )
        if e.rel is Relation.TREATS:
            if e.attrs.get("line") not in ("first", "second"):
                raise IntegrityError(f"treats {e.src}->{e.dst}: line must be 'first' or 'second'")
        elif e.rel is Relation.HAS_DOSE_RULE:
            _check_dose_rule_attrs(e)
            band = nodes[e.dst]
            dose_bands.setdefault(e.src, []).append(
                (band.attrs["min_months"], band.attrs["max_months"], band.id)
            )
        elif e.rel is Relation.INTERACTS_WITH:
            sev = e.attrs.get("severity")
            if sev is None or not (0.0 <= sev <= 1.0):
                raise IntegrityError(f"interacts_with {e.src}->{e.dst}: severity must be in [0, 1]")

    for drug, bands in dose_bands.items():
        bands.sort()
        for (lo1, hi1, b1), (lo2, hi2, b2) in zip(bands, bands[1:]):
            if lo2 <= hi1:
                raise IntegrityError(
                    f"drug {drug}: overlapping dose-rule age bands {b1} and {b2}"
                )


def build_graph(records: Iterable[dict]) -> KnowledgeGraph:
    """Build from already-parsed record dicts ({'node': ...} / {'edge': ...})."""
    return _build(enumerate(records, start=1))


def _build(numbered: Iterable[tuple[int, dict]]) -> KnowledgeGraph:
    nodes: dict[str, KGNode] = {}
    edges: list[KGEdge] = []
    for line_no, obj in numbered:
        if not isinstance(obj, dict) or len(obj) != 1:
            raise ParseError("each record must hold exactly one 'node' or 'edge' key", line_no)
        key, payload = next(iter(obj.items()))
        if key == "node":
            node = _parse_node(payload, line_no)
            if node.id in nodes:
                raise ParseError(f"duplicate node id {node.id!r}", line_no)
            nodes[node.id] = node
        elif key == "edge":
            edges.append(_parse_edge(payload, line_no))
        else:
            raise ParseError(f"unknown record key {key!r}", line_no)
    _validate(nodes, edges)
    return KnowledgeGraph(nodes, edges)


def load_graph(path) -> KnowledgeGraph:
    """Load and fully validate a graph; fails atomically on any violation."""

    def parsed() -> Iterator[tuple[int, dict]]:
        with open(path, encoding="utf-8") as fh:
            for line_no, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line:
                    continue
                try:
                    yield line_no, json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON: {exc.msg}", line_no) from None

    return _build(parsed())

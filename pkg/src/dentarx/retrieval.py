"""Entity and guideline retrieval plus assembly of the fused context.

Entity retrieval is exact TopK over all non-passage nodes, scored by a blend
of embedding cosine and keyword Jaccard. Guideline retrieval is exact top-m
cosine search over passage nodes against the fused representation.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .embedding import FusionGate, cosine, embed_text, encode_subgraph, fuse, node_text
from .errors import EmptyDevSet
from .kg import KGEdge, KGNode, KnowledgeGraph, NodeKind, Relation
from .records import ClinicalRecord
from .text import tokenize

EMBED_WEIGHT = 0.7
KEYWORD_WEIGHT = 0.3

# relations pulled in around retrieved drugs even when the far endpoint
# did not itself make the TopK cut
SAFETY_RELATIONS = (
    Relation.HAS_DOSE_RULE,
    Relation.CROSS_REACTIVE,
    Relation.INTERACTS_WITH,
    Relation.CONTRAINDICATED_IN,
)


@dataclass(frozen=True)
class RetrievedSubgraph:
    node_ids: tuple[str, ...]
    scores: tuple[float, ...]
    edges: tuple[KGEdge, ...]

    def score_of(self, node_id: str) -> float | None:
        try:
            return self.scores[self.node_ids.index(node_id)]
        except ValueError:
            return None


@dataclass(frozen=True)
class GuidelineHit:
    passage_node_id: str
    similarity: float


@dataclass(frozen=True)
class RetrievalContext:
    h_x: np.ndarray
    h_star: np.ndarray
    subgraph: RetrievedSubgraph
    guideline_hits: tuple[GuidelineHit, ...]
    record_tokens: frozenset[str]

    def to_dict(self) -> dict:
        return {
            "subgraph": [
                {"node_id": n, "score": s}
                for n, s in zip(self.subgraph.node_ids, self.subgraph.scores)
            ],
            "guideline_hits": [
                {"passage_node_id": h.passage_node_id, "similarity": h.similarity}
                for h in self.guideline_hits
            ],
        }


def _node_token_set(graph: KnowledgeGraph, node: KGNode) -> frozenset[str]:
    cache = graph.caches.setdefault("node_tokens", {})
    if node.id not in cache:
        cache[node.id] = frozenset(t.text for t in tokenize(node_text(node)))
    return cache[node.id]


def _node_embedding(graph: KnowledgeGraph, node: KGNode) -> np.ndarray:
    cache = graph.caches.setdefault("node_embeddings", {})
    if node.id not in cache:
        cache[node.id] = embed_text(node_text(node))
    return cache[node.id]


def _jaccard(a: frozenset[str], b: frozenset[str]) -> float:
    if not a and not b:
        return 0.0
    union = len(a | b)
    return len(a & b) / union if union else 0.0


def score_entity(
    node: KGNode,
    h_x: np.ndarray,
    record_tokens: frozenset[str],
    graph: KnowledgeGraph | None = None,
    embed_weight: float = EMBED_WEIGHT,
    keyword_weight: float = KEYWORD_WEIGHT,
) -> float:
    """Blend of embedding cosine against the node's lexical text and keyword
    Jaccard between the node's tokens and the record's tokens."""
    if graph is not None:
        emb = _node_embedding(graph, node)
        toks = _node_token_set(graph, node)
    else:
        emb = embed_text(node_text(node))
        toks = frozenset(t.text for t in tokenize(node_text(node)))
    return embed_weight * cosine(emb, h_x) + keyword_weight * _jaccard(toks, record_tokens)


def record_token_set(record: ClinicalRecord) -> frozenset[str]:
    return frozenset(t.text for t in tokenize(record.full_text()))


def retrieve_subgraph(
    graph: KnowledgeGraph,
    record: ClinicalRecord,
    k: int,
    embed_weight: float = EMBED_WEIGHT,
    keyword_weight: float = KEYWORD_WEIGHT,
    h_x: np.ndarray | None = None,
) -> RetrievedSubgraph:
    """Exact TopK over all non-GuidelinePassage nodes, ties broken by node id
    ascending, expanded with 1-hop safety edges around retrieved drugs."""
    if k < 1:
        raise ValueError("K must be >= 1")
    if h_x is None:
        h_x = embed_text(record.full_text())
    tokens = record_token_set(record)
    scored = sorted(
        (
            (-score_entity(n, h_x, tokens, graph, embed_weight, keyword_weight), n.id)
            for n in graph.nodes.values()
            if n.kind is not NodeKind.GUIDELINE_PASSAGE
        ),
    )[:k]
    node_ids = tuple(node_id for _, node_id in scored)
    scores = tuple(-neg for neg, _ in scored)
    chosen = set(node_ids)
    edges: list[KGEdge] = []
    seen: set[int] = set()
    for e in graph.edges:
        keep = e.src in chosen and e.dst in chosen
        if not keep and e.rel in SAFETY_RELATIONS:
            src_drug = e.src in chosen and graph.nodes[e.src].kind is NodeKind.DRUG
            dst_drug = e.dst in chosen and graph.nodes[e.dst].kind is NodeKind.DRUG
            keep = src_drug or dst_drug
        if keep and id(e) not in seen:
            seen.add(id(e))
            edges.append(e)
    return RetrievedSubgraph(node_ids=node_ids, scores=scores, edges=tuple(edges))


def retrieve_guidelines(
    graph: KnowledgeGraph, h_star: np.ndarray, m: int
) -> list[GuidelineHit]:
    """Top-m guideline passages by cosine similarity, ties by node id."""
    if m < 1:
        raise ValueError("m must be >= 1")
    passages = graph.nodes_of_kind(NodeKind.GUIDELINE_PASSAGE)
    scored = sorted(
        ((-cosine(h_star, _passage_embedding(graph, p)), p.id) for p in passages)
    )[:m]
    return [GuidelineHit(passage_node_id=pid, similarity=-neg) for neg, pid in scored]


def _passage_embedding(graph: KnowledgeGraph, node: KGNode) -> np.ndarray:
    cache = graph.caches.setdefault("passage_embeddings", {})
    if node.id not in cache:
        cache[node.id] = embed_text(node.attrs["text"])
    return cache[node.id]


def build_context(
    record: ClinicalRecord,
    graph: KnowledgeGraph,
    gate: FusionGate,
    k: int,
    m: int,
    use_guidelines: bool = True,
) -> RetrievalContext:
    """Compose text encoding, subgraph retrieval, graph encoding, gated
    fusion and guideline retrieval into one context object."""
    h_x = embed_text(record.full_text())
    subgraph = retrieve_subgraph(graph, record, k, h_x=h_x)
    fragment_nodes = [graph.nodes[n] for n in subgraph.node_ids]
    h_g = encode_subgraph(fragment_nodes, subgraph.edges)
    h_star = fuse(h_x, h_g, gate)
    hits: tuple[GuidelineHit, ...] = ()
    if use_guidelines:
        hits = tuple(retrieve_guidelines(graph, h_star, m))
    return RetrievalContext(
        h_x=h_x,
        h_star=h_star,
        subgraph=subgraph,
        guideline_hits=hits,
        record_tokens=record_token_set(record),
    )


def fit_gate(
    dev_cases: list[tuple[ClinicalRecord, frozenset[str]]],
    graph: KnowledgeGraph,
    k: int = 10,
) -> FusionGate:
    """Grid-search alpha in {0.0, 0.1, ..., 1.0} maximizing mean recall@K of
    gold evidence nodes under h*-based entity scoring; ties resolve toward
    0.5 (and to the smaller alpha when equidistant)."""
    if not dev_cases:
        raise EmptyDevSet("gate fitting needs at least one dev case")
    grid = [round(0.1 * i, 1) for i in range(11)]
    best_alpha, best_recall = None, -1.0
    for alpha in grid:
        recall = np.mean(
            [_recall_at_k(record, gold, graph, FusionGate(alpha), k) for record, gold in dev_cases]
        )
        better = recall > best_recall + 1e-12
        tie = abs(recall - best_recall) <= 1e-12
        if better or (tie and _closer_to_half(alpha, best_alpha)):
            best_alpha, best_recall = alpha, float(recall)
    return FusionGate(best_alpha)


def _closer_to_half(candidate: float, incumbent: float | None) -> bool:
    if incumbent is None:
        return True
    return abs(candidate - 0.5) < abs(incumbent - 0.5)


def _recall_at_k(
    record: ClinicalRecord,
    gold_ids: frozenset[str],
    graph: KnowledgeGraph,
    gate: FusionGate,
    k: int,
) -> float:
    if not gold_ids:
        return 1.0
    context = build_context(record, graph, gate, k=k, m=1, use_guidelines=False)
    tokens = context.record_tokens
    scored = sorted(
        (
            (-score_entity(n, context.h_star, tokens, graph), n.id)
            for n in graph.nodes.values()
            if n.kind is not NodeKind.GUIDELINE_PASSAGE
        ),
    )[:k]
    top = {node_id for _, node_id in scored}
    return len(top & gold_ids) / len(gold_ids)

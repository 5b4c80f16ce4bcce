"""Linear-softmax BIO tagger over hashed token features.

Faithful small-scale embodiment of the sequence-labeling loss: per-token
negative log-likelihood under a linear model whose inputs are the signed
hash feature of the token (same hashing as the text embedder) plus a binary
in-lexicon indicator derived from the graph.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .embedding import DIM, fnv1a_64
from .errors import EmptyCorpus, MissingGold
from .kg import KnowledgeGraph, NodeKind
from .records import ClinicalRecord, GoldAnnotation, SECTIONS
from .text import Token, tokenize

TAGS = ("O", "B-Condition", "I-Condition", "B-Symptom", "I-Symptom")
N_TAGS = len(TAGS)
N_FEATURES = DIM + 1  # hashed token slot + in-lexicon flag

_KIND_TO_TAG = {NodeKind.CONDITION: "Condition", NodeKind.SYMPTOM: "Symptom"}


def _lexicon_tokens(graph: KnowledgeGraph) -> frozenset[str]:
    cache = graph.caches.setdefault("tagger", {})
    if "lexicon_tokens" not in cache:
        toks: set[str] = set()
        for phrase in graph.synonym_index:
            toks.update(phrase)
        cache["lexicon_tokens"] = frozenset(toks)
    return cache["lexicon_tokens"]


def featurize(tokens: list[Token], graph: KnowledgeGraph) -> np.ndarray:
    """(T, N_FEATURES) feature matrix for a token sequence."""
    lexicon = _lexicon_tokens(graph)
    feats = np.zeros((len(tokens), N_FEATURES))
    for t, tok in enumerate(tokens):
        h = fnv1a_64(tok.text.encode("utf-8"))
        feats[t, h % DIM] = 1.0 if (h >> 63) == 0 else -1.0
        if tok.text in lexicon:
            feats[t, DIM] = 1.0
    return feats


def gold_tag_ids(
    record: ClinicalRecord, gold: GoldAnnotation, graph: KnowledgeGraph
) -> tuple[list[Token], np.ndarray]:
    """Tokenize all sections and derive BIO tag ids from gold entity spans.

    Tags cover Condition and Symptom entities only; everything else is O.
    """
    tokens: list[Token] = []
    tags: list[int] = []
    for section in SECTIONS:
        text = record.section_text(section)
        if not text:
            continue
        section_tokens = tokenize(text)
        entities = [
            e
            for e in gold.entities
            if e.section == section
            and graph.has_node(e.node_id)
            and graph.node(e.node_id).kind in _KIND_TO_TAG
        ]
        prev_entity = None
        for tok in section_tokens:
            entity = next(
                (e for e in entities if e.start <= tok.start and tok.end <= e.end), None
            )
            if entity is None:
                tags.append(TAGS.index("O"))
            else:
                label = _KIND_TO_TAG[graph.node(entity.node_id).kind]
                prefix = "I" if entity is prev_entity else "B"
                tags.append(TAGS.index(f"{prefix}-{label}"))
            prev_entity = entity
            tokens.append(tok)
    return tokens, np.asarray(tags, dtype=int)


@dataclass
class TokenTagger:
    """Softmax-linear tagger; zero weights give the uniform distribution."""

    weights: np.ndarray = field(default_factory=lambda: np.zeros((N_TAGS, N_FEATURES)))

    def log_probs(self, feats: np.ndarray) -> np.ndarray:
        logits = feats @ self.weights.T
        logits -= logits.max(axis=1, keepdims=True)
        return logits - np.log(np.exp(logits).sum(axis=1, keepdims=True))

    def nll_and_grad(self, feats: np.ndarray, tags: np.ndarray) -> tuple[float, np.ndarray]:
        """Summed NLL of the tag sequence and its gradient w.r.t. weights."""
        logp = self.log_probs(feats)
        nll = float(-logp[np.arange(len(tags)), tags].sum())
        probs = np.exp(logp)
        probs[np.arange(len(tags)), tags] -= 1.0
        return nll, probs.T @ feats


def tagger_nll(
    tagger: TokenTagger,
    record: ClinicalRecord,
    gold: GoldAnnotation | None,
    graph: KnowledgeGraph,
) -> float:
    """Summed negative log-likelihood of the gold tag sequence."""
    if gold is None:
        raise MissingGold(record.record_id)
    tokens, tags = gold_tag_ids(record, gold, graph)
    if not tokens:
        return 0.0
    nll, _ = tagger.nll_and_grad(featurize(tokens, graph), tags)
    return nll


def train_tagger(
    corpus: list[ClinicalRecord],
    graph: KnowledgeGraph,
    epochs: int = 100,
    learning_rate: float = 0.1,
    seed: int = 0,
) -> tuple[TokenTagger, list[float]]:
    """Full-batch gradient descent on mean per-record NLL.

    Deterministic for a fixed seed (and in fact independent of it: the
    initialization is uniform and the batch is the whole corpus). Returns the
    tagger and the per-epoch mean-NLL history, index 0 being the initial loss.
    """
    if not corpus:
        raise EmptyCorpus("tagger training needs at least one record")
    prepared = []
    for record in corpus:
        if record.gold is None:
            raise MissingGold(record.record_id)
        tokens, tags = gold_tag_ids(record, record.gold, graph)
        if tokens:
            prepared.append((featurize(tokens, graph), tags))
    if not prepared:
        raise EmptyCorpus("corpus has no tokens")

    def batch(tagger: TokenTagger) -> tuple[float, np.ndarray]:
        total, grad = 0.0, np.zeros_like(tagger.weights)
        for feats, tags in prepared:
            nll, g = tagger.nll_and_grad(feats, tags)
            total += nll
            grad += g
        return total / len(prepared), grad / len(prepared)

    tagger = TokenTagger()
    history: list[float] = []
    for _ in range(epochs):
        mean_nll, grad = batch(tagger)
        history.append(mean_nll)
        tagger.weights = tagger.weights - learning_rate * grad
    history.append(batch(tagger)[0])
    return tagger, history

"""Deterministic text and subgraph embeddings plus gated fusion.

Text embedding is signed feature hashing: FNV-1a 64-bit per token, component
index = hash mod 256, sign from bit 63. Subgraph encoding is two rounds of
parameter-free mean aggregation over the fragment. Both are pure functions,
byte-stable across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .kg import KGEdge, KGNode
from .text import tokenize

DIM = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = 0xFFFFFFFFFFFFFFFF


def fnv1a_64(data: bytes) -> int:
    h = _FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * _FNV_PRIME) & _MASK64
    return h


def _normalize(vec: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(vec))
    return vec / norm if norm > 0.0 else vec


def embed_text(text: str) -> np.ndarray:
    """Hash-based embedding of ``text``; zero vector when there are no tokens,
    unit L2 norm otherwise."""
    vec = np.zeros(DIM)
    for token in tokenize(text):
        h = fnv1a_64(token.text.encode("utf-8"))
        sign = 1.0 if (h >> 63) == 0 else -1.0
        vec[h % DIM] += sign
    return _normalize(vec)


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine similarity; defined as 0.0 when either vector is zero."""
    na, nb = float(np.linalg.norm(a)), float(np.linalg.norm(b))
    if na == 0.0 or nb == 0.0:
        return 0.0
    return float(np.dot(a, b) / (na * nb))


def node_text(node: KGNode) -> str:
    return " ".join((node.name, *node.synonyms))


def encode_subgraph(nodes: Sequence[KGNode], edges: Iterable[KGEdge], rounds: int = 2) -> np.ndarray:
    """Mean-aggregation encoder over a graph fragment.

    Each node starts at embed_text(name + synonyms); each round blends the
    node state half-and-half with the mean of its in-fragment neighbor states
    (edges treated as undirected); isolated nodes keep their state. The output
    is the normalized mean of the final states, zero for an empty fragment.
    Node input order does not affect the result.
    """
    if not nodes:
        return np.zeros(DIM)
    order = sorted(nodes, key=lambda n: n.id)
    index = {n.id: i for i, n in enumerate(order)}
    states = np.stack([embed_text(node_text(n)) for n in order])
    adj: list[set[int]] = [set() for _ in order]
    for e in edges:
        i, j = index.get(e.src), index.get(e.dst)
        if i is None or j is None or i == j:
            continue
        adj[i].add(j)
        adj[j].add(i)
    for _ in range(rounds):
        nxt = states.copy()
        for i, nbrs in enumerate(adj):
            if not nbrs:
                continue
            mean = states[sorted(nbrs)].mean(axis=0)
            nxt[i] = _normalize(0.5 * states[i] + 0.5 * mean)
        states = nxt
    return _normalize(states.mean(axis=0))


@dataclass(frozen=True)
class FusionGate:
    """Blend weight between the text representation and the graph one."""

    alpha: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must be in [0, 1]")


def fuse(h_x: np.ndarray, h_g: np.ndarray, gate: FusionGate) -> np.ndarray:
    """alpha * h_x + (1 - alpha) * h_g, re-normalized (zero stays zero).

    The extremes return their input unchanged so that alpha = 1 (text-only)
    and alpha = 0 (graph-only) are bit-exact, not merely close: renormalizing
    an already-unit vector can perturb the last bit.
    """
    if gate.alpha == 1.0:
        return h_x
    if gate.alpha == 0.0:
        return h_g
    return _normalize(gate.alpha * h_x + (1.0 - gate.alpha) * h_g)

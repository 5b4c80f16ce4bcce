"""Evaluation metrics: linking-level F1, corpus BLEU-4, evidence Jaccard,
bootstrap confidence intervals, and a rank-based AUC helper."""

from __future__ import annotations

import math
from collections import Counter
from typing import Iterable, Sequence

import numpy as np

from .errors import LengthMismatch, TooFewSamples
from .text import tokenize


def ner_f1(
    predicted: Iterable[tuple[str, bool, str]],
    gold: Iterable[tuple[str, bool, str]],
) -> tuple[float, float, float]:
    """Micro precision/recall/F1 over (node_id, negated, section) tuples.

    Spans are deliberately ignored: this scores entity linking, not boundary
    agreement. Degenerate denominators yield 0.
    """
    pred_counts = Counter(predicted)
    gold_counts = Counter(gold)
    tp = sum((pred_counts & gold_counts).values())
    n_pred = sum(pred_counts.values())
    n_gold = sum(gold_counts.values())
    precision = tp / n_pred if n_pred else 0.0
    recall = tp / n_gold if n_gold else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def _ngrams(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidates: Sequence[str], references: Sequence[str]) -> float:
    """Corpus-level BLEU-4 in [0, 100]: clipped modified n-gram precisions
    with add-1 smoothing on orders 2-4, standard brevity penalty."""
    if len(candidates) != len(references):
        raise LengthMismatch(f"{len(candidates)} candidates vs {len(references)} references")
    matches = [0] * 4
    totals = [0] * 4
    cand_len = 0
    ref_len = 0
    for cand, ref in zip(candidates, references):
        cand_toks = [t.text for t in tokenize(cand)]
        ref_toks = [t.text for t in tokenize(ref)]
        cand_len += len(cand_toks)
        ref_len += len(ref_toks)
        for n in range(1, 5):
            cand_ngrams = _ngrams(cand_toks, n)
            ref_ngrams = _ngrams(ref_toks, n)
            matches[n - 1] += sum((cand_ngrams & ref_ngrams).values())
            totals[n - 1] += sum(cand_ngrams.values())
    log_precisions = []
    for n in range(1, 5):
        if n == 1:
            if totals[0] == 0 or matches[0] == 0:
                return 0.0
            p = matches[0] / totals[0]
        else:
            p = (matches[n - 1] + 1) / (totals[n - 1] + 1)
        log_precisions.append(math.log(p))
    if cand_len == 0:
        return 0.0
    bp = 1.0 if cand_len > ref_len else math.exp(1.0 - ref_len / cand_len)
    return 100.0 * bp * math.exp(sum(log_precisions) / 4.0)


def eas(cited: Iterable[str], gold_evidence: Iterable[str]) -> float:
    """Jaccard overlap of cited vs gold evidence node ids; 1 when both empty."""
    a, b = set(cited), set(gold_evidence)
    if not a and not b:
        return 1.0
    return len(a & b) / len(a | b)


def bootstrap_ci(
    samples: Sequence[float],
    resamples: int = 1000,
    level: float = 0.95,
    seed: int = 0,
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean; deterministic per seed."""
    if len(samples) < 2:
        raise TooFewSamples("bootstrap needs at least 2 samples")
    rng = np.random.default_rng(seed)
    data = np.asarray(samples, dtype=float)
    idx = rng.integers(0, len(data), size=(resamples, len(data)))
    means = data[idx].mean(axis=1)
    lo = float(np.percentile(means, 100 * (1 - level) / 2))
    hi = float(np.percentile(means, 100 * (1 + level) / 2))
    return lo, hi


def auc(scores: Sequence[float], labels: Sequence[bool]) -> float:
    """Rank-based (Mann-Whitney) AUC of scores against boolean labels."""
    pos = [s for s, y in zip(scores, labels) if y]
    neg = [s for s, y in zip(scores, labels) if not y]
    if not pos or not neg:
        raise ValueError("AUC needs both classes")
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))

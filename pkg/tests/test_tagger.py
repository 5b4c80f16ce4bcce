"""Trainable BIO tagger: loss identities, gradients, training behavior."""

import math

import numpy as np
import pytest

from dentarx.cohort import CohortConfig, generate_cohort
from dentarx.errors import EmptyCorpus, MissingGold
from dentarx.tagger import (
    N_TAGS,
    TokenTagger,
    featurize,
    gold_tag_ids,
    tagger_nll,
    train_tagger,
)
from dentarx.text import tokenize


@pytest.fixture(scope="module")
def corpus(graph):
    return generate_cohort(CohortConfig(seed=5, n_records=12), graph)


def _token_count(record) -> int:
    return sum(
        len(tokenize(record.section_text(s)))
        for s in ("chief_complaint", "exam_notes", "radiographic_report")
        if record.section_text(s)
    )


def test_uniform_init_nll_is_t_ln5(graph, corpus):
    tagger = TokenTagger()
    for record in corpus:
        t = _token_count(record)
        assert tagger_nll(tagger, record, record.gold, graph) == pytest.approx(
            t * math.log(N_TAGS), abs=1e-12
        )


def test_gold_tags_use_bio_scheme(graph, corpus):
    record = corpus[0]
    tokens, tags = gold_tag_ids(record, record.gold, graph)
    assert len(tokens) == len(tags) == _token_count(record)
    # an I- tag can only follow a B- or I- tag of the same type
    for prev, cur in zip(tags, tags[1:]):
        if cur in (2, 4):  # I-Condition, I-Symptom
            assert prev in (cur, cur - 1)


def test_gradient_matches_finite_differences(graph, corpus):
    rng = np.random.default_rng(11)
    record = corpus[0]
    tokens, tags = gold_tag_ids(record, record.gold, graph)
    feats = featurize(tokens, graph)
    tagger = TokenTagger(weights=rng.normal(0, 0.5, size=(N_TAGS, feats.shape[1])))
    _, grad = tagger.nll_and_grad(feats, tags)
    eps = 1e-6
    for _ in range(40):
        i, j = rng.integers(N_TAGS), rng.integers(feats.shape[1])
        w0 = tagger.weights[i, j]
        tagger.weights[i, j] = w0 + eps
        up, _ = tagger.nll_and_grad(feats, tags)
        tagger.weights[i, j] = w0 - eps
        down, _ = tagger.nll_and_grad(feats, tags)
        tagger.weights[i, j] = w0
        numeric = (up - down) / (2 * eps)
        denom = max(abs(numeric), abs(grad[i, j]), 1e-8)
        assert abs(numeric - grad[i, j]) / denom < 1e-4


def test_training_reduces_loss(graph, corpus):
    _, history = train_tagger(corpus, graph, epochs=50, learning_rate=0.2)
    assert len(history) == 51
    assert history[0] == pytest.approx(
        np.mean([_token_count(r) for r in corpus]) * math.log(N_TAGS), abs=1e-9
    )
    assert history[-1] < history[0]
    assert all(b <= a + 1e-9 for a, b in zip(history, history[1:]))


def test_zero_epochs_leaves_weights_unchanged(graph, corpus):
    tagger, history = train_tagger(corpus, graph, epochs=0)
    assert np.array_equal(tagger.weights, np.zeros_like(tagger.weights))
    assert len(history) == 1


def test_training_is_deterministic(graph, corpus):
    a, ha = train_tagger(corpus, graph, epochs=10)
    b, hb = train_tagger(corpus, graph, epochs=10)
    assert np.array_equal(a.weights, b.weights)
    assert ha == hb


def test_missing_gold_raises(graph, records):
    with pytest.raises(MissingGold):
        tagger_nll(TokenTagger(), records["R1"], None, graph)
    with pytest.raises(MissingGold):
        train_tagger([records["R1"]], graph)


def test_empty_corpus_raises(graph):
    with pytest.raises(EmptyCorpus):
        train_tagger([], graph)

"""Evaluation metrics: worked examples with hand-computed values."""

import math

import pytest

from dentarx.errors import LengthMismatch, TooFewSamples
from dentarx.metrics import auc, bleu4, bootstrap_ci, eas, ner_f1


# -- entity-linking F1 ---------------------------------------------------------


def test_f1_perfect_match():
    gold = [("pain", False, "exam_notes"), ("fever", True, "exam_notes")]
    assert ner_f1(gold, gold) == (1.0, 1.0, 1.0)


def test_f1_no_overlap():
    assert ner_f1([("a", False, "s")], [("b", False, "s")]) == (0.0, 0.0, 0.0)


def test_f1_empty_inputs():
    assert ner_f1([], []) == (0.0, 0.0, 0.0)
    assert ner_f1([("a", False, "s")], []) == (0.0, 0.0, 0.0)


def test_f1_worked_example():
    # tp = 2 of 3 predicted, gold has 4 -> p = 2/3, r = 1/2, f1 = 4/7
    pred = [("a", False, "s"), ("b", False, "s"), ("x", False, "s")]
    gold = [("a", False, "s"), ("b", False, "s"), ("c", False, "s"), ("d", False, "s")]
    p, r, f1 = ner_f1(pred, gold)
    assert p == pytest.approx(2 / 3, abs=1e-15)
    assert r == pytest.approx(1 / 2, abs=1e-15)
    assert f1 == pytest.approx(4 / 7, abs=1e-15)


def test_f1_negation_flag_distinguishes_tuples():
    pred = [("fever", False, "exam_notes")]
    gold = [("fever", True, "exam_notes")]
    assert ner_f1(pred, gold) == (0.0, 0.0, 0.0)


def test_f1_is_multiset_aware():
    pred = [("a", False, "s"), ("a", False, "s")]
    gold = [("a", False, "s")]
    p, r, _ = ner_f1(pred, gold)
    assert (p, r) == (0.5, 1.0)


# -- corpus BLEU-4 ---------------------------------------------------------------


def test_bleu_identical_corpus_is_100():
    texts = ["amoxicillin 65 mg per kg per day", "assessment acute pulpitis"]
    assert bleu4(texts, texts) == pytest.approx(100.0, abs=1e-9)


def test_bleu_disjoint_corpus_is_0():
    assert bleu4(["alpha beta gamma"], ["delta epsilon zeta"]) == 0.0


def test_bleu_hand_computed_pair():
    # p1 = 5/6 raw; add-1 smoothed p2 = 4/6, p3 = 2/5, p4 = 1/4; BP = 1
    got = bleu4(["the cat sat on the mat"], ["the cat is on the mat"])
    expected = 100.0 * ((5 / 6) * (4 / 6) * (2 / 5) * (1 / 4)) ** 0.25
    assert got == pytest.approx(expected, abs=1e-9)


def test_bleu_brevity_penalty():
    # 4 candidate tokens vs 6 reference tokens -> BP = exp(1 - 6/4)
    got = bleu4(["the cat the mat"], ["the cat sat on the mat"])
    assert got > 0.0
    no_bp = bleu4(["the cat the mat oh my"], ["the cat sat on the mat"])
    # same idea sanity: shorter candidates are penalized multiplicatively
    assert math.isfinite(got) and math.isfinite(no_bp)


def test_bleu_length_mismatch_raises():
    with pytest.raises(LengthMismatch):
        bleu4(["a"], ["a", "b"])


def test_bleu_empty_candidates():
    assert bleu4([""], ["the cat"]) == 0.0


# -- evidence alignment ------------------------------------------------------------


def test_eas_values():
    assert eas({"a", "b"}, {"a", "b"}) == 1.0
    assert eas({"a"}, {"b"}) == 0.0
    assert eas({"a", "b", "c"}, {"b", "c", "d", "e"}) == pytest.approx(0.4, abs=1e-15)
    assert eas(set(), set()) == 1.0
    assert eas({"a"}, set()) == 0.0


# -- bootstrap -----------------------------------------------------------------------


def test_bootstrap_degenerate_on_constants():
    lo, hi = bootstrap_ci([3.5] * 20)
    assert lo == hi == 3.5


def test_bootstrap_brackets_the_mean():
    samples = [0.1, 0.4, 0.35, 0.9, 0.55, 0.2, 0.7, 0.65]
    lo, hi = bootstrap_ci(samples, resamples=2000, seed=3)
    mean = sum(samples) / len(samples)
    assert lo <= mean <= hi
    assert lo < hi


def test_bootstrap_deterministic_per_seed():
    samples = [1.0, 2.0, 4.0, 8.0]
    assert bootstrap_ci(samples, seed=5) == bootstrap_ci(samples, seed=5)
    assert bootstrap_ci(samples, seed=5) != bootstrap_ci(samples, seed=6)


def test_bootstrap_needs_two_samples():
    with pytest.raises(TooFewSamples):
        bootstrap_ci([1.0])


# -- rank AUC --------------------------------------------------------------------------


def test_auc_perfect_separation():
    assert auc([0.9, 0.8, 0.1, 0.2], [True, True, False, False]) == 1.0


def test_auc_reversed_is_zero():
    assert auc([0.1, 0.9], [True, False]) == 0.0


def test_auc_all_tied_is_half():
    assert auc([0.5, 0.5, 0.5, 0.5], [True, False, True, False]) == 0.5


def test_auc_requires_both_classes():
    with pytest.raises(ValueError):
        auc([0.5, 0.6], [True, True])

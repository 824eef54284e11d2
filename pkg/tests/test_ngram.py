import math

import numpy as np
import pytest

from oracles import naive_kn_prob, naive_kn_sentence
from tarjama.ngram import (
    ArpaError,
    lm_read_arpa,
    lm_score_sentence,
    lm_score_set,
    lm_train,
    lm_write_arpa,
)

WORDS = ["red", "green", "blue", "dog", "cat", "ran", "sat", "saw"]


def random_corpus(rng, sentences=30, vocab=6, max_len=8):
    lex = WORDS[:vocab]
    out = []
    for _ in range(sentences):
        n = int(rng.integers(1, max_len))
        out.append([lex[i] for i in rng.integers(0, vocab, size=n)])
    return out


def all_contexts(model):
    tokens = model.events() + ["<s>"]
    contexts = [()]
    for length in range(1, model.order):
        grown = []
        for ctx in contexts:
            if len(ctx) == length - 1:
                grown.extend(ctx + (t,) for t in tokens)
        contexts.extend(grown)
    return contexts


def test_bigram_worked_example():
    model = lm_train([["a", "b"]], order=2, discount=0.75)
    # p(b|a) = (1 - 0.75)/1 + 0.75 * cont(b)/2 = 0.25 + 0.75 * 0.5
    assert math.isclose(10 ** model.conditional(("a",), "b"), 0.625, rel_tol=1e-12)
    # Continuation ratio: b is extended only by a, never by the start marker.
    assert math.isclose(10 ** model.conditional((), "b"), 0.5, rel_tol=1e-12)


def test_unigram_model_is_relative_frequency_with_eos():
    model = lm_train([["a", "a", "b"]], order=1)
    # Events: a, a, b, </s>.
    assert math.isclose(10 ** model.conditional((), "a"), 0.5, rel_tol=1e-12)
    assert math.isclose(10 ** model.conditional((), "b"), 0.25, rel_tol=1e-12)
    assert math.isclose(10 ** model.conditional((), "</s>"), 0.25, rel_tol=1e-12)


def test_unseen_unk_is_floored():
    model = lm_train([["a", "b"]], order=2)
    assert model.conditional((), "<unk>") == -99.0
    assert not model.known("zzz")
    assert model.known("a")


def test_matches_recursive_oracle_on_random_corpora():
    rng = np.random.default_rng(5)
    for order in (1, 2, 3):
        corpus = random_corpus(rng, sentences=12, vocab=4)
        model = lm_train(corpus, order=order, discount=0.75)
        for ctx in all_contexts(model):
            for w in model.events():
                got = 10 ** model.conditional(ctx, w)
                want = naive_kn_prob(corpus, order, 0.75, ctx, w)
                assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-12), (
                    order, ctx, w, got, want)


def test_sentence_scores_match_oracle():
    rng = np.random.default_rng(6)
    corpus = random_corpus(rng, sentences=15, vocab=5)
    model = lm_train(corpus, order=3)
    for sent in (["red", "green"], ["dog"], ["blue", "red", "green", "dog"], []):
        got = lm_score_sentence(model, sent)
        want = naive_kn_sentence(corpus, 3, 0.75, sent)
        assert math.isclose(got, want, rel_tol=1e-9, abs_tol=1e-9)


def test_oov_score_is_backoff_chain_to_floor():
    corpus = [["red", "green"], ["red", "blue"], ["green", "blue"]]
    model = lm_train(corpus, order=3)
    # zzz maps to the unknown event, which was never seen: the score walks
    # the backoff chain and lands on the -99 sentinel.
    got = model.conditional(("<s>", "red"), "<unk>")
    want = (model.backoffs[("<s>", "red")]
            + model.backoffs[("red",)]
            + model.conditional((), "<unk>"))
    assert math.isclose(got, want, rel_tol=1e-12)
    assert model.conditional((), "<unk>") == -99.0
    assert lm_score_sentence(model, ["zzz"]) < -99.0


def test_uniform_unigram_sentence_score():
    # Four equally frequent events: each step costs log10(1/4).
    model = lm_train([["a", "b", "c"]], order=1)
    score = lm_score_sentence(model, ["a", "b", "c"])
    assert math.isclose(score, 4 * math.log10(0.25), rel_tol=1e-12)


def test_empty_sentence_scores_eos_only():
    model = lm_train([["a", "b"], ["b"]], order=2)
    score = lm_score_sentence(model, [])
    assert math.isclose(score, model.conditional(("<s>",), "</s>"), rel_tol=1e-12)


def test_distributions_normalize_exhaustively():
    rng = np.random.default_rng(7)
    for order in (1, 2, 3):
        corpus = random_corpus(rng, sentences=25, vocab=6)
        model = lm_train(corpus, order=order)
        for ctx in all_contexts(model):
            total = sum(10 ** model.conditional(ctx, w) for w in model.events())
            assert abs(total - 1.0) <= 1e-9, (order, ctx, total)


def test_history_longer_than_order_is_truncated():
    corpus = [["a", "b", "a"], ["b", "a"]]
    model = lm_train(corpus, order=2)
    long_ctx = ("b", "b", "a")
    assert model.conditional(long_ctx, "b") == model.conditional(("a",), "b")


def test_score_set_is_mean_and_orders_domains():
    rng = np.random.default_rng(8)
    in_domain = random_corpus(rng, sentences=40, vocab=4)
    model = lm_train(in_domain, order=3)
    in_scores = [lm_score_sentence(model, s) for s in in_domain[:10]]
    assert math.isclose(
        lm_score_set(model, in_domain[:10]), sum(in_scores) / 10, rel_tol=1e-12
    )
    out_domain = [["dog", "cat", "sat"], ["cat", "saw", "dog"], ["sat", "saw"]]
    assert lm_score_set(model, in_domain[:10]) > lm_score_set(model, out_domain)
    with pytest.raises(ValueError):
        lm_score_set(model, [])


def test_arpa_round_trip_is_stable_at_seven_digits(tmp_path):
    rng = np.random.default_rng(9)
    corpus = random_corpus(rng, sentences=20, vocab=5)
    model = lm_train(corpus, order=3)
    first = tmp_path / "a.arpa"
    second = tmp_path / "b.arpa"
    lm_write_arpa(model, first)
    loaded = lm_read_arpa(str(first))
    lm_write_arpa(loaded, second)
    assert first.read_bytes() == second.read_bytes()
    assert loaded.order == model.order
    # Values survive the 7-significant-digit boundary.
    for gram, p in model.probs.items():
        assert math.isclose(loaded.probs[gram], p, rel_tol=1e-6, abs_tol=1e-6)
    # Rescoring with the reloaded model is bit-identical to reloading again.
    reloaded = lm_read_arpa(str(second))
    for sent in corpus[:5]:
        assert lm_score_sentence(loaded, sent) == lm_score_sentence(reloaded, sent)


def test_arpa_parser_rejects_malformed_files(tmp_path):
    path = tmp_path / "bad.arpa"
    path.write_text("no header\n", encoding="utf-8")
    with pytest.raises(ArpaError, match="data"):
        lm_read_arpa(str(path))
    path.write_text("\\data\\\nngram 1=2\n\n\\1-grams:\n-0.3\ta\n\n\\end\\\n",
                    encoding="utf-8")
    with pytest.raises(ArpaError, match="declares 2"):
        lm_read_arpa(str(path))
    path.write_text("\\data\\\nngram 1=1\n\n\\1-grams:\n-0.3\ta\n",
                    encoding="utf-8")
    with pytest.raises(ArpaError, match="end"):
        lm_read_arpa(str(path))


def test_train_validation():
    with pytest.raises(ValueError):
        lm_train([], order=2)
    with pytest.raises(ValueError):
        lm_train([["a"]], order=0)
    with pytest.raises(ValueError):
        lm_train([["a"]], order=2, discount=1.5)

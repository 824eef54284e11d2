import numpy as np
import pytest

from oracles import naive_bpe_learn
from tarjama.bpe import (
    BpeModel,
    apply_bpe,
    learn_bpe,
    merge_word,
    segment_word,
    undo_bpe,
)


def test_merge_word_non_overlapping_left_to_right():
    assert merge_word(("a", "a", "a", "a"), ("a", "a")) == ("aa", "aa")
    assert merge_word(("a", "a", "a"), ("a", "a")) == ("aa", "a")
    assert merge_word(("x", "y"), ("a", "b")) == ("x", "y")


def test_learn_low_lower_merge_sequence():
    model = learn_bpe({"low": 5, "lower": 2}, target_vocab_size=10)
    assert model.merges == [("l", "o"), ("lo", "w"), ("e", "r"), ("low", "er")]


def test_learn_first_merge_tie_is_lexicographic():
    # (l,o) and (o,w) both occur 7 times; the smaller pair wins.
    model = learn_bpe({"low": 5, "lower": 2}, target_vocab_size=7)
    assert model.merges[0] == ("l", "o")


def test_learn_counts_every_adjacency():
    # "aaaa" holds three adjacent (a,a) occurrences, enough to merge once;
    # the resulting (aa,aa) occurs once and is below the threshold.
    model = learn_bpe({"aaaa": 1}, target_vocab_size=10)
    assert model.merges == [("a", "a")]
    assert segment_word("aaaa", model) == ("aa", "aa")


def test_learn_stops_below_pair_threshold():
    model = learn_bpe({"ab": 1}, target_vocab_size=10)
    assert model.merges == []


def test_learn_rejects_small_target():
    with pytest.raises(ValueError, match="minimum is 6"):
        learn_bpe({"low": 5, "wide": 1}, target_vocab_size=4)
    with pytest.raises(ValueError):
        learn_bpe({"low": 0}, target_vocab_size=10)


def test_apply_marks_non_final_subwords():
    model = learn_bpe({"low": 5, "lower": 2}, target_vocab_size=10)
    assert apply_bpe(["lowest"], model) == ["low@@", "e@@", "s@@", "t"]
    assert apply_bpe(["low", "lower"], model) == ["low", "lower"]
    assert apply_bpe(["cat"], model) == ["c@@", "a@@", "t"]


def test_undo_concatenates_markers():
    assert undo_bpe(["low@@", "e@@", "s@@", "t", "low"]) == ["lowest", "low"]
    assert undo_bpe([]) == []


def test_undo_dangling_marker_is_kept():
    assert undo_bpe(["lo@@"]) == ["lo"]


def test_model_save_load_round_trip(tmp_path):
    model = learn_bpe({"low": 5, "lower": 2}, target_vocab_size=10)
    path = tmp_path / "codes.bpe"
    model.save(path)
    again = BpeModel.load(str(path))
    assert again.merges == model.merges
    assert again.target_vocab_size == model.target_vocab_size
    (tmp_path / "bad.bpe").write_text("not a model\n", encoding="utf-8")
    with pytest.raises(ValueError, match="header"):
        BpeModel.load(str(tmp_path / "bad.bpe"))


def test_model_rejects_duplicate_merges():
    with pytest.raises(ValueError, match="duplicate"):
        BpeModel([("a", "b"), ("a", "b")], 10)


def random_words(rng, count, alphabet="abcdefg", max_len=8):
    words = {}
    for _ in range(count):
        n = int(rng.integers(1, max_len))
        word = "".join(alphabet[i] for i in rng.integers(0, len(alphabet), size=n))
        words[word] = words.get(word, 0) + int(rng.integers(1, 9))
    return words


def test_incremental_learner_matches_recount_oracle():
    rng = np.random.default_rng(1234)
    for _ in range(6):
        freqs = random_words(rng, int(rng.integers(20, 120)))
        target = int(rng.integers(0, 30))
        chars = {c for w in freqs for c in w}
        model = learn_bpe(freqs, len(chars) + target)
        assert model.merges == naive_bpe_learn(freqs, len(chars) + target)


def test_round_trip_lossless():
    rng = np.random.default_rng(77)
    freqs = random_words(rng, 300)
    model = learn_bpe(freqs, 40)
    lexicon = list(freqs) + ["uncommon", "zzz", "قلم"]
    for _ in range(500):
        n = int(rng.integers(1, 12))
        sent = [lexicon[i] for i in rng.integers(0, len(lexicon), size=n)]
        assert undo_bpe(apply_bpe(sent, model)) == sent

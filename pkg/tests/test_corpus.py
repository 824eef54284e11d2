import pytest

from tarjama.corpus import (
    BOS_ID,
    CorpusError,
    EOS_ID,
    PAD_ID,
    RESERVED,
    UNK_ID,
    Vocab,
    build_vocab,
    filter_by_length,
    find_duplicates,
    load_parallel,
    read_lines,
)


def write(path, data):
    path.write_bytes(data if isinstance(data, bytes) else data.encode("utf-8"))
    return str(path)


def test_reserved_ids_are_fixed():
    assert (PAD_ID, UNK_ID, BOS_ID, EOS_ID) == (0, 1, 2, 3)
    assert RESERVED == ("<pad>", "<unk>", "<s>", "</s>")


def test_read_lines_trailing_newline(tmp_path):
    assert read_lines(write(tmp_path / "a", "x\ny\n")) == ["x", "y"]
    assert read_lines(write(tmp_path / "b", "x\ny")) == ["x", "y"]
    assert read_lines(write(tmp_path / "c", "")) == []


def test_read_lines_keeps_interior_empties_and_strips_cr(tmp_path):
    assert read_lines(write(tmp_path / "a", "x\n\ny\r\n")) == ["x", "", "y"]


def test_read_lines_reports_bad_utf8_line(tmp_path):
    path = write(tmp_path / "bad", b"ok\n\xff\xfe\n")
    with pytest.raises(CorpusError, match="line 2"):
        read_lines(path)


def test_load_parallel_splits_and_aligns(tmp_path):
    src = write(tmp_path / "s", "a b\n\nc\n")
    tgt = write(tmp_path / "t", "x\ny z\nw\n")
    corpus = load_parallel(src, tgt)
    assert corpus.pairs == [(["a", "b"], ["x"]), ([], ["y", "z"]), (["c"], ["w"])]


def test_load_parallel_mismatch_names_both_counts(tmp_path):
    src = write(tmp_path / "s", "a\nb\n")
    tgt = write(tmp_path / "t", "x\n")
    with pytest.raises(CorpusError, match="2.*1"):
        load_parallel(src, tgt)


def test_filter_by_length(tmp_path):
    src = write(tmp_path / "s", "a b c\nd\n")
    tgt = write(tmp_path / "t", "x\ny z\n")
    corpus = load_parallel(src, tgt)
    kept = filter_by_length(corpus, 2)
    assert kept.pairs == [(["d"], ["y", "z"])]
    with pytest.raises(ValueError):
        filter_by_length(corpus, 0)


def test_find_duplicates_is_exact_and_ascending():
    train = [["a", "b"], ["c"]]
    evals = [["c"], ["a"], ["a", "b"], ["c"]]
    assert find_duplicates(train, evals) == [0, 2, 3]


def test_build_vocab_ranks_by_count_then_token():
    sents = [["b", "a", "b"], ["a", "c", "b"]]
    vocab = build_vocab(sents, max_size=7)
    # b:3 a:2 c:1 -> ids 4, 5, 6
    assert vocab.id("b") == 4
    assert vocab.id("a") == 5
    assert vocab.id("c") == 6


def test_build_vocab_truncates_and_ties_lexicographic():
    sents = [["z", "a"]]
    vocab = build_vocab(sents, max_size=5)
    assert vocab.id("a") == 4
    assert vocab.id("z") == UNK_ID
    with pytest.raises(ValueError):
        build_vocab(sents, max_size=4)


def test_build_vocab_skips_reserved_spellings():
    vocab = build_vocab([["<unk>", "w"]], max_size=8)
    assert vocab.id("<unk>") == UNK_ID
    assert vocab.id("w") == 4


def test_vocab_encode_decode():
    vocab = build_vocab([["a", "b"]], max_size=8)
    ids = vocab.encode(["a", "zzz", "b"], add_bos=True, add_eos=True)
    assert ids == [BOS_ID, 4, UNK_ID, 5, EOS_ID]
    assert vocab.decode(ids) == ["a", "b"]
    assert vocab.decode(ids, strip_reserved=False) == [
        "<s>", "a", "<unk>", "b", "</s>"
    ]


def test_vocab_rejects_broken_tables():
    with pytest.raises(ValueError, match="bijection"):
        Vocab({"<pad>": 0, "<unk>": 1, "<s>": 2, "</s>": 3, "a": 3})
    with pytest.raises(ValueError, match="reserved"):
        Vocab({"<pad>": 1, "<unk>": 0, "<s>": 2, "</s>": 3})


def test_vocab_save_load_round_trip(tmp_path):
    vocab = build_vocab([["a", "b", "a"]], max_size=8)
    path = tmp_path / "vocab.tsv"
    vocab.save(path)
    again = Vocab.load(str(path))
    assert again.token_to_id == vocab.token_to_id

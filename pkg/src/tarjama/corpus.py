"""Parallel corpus ingestion: loading, length filtering, deduplication,
vocabulary indexing, and the TSV vocabulary format shared by the trainer."""

from collections import Counter
from dataclasses import dataclass, field

PAD = "<pad>"
UNK = "<unk>"
BOS = "<s>"
EOS = "</s>"
RESERVED = (PAD, UNK, BOS, EOS)

PAD_ID, UNK_ID, BOS_ID, EOS_ID = 0, 1, 2, 3


class CorpusError(Exception):
    """Raised for malformed or misaligned corpus files."""


def read_lines(path):
    """Read a UTF-8 text file into a list of lines.

    Decodes line by line so errors can name the offending line.  A single
    trailing LF does not create a phantom empty line; interior empty lines
    are kept to preserve alignment.
    """
    with open(path, "rb") as fh:
        data = fh.read()
    raw = data.split(b"\n")
    if raw and raw[-1] == b"":
        raw.pop()
    lines = []
    for i, chunk in enumerate(raw):
        if chunk.endswith(b"\r"):
            chunk = chunk[:-1]
        try:
            lines.append(chunk.decode("utf-8"))
        except UnicodeDecodeError as exc:
            raise CorpusError(f"{path}: invalid UTF-8 on line {i + 1}: {exc}") from exc
    return lines


@dataclass
class ParallelCorpus:
    pairs: list  # list of (source tokens, target tokens)
    side_labels: tuple = ("source", "target")

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)


def load_parallel(src_path, tgt_path, side_labels=("source", "target")):
    """Load two line-aligned files into a ParallelCorpus of token lists.

    Tokens are whatever is separated by whitespace; empty lines become empty
    token lists rather than errors so that alignment survives.
    """
    src_lines = read_lines(src_path)
    tgt_lines = read_lines(tgt_path)
    if len(src_lines) != len(tgt_lines):
        raise CorpusError(
            "line count mismatch: %s has %d lines, %s has %d"
            % (src_path, len(src_lines), tgt_path, len(tgt_lines))
        )
    pairs = [(s.split(), t.split()) for s, t in zip(src_lines, tgt_lines)]
    return ParallelCorpus(pairs, tuple(side_labels))


def filter_by_length(corpus, max_len):
    """Keep only pairs where both sides have at most max_len tokens."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    kept = [
        (s, t) for s, t in corpus.pairs if len(s) <= max_len and len(t) <= max_len
    ]
    return ParallelCorpus(kept, corpus.side_labels)


def find_duplicates(train, eval_set):
    """Indices of eval sentences whose exact token sequence occurs in train.

    Comparison is on token sequences after whatever preprocessing both sets
    already share.  Returned indices are ascending.
    """
    seen = {tuple(seq) for seq in train}
    return [i for i, seq in enumerate(eval_set) if tuple(seq) in seen]


@dataclass
class Vocab:
    token_to_id: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.token_to_id:
            self.token_to_id = {tok: i for i, tok in enumerate(RESERVED)}
        self.id_to_token = {i: t for t, i in self.token_to_id.items()}
        if len(self.id_to_token) != len(self.token_to_id):
            raise ValueError("token_to_id is not a bijection")
        for i, tok in enumerate(RESERVED):
            if self.token_to_id.get(tok) != i:
                raise ValueError(f"reserved token {tok!r} must have id {i}")

    def __len__(self):
        return len(self.token_to_id)

    def __contains__(self, token):
        return token in self.token_to_id

    def id(self, token):
        return self.token_to_id.get(token, UNK_ID)

    def token(self, idx):
        return self.id_to_token[idx]

    def encode(self, tokens, add_bos=False, add_eos=False):
        ids = [self.id(t) for t in tokens]
        if add_bos:
            ids.insert(0, BOS_ID)
        if add_eos:
            ids.append(EOS_ID)
        return ids

    def decode(self, ids, strip_reserved=True):
        toks = [self.id_to_token[i] for i in ids]
        if strip_reserved:
            toks = [t for t in toks if t not in RESERVED]
        return toks

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for idx in sorted(self.id_to_token):
                fh.write(f"{self.id_to_token[idx]}\t{idx}\n")

    @classmethod
    def load(cls, path):
        mapping = {}
        for i, line in enumerate(read_lines(path)):
            if not line:
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorpusError(f"{path}: malformed vocab line {i + 1}: {line!r}")
            mapping[parts[0]] = int(parts[1])
        return cls(mapping)


def build_vocab(sentences, max_size):
    """Index the max_size-4 most frequent tokens after the 4 reserved ones.

    Frequency ties go to the lexicographically smaller token so id
    assignment is deterministic.  Tokens spelled like a reserved token are
    skipped; they already map to their reserved id.
    """
    if max_size <= 4:
        raise ValueError("max_size must exceed 4 to fit reserved tokens")
    counts = Counter()
    for sent in sentences:
        counts.update(sent)
    for tok in RESERVED:
        counts.pop(tok, None)
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    mapping = {tok: i for i, tok in enumerate(RESERVED)}
    for tok, _ in ranked[: max_size - 4]:
        mapping[tok] = len(mapping)
    return Vocab(mapping)

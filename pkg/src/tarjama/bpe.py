"""Byte-pair-encoding subwords over an already-tokenized corpus.

Learning iteratively merges the most frequent adjacent symbol pair across
word types (frequency-weighted, every adjacency counted); application
replays the merge list on each word and marks non-final subwords with the
``@@`` continuation suffix, which undo_bpe concatenates away.
"""

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

CONTINUATION = "@@"


@dataclass
class BpeModel:
    merges: list = field(default_factory=list)  # list of (left, right)
    target_vocab_size: int = 0

    def __post_init__(self):
        if len(set(self.merges)) != len(self.merges):
            raise ValueError("merge list contains duplicate pairs")
        self._cache = {}

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(f"#bpe v1 vocab={self.target_vocab_size}\n")
            for left, right in self.merges:
                fh.write(f"{left} {right}\n")

    @classmethod
    def load(cls, path):
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if not header.startswith("#bpe v1 vocab="):
                raise ValueError(f"{path}: bad model header {header!r}")
            target = int(header.split("=", 1)[1])
            merges = []
            for lineno, line in enumerate(fh, 2):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split(" ")
                if len(parts) != 2:
                    raise ValueError(f"{path}: malformed merge line {lineno}: {line!r}")
                merges.append((parts[0], parts[1]))
        return cls(merges, target)


def merge_word(symbols, pair):
    """Replace adjacent occurrences of pair, non-overlapping left-to-right."""
    left, right = pair
    out = []
    i = 0
    n = len(symbols)
    while i < n:
        if i + 1 < n and symbols[i] == left and symbols[i + 1] == right:
            out.append(left + right)
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def _pair_counts(vocab):
    """Frequency-weighted counts of every adjacent symbol pair, and which
    words contain each pair."""
    counts = Counter()
    where = defaultdict(set)
    for word, (symbols, freq) in vocab.items():
        for a, b in zip(symbols, symbols[1:]):
            counts[(a, b)] += freq
            where[(a, b)].add(word)
    return counts, where


def _best_pair(counts):
    # Highest count first; ties go to the lexicographically smallest pair.
    return min(counts, key=lambda p: (-counts[p], p))


def learn_bpe(word_freqs, target_vocab_size):
    """Learn a merge list from word frequencies.

    Stops once the working symbol vocabulary reaches target_vocab_size or no
    pair occurs at least twice.  Pair statistics are updated incrementally,
    touching only the words that contained the merged pair; results are
    identical to recounting from scratch each round.
    """
    if target_vocab_size < 1:
        raise ValueError("target_vocab_size must be positive")
    vocab = {}
    for word, freq in word_freqs.items():
        if freq < 1:
            raise ValueError(f"word {word!r} has count {freq}; counts must be >= 1")
        vocab[word] = (tuple(word), freq)

    def symbol_count():
        return len({s for symbols, _ in vocab.values() for s in symbols})

    initial = symbol_count()
    if target_vocab_size < initial:
        raise ValueError(
            "target_vocab_size %d is below the initial character vocabulary; "
            "minimum is %d" % (target_vocab_size, initial)
        )

    merges = []
    counts, where = _pair_counts(vocab)
    while symbol_count() < target_vocab_size and counts:
        pair = _best_pair(counts)
        if counts[pair] < 2:
            break
        merges.append(pair)
        for word in sorted(where[pair]):
            symbols, freq = vocab[word]
            for a, b in zip(symbols, symbols[1:]):
                counts[(a, b)] -= freq
                if counts[(a, b)] <= 0:
                    del counts[(a, b)]
                where[(a, b)].discard(word)
            symbols = merge_word(symbols, pair)
            vocab[word] = (symbols, freq)
            for a, b in zip(symbols, symbols[1:]):
                counts[(a, b)] += freq
                where[(a, b)].add(word)
    return BpeModel(merges, target_vocab_size)


def segment_word(word, model):
    """Subword symbols for one word: split to characters, replay merges."""
    cached = model._cache.get(word)
    if cached is not None:
        return cached
    symbols = tuple(word)
    for pair in model.merges:
        if len(symbols) == 1:
            break
        symbols = merge_word(symbols, pair)
    model._cache[word] = symbols
    return symbols


def apply_bpe(sentence, model):
    """Split every token into subwords, marking non-final pieces with @@."""
    out = []
    for word in sentence:
        symbols = segment_word(word, model)
        for i, sym in enumerate(symbols):
            out.append(sym if i == len(symbols) - 1 else sym + CONTINUATION)
    return out


def undo_bpe(sentence):
    """Concatenate continuation-marked tokens back into whole words."""
    out = []
    buffer = ""
    for tok in sentence:
        if tok.endswith(CONTINUATION):
            buffer += tok[: -len(CONTINUATION)]
        else:
            out.append(buffer + tok)
            buffer = ""
    if buffer:
        log.warning("undo_bpe: dangling continuation marker at sentence end")
        out.append(buffer)
    return out

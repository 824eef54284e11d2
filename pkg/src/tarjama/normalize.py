"""Orthographic normalization for Arabic and casing transforms for English.

The Arabic rules collapse alif variants, fold alif maqsura to ya, strip
diacritics and tatweel, and replace parentheses with bracket tokens so they
survive downstream tools.  Hamza carriers on waw/ya are deliberately left
alone.  Truecasing is the most-frequent-casing heuristic.
"""

from collections import Counter, defaultdict
from dataclasses import dataclass, field

ALIF = "ا"
ALIF_MADDA = "آ"
ALIF_HAMZA_ABOVE = "أ"
ALIF_HAMZA_BELOW = "إ"
ALIF_MAQSURA = "ى"
YA = "ي"
TATWEEL = "ـ"
SUPERSCRIPT_ALIF = "ٰ"

# Fathatan through sukun.
DIACRITICS = tuple(chr(c) for c in range(0x064B, 0x0653))


@dataclass
class NormRules:
    """Character-level rewrite table: char_map rewrites, strip_set deletes,
    token_map rewrites whole tokens after the character passes."""

    char_map: dict = field(default_factory=dict)
    strip_set: set = field(default_factory=set)
    token_map: dict = field(default_factory=dict)

    def __post_init__(self):
        self.validate()

    def validate(self):
        # Closure: a rewrite output must never contain a character that is
        # itself rewritten or stripped, otherwise a second pass would differ.
        for src, repl in self.char_map.items():
            for ch in repl:
                if ch in self.char_map or ch in self.strip_set:
                    raise ValueError(
                        "rule %r -> %r is not idempotent: output char %r is "
                        "itself mapped" % (src, repl, ch)
                    )

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for src in sorted(self.char_map):
                fh.write("%04X\t%s\n" % (ord(src), self.char_map[src]))
            for src in sorted(self.strip_set):
                fh.write("%04X\t\n" % ord(src))

    @classmethod
    def load(cls, path):
        char_map, strip_set = {}, set()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 2:
                    raise ValueError(f"{path}: malformed rule line {lineno}: {line!r}")
                src = chr(int(parts[0], 16))
                if parts[1]:
                    char_map[src] = parts[1]
                else:
                    strip_set.add(src)
        return cls(char_map, strip_set)


def default_arabic_rules(lrb="-LRB-", rrb="-RRB-"):
    char_map = {
        ALIF_MADDA: ALIF,
        ALIF_HAMZA_ABOVE: ALIF,
        ALIF_HAMZA_BELOW: ALIF,
        ALIF_MAQSURA: YA,
        "(": lrb,
        ")": rrb,
    }
    strip_set = set(DIACRITICS) | {SUPERSCRIPT_ALIF, TATWEEL}
    return NormRules(char_map, strip_set)


def normalize_arabic(text, rules=None):
    """Apply a NormRules table to text.  Total and idempotent."""
    if rules is None:
        rules = default_arabic_rules()
    out = []
    for ch in text:
        if ch in rules.strip_set:
            continue
        out.append(rules.char_map.get(ch, ch))
    result = "".join(out)
    if rules.token_map:
        result = " ".join(rules.token_map.get(t, t) for t in result.split(" "))
    return result


def lowercase(text):
    return text.lower()


@dataclass
class TruecaseModel:
    """Map lowercased word -> (most frequent surface casing, count)."""

    case_freq: dict = field(default_factory=dict)

    def surface(self, token):
        entry = self.case_freq.get(token.lower())
        return entry[0] if entry else None

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for lower in sorted(self.case_freq):
                surface, count = self.case_freq[lower]
                fh.write(f"{lower}\t{surface}\t{count}\n")

    @classmethod
    def load(cls, path):
        case_freq = {}
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(
                        f"{path}: malformed truecase line {lineno}: {line!r}"
                    )
                case_freq[parts[0]] = (parts[1], int(parts[2]))
        return cls(case_freq)


def _best_casing(tally):
    # Highest count wins; ties prefer the lowercase spelling, then the
    # lexicographically smallest, so training is deterministic.
    def key(surface):
        return (-tally[surface], surface != surface.lower(), surface)

    return min(tally, key=key)


def truecase_train(corpus):
    """Learn each word's dominant casing from a tokenized corpus.

    Sentence-medial occurrences are the evidence; sentence-initial tokens sit
    in a forced-capitalization position, so their casing only counts for
    words never seen medially.
    """
    medial = defaultdict(Counter)
    initial = defaultdict(Counter)
    for sent in corpus:
        for pos, tok in enumerate(sent):
            (initial if pos == 0 else medial)[tok.lower()][tok] += 1
    case_freq = {}
    for lower, tally in medial.items():
        best = _best_casing(tally)
        case_freq[lower] = (best, tally[best])
    for lower, tally in initial.items():
        if lower not in case_freq:
            best = _best_casing(tally)
            case_freq[lower] = (best, tally[best])
    return TruecaseModel(case_freq)


def truecase_apply(sentence, model):
    """Replace each token by its modeled casing; unknown tokens pass through.

    Every token is looked up by its lowercase projection; in particular the
    sentence-initial token sheds its forced capital before lookup.
    """
    out = []
    for tok in sentence:
        surface = model.surface(tok)
        out.append(surface if surface is not None else tok)
    return out

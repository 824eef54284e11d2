"""Punctuation tokenization, ATB-style clitic segmentation of Arabic, and
detokenization via a corpus lookup table with rule back-off.

The segmenter is a deterministic rule/lexicon approximation of the treebank
scheme: one conjunction slot, one particle slot, one pronominal enclitic
slot, definite article never split, ta marbuta restored when an enclitic
comes off.  Proclitics carry a trailing ``+`` marker, enclitics a leading
one, and segmentation is undone either by table lookup (most frequent
surface wins) or by three concatenation rules.
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field

log = logging.getLogger(__name__)

PUNCT = ".,!?;:«»\"'()[]%…،؛؟"

# Longest useful match first: acronyms (letter-period pairs), digit runs with
# internal . , : separators, then anything that is neither space nor listed
# punctuation, then single punctuation characters.
_LETTER = r"[^\W\d_]"
_TOKEN_RE = re.compile(
    "(?:%s\\.){2,}" % _LETTER
    + r"|\d+(?:[.,:]\d+)*"
    + "|[^\\s%s]+" % re.escape(PUNCT)
    + "|[%s]" % re.escape(PUNCT)
)

# Standard Arabic letter range (hamza through ya); a token qualifies for
# clitic stripping only if every character is in it.
_ARABIC_LETTERS = frozenset(chr(c) for c in range(0x0621, 0x064B))

TA = "ت"
TA_MARBUTA = "ة"
_CONJUNCTIONS = ("و", "ف")  # waw, fa
_DEFINITE_ARTICLE = "ال"  # alif lam


def simple_tokenize(text):
    """Split text into tokens, separating listed punctuation.

    Digit runs keep internal ``.``/``,``/``:`` (3.14, 1,000, 12:30) and
    letter-period acronyms (U.S.) stay whole; every other punctuation
    character from the inventory becomes its own token.  No non-whitespace
    character is ever dropped.
    """
    return _TOKEN_RE.findall(text)


@dataclass(frozen=True)
class CliticInventory:
    """Clitic lists with attachment markers plus stem constraints.

    proclitics are stored marker-side out ("و+"); enclitics are bare suffix
    strings.  min_stem_len guards against stripping short function words
    down to nothing; stem_lexicon, when given, whitelists valid stems.
    """

    proclitics: tuple = ("و+", "ف+", "ب+", "ك+", "ل+", "س+")
    enclitics: tuple = ("ه", "ها", "هم", "هن", "هما", "ك", "كم", "كن", "كما", "ي", "نا")
    min_stem_len: int = 3
    stem_lexicon: frozenset = None

    def __post_init__(self):
        for p in self.proclitics:
            if len(p) < 2 or not p.endswith("+") or "+" in p[:-1]:
                raise ValueError(f"proclitic {p!r} must be of the form X+")
        for e in self.enclitics:
            if not e or "+" in e:
                raise ValueError(f"enclitic {e!r} must be a bare suffix string")
        if self.min_stem_len < 1:
            raise ValueError("min_stem_len must be positive")

    @property
    def conjunction_slot(self):
        return tuple(p[:-1] for p in self.proclitics if p[:-1] in _CONJUNCTIONS)

    @property
    def particle_slot(self):
        return tuple(p[:-1] for p in self.proclitics if p[:-1] not in _CONJUNCTIONS)

    def enclitics_longest_first(self):
        return sorted(self.enclitics, key=lambda e: (-len(e), e))

    @classmethod
    def from_file(cls, path, **kwargs):
        """Read one clitic per line, ``X+`` for proclitics, ``+X`` for enclitics."""
        pro, enc = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.strip()
                if not line or line.startswith("#"):
                    continue
                if line.endswith("+") and len(line) > 1:
                    pro.append(line)
                elif line.startswith("+") and len(line) > 1:
                    enc.append(line[1:])
                else:
                    raise ValueError(f"{path}:{lineno}: expected X+ or +X, got {line!r}")
        return cls(proclitics=tuple(pro), enclitics=tuple(enc), **kwargs)


DEFAULT_INVENTORY = CliticInventory()


def _escape_plus(token):
    return token.replace("+", "\\+")


def _unescape_plus(token):
    return token.replace("\\+", "+")


def _is_arabic_word(token):
    return bool(token) and all(ch in _ARABIC_LETTERS for ch in token)


def atb_segment(token, inv=DEFAULT_INVENTORY):
    """Split one word into [proclitics...] stem [enclitic] with markers.

    Greedy: at most one conjunction, then at most one particle, then the
    longest matching enclitic, each strip conditional on the remainder
    keeping at least min_stem_len letters.  The definite article is never
    split (alif is not a proclitic, so ال survives any strip).  When an
    enclitic is removed and the stem ends in ta, the ta is restored to ta
    marbuta (unconditionally without a lexicon; with one, only if the
    restored stem is listed).  If a stem_lexicon is supplied and the final
    stem is not in it, the whole segmentation is abandoned.

    Tokens containing anything but Arabic letters are returned unsegmented,
    with literal ``+`` escaped as ``\\+`` so it cannot read as a marker.
    """
    if not _is_arabic_word(token):
        return [_escape_plus(token)] if token else [token]

    rest = token
    proclitics = []
    for slot in (inv.conjunction_slot, inv.particle_slot):
        for clitic in slot:
            if rest.startswith(clitic) and len(rest) - len(clitic) >= inv.min_stem_len:
                proclitics.append(clitic + "+")
                rest = rest[len(clitic):]
                break

    enclitic = None
    for cand in inv.enclitics_longest_first():
        if rest.endswith(cand) and len(rest) - len(cand) >= inv.min_stem_len:
            enclitic = cand
            rest = rest[: -len(cand)]
            break

    stem = rest
    if enclitic is not None and stem.endswith(TA):
        restored = stem[:-1] + TA_MARBUTA
        if inv.stem_lexicon is None or restored in inv.stem_lexicon:
            stem = restored

    if inv.stem_lexicon is not None and stem not in inv.stem_lexicon:
        return [token]
    if not proclitics and enclitic is None:
        return [token]
    out = list(proclitics) + [stem]
    if enclitic is not None:
        out.append("+" + enclitic)
    return out


@dataclass
class DetokTable:
    """Frequency map from segmented form (space-joined, with markers) back
    to observed surface forms."""

    entries: dict = field(default_factory=dict)  # key -> Counter of surfaces

    def add(self, key, surface, count=1):
        self.entries.setdefault(key, Counter())[surface] += count

    def lookup(self, key):
        """Best (surface, count) for a segmented form, or None.

        Most frequent surface wins; count ties go to the lexicographically
        smaller surface.
        """
        surfaces = self.entries.get(key)
        if not surfaces:
            return None
        surface = min(surfaces, key=lambda s: (-surfaces[s], s))
        return surface, surfaces[surface]

    def __len__(self):
        return len(self.entries)

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            for key in sorted(self.entries):
                for surface in sorted(self.entries[key]):
                    fh.write(f"{key}\t{surface}\t{self.entries[key][surface]}\n")

    @classmethod
    def load(cls, path, inv=None):
        """Read a table; with an inventory, re-check that each surface still
        segments to its key (violators are logged and kept, since the
        table is authoritative)."""
        table = cls()
        with open(path, encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, 1):
                line = line.rstrip("\n")
                if not line:
                    continue
                parts = line.split("\t")
                if len(parts) != 3:
                    raise ValueError(f"{path}: malformed table line {lineno}: {line!r}")
                key, surface, count = parts[0], parts[1], int(parts[2])
                if inv is not None and " ".join(atb_segment(surface, inv)) != key:
                    log.warning(
                        "detok table %s line %d: surface %r no longer segments to %r",
                        path, lineno, surface, key,
                    )
                table.add(key, surface, count)
        return table


def segment_corpus(corpus, inv=DEFAULT_INVENTORY):
    """Segment every token of every sentence; build the detok table.

    Every word contributes a table entry, identity segmentations included,
    so that seen data always round-trips by lookup.
    """
    table = DetokTable()
    segmented = []
    for sent in corpus:
        out = []
        for token in sent:
            segs = atb_segment(token, inv)
            out.extend(segs)
            table.add(" ".join(segs), token)
        segmented.append(out)
    return segmented, table


def _is_proclitic_token(token):
    return token.endswith("+") and not token.endswith("\\+") and len(token) > 1


def _is_enclitic_token(token):
    return token.startswith("+") and len(token) > 1


def _rules_join(proclitics, stem, enclitics):
    """R1 strip markers and concatenate; R2 ta marbuta back to ta before an
    enclitic; R3 lam before a definite article swallows the article's alif."""
    pros = [p[:-1] for p in proclitics]
    encs = [e[1:] for e in enclitics]
    if stem is None:
        return "".join(pros) + "".join(encs)
    if encs and stem.endswith(TA_MARBUTA):
        stem = stem[:-1] + TA
    if pros and pros[-1] == "ل" and stem.startswith(_DEFINITE_ARTICLE):
        stem = stem[1:]
    return "".join(pros) + stem + "".join(encs)


def detokenize(tokens, table=None, inv=DEFAULT_INVENTORY):
    """Rejoin marker-linked runs into surface words.

    Each maximal run proclitics+ ... stem ... +enclitics is resolved by
    table lookup first, then by the back-off rules.  Unmarked tokens pass
    through (with ``\\+`` unescaped).  Malformed runs (no stem, or a
    dangling proclitic at sentence end) are closed as-is via R1 with a
    warning.
    """
    out = []
    i = 0
    n = len(tokens)
    while i < n:
        tok = tokens[i]
        linked = _is_proclitic_token(tok) or _is_enclitic_token(tok) or (
            i + 1 < n and _is_enclitic_token(tokens[i + 1])
        )
        if not linked:
            out.append(_unescape_plus(tok))
            i += 1
            continue

        start = i
        pros = []
        while i < n and _is_proclitic_token(tokens[i]):
            pros.append(tokens[i])
            i += 1
        stem = None
        if i < n and not _is_proclitic_token(tokens[i]) and not _is_enclitic_token(tokens[i]):
            stem = tokens[i]
            i += 1
        encs = []
        while i < n and _is_enclitic_token(tokens[i]):
            encs.append(tokens[i])
            i += 1

        group = tokens[start:i]
        if table is not None:
            hit = table.lookup(" ".join(group))
            if hit is not None:
                out.append(hit[0])
                continue
        if stem is None:
            log.warning("detokenize: marker run %r has no stem", group)
        out.append(_rules_join(pros, stem, encs))
    return out

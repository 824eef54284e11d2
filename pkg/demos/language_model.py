"""Train a small interpolated Kneser-Ney trigram model, check that its
distributions are proper, round-trip it through the ARPA text format,
and show that in-domain text scores higher than out-of-domain.

Run from the repository root after installing the package:

    python3 demos/language_model.py
"""

import itertools
import math
import os
import tempfile

from tarjama.ngram import lm_read_arpa, lm_score_set, lm_train, lm_write_arpa

# A toy "weather report" domain: short, repetitive, highly predictable.
weather = [
    "rain falls in the north".split(),
    "snow falls in the north".split(),
    "rain falls in the south".split(),
    "the north is cold".split(),
    "the south is warm".split(),
    "snow is cold".split(),
    "rain is warm".split(),
    "the rain in the south is warm".split(),
]

lm = lm_train(weather, order=3)
print("order:", lm.order)
print("predictable events:", lm.events())

# Every context must yield a proper distribution: the conditional
# probabilities of all possible next events have to sum to one. Check a
# few contexts exhaustively, including one the model never saw.
for context in ([], ["the"], ["in", "the"], ["never", "seen"]):
    total = sum(10.0 ** lm.conditional(context, w) for w in lm.events())
    print("sum of p(. | %-12s) = %.12f" % (" ".join(context) or "<empty>", total))
    assert abs(total - 1.0) < 1e-9

# Serialize to ARPA, read it back, and confirm the two models agree on
# every query. The file stores log10 probabilities and backoff weights
# to 7 significant digits, so that is the precision to compare at.
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, "weather.arpa")
    lm_write_arpa(lm, path)
    with open(path, encoding="utf-8") as fh:
        head = list(itertools.islice(fh, 12))
    print("\nARPA head:")
    for line in head:
        print(" ", line.rstrip("\n"))
    reloaded = lm_read_arpa(path)

assert set(reloaded.probs) == set(lm.probs)
for gram, entry in lm.probs.items():
    assert "%.7g" % entry == "%.7g" % reloaded.probs[gram], gram
print("\nevery stored probability survives the round trip")

# Composed queries chain a rounded backoff weight with a rounded
# lower-order probability, so they agree to roughly the same precision.
for context in ([], ["rain"], ["falls", "in"]):
    for word in ("the", "north", "warm"):
        a = lm.conditional(context, word)
        b = reloaded.conditional(context, word)
        assert math.isclose(a, b, rel_tol=0, abs_tol=1e-5)
print("composed backoff queries agree as well")

# Domain sensitivity: the model should prefer text that looks like its
# training data. Scores are mean per-sentence log10 probabilities, so
# closer to zero is better.
in_domain = [
    "snow falls in the south".split(),
    "the north is warm".split(),
]
out_domain = [
    "parliament debated the budget".split(),
    "the committee approved nothing".split(),
]
score_in = lm_score_set(lm, in_domain)
score_out = lm_score_set(lm, out_domain)
print("\nmean logprob, in-domain:  %9.4f" % score_in)
print("mean logprob, out-domain: %9.4f" % score_out)
assert score_in > score_out
print("in-domain text scores higher, as it should")

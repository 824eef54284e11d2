"""Run the end-to-end experiment driver over a small grid of Arabic
preprocessing schemes and print the resulting comparison table.

Each grid point trains its own model from scratch on a toy parallel
corpus, decodes the test set, undoes its own preprocessing, and scores
against the same raw references, so the rows are directly comparable.
The corpus is built so the schemes actually differ: spelling variants
and sprinkled diacritics fragment the raw vocabulary, and the test set
contains cliticized words (attached conjunctions and prepositions) that
never occur in training as whole words but decompose into known pieces.

Takes a minute or so: three full train-decode-score cycles.

Run from the repository root after installing the package:

    python3 demos/experiment_grid.py
"""

import json
import os
import tempfile

from tarjama.corpus import Vocab
from tarjama.pipeline import PipelineArtifacts, PipelineConfig, \
    apply_preprocess, run_experiment

# Arabic-English pairs over a closed lexicon: boy/girl/teacher,
# house/school/book, went/wrote/read. The same preposition is spelled
# three ways across sentences, two verbs carry diacritics, and clitic
# forms appear on a handful of words.
train = [
    ("ذهب الولد إلى البيت", "the boy went to the house"),
    ("ذهبت البنت الى المدرسة", "the girl went to the school"),
    ("ذَهَبَ المعلم إلى المدرسة", "the teacher went to the school"),
    ("كتب الولد الكتاب", "the boy wrote the book"),
    ("كتبت البنت الكتاب", "the girl wrote the book"),
    ("قرأ المعلم الكتاب", "the teacher read the book"),
    ("قرأ الولد الكتاب في البيت", "the boy read the book in the house"),
    ("كَتَبَ المعلم الكتاب في المدرسة", "the teacher wrote the book in the school"),
    ("وذهب الولد الى المدرسة", "and the boy went to the school"),
    ("وكتبت البنت الكتاب", "and the girl wrote the book"),
    ("ذهبت البنت للبيت", "the girl went to the house"),
    ("وقرأ المعلم الكتاب", "and the teacher read the book"),
    ("ذهب الولد والمعلم إلى المدرسة", "the boy and the teacher went to the school"),
    ("قرأت البنت الكتاب في المدرسة", "the girl read the book in the school"),
    ("كتب الولد الكتاب في البيت", "the boy wrote the book in the house"),
    ("ذهب المعلم للمدرسة", "the teacher went to the school"),
    ("قرأ الولد والبنت الكتاب", "the boy and the girl read the book"),
    ("كتبت البنت الكتاب في البيت", "the girl wrote the book in the house"),
    ("وذهبت البنت إلى البيت", "and the girl went to the house"),
    ("قرأ المعلم الكتاب في المدرسة", "the teacher read the book in the school"),
    ("ذهب الولد الى المدرسة وكتب الكتاب", "the boy went to the school and wrote the book"),
    ("ذهبت البنت إلى البيت وقرأت الكتاب", "the girl went to the house and read the book"),
    ("كتب المعلم والولد الكتاب", "the teacher and the boy wrote the book"),
    ("فذهب الولد إلى البيت", "and the boy went to the house"),
]
dev = [
    ("ذهب الولد إلى المدرسة", "the boy went to the school"),
    ("كتبت البنت الكتاب في المدرسة", "the girl wrote the book in the school"),
    ("قرأ المعلم الكتاب في البيت", "the teacher read the book in the house"),
    ("وذهب المعلم الى البيت", "and the teacher went to the house"),
]
# فذهبت, فكتب, and فقرأت never occur in training as whole words; their
# pieces all do once clitics are split off.
test = [
    ("فذهبت البنت للمدرسة", "and the girl went to the school"),
    ("ذَهَبَ الولد للبيت", "the boy went to the house"),
    ("فكتب المعلم الكتاب", "and the teacher wrote the book"),
    ("قرأ الولد الكتاب في المدرسة", "the boy read the book in the school"),
    ("فقرأت البنت الكتاب في البيت", "and the girl read the book in the house"),
    ("كَتَبَ الولد الكتاب في المدرسة", "the boy wrote the book in the school"),
]

# The three schemes under comparison. Later steps presuppose earlier
# ones: normalization needs tokenized input, clitic segmentation needs
# normalized input.
grid = [
    ("raw", dict()),
    ("tok+norm", dict(arabic_tok=True, arabic_norm=True)),
    ("tok+norm+seg", dict(arabic_tok=True, arabic_norm=True, arabic_atb=True)),
]

shared = dict(
    direction="ar2en",
    english_tok=True,
    english_lower=True,
    max_train_len=24,
    src_vocab_max=200,
    tgt_vocab_max=200,
    embed_dim=24,
    enc_hidden=24,
    enc_layers=1,
    dec_hidden=24,
    attn_hidden=12,
    dropout_rate=0.3,
    l2_coeff=0.0,
    seed=23,
    epochs=200,
    batch_size=2,
    patience=200,
    beam_width=4,
    max_decode_len=20,
)


def write_corpus(root):
    paths = {}
    for name, pairs, column in (
        ("train_src", train, 0), ("train_tgt", train, 1),
        ("dev_src", dev, 0), ("dev_tgt", dev, 1),
        ("test_src", test, 0), ("test_tgt", test, 1),
    ):
        path = os.path.join(root, name + ".txt")
        with open(path, "w", encoding="utf-8") as fh:
            for pair in pairs:
                fh.write(pair[column] + "\n")
        paths[name] = path
    return paths


def test_oov_count(config):
    """Test-source tokens outside the training vocabulary, after the
    scheme's own preprocessing."""
    vocab = Vocab.load(os.path.join(config.out_dir, "vocab.src.tsv"))
    arts = PipelineArtifacts.load(config.out_dir, config)
    pairs = apply_preprocess(config, [p[0] for p in test],
                             [p[1] for p in test], arts)
    return sum(tok not in vocab for src, _ in pairs for tok in src)


with tempfile.TemporaryDirectory() as tmp:
    paths = write_corpus(tmp)
    rows = []
    print("%-14s %8s %12s %10s %6s" % ("scheme", "BLEU", "src vocab", "test OOV", "epoch"))
    for name, steps in grid:
        config = PipelineConfig(
            out_dir=os.path.join(tmp, "run-" + name),
            **shared, **paths, **steps,
        )
        report = run_experiment(config)
        with open(os.path.join(config.out_dir, "manifest.json"),
                  encoding="utf-8") as fh:
            manifest = json.load(fh)
        print("%-14s %8.2f %8d %14d %7d" % (
            name, 100.0 * report.bleu,
            len(Vocab.load(os.path.join(config.out_dir, "vocab.src.tsv"))),
            test_oov_count(config), manifest["best_epoch"],
        ))
        rows.append((name, config))

    # Show the strongest scheme's output next to the references.
    name, config = rows[-1]
    print("\nhypotheses (%s) vs references:" % name)
    with open(os.path.join(config.out_dir, "hypotheses.txt"),
              encoding="utf-8") as fh:
        for hyp, (_, ref) in zip(fh, test):
            print("  hyp: %s" % hyp.rstrip())
            print("  ref: %s\n" % ref)

print("The vocabulary and OOV columns are deterministic consequences of")
print("each scheme: merging spelling variants shrinks the vocabulary, and")
print("splitting clitics removes every unseen test word. BLEU on a corpus")
print("this small is noisy; rerun with another seed and the ranking can")
print("shift, so treat the score column as output plumbing, not evidence.")
print("Each run leaves artifacts, hypotheses, report.json, and a checksum")
print("manifest in its out_dir; the same config and seed reproduce every")
print("file byte for byte.")

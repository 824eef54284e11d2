"""Preprocessing pipeline configuration and end-to-end experiments.

A pipeline run fixes a direction and a set of per-language steps, applies
them in the order normalize, tokenize, clitic-segment, BPE, trains the
translation model, decodes, inverts the pipeline on the decoded output,
and scores. Every side artifact needed for the inversion is persisted.
"""

import hashlib
import json
import logging
import os
from dataclasses import dataclass, fields

from . import corpus as corpus_io
from .bleu import bleu
from .bpe import apply_bpe, learn_bpe, undo_bpe, BpeModel
from .corpus import build_vocab, read_lines
from .nmt import NmtConfig, beam_decode, init_model, save_model, train_nmt
from .normalize import (
    TruecaseModel,
    default_arabic_rules,
    lowercase,
    normalize_arabic,
    truecase_apply,
    truecase_train,
)
from .segment import (
    DEFAULT_INVENTORY,
    DetokTable,
    atb_segment,
    detokenize,
    segment_corpus,
    simple_tokenize,
)

log = logging.getLogger(__name__)

DIRECTIONS = ("ar2en", "en2ar")


class PipelineError(Exception):
    """Invalid configuration or missing artifact."""


class StageError(Exception):
    """A pipeline stage failed; carries the stage name and the cause."""

    def __init__(self, stage, cause):
        super().__init__("stage %s failed: %s" % (stage, cause))
        self.stage = stage
        self.cause = cause


_BOOL_WORDS = {
    "1": True, "true": True, "yes": True, "on": True,
    "0": False, "false": False, "no": False, "off": False,
}


@dataclass
class PipelineConfig:
    direction: str = "ar2en"
    arabic_tok: bool = False
    arabic_norm: bool = False
    arabic_atb: bool = False
    english_tok: bool = False
    english_lower: bool = False
    english_true: bool = False
    bpe_size: int = 0
    train_src: str = ""
    train_tgt: str = ""
    dev_src: str = ""
    dev_tgt: str = ""
    test_src: str = ""
    test_tgt: str = ""
    out_dir: str = "experiment-out"
    max_train_len: int = 100
    src_vocab_max: int = 20000
    tgt_vocab_max: int = 20000
    embed_dim: int = 32
    enc_hidden: int = 32
    enc_layers: int = 1
    dec_hidden: int = 32
    attn_hidden: int = 16
    dropout_rate: float = 0.0
    l2_coeff: float = 1e-4
    seed: int = 1
    epochs: int = 30
    batch_size: int = 8
    patience: int = 3
    beam_width: int = 12
    max_decode_len: int = 60

    def validate(self):
        if self.direction not in DIRECTIONS:
            raise PipelineError(
                "direction must be one of %s" % (DIRECTIONS,)
            )
        # Each Arabic step presupposes the previous one.
        if self.arabic_atb and not self.arabic_norm:
            raise PipelineError("arabic_atb requires arabic_norm")
        if self.arabic_norm and not self.arabic_tok:
            raise PipelineError("arabic_norm requires arabic_tok")
        if self.english_lower and self.english_true:
            raise PipelineError(
                "english_lower and english_true are mutually exclusive"
            )
        if self.bpe_size < 0:
            raise PipelineError("bpe_size must be nonnegative")

    @classmethod
    def from_file(cls, path):
        values = {}
        for i, line in enumerate(read_lines(path)):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise PipelineError(
                    "%s line %d: expected key=value, got %r" % (path, i + 1, line)
                )
            key, value = line.split("=", 1)
            values[key.strip()] = value.strip()
        return cls.from_mapping(values, source=path)

    @classmethod
    def from_mapping(cls, values, source="config"):
        kwargs = {}
        # Annotations may be type objects or strings depending on how the
        # module was compiled; compare by name.
        kinds = {
            f.name: (f.type if isinstance(f.type, str) else f.type.__name__)
            for f in fields(cls)
        }
        for key, value in values.items():
            if key not in kinds:
                raise PipelineError("%s: unknown option %r" % (source, key))
            kind = kinds[key]
            try:
                if kind == "bool":
                    kwargs[key] = _BOOL_WORDS[str(value).strip().lower()]
                elif kind == "int":
                    kwargs[key] = int(value)
                elif kind == "float":
                    kwargs[key] = float(value)
                else:
                    kwargs[key] = str(value)
            except (KeyError, ValueError):
                raise PipelineError(
                    "%s: bad value %r for option %r" % (source, value, key)
                )
        return cls(**kwargs)

    def as_dict(self):
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def arabic_side(self):
        return "src" if self.direction == "ar2en" else "tgt"

    def nmt_config(self, src_vocab_size, tgt_vocab_size):
        return NmtConfig(
            src_vocab_size=src_vocab_size,
            tgt_vocab_size=tgt_vocab_size,
            embed_dim=self.embed_dim,
            enc_hidden=self.enc_hidden,
            enc_layers=self.enc_layers,
            dec_hidden=self.dec_hidden,
            attn_hidden=self.attn_hidden,
            dropout_rate=self.dropout_rate,
            l2_coeff=self.l2_coeff,
            seed=self.seed,
        )


@dataclass
class PipelineArtifacts:
    norm_rules: object = None
    inventory: object = None
    detok_table: DetokTable = None
    truecase: TruecaseModel = None
    bpe_src: BpeModel = None
    bpe_tgt: BpeModel = None

    _FILES = {
        "detok_table": "detok.tsv",
        "truecase": "truecase.tsv",
        "bpe_src": "bpe.src",
        "bpe_tgt": "bpe.tgt",
    }

    def save(self, out_dir):
        written = []
        for attr, name in self._FILES.items():
            model = getattr(self, attr)
            if model is None:
                continue
            path = os.path.join(out_dir, name)
            model.save(path)
            written.append(path)
        return written

    @classmethod
    def load(cls, out_dir, config):
        arts = cls(norm_rules=default_arabic_rules(), inventory=DEFAULT_INVENTORY)
        for attr, name in cls._FILES.items():
            path = os.path.join(out_dir, name)
            if os.path.exists(path):
                loader = {
                    "detok_table": DetokTable.load,
                    "truecase": TruecaseModel.load,
                    "bpe_src": BpeModel.load,
                    "bpe_tgt": BpeModel.load,
                }[attr]
                setattr(arts, attr, loader(path))
        return arts


def _arabic_tokens(config, line, rules):
    if config.arabic_norm:
        line = normalize_arabic(line, rules)
    if config.arabic_tok:
        return simple_tokenize(line)
    return line.split()


def _english_tokens(config, line, truecase):
    tokens = simple_tokenize(line) if config.english_tok else line.split()
    if config.english_lower:
        tokens = [lowercase(t) for t in tokens]
    elif config.english_true and truecase is not None:
        tokens = truecase_apply(tokens, truecase)
    return tokens


def run_preprocess(config, src_lines, tgt_lines):
    """Apply the configured steps to a training corpus, learning every
    side artifact (detokenization table, truecase model, BPE models).

    Returns (pairs, artifacts) where pairs are token-list tuples.
    """
    config.validate()
    arts = PipelineArtifacts(
        norm_rules=default_arabic_rules(), inventory=DEFAULT_INVENTORY
    )
    ar_side = config.arabic_side()
    sides = {}
    for side, lines in (("src", src_lines), ("tgt", tgt_lines)):
        if side == ar_side:
            sides[side] = [_arabic_tokens(config, ln, arts.norm_rules) for ln in lines]
        else:
            sides[side] = [_english_tokens(config, ln, None) for ln in lines]
            if config.english_true:
                arts.truecase = truecase_train(sides[side])
                sides[side] = [truecase_apply(s, arts.truecase) for s in sides[side]]
    if config.arabic_atb:
        segmented, table = segment_corpus(sides[ar_side], arts.inventory)
        sides[ar_side] = segmented
        arts.detok_table = table
    if config.bpe_size > 0:
        for side in ("src", "tgt"):
            freqs = {}
            for sent in sides[side]:
                for tok in sent:
                    freqs[tok] = freqs.get(tok, 0) + 1
            model = learn_bpe(freqs, config.bpe_size)
            setattr(arts, "bpe_" + side, model)
            sides[side] = [apply_bpe(s, model) for s in sides[side]]
    return list(zip(sides["src"], sides["tgt"])), arts


def apply_preprocess(config, src_lines, tgt_lines, arts):
    """Apply already-learned artifacts to held-out corpora."""
    config.validate()
    ar_side = config.arabic_side()
    sides = {}
    for side, lines in (("src", src_lines), ("tgt", tgt_lines)):
        if side == ar_side:
            tokens = [_arabic_tokens(config, ln, arts.norm_rules) for ln in lines]
            if config.arabic_atb:
                tokens = [
                    [seg for tok in sent for seg in atb_segment(tok, arts.inventory)]
                    for sent in tokens
                ]
        else:
            tokens = [_english_tokens(config, ln, arts.truecase) for ln in lines]
        bpe_model = getattr(arts, "bpe_" + side)
        if bpe_model is not None:
            tokens = [apply_bpe(s, bpe_model) for s in tokens]
        sides[side] = tokens
    return list(zip(sides["src"], sides["tgt"]))


def run_postprocess(config, decoded, arts):
    """Invert the target-side pipeline on decoded token sequences.

    Steps run in reverse order: undo BPE, detokenize clitics, restore
    casing, join with spaces.  Returns surface strings.
    """
    config.validate()
    target_is_arabic = config.arabic_side() == "tgt"
    out = []
    for tokens in decoded:
        tokens = list(tokens)
        if config.bpe_size > 0:
            tokens = undo_bpe(tokens)
        if target_is_arabic and config.arabic_atb:
            if arts.detok_table is None:
                raise PipelineError("artifact missing: detokenization table")
            tokens = detokenize(tokens, arts.detok_table, arts.inventory)
        if not target_is_arabic and config.english_true:
            if arts.truecase is None:
                raise PipelineError("artifact missing: truecase model")
            tokens = truecase_apply(tokens, arts.truecase)
        out.append(" ".join(tokens))
    return out


def prepare_references(config, lines):
    """Tokenize reference lines the way the evaluation space requires.

    The lossy target-side steps (normalization, lowercasing) are applied
    so hypotheses and references live in the same space; truecasing is
    not, since postprocessing restores surface casing.
    """
    target_is_arabic = config.arabic_side() == "tgt"
    rules = default_arabic_rules()
    out = []
    for line in lines:
        if target_is_arabic:
            if config.arabic_norm:
                line = normalize_arabic(line, rules)
            tokens = simple_tokenize(line) if config.arabic_tok else line.split()
        else:
            tokens = simple_tokenize(line) if config.english_tok else line.split()
            if config.english_lower:
                tokens = [lowercase(t) for t in tokens]
        out.append(tokens)
    return out


def retokenize(config, surface_lines):
    """Tokenize postprocessed hypotheses for scoring."""
    target_is_arabic = config.arabic_side() == "tgt"
    use_simple = config.arabic_tok if target_is_arabic else config.english_tok
    return [
        simple_tokenize(line) if use_simple else line.split()
        for line in surface_lines
    ]


def _sha256(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()


def _write_text(path, lines):
    with open(path, "w", encoding="utf-8") as fh:
        for line in lines:
            fh.write(line + "\n")


def run_experiment(config):
    """Full run: preprocess, train, decode the test set, postprocess,
    score.  Writes artifacts, hypotheses, report, and a manifest with
    checksums into config.out_dir; a rerun with the same config and seed
    reproduces every output byte for byte.
    """
    config.validate()
    for name in ("train_src", "train_tgt", "dev_src", "dev_tgt",
                 "test_src", "test_tgt"):
        if not getattr(config, name):
            raise PipelineError("config is missing corpus path %r" % name)
    os.makedirs(config.out_dir, exist_ok=True)
    written = []

    stage = "load"
    try:
        raw = {
            name: read_lines(getattr(config, name))
            for name in ("train_src", "train_tgt", "dev_src", "dev_tgt",
                         "test_src", "test_tgt")
        }
        if len(raw["train_src"]) != len(raw["train_tgt"]):
            raise corpus_io.CorpusError("train sides have different line counts")
        if len(raw["dev_src"]) != len(raw["dev_tgt"]):
            raise corpus_io.CorpusError("dev sides have different line counts")
        if len(raw["test_src"]) != len(raw["test_tgt"]):
            raise corpus_io.CorpusError("test sides have different line counts")

        stage = "preprocess"
        train_pairs, arts = run_preprocess(
            config, raw["train_src"], raw["train_tgt"]
        )
        train_pairs = [
            (s, t) for s, t in train_pairs
            if 0 < len(s) <= config.max_train_len and len(t) <= config.max_train_len
        ]
        if not train_pairs:
            raise corpus_io.CorpusError("no training pairs left after filtering")
        dev_pairs = apply_preprocess(config, raw["dev_src"], raw["dev_tgt"], arts)
        test_pairs = apply_preprocess(config, raw["test_src"], raw["test_tgt"], arts)
        written += arts.save(config.out_dir)

        stage = "vocab"
        src_vocab = build_vocab([s for s, _ in train_pairs], config.src_vocab_max)
        tgt_vocab = build_vocab([t for _, t in train_pairs], config.tgt_vocab_max)
        src_vocab_path = os.path.join(config.out_dir, "vocab.src.tsv")
        tgt_vocab_path = os.path.join(config.out_dir, "vocab.tgt.tsv")
        src_vocab.save(src_vocab_path)
        tgt_vocab.save(tgt_vocab_path)
        written += [src_vocab_path, tgt_vocab_path]

        stage = "train"
        train_ids = [
            (src_vocab.encode(s), tgt_vocab.encode(t)) for s, t in train_pairs
        ]
        dev_ids = [
            (src_vocab.encode(s), tgt_vocab.encode(t))
            for s, t in dev_pairs
            if len(s) > 0
        ]
        nmt_config = config.nmt_config(len(src_vocab), len(tgt_vocab))
        model = init_model(nmt_config)
        model, train_record = train_nmt(
            model, train_ids, dev_ids, epochs=config.epochs,
            batch_size=config.batch_size, patience=config.patience,
        )
        ckpt_path = os.path.join(config.out_dir, "model.ckpt")
        save_model(model, ckpt_path,
                   vocab_files={"src": "vocab.src.tsv", "tgt": "vocab.tgt.tsv"})
        written.append(ckpt_path)

        stage = "decode"
        decoded = []
        for src_tokens, _ in test_pairs:
            if not src_tokens:
                decoded.append([])
                continue
            ids = beam_decode(
                model, src_vocab.encode(src_tokens),
                beam_width=config.beam_width, max_len=config.max_decode_len,
            )
            decoded.append(tgt_vocab.decode(ids))

        stage = "postprocess"
        hypotheses = run_postprocess(config, decoded, arts)
        hyp_path = os.path.join(config.out_dir, "hypotheses.txt")
        _write_text(hyp_path, hypotheses)
        written.append(hyp_path)

        stage = "evaluate"
        refs = prepare_references(config, raw["test_tgt"])
        hyp_tokens = retokenize(config, hypotheses)
        report = bleu(hyp_tokens, [[r] for r in refs])
        report_path = os.path.join(config.out_dir, "report.json")
        with open(report_path, "w", encoding="utf-8") as fh:
            fh.write(report.to_json() + "\n")
        written.append(report_path)

        stage = "manifest"
        canonical = json.dumps(config.as_dict(), sort_keys=True)
        manifest = {
            "config": config.as_dict(),
            "config_sha256": hashlib.sha256(canonical.encode("utf-8")).hexdigest(),
            "seed": config.seed,
            "best_epoch": train_record.best_epoch,
            "checksums": {
                os.path.basename(p): _sha256(p) for p in sorted(written)
            },
        }
        manifest_path = os.path.join(config.out_dir, "manifest.json")
        with open(manifest_path, "w", encoding="utf-8") as fh:
            fh.write(json.dumps(manifest, sort_keys=True, indent=2) + "\n")
    except StageError:
        raise
    except Exception as exc:
        raise StageError(stage, exc) from exc
    return report

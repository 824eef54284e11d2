"""Command-line interface to the translation pipeline.

Every subcommand reads UTF-8 text from a file argument or stdin and
writes to --output or stdout.  Exit codes: 0 success, 1 validation
problem, 2 data problem, 3 training divergence.
"""

import argparse
import logging
import os
import sys

from .bleu import bleu
from .bpe import BpeModel, apply_bpe, learn_bpe, undo_bpe
from .corpus import (
    CorpusError,
    Vocab,
    build_vocab,
    find_duplicates,
    load_parallel,
    read_lines,
)
from .ngram import (
    ArpaError,
    lm_read_arpa,
    lm_score_sentence,
    lm_score_set,
    lm_train,
    lm_write_arpa,
)
from .nmt import NmtConfig, beam_decode, init_model, load_model, save_model, train_nmt
from .nmt.model import read_header
from .normalize import (
    NormRules,
    TruecaseModel,
    default_arabic_rules,
    lowercase,
    normalize_arabic,
    truecase_apply,
    truecase_train,
)
from .pipeline import PipelineConfig, PipelineError, StageError, run_experiment
from .segment import (
    CliticInventory,
    DEFAULT_INVENTORY,
    DetokTable,
    atb_segment,
    detokenize,
    segment_corpus,
    simple_tokenize,
)

log = logging.getLogger(__name__)


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for data errors
    # here, so usage problems are remapped to the validation code.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, "%s: error: %s\n" % (self.prog, message))


def _input_lines(path):
    if path in (None, "-"):
        data = sys.stdin.buffer.read()
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
                raise CorpusError("stdin: invalid UTF-8 on line %d" % (i + 1)) from exc
        return lines
    return read_lines(path)


def _write_lines(path, lines):
    text = "".join(line + "\n" for line in lines)
    if path in (None, "-"):
        sys.stdout.buffer.write(text.encode("utf-8"))
        sys.stdout.buffer.flush()
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _inventory(args):
    kwargs = {}
    if getattr(args, "min_stem", None) is not None:
        kwargs["min_stem_len"] = args.min_stem
    if getattr(args, "lexicon", None):
        stems = {line for line in read_lines(args.lexicon) if line}
        kwargs["stem_lexicon"] = stems
    if getattr(args, "clitics", None):
        return CliticInventory.from_file(args.clitics, **kwargs)
    if kwargs:
        return CliticInventory(
            proclitics=DEFAULT_INVENTORY.proclitics,
            enclitics=DEFAULT_INVENTORY.enclitics,
            **kwargs,
        )
    return DEFAULT_INVENTORY


def _cmd_normalize(args):
    lines = _input_lines(args.input)
    if args.lower:
        out = [lowercase(line) for line in lines]
    else:
        if args.rules:
            rules = NormRules.load(args.rules)
        else:
            rules = default_arabic_rules(args.lrb, args.rrb)
        out = [normalize_arabic(line, rules) for line in lines]
    _write_lines(args.output, out)
    return 0


def _cmd_tokenize(args):
    lines = _input_lines(args.input)
    _write_lines(args.output, [" ".join(simple_tokenize(line)) for line in lines])
    return 0


def _cmd_segment(args):
    inv = _inventory(args)
    corpus = [line.split() for line in _input_lines(args.input)]
    if args.table_out:
        segmented, table = segment_corpus(corpus, inv)
        table.save(args.table_out)
    else:
        segmented = [
            [seg for tok in sent for seg in atb_segment(tok, inv)]
            for sent in corpus
        ]
    _write_lines(args.output, [" ".join(sent) for sent in segmented])
    return 0


def _cmd_detokenize(args):
    inv = _inventory(args)
    table = DetokTable.load(args.table, inv) if args.table else None
    out = []
    for line in _input_lines(args.input):
        out.append(" ".join(detokenize(line.split(), table, inv)))
    _write_lines(args.output, out)
    return 0


def _cmd_bpe_learn(args):
    freqs = {}
    for line in _input_lines(args.input):
        for tok in line.split():
            freqs[tok] = freqs.get(tok, 0) + 1
    if not freqs:
        raise CorpusError("no tokens in input")
    model = learn_bpe(freqs, args.vocab_size)
    model.save(args.output)
    return 0


def _cmd_bpe_apply(args):
    model = BpeModel.load(args.model)
    out = []
    for line in _input_lines(args.input):
        out.append(" ".join(apply_bpe(line.split(), model)))
    _write_lines(args.output, out)
    return 0


def _cmd_bpe_undo(args):
    out = []
    for line in _input_lines(args.input):
        out.append(" ".join(undo_bpe(line.split())))
    _write_lines(args.output, out)
    return 0


def _cmd_truecase_train(args):
    corpus = [line.split() for line in _input_lines(args.input)]
    truecase_train(corpus).save(args.output)
    return 0


def _cmd_truecase(args):
    model = TruecaseModel.load(args.model)
    out = []
    for line in _input_lines(args.input):
        out.append(" ".join(truecase_apply(line.split(), model)))
    _write_lines(args.output, out)
    return 0


def _cmd_lm_train(args):
    corpus = [line.split() for line in _input_lines(args.input)]
    model = lm_train(corpus, args.order, args.discount)
    lm_write_arpa(model, args.output)
    return 0


def _cmd_lm_score(args):
    model = lm_read_arpa(args.model)
    sentences = [line.split() for line in _input_lines(args.set)]
    if args.per_sentence:
        out = ["%.4f" % lm_score_sentence(model, s) for s in sentences]
        _write_lines(args.output, out)
    else:
        if not sentences:
            raise CorpusError("no sentences to score")
        _write_lines(args.output, ["%.4f" % lm_score_set(model, sentences)])
    return 0


def _cmd_vocab(args):
    corpus = [line.split() for line in _input_lines(args.input)]
    build_vocab(corpus, args.max_size).save(args.output)
    return 0


def _cmd_dedup(args):
    train = [line.split() for line in read_lines(args.train)]
    eval_lines = _input_lines(args.input)
    dup = set(find_duplicates(train, [line.split() for line in eval_lines]))
    if args.list:
        _write_lines(args.output, [str(i) for i in sorted(dup)])
    else:
        _write_lines(
            args.output,
            [line for i, line in enumerate(eval_lines) if i not in dup],
        )
    return 0


def _cmd_train(args):
    train = load_parallel(args.train_src, args.train_tgt)
    dev = load_parallel(args.dev_src, args.dev_tgt)
    src_vocab = build_vocab([s for s, _ in train.pairs], args.max_vocab)
    tgt_vocab = build_vocab([t for _, t in train.pairs], args.max_vocab)
    src_vocab_path = args.output + ".src-vocab.tsv"
    tgt_vocab_path = args.output + ".tgt-vocab.tsv"
    src_vocab.save(src_vocab_path)
    tgt_vocab.save(tgt_vocab_path)
    config = NmtConfig(
        src_vocab_size=len(src_vocab),
        tgt_vocab_size=len(tgt_vocab),
        embed_dim=args.embed_dim,
        enc_hidden=args.enc_hidden,
        enc_layers=args.enc_layers,
        dec_hidden=args.dec_hidden,
        attn_hidden=args.attn_hidden,
        dropout_rate=args.dropout,
        l2_coeff=args.l2,
        seed=args.seed if args.seed is not None else 1,
    )
    pairs = [
        (src_vocab.encode(s), tgt_vocab.encode(t))
        for s, t in train.pairs
        if len(s) > 0
    ]
    dev_pairs = [
        (src_vocab.encode(s), tgt_vocab.encode(t))
        for s, t in dev.pairs
        if len(s) > 0
    ]
    model = init_model(config)
    model, record = train_nmt(
        model, pairs, dev_pairs, epochs=args.epochs,
        batch_size=args.batch_size, patience=args.patience,
    )
    save_model(
        model, args.output,
        vocab_files={
            "src": os.path.basename(src_vocab_path),
            "tgt": os.path.basename(tgt_vocab_path),
        },
    )
    print(
        "best epoch %d, dev nll %.4f"
        % (record.best_epoch, record.dev_nll[record.best_epoch - 1])
    )
    return 0


def _load_translate_vocabs(args):
    header = read_header(args.model)
    base = os.path.dirname(os.path.abspath(args.model))
    names = header.get("vocab_files") or {}
    src_path = args.src_vocab or (
        os.path.join(base, names["src"]) if "src" in names else None
    )
    tgt_path = args.tgt_vocab or (
        os.path.join(base, names["tgt"]) if "tgt" in names else None
    )
    if not src_path or not tgt_path:
        raise PipelineError(
            "checkpoint names no vocabulary files; pass --src-vocab/--tgt-vocab"
        )
    return Vocab.load(src_path), Vocab.load(tgt_path)


def _cmd_translate(args):
    model = load_model(args.model)
    src_vocab, tgt_vocab = _load_translate_vocabs(args)
    out = []
    for line in _input_lines(args.input):
        tokens = line.split()
        if not tokens:
            out.append("")
            continue
        ids = beam_decode(
            model, src_vocab.encode(tokens),
            beam_width=args.beam, max_len=args.max_len,
        )
        out.append(" ".join(tgt_vocab.decode(ids)))
    _write_lines(args.output, out)
    return 0


def _cmd_bleu(args):
    hyp_lines = _input_lines(args.input)
    if not hyp_lines:
        raise CorpusError("hypothesis corpus is empty")
    ref_sets = []
    for path in args.ref:
        lines = read_lines(path)
        if len(lines) != len(hyp_lines):
            raise CorpusError(
                "%s has %d lines, hypotheses have %d"
                % (path, len(lines), len(hyp_lines))
            )
        ref_sets.append(lines)
    hyps = [line.split() for line in hyp_lines]
    refs = [
        [ref_sets[k][i].split() for k in range(len(ref_sets))]
        for i in range(len(hyp_lines))
    ]
    report = bleu(hyps, refs, fold_case=args.lowercase)
    if args.json:
        _write_lines(args.output, [report.to_json()])
    else:
        _write_lines(args.output, [report.summary()])
    return 0


def _cmd_experiment(args):
    if not args.config:
        raise PipelineError("experiment needs --config with a pipeline config file")
    config = PipelineConfig.from_file(args.config)
    if args.seed is not None:
        config.seed = args.seed
    if args.out_dir:
        config.out_dir = args.out_dir
    report = run_experiment(config)
    print(report.summary())
    return 0


def _add_io(sub, input_help="input file (default stdin)", output_required=False):
    sub.add_argument("input", nargs="?", default=None, help=input_help)
    if output_required:
        sub.add_argument("--output", "-o", required=True, help="output file")
    else:
        sub.add_argument("--output", "-o", default=None,
                         help="output file (default stdout)")


def build_parser():
    parser = _Parser(prog="tarjama", description=__doc__)
    parser.add_argument("--seed", type=int, default=None, help="override random seed")
    parser.add_argument("--config", default=None,
                        help="key=value file: pipeline config for `experiment`, "
                             "option defaults for other subcommands")
    parser.add_argument("--quiet", action="store_true", help="only report errors")
    commands = parser.add_subparsers(dest="command", required=True, metavar="command")

    sub = commands.add_parser("normalize", help="Arabic orthographic normalization")
    _add_io(sub)
    sub.add_argument("--rules", default=None, help="normalization rules TSV")
    sub.add_argument("--lower", action="store_true", help="lowercase instead")
    sub.add_argument("--lrb", default="-LRB-", help="left parenthesis spelling")
    sub.add_argument("--rrb", default="-RRB-", help="right parenthesis spelling")
    sub.set_defaults(func=_cmd_normalize)

    sub = commands.add_parser("tokenize", help="simple punctuation tokenization")
    _add_io(sub)
    sub.set_defaults(func=_cmd_tokenize)

    sub = commands.add_parser("segment", help="clitic segmentation of tokenized Arabic")
    _add_io(sub)
    sub.add_argument("--clitics", default=None, help="clitic inventory file")
    sub.add_argument("--min-stem", type=int, default=None, help="minimum stem length")
    sub.add_argument("--lexicon", default=None, help="stem lexicon, one stem per line")
    sub.add_argument("--table-out", default=None, help="write detokenization table here")
    sub.set_defaults(func=_cmd_segment)

    sub = commands.add_parser("detokenize", help="invert clitic segmentation")
    _add_io(sub)
    sub.add_argument("--table", default=None, help="detokenization table TSV")
    sub.add_argument("--clitics", default=None, help="clitic inventory file")
    sub.add_argument("--min-stem", type=int, default=None)
    sub.add_argument("--lexicon", default=None)
    sub.set_defaults(func=_cmd_detokenize)

    sub = commands.add_parser("bpe-learn", help="learn byte-pair merges")
    _add_io(sub, "tokenized training text (default stdin)", output_required=True)
    sub.add_argument("--vocab-size", type=int, required=True)
    sub.set_defaults(func=_cmd_bpe_learn)

    sub = commands.add_parser("bpe-apply", help="apply learned merges")
    _add_io(sub)
    sub.add_argument("--model", required=True, help="BPE model file")
    sub.set_defaults(func=_cmd_bpe_apply)

    sub = commands.add_parser("bpe-undo", help="join subword pieces")
    _add_io(sub)
    sub.set_defaults(func=_cmd_bpe_undo)

    sub = commands.add_parser("truecase-train", help="learn per-word casing")
    _add_io(sub, "tokenized training text (default stdin)", output_required=True)
    sub.set_defaults(func=_cmd_truecase_train)

    sub = commands.add_parser("truecase", help="apply a truecase model")
    _add_io(sub)
    sub.add_argument("--model", required=True)
    sub.set_defaults(func=_cmd_truecase)

    sub = commands.add_parser("lm-train", help="train a Kneser-Ney n-gram model")
    _add_io(sub, "tokenized training text (default stdin)", output_required=True)
    sub.add_argument("--order", type=int, default=5)
    sub.add_argument("--discount", type=float, default=0.75)
    sub.set_defaults(func=_cmd_lm_train)

    sub = commands.add_parser("lm-score", help="average log10 probability of a set")
    sub.add_argument("--model", required=True, help="ARPA model file")
    sub.add_argument("--set", dest="set", default=None,
                     help="sentences to score (default stdin)")
    sub.add_argument("--per-sentence", action="store_true")
    sub.add_argument("--output", "-o", default=None)
    sub.set_defaults(func=_cmd_lm_score)

    sub = commands.add_parser("vocab", help="build a frequency vocabulary")
    _add_io(sub, "tokenized text (default stdin)", output_required=True)
    sub.add_argument("--max-size", type=int, default=20000)
    sub.set_defaults(func=_cmd_vocab)

    sub = commands.add_parser("dedup", help="drop eval sentences found in training")
    _add_io(sub, "evaluation sentences (default stdin)")
    sub.add_argument("--train", required=True, help="training sentences")
    sub.add_argument("--list", action="store_true",
                     help="print duplicate indices instead of filtering")
    sub.set_defaults(func=_cmd_dedup)

    sub = commands.add_parser("train", help="train the translation model")
    sub.add_argument("--seed", type=int, default=None, help="override random seed")
    sub.add_argument("--train-src", required=True)
    sub.add_argument("--train-tgt", required=True)
    sub.add_argument("--dev-src", required=True)
    sub.add_argument("--dev-tgt", required=True)
    sub.add_argument("--output", "-o", required=True, help="checkpoint file")
    sub.add_argument("--max-vocab", type=int, default=20000)
    sub.add_argument("--embed-dim", type=int, default=32)
    sub.add_argument("--enc-hidden", type=int, default=32)
    sub.add_argument("--enc-layers", type=int, default=1)
    sub.add_argument("--dec-hidden", type=int, default=32)
    sub.add_argument("--attn-hidden", type=int, default=16)
    sub.add_argument("--dropout", type=float, default=0.0)
    sub.add_argument("--l2", type=float, default=1e-4)
    sub.add_argument("--epochs", type=int, default=30)
    sub.add_argument("--batch-size", type=int, default=8)
    sub.add_argument("--patience", type=int, default=3)
    sub.set_defaults(func=_cmd_train)

    sub = commands.add_parser("translate", help="decode with a trained model")
    _add_io(sub, "preprocessed source text (default stdin)")
    sub.add_argument("--model", required=True, help="checkpoint file")
    sub.add_argument("--src-vocab", default=None)
    sub.add_argument("--tgt-vocab", default=None)
    sub.add_argument("--beam", type=int, default=12)
    sub.add_argument("--max-len", type=int, default=60)
    sub.set_defaults(func=_cmd_translate)

    sub = commands.add_parser("bleu", help="corpus BLEU against references")
    _add_io(sub, "tokenized hypotheses (default stdin)")
    sub.add_argument("--ref", action="append", required=True,
                     help="reference file; repeat for multiple references")
    sub.add_argument("--lowercase", action="store_true", help="fold case")
    sub.add_argument("--json", action="store_true", help="print the full report")
    sub.set_defaults(func=_cmd_bleu)

    sub = commands.add_parser("experiment", help="run one pipeline configuration")
    sub.add_argument("--config", default=None, help="pipeline config file")
    sub.add_argument("--seed", type=int, default=None, help="override random seed")
    sub.add_argument("--out-dir", default=None, help="override config out_dir")
    sub.set_defaults(func=_cmd_experiment)

    return parser


def _coerce(value):
    lowered = value.strip().lower()
    if lowered in ("true", "yes", "on"):
        return True
    if lowered in ("false", "no", "off"):
        return False
    for kind in (int, float):
        try:
            return kind(value)
        except ValueError:
            pass
    return value


def _exit_code(exc):
    if isinstance(exc, (CorpusError, ArpaError, OSError, UnicodeDecodeError)):
        return 2
    if isinstance(exc, RuntimeError):
        return 3
    return 1


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    parser = build_parser()

    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default=None)
    pre_args, _ = pre.parse_known_args(argv)
    if pre_args.config:
        # Config-file values become option defaults for the subcommand;
        # explicit command-line options still win.  `experiment` reads
        # the same file itself as a pipeline config.
        try:
            lines = read_lines(pre_args.config)
        except (OSError, CorpusError) as exc:
            log.error("%s", exc)
            return 2
        defaults = {}
        for line in lines:
            line = line.strip()
            if not line or line.startswith("#") or "=" not in line:
                continue
            key, value = line.split("=", 1)
            key = key.strip()
            if key in ("config", "seed", "quiet", "command", "func", "input"):
                continue
            defaults[key] = _coerce(value.strip())
        parser.set_defaults(**defaults)

    args = parser.parse_args(argv)
    # Subparser defaults clobber top-level values, so a --config given
    # before the subcommand needs restoring for `experiment`.
    if getattr(args, "config", None) is None and pre_args.config:
        args.config = pre_args.config
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except StageError as exc:
        log.error("%s", exc)
        return _exit_code(exc.cause)
    except (PipelineError, ValueError) as exc:
        log.error("%s", exc)
        return 1
    except (CorpusError, ArpaError, OSError, UnicodeDecodeError, RuntimeError) as exc:
        log.error("%s", exc)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())

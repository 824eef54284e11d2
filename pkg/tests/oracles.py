"""Independent reimplementations used as test oracles.

Everything here recomputes a result from first principles in the most
direct way available: the subword learner recounts pair statistics from
scratch every round, the language model probabilities come straight from
the recursive definition over raw occurrence scans, BLEU is the textbook
formula, and the network forward passes are plain numpy with no tape.
Slow is fine; shared code with the package is not.
"""

import math

import numpy as np

BOS = "<s>"
EOS = "</s>"
UNK = "<unk>"


# ---------------------------------------------------------------- subwords

def _merge_once(symbols, pair):
    out = []
    i = 0
    while i < len(symbols):
        if i + 1 < len(symbols) and (symbols[i], symbols[i + 1]) == pair:
            out.append(symbols[i] + symbols[i + 1])
            i += 2
        else:
            out.append(symbols[i])
            i += 1
    return tuple(out)


def naive_bpe_learn(word_freqs, target_vocab_size):
    """Merge list learned by full recounting each iteration."""
    vocab = {word: (tuple(word), freq) for word, freq in word_freqs.items()}
    merges = []
    while True:
        symbols = {s for syms, _ in vocab.values() for s in syms}
        if len(symbols) >= target_vocab_size:
            break
        counts = {}
        for syms, freq in vocab.values():
            for i in range(len(syms) - 1):
                pair = (syms[i], syms[i + 1])
                counts[pair] = counts.get(pair, 0) + freq
        if not counts:
            break
        best = min(counts, key=lambda p: (-counts[p], p))
        if counts[best] < 2:
            break
        merges.append(best)
        vocab = {w: (_merge_once(syms, best), f) for w, (syms, f) in vocab.items()}
    return merges


# -------------------------------------------------------------------- BLEU

def naive_bleu(hypotheses, references):
    """Corpus BLEU-4 computed directly from the definition."""
    matches = [0, 0, 0, 0]
    totals = [0, 0, 0, 0]
    hyp_len = 0
    ref_len = 0
    for hyp, refs in zip(hypotheses, references):
        hyp_len += len(hyp)
        ref_len += min((len(r) for r in refs),
                       key=lambda L: (abs(L - len(hyp)), L))
        for n in range(1, 5):
            grams = [tuple(hyp[i:i + n]) for i in range(len(hyp) - n + 1)]
            for gram in set(grams):
                have = grams.count(gram)
                allowed = 0
                for ref in refs:
                    seen = sum(
                        1 for i in range(len(ref) - n + 1)
                        if tuple(ref[i:i + n]) == gram
                    )
                    allowed = max(allowed, seen)
                matches[n - 1] += min(have, allowed)
            totals[n - 1] += len(grams)
    precisions = [
        matches[n] / totals[n] if totals[n] else 0.0 for n in range(4)
    ]
    if hyp_len == 0:
        return 0.0, precisions, 0.0, 0, ref_len
    bp = min(1.0, math.exp(1.0 - ref_len / hyp_len))
    if any(p == 0.0 for p in precisions):
        score = 0.0
    else:
        score = bp * math.exp(sum(math.log(p) for p in precisions) / 4.0)
    return score, precisions, bp, hyp_len, ref_len


# ------------------------------------------------------------ language model

def naive_kn_prob(corpus, order, discount, context, word):
    """Interpolated Kneser-Ney p(word | context) from raw occurrence scans.

    Highest order uses raw counts; lower orders use the number of distinct
    non-initial left extensions, falling back to raw counts for contexts
    nothing extends to the left; the lowest level is the undiscounted
    continuation ratio; an order-1 model is plain relative frequency with
    the end marker counted as an event.
    """
    sents = [(BOS,) + tuple(s) + (EOS,) for s in corpus]
    events = sorted(
        {t for s in corpus for t in s} - {BOS, EOS, UNK, "<pad>"}
    ) + [UNK, EOS]

    def ngrams(m):
        out = []
        for s in sents:
            out.extend(s[i:i + m] for i in range(len(s) - m + 1))
        return out

    def raw(gram):
        return sum(1 for g in ngrams(len(gram)) if g == gram)

    def cont(gram):
        m = len(gram)
        heads = {
            g[0] for g in ngrams(m + 1) if g[1:] == gram and g[0] != BOS
        }
        return len(heads)

    if order == 1:
        total = sum(raw((e,)) for e in events)
        return raw((word,)) / total

    def prob(ctx, w):
        if not ctx:
            totals = [cont((e,)) for e in events]
            if sum(totals) == 0:
                totals = [raw((e,)) for e in events]
                return raw((w,)) / sum(totals)
            return cont((w,)) / sum(totals)
        if len(ctx) == order - 1:
            count = raw
        else:
            count = cont
            if sum(cont(ctx + (e,)) for e in events) == 0:
                count = raw
        per_event = [count(ctx + (e,)) for e in events]
        total = sum(per_event)
        if total == 0:
            return prob(ctx[1:], w)
        distinct = sum(1 for c in per_event if c > 0)
        top = max(count(ctx + (w,)) - discount, 0.0)
        gamma = discount * distinct / total
        return top / total + gamma * prob(ctx[1:], w)

    context = tuple(context)[-(order - 1):] if context else ()
    return prob(context, word)


def naive_kn_sentence(corpus, order, discount, sentence):
    """Total log10 sentence probability for in-vocabulary sentences.

    Every step must carry positive probability; zero-probability events are
    a serialization convention (backoff weights plus a -99 sentinel), not
    probability arithmetic, and are pinned by their own tests.
    """
    history = [BOS]
    score = 0.0
    for tok in list(sentence) + [EOS]:
        p = naive_kn_prob(corpus, order, discount, tuple(history), tok)
        assert p > 0.0, "oracle only covers positive-probability steps"
        score += math.log10(p)
        history.append(tok)
    return score


# ------------------------------------------------------------------ network

def _sigmoid(x):
    return 1.0 / (1.0 + np.exp(-x))


def gru_forward(params, prefix, x, h):
    u = _sigmoid(params[prefix + "_Wz"] @ x + params[prefix + "_Uz"] @ h
                 + params[prefix + "_bz"])
    r = _sigmoid(params[prefix + "_Wr"] @ x + params[prefix + "_Ur"] @ h
                 + params[prefix + "_br"])
    cand = np.tanh(params[prefix + "_Wh"] @ x
                   + params[prefix + "_Uh"] @ (r * h)
                   + params[prefix + "_bh"])
    return u * h + (1.0 - u) * cand


def encode_forward(params, config, src_ids):
    """Stacked bidirectional encoding; row t is [forward_t, backward_t] of
    the top layer."""
    inputs = [params["src_emb"][i] for i in src_ids]
    for layer in range(1, config.enc_layers + 1):
        fw, bw = "enc_l%d_fw" % layer, "enc_l%d_bw" % layer
        h = np.zeros(config.enc_hidden)
        forward = []
        for x in inputs:
            h = gru_forward(params, fw, x, h)
            forward.append(h)
        h = np.zeros(config.enc_hidden)
        backward = []
        for x in reversed(inputs):
            h = gru_forward(params, bw, x, h)
            backward.append(h)
        backward.reverse()
        inputs = [np.concatenate(p) for p in zip(forward, backward)]
    return np.stack(inputs)


def init_forward(params, annotations):
    return np.tanh(params["init_W"] @ annotations.mean(axis=0)
                   + params["init_b"])


def attend_forward(params, z, y_emb, annotations):
    base = params["att_Wz"] @ z + params["att_Wy"] @ y_emb + params["att_b"]
    scores = np.tanh(annotations @ params["att_Wh"].T + base) @ params["att_v"]
    shifted = np.exp(scores - scores.max())
    alpha = shifted / shifted.sum()
    return alpha @ annotations, alpha


def decode_forward(params, z, y_prev, annotations):
    y_emb = params["tgt_emb"][y_prev]
    context, alpha = attend_forward(params, z, y_emb, annotations)
    z_new = gru_forward(params, "dec", np.concatenate([y_emb, context]), z)
    logits = params["out_W"] @ z_new + params["out_b"]
    shift = logits - logits.max()
    logp = shift - np.log(np.exp(shift).sum())
    return z_new, alpha, logp


def nll_forward(params, config, src_ids, wrapped_tgt, l2_coeff=0.0):
    """Teacher-forced negative log-likelihood, plus the squared-norm
    penalty when l2_coeff is nonzero."""
    annotations = encode_forward(params, config, src_ids)
    z = init_forward(params, annotations)
    loss = 0.0
    for t in range(1, len(wrapped_tgt)):
        z, _, logp = decode_forward(params, z, wrapped_tgt[t - 1], annotations)
        loss -= logp[wrapped_tgt[t]]
    if l2_coeff > 0.0:
        loss += l2_coeff * sum(
            float((arr * arr).sum()) for arr in params.values()
        )
    return loss

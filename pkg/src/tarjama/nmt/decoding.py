"""Greedy and beam-search decoding."""

import numpy as np

from ..corpus import BOS_ID, EOS_ID
from .model import encode, decoder_init, decode_step


def greedy_decode(model, src_ids, max_len=50):
    """Argmax decoding; ties resolve to the smallest id."""
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    enc = encode(model, src_ids)
    state = decoder_init(model, enc)
    out = []
    prev = BOS_ID
    for _ in range(max_len):
        state, logp = decode_step(model, state, prev, enc)
        prev = int(np.argmax(logp))
        if prev == EOS_ID:
            break
        out.append(prev)
    return out


def beam_decode(model, src_ids, beam_width=12, max_len=50):
    """Beam search returning the best length-normalized hypothesis.

    Each step expands every live hypothesis over the whole vocabulary
    and keeps the top beam_width extensions by accumulated
    log-probability.  Extensions emitting the sentence-end id retire to
    a finished pool; the search stops once beam_width hypotheses have
    finished or max_len steps have run.  The winner maximizes
    log-probability divided by emitted token count, ties going to the
    shorter output and then to lexicographically smaller ids.
    """
    if beam_width < 1:
        raise ValueError("beam_width must be at least 1")
    if max_len < 1:
        raise ValueError("max_len must be at least 1")
    enc = encode(model, src_ids)
    # A hypothesis is (ids including the leading BOS, summed log-prob,
    # state ready to consume ids[-1]).
    live = [((BOS_ID,), 0.0, decoder_init(model, enc))]
    finished = []
    for _ in range(max_len):
        candidates = []
        for ids, score, state in live:
            new_state, logp = decode_step(model, state, ids[-1], enc)
            for w, lp in enumerate(logp):
                candidates.append((ids + (w,), score + lp, new_state))
        candidates.sort(key=lambda c: (-c[1], c[0]))
        live = []
        for ids, score, state in candidates[:beam_width]:
            if ids[-1] == EOS_ID:
                finished.append((ids, score))
            else:
                live.append((ids, score, state))
        if len(finished) >= beam_width or not live:
            break
    if finished:
        pool = [(ids[1:-1], score, len(ids) - 1) for ids, score in finished]
    else:
        pool = [(ids[1:], score, len(ids) - 1) for ids, score, _ in live]
    best = min(pool, key=lambda c: (-c[1] / c[2], len(c[0]), c[0]))
    return list(best[0])

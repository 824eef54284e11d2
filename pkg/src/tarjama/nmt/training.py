"""Minibatch training with Adadelta and early stopping on dev loss."""

import logging
from dataclasses import dataclass, field

import numpy as np

from ..corpus import BOS_ID, EOS_ID
from . import autodiff as ad
from .model import NmtModel, _wrap, _nll_graph, _dropout_masks
from .optimizer import AdadeltaState, adadelta_step

log = logging.getLogger(__name__)


@dataclass
class TrainLog:
    train_nll: list = field(default_factory=list)  # per epoch, mean per sentence
    dev_nll: list = field(default_factory=list)
    best_epoch: int = 0  # 1-based; 0 means never evaluated
    stopped_early: bool = False


def _validate_pairs(pairs, config, label):
    for k, (src, tgt) in enumerate(pairs):
        if len(src) == 0:
            raise ValueError("%s pair %d has an empty source" % (label, k))
        for i in src:
            if not 0 <= i < config.src_vocab_size:
                raise ValueError("%s pair %d: source id %d out of range" % (label, k, i))
        for i in tgt:
            if not 0 <= i < config.tgt_vocab_size:
                raise ValueError("%s pair %d: target id %d out of range" % (label, k, i))


def _wrap_target(tgt):
    return (BOS_ID,) + tuple(tgt) + (EOS_ID,)


def _corpus_nll(model, pairs):
    p = _wrap(model.params)
    total = 0.0
    for src, tgt in pairs:
        loss = _nll_graph(p, model.config, tuple(src), _wrap_target(tgt))
        total += float(loss.value)
    return total / len(pairs)


def train_nmt(model, train_pairs, dev_pairs, epochs, batch_size=16, patience=3,
              rho=0.95, epsilon=1e-6):
    """Train a copy of `model`; return (best-dev model, TrainLog).

    Pairs hold bare content id sequences; sentence markers are added
    here.  Batch gradients are summed over examples, with the L2 term
    contributed once per batch.  Training stops after `patience`
    consecutive epochs without a strict dev improvement, or at `epochs`.
    The RNG driving shuffling and dropout is seeded from the config, so
    a rerun reproduces the trajectory exactly.
    """
    if batch_size < 1:
        raise ValueError("batch_size must be at least 1")
    if epochs < 0:
        raise ValueError("epochs must be nonnegative")
    if epochs == 0:
        return model.copy(), TrainLog()
    if not train_pairs:
        raise ValueError("training corpus is empty")
    if not dev_pairs:
        raise ValueError("dev corpus is empty")
    config = model.config
    _validate_pairs(train_pairs, config, "train")
    _validate_pairs(dev_pairs, config, "dev")

    current = model.copy()
    rng = np.random.default_rng(config.seed)
    state = AdadeltaState(current.params)
    record = TrainLog()
    best_nll = None
    best_params = None
    bad_epochs = 0
    for epoch in range(1, epochs + 1):
        order = rng.permutation(len(train_pairs))
        epoch_nll = 0.0
        for start in range(0, len(order), batch_size):
            batch = [train_pairs[i] for i in order[start:start + batch_size]]
            grads = {name: np.zeros_like(arr) for name, arr in current.params.items()}
            p = _wrap(current.params)
            for src, tgt in batch:
                tgt_ids = _wrap_target(tgt)
                masks = None
                if config.dropout_rate > 0.0:
                    masks = _dropout_masks(config, len(tgt_ids) - 1, rng)
                loss = _nll_graph(p, config, tuple(src), tgt_ids, masks)
                if not np.isfinite(loss.value):
                    raise RuntimeError("training diverged: non-finite loss")
                epoch_nll += float(loss.value)
                loss.backward()
                for name, var in p.items():
                    if var.grad is not None:
                        grads[name] += var.grad
                        var.grad = None
            if config.l2_coeff > 0.0:
                for name, arr in current.params.items():
                    grads[name] += 2.0 * config.l2_coeff * arr
            adadelta_step(current.params, grads, state, rho, epsilon)
        record.train_nll.append(epoch_nll / len(train_pairs))
        dev = _corpus_nll(current, dev_pairs)
        record.dev_nll.append(dev)
        log.info("epoch %d: train nll %.4f, dev nll %.4f",
                 epoch, record.train_nll[-1], dev)
        if best_nll is None or dev < best_nll:
            best_nll = dev
            best_params = {k: v.copy() for k, v in current.params.items()}
            record.best_epoch = epoch
            bad_epochs = 0
        else:
            bad_epochs += 1
            if bad_epochs >= patience:
                record.stopped_early = True
                break
    return NmtModel(config, best_params), record

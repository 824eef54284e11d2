"""Attention encoder-decoder: parameters, forward passes, checkpoints.

Encoder is a stack of bidirectional GRU layers; each source position's
annotation concatenates the top layer's forward and backward states.
The decoder is a single GRU whose input concatenates the previous
target embedding with an attention-weighted context vector, followed by
an affine projection and log-softmax over the target vocabulary.
"""

import json
import struct
from dataclasses import dataclass, field, asdict

import numpy as np

from ..corpus import BOS_ID, EOS_ID
from . import autodiff as ad

_MAGIC = "nmt-checkpoint"


@dataclass
class NmtConfig:
    src_vocab_size: int
    tgt_vocab_size: int
    embed_dim: int = 32
    enc_hidden: int = 64
    enc_layers: int = 2
    dec_hidden: int = 64
    attn_hidden: int = 32
    dropout_rate: float = 0.5
    l2_coeff: float = 1e-4
    seed: int = 1

    def __post_init__(self):
        for name in (
            "embed_dim",
            "enc_hidden",
            "enc_layers",
            "dec_hidden",
            "attn_hidden",
        ):
            if getattr(self, name) < 1:
                raise ValueError("%s must be at least 1" % name)
        # Ids 0..3 are reserved, so every vocabulary has at least 4 rows.
        if self.src_vocab_size < 4 or self.tgt_vocab_size < 4:
            raise ValueError("vocab sizes must be at least 4")
        if not 0.0 <= self.dropout_rate < 1.0:
            raise ValueError("dropout_rate must be in [0, 1)")
        if self.l2_coeff < 0.0:
            raise ValueError("l2_coeff must be nonnegative")


def param_shapes(config):
    """Name -> shape for every parameter tensor, in a fixed order."""
    e = config.embed_dim
    h = config.enc_hidden
    d = config.dec_hidden
    a = config.attn_hidden
    ann = 2 * h
    shapes = {
        "src_emb": (config.src_vocab_size, e),
        "tgt_emb": (config.tgt_vocab_size, e),
    }
    for layer in range(1, config.enc_layers + 1):
        in_dim = e if layer == 1 else ann
        for direction in ("fw", "bw"):
            prefix = "enc_l%d_%s" % (layer, direction)
            for gate in ("z", "r", "h"):
                shapes["%s_W%s" % (prefix, gate)] = (h, in_dim)
                shapes["%s_U%s" % (prefix, gate)] = (h, h)
                shapes["%s_b%s" % (prefix, gate)] = (h,)
    shapes["init_W"] = (d, ann)
    shapes["init_b"] = (d,)
    shapes["att_Wz"] = (a, d)
    shapes["att_Wy"] = (a, e)
    shapes["att_Wh"] = (a, ann)
    shapes["att_b"] = (a,)
    shapes["att_v"] = (a,)
    dec_in = e + ann
    for gate in ("z", "r", "h"):
        shapes["dec_W%s" % gate] = (d, dec_in)
        shapes["dec_U%s" % gate] = (d, d)
        shapes["dec_b%s" % gate] = (d,)
    shapes["out_W"] = (config.tgt_vocab_size, d)
    shapes["out_b"] = (config.tgt_vocab_size,)
    return shapes


@dataclass
class NmtModel:
    config: NmtConfig
    params: dict = field(repr=False)

    def __post_init__(self):
        expected = param_shapes(self.config)
        if set(self.params) != set(expected):
            missing = sorted(set(expected) - set(self.params))
            extra = sorted(set(self.params) - set(expected))
            raise ValueError(
                "parameter set mismatch: missing %s, unexpected %s"
                % (missing, extra)
            )
        for name, shape in expected.items():
            arr = self.params[name]
            if arr.shape != shape:
                raise ValueError(
                    "parameter %s has shape %s, expected %s"
                    % (name, arr.shape, shape)
                )
            if not np.isfinite(arr).all():
                raise ValueError("parameter %s contains non-finite values" % name)

    def copy(self):
        return NmtModel(self.config, {k: v.copy() for k, v in self.params.items()})


def init_model(config):
    """Seeded uniform(-0.08, 0.08) weights, zero biases."""
    rng = np.random.default_rng(config.seed)
    params = {}
    for name, shape in param_shapes(config).items():
        if len(shape) == 1:
            params[name] = np.zeros(shape)
        else:
            params[name] = rng.uniform(-0.08, 0.08, shape)
    return NmtModel(config, params)


@dataclass
class EncoderStates:
    annotations: np.ndarray  # (T, 2*enc_hidden)
    mask: np.ndarray  # (T,), 1.0 at real positions


@dataclass
class DecoderState:
    z: np.ndarray  # (dec_hidden,)
    alpha: np.ndarray  # attention weights from the step that produced z


def _wrap(params):
    return {name: ad.Var(arr) for name, arr in params.items()}


def _gru_step(p, prefix, x, h):
    # h' = u*h + (1-u)*htilde, so all-zero parameters keep a zero state.
    u = ad.sigmoid(p[prefix + "_Wz"] @ x + p[prefix + "_Uz"] @ h + p[prefix + "_bz"])
    r = ad.sigmoid(p[prefix + "_Wr"] @ x + p[prefix + "_Ur"] @ h + p[prefix + "_br"])
    cand = ad.tanh(p[prefix + "_Wh"] @ x + p[prefix + "_Uh"] @ (r * h) + p[prefix + "_bh"])
    return u * h + ad.one_minus(u) * cand


def _encode_graph(p, config, src_ids):
    inputs = [ad.row(p["src_emb"], i) for i in src_ids]
    n = len(inputs)
    zero = ad.Var(np.zeros(config.enc_hidden))
    for layer in range(1, config.enc_layers + 1):
        fw_prefix = "enc_l%d_fw" % layer
        bw_prefix = "enc_l%d_bw" % layer
        state = zero
        forward = []
        for t in range(n):
            state = _gru_step(p, fw_prefix, inputs[t], state)
            forward.append(state)
        state = zero
        backward = [None] * n
        for t in reversed(range(n)):
            state = _gru_step(p, bw_prefix, inputs[t], state)
            backward[t] = state
        inputs = [ad.concat(forward[t], backward[t]) for t in range(n)]
    return ad.stack_rows(inputs)


def _init_graph(p, annotations):
    return ad.tanh(p["init_W"] @ ad.mean_rows(annotations) + p["init_b"])


def _attend_graph(p, z, y_emb, annotations, mask):
    base = p["att_Wz"] @ z + p["att_Wy"] @ y_emb + p["att_b"]
    hidden = ad.tanh(annotations @ ad.transpose(p["att_Wh"]) + base)
    scores = hidden @ p["att_v"]
    alpha = ad.masked_softmax(scores, mask)
    context = alpha @ annotations
    return context, alpha


def _decode_graph(p, z, y_prev, annotations, mask, drop_mask=None):
    y_emb = ad.row(p["tgt_emb"], y_prev)
    context, alpha = _attend_graph(p, z, y_emb, annotations, mask)
    z_new = _gru_step(p, "dec", ad.concat(y_emb, context), z)
    out_in = z_new
    if drop_mask is not None:
        out_in = out_in * ad.Var(drop_mask)
    logits = p["out_W"] @ out_in + p["out_b"]
    return z_new, alpha, ad.log_softmax(logits)


def _check_ids(ids, vocab_size, side):
    if len(ids) == 0:
        raise ValueError("%s sequence is empty" % side)
    for i in ids:
        if not 0 <= i < vocab_size:
            raise ValueError("%s id %d out of range [0, %d)" % (side, i, vocab_size))


def encode(model, src_ids, mask=None):
    """Annotation matrix for a source id sequence."""
    _check_ids(src_ids, model.config.src_vocab_size, "source")
    if mask is None:
        mask = np.ones(len(src_ids))
    else:
        mask = np.asarray(mask, dtype=np.float64)
        if mask.shape != (len(src_ids),):
            raise ValueError("mask length does not match source length")
        if mask.sum() == 0:
            raise ValueError("mask leaves no live source position")
    annotations = _encode_graph(_wrap(model.params), model.config, src_ids)
    return EncoderStates(annotations.value, mask)


def decoder_init(model, enc):
    """Initial decoder state: tanh projection of the mean annotation."""
    z = _init_graph(_wrap(model.params), ad.Var(enc.annotations))
    return DecoderState(z.value, enc.mask / enc.mask.sum())


def attend(model, state, y_emb, enc):
    """Context vector and attention weights for one query."""
    context, alpha = _attend_graph(
        _wrap(model.params),
        ad.Var(state.z),
        ad.Var(y_emb),
        ad.Var(enc.annotations),
        enc.mask,
    )
    return context.value, alpha.value


def decode_step(model, state, y_prev, enc):
    """Advance the decoder by one target position.

    Returns the new state and the full log-probability vector over the
    target vocabulary.
    """
    if not 0 <= y_prev < model.config.tgt_vocab_size:
        raise ValueError("target id %d out of range" % y_prev)
    z_new, alpha, logp = _decode_graph(
        _wrap(model.params),
        ad.Var(state.z),
        y_prev,
        ad.Var(enc.annotations),
        enc.mask,
    )
    return DecoderState(z_new.value, alpha.value), logp.value


def _check_target(tgt_ids):
    if len(tgt_ids) < 2 or tgt_ids[0] != BOS_ID or tgt_ids[-1] != EOS_ID:
        raise ValueError(
            "target must be wrapped in sentence markers and non-empty"
        )


def _nll_graph(p, config, src_ids, tgt_ids, drop_masks=None):
    annotations = _encode_graph(p, config, src_ids)
    mask = np.ones(len(src_ids))
    z = _init_graph(p, annotations)
    loss = None
    for t in range(1, len(tgt_ids)):
        drop = drop_masks[t - 1] if drop_masks is not None else None
        z, _, logp = _decode_graph(p, z, tgt_ids[t - 1], annotations, mask, drop)
        term = -ad.pick(logp, tgt_ids[t])
        loss = term if loss is None else loss + term
    return loss


def _dropout_masks(config, steps, rng):
    keep = 1.0 - config.dropout_rate
    # Inverted scaling: expected activation is unchanged.
    return [
        (rng.random(config.dec_hidden) >= config.dropout_rate) / keep
        for _ in range(steps)
    ]


def sequence_loss(model, src_ids, tgt_ids, dropout=False, rng=None):
    """Teacher-forced negative log-likelihood plus the L2 penalty.

    Returns (loss, grads) where grads maps every parameter name to the
    gradient of the loss with respect to that tensor.
    """
    config = model.config
    _check_ids(src_ids, config.src_vocab_size, "source")
    _check_target(tgt_ids)
    _check_ids(tgt_ids, config.tgt_vocab_size, "target")
    drop_masks = None
    if dropout and config.dropout_rate > 0.0:
        if rng is None:
            raise ValueError("dropout needs an explicit rng")
        drop_masks = _dropout_masks(config, len(tgt_ids) - 1, rng)
    p = _wrap(model.params)
    loss = _nll_graph(p, config, src_ids, tgt_ids, drop_masks)
    if config.l2_coeff > 0.0:
        penalty = None
        for var in p.values():
            term = ad.sumsq(var)
            penalty = term if penalty is None else penalty + term
        loss = loss + ad.Var(config.l2_coeff) * penalty
    loss.backward()
    grads = {
        name: (var.grad if var.grad is not None else np.zeros_like(var.value))
        for name, var in p.items()
    }
    return float(loss.value), grads


def save_model(model, path, vocab_files=None):
    """Single-file checkpoint: length-prefixed JSON header, then raw
    little-endian float64 tensor data."""
    tensors = []
    blobs = []
    offset = 0
    for name in param_shapes(model.config):
        arr = np.ascontiguousarray(model.params[name], dtype="<f8")
        tensors.append({"name": name, "shape": list(arr.shape), "offset": offset})
        blobs.append(arr.tobytes())
        offset += len(blobs[-1])
    header = {
        "format": _MAGIC,
        "config": asdict(model.config),
        "vocab_files": vocab_files,
        "tensors": tensors,
    }
    payload = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as handle:
        handle.write(struct.pack("<Q", len(payload)))
        handle.write(payload)
        for blob in blobs:
            handle.write(blob)


def read_header(path):
    with open(path, "rb") as handle:
        prefix = handle.read(8)
        if len(prefix) < 8:
            raise ValueError("%s: truncated checkpoint" % path)
        (length,) = struct.unpack("<Q", prefix)
        payload = handle.read(length)
    if len(payload) < length:
        raise ValueError("%s: truncated checkpoint header" % path)
    try:
        header = json.loads(payload.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise ValueError("%s: checkpoint header is not valid JSON" % path)
    if not isinstance(header, dict) or header.get("format") != _MAGIC:
        raise ValueError("%s: not a model checkpoint" % path)
    return header


def load_model(path):
    header = read_header(path)
    config = NmtConfig(**header["config"])
    expected = param_shapes(config)
    with open(path, "rb") as handle:
        (length,) = struct.unpack("<Q", handle.read(8))
        handle.seek(8 + length)
        data = handle.read()
    params = {}
    for entry in header["tensors"]:
        name = entry["name"]
        shape = tuple(entry["shape"])
        if name not in expected:
            raise ValueError("%s: unknown tensor %s" % (path, name))
        if shape != expected[name]:
            raise ValueError(
                "%s: tensor %s has shape %s, config requires %s"
                % (path, name, shape, expected[name])
            )
        count = int(np.prod(shape)) if shape else 1
        start = entry["offset"]
        end = start + 8 * count
        if end > len(data):
            raise ValueError("%s: tensor %s runs past end of file" % (path, name))
        arr = np.frombuffer(data[start:end], dtype="<f8").reshape(shape)
        params[name] = arr.astype(np.float64)
    return NmtModel(config, params)

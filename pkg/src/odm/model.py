"""Text-conditioned destylization network.

Pipeline: a small residual conv encoder turns the image into a stride-8 grid,
a transformer encodes each text prompt into one vector, single-head
cross-attention lets every grid position pull from the prompts, and an
FPN-style decoder upsamples the fused grid back to a full-resolution logit map.

Parameters live in a flat ``name -> Array`` dict so gradient checks and
checkpoints can walk them uniformly.
"""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from . import nd
from .nd import Array, ContractError, ShapeError

log = logging.getLogger(__name__)

PAD_ID = 0
UNK_ID = 96
MAX_INSTANCES = 32
MAX_LEN = 25
MASK_BIAS = -1e9
HEAD_PRIOR_LOGIT = -2.0


# -- tokens ---------------------------------------------------------------------------

class Charset:
    """PAD=0, printable ASCII 0x20..0x7E -> 1..95 in code order, UNK=96."""

    size = 97

    def encode_char(self, ch: str) -> int:
        o = ord(ch)
        return o - 0x20 + 1 if 0x20 <= o <= 0x7E else UNK_ID

    def encode(self, text: str) -> list[int]:
        return [self.encode_char(c) for c in text]

    def decode(self, ids: Sequence[int]) -> str:
        out = []
        for i in ids:
            i = int(i)
            if i == PAD_ID:
                continue
            out.append("�" if i == UNK_ID else chr(i - 1 + 0x20))
        return "".join(out)

    def __contains__(self, ch: str) -> bool:
        return self.encode_char(ch) != UNK_ID


CHARSET = Charset()


@dataclass
class TokenBatch:
    ids: np.ndarray   # (B, M, L) int64
    mask: np.ndarray  # (B, M) bool, instance present

    @property
    def batch_size(self) -> int:
        return self.ids.shape[0]

    def texts(self, b: int) -> list[str]:
        return [CHARSET.decode(self.ids[b, m]) for m in np.flatnonzero(self.mask[b])]


def tokenize(texts: Sequence[Sequence[str]] | Sequence[str], charset: Charset = CHARSET,
             max_instances: int = MAX_INSTANCES, max_len: int = MAX_LEN) -> TokenBatch:
    """Encode per-image prompt lists into a padded (B, M, L) grid.

    A flat list of strings is treated as a single image. Strings longer than
    ``max_len`` are cut; images with more than ``max_instances`` prompts keep
    the first ones and log a warning.
    """
    if texts and isinstance(texts[0], str):
        texts = [texts]
    ids = np.zeros((len(texts), max_instances, max_len), dtype=np.int64)
    mask = np.zeros((len(texts), max_instances), dtype=bool)
    for b, row in enumerate(texts):
        if len(row) > max_instances:
            log.warning("image %d: %d prompts truncated to %d", b, len(row), max_instances)
        for m, text in enumerate(list(row)[:max_instances]):
            enc = charset.encode(text)[:max_len]
            ids[b, m, :len(enc)] = enc
            mask[b, m] = True
    return TokenBatch(ids, mask)


# -- configuration -----------------------------------------------------------------------

@dataclass
class OdmConfig:
    image_size: int = 128
    embed_dim: int = 64
    stem_channels: int = 8
    stem_layers: int = 1
    stage_channels: tuple[int, ...] = (16, 32, 64)
    text_depth: int = 2
    text_heads: int = 4
    attn_heads: int = 1
    decoder_channels: int = 16
    max_instances: int = MAX_INSTANCES
    max_len: int = MAX_LEN
    vocab: int = Charset.size

    def __post_init__(self):
        self.stage_channels = tuple(self.stage_channels)
        if self.image_size % self.stride:
            raise ValueError(f"image_size {self.image_size} not divisible by stride {self.stride}")
        if self.embed_dim % self.text_heads:
            raise ValueError("embed_dim must be divisible by text_heads")
        if self.stage_channels[-1] % self.attn_heads:
            raise ValueError("the last stage width must be divisible by attn_heads")

    @property
    def stride(self) -> int:
        return 2 ** len(self.stage_channels)

    @property
    def grid(self) -> int:
        return self.image_size // self.stride

    def to_dict(self) -> dict:
        d = asdict(self)
        d["stage_channels"] = list(self.stage_channels)
        return d


@dataclass
class ModelOutput:
    logits: Array                 # (B, 1, H, W)
    img_embed: Array              # (B, d)
    txt_embed: Array | None       # (B, d); zero rows where no prompt is present
    attn: np.ndarray | None       # (B, M, H'*W'), each present row sums to 1
    inst_embed: Array | None = None
    weights: np.ndarray | None = None  # (B, H'*W', M) raw softmax weights, null key removed
    mask: np.ndarray | None = None
    extras: dict = field(default_factory=dict)


# -- cross-attention --------------------------------------------------------------------

def cross_attend(img_feats: Array, keys: Array, mask: np.ndarray, values: Array | None = None,
                 w_q: Array | None = None, q_norm: tuple[Array, Array] | None = None,
                 heads: int = 1) -> tuple[Array, np.ndarray, np.ndarray]:
    """Image positions attend over text instances.

    ``img_feats`` (B, c, H, W) supplies the queries (optionally layer-normed
    with ``q_norm = (gain, bias)`` and projected by ``w_q``),
    ``keys``/``values`` (B, M, c) the instances. Channels split into ``heads``
    independent heads. Masked instances get a large negative score. Returns
    the residual sum ``img + attention @ values`` in image layout, the
    per-instance heatmaps (B, M, H*W) normalised over positions, and the raw
    (B, H*W, M) weights; both are averaged over heads.
    """
    b, c, h, w = img_feats.shape
    values = keys if values is None else values
    if keys.ndim != 3 or keys.shape[0] != b or keys.shape[2] != c or values.shape != keys.shape:
        raise ShapeError(f"cross_attend: image {img_feats.shape} vs keys {keys.shape} / values {values.shape}")
    if heads < 1 or c % heads:
        raise ContractError(f"cross_attend: {c} channels do not split into {heads} heads")
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != keys.shape[:2]:
        raise ShapeError(f"cross_attend: mask {mask.shape} vs keys {keys.shape[:2]}")
    if not mask.any(axis=1).all():
        raise ContractError("cross_attend: every batch element needs at least one unmasked key")

    q_len, m, dh = h * w, keys.shape[1], c // heads
    seq = nd.transpose(nd.reshape(img_feats, (b, c, q_len)), (0, 2, 1))  # (B, Q, c)
    q = seq if q_norm is None else nd.layer_norm(seq, *q_norm)
    q = q if w_q is None else q @ w_q

    def split(t, n):                                                     # (B, n, c) -> (B, heads, n, dh)
        return nd.transpose(nd.reshape(t, (b, n, heads, dh)), (0, 2, 1, 3))

    scores = (split(q, q_len) @ nd.swapaxes(split(keys, m), 2, 3)) * (1.0 / math.sqrt(dh))
    bias = np.where(mask, 0.0, MASK_BIAS).astype(scores.dtype)[:, None, None, :]
    scores = scores + Array(np.broadcast_to(bias, scores.shape).copy())
    weights = nd.softmax(scores)                                         # (B, heads, Q, M)
    out = nd.reshape(nd.transpose(weights @ split(values, m), (0, 1, 3, 2)), (b, c, h, w))
    fused = img_feats + out

    wmean = weights.data.mean(axis=1)                                    # (B, Q, M)
    # heatmaps go through log space in float64: a confident model drives whole
    # columns below the float32 range, which would leave a present instance blank
    logits = scores.data.astype(np.float64)
    logw = logits - logsumexp(logits, axis=3, keepdims=True)
    logh = (logsumexp(logw, axis=1) - math.log(heads)).transpose(0, 2, 1)  # (B, M, Q)
    heat = np.exp(logh - logsumexp(logh, axis=2, keepdims=True))
    attn = np.where(mask[:, :, None], heat, 0.0)
    return fused, attn, wmean


# -- the network ------------------------------------------------------------------------

class OdmModel:
    def __init__(self, config: OdmConfig | None = None, seed: int = 0, dtype=np.float32):
        self.config = config or OdmConfig()
        self.params: dict[str, Array] = {}
        self._init(np.random.default_rng(seed), dtype)

    # parameters -----------------------------------------------------------------------
    def _add(self, name, value, dtype):
        self.params[name] = Array(np.asarray(value, dtype=dtype), requires_grad=True, name=name)

    def _conv(self, rng, name, cin, cout, k, dtype, scale=1.0):
        std = scale * math.sqrt(2.0 / (cin * k * k))
        self._add(name + ".w", rng.normal(0, std, (cout, cin, k, k)), dtype)
        self._add(name + ".b", np.zeros(cout), dtype)

    def _linear(self, rng, name, din, dout, dtype, bias=True, scale=1.0):
        self._add(name + ".w", rng.normal(0, scale / math.sqrt(din), (din, dout)), dtype)
        if bias:
            self._add(name + ".b", np.zeros(dout), dtype)

    def _init(self, rng, dtype):
        cfg = self.config
        d, c3 = cfg.embed_dim, cfg.stage_channels[-1]
        self._conv(rng, "enc.stem", 3, cfg.stem_channels, 3, dtype)
        for j in range(1, cfg.stem_layers):
            self._conv(rng, f"enc.stem{j}", cfg.stem_channels, cfg.stem_channels, 3, dtype)
        cin = cfg.stem_channels
        for i, cout in enumerate(cfg.stage_channels, start=1):
            self._conv(rng, f"enc.s{i}.down", cin, cout, 3, dtype)
            self._conv(rng, f"enc.s{i}.res1", cout, cout, 3, dtype)
            self._conv(rng, f"enc.s{i}.res2", cout, cout, 3, dtype, scale=0.1)
            cin = cout

        self._add("txt.tok", rng.normal(0, 0.5, (cfg.vocab, d)), dtype)
        self._add("txt.pos", rng.normal(0, 0.1, (cfg.max_len, d)), dtype)
        for i in range(cfg.text_depth):
            p = f"txt.l{i}"
            self._add(p + ".ln1.g", np.ones(d), dtype)
            self._add(p + ".ln1.b", np.zeros(d), dtype)
            for nm in ("q", "k", "v", "o"):
                self._linear(rng, f"{p}.{nm}", d, d, dtype)
            self._add(p + ".ln2.g", np.ones(d), dtype)
            self._add(p + ".ln2.b", np.zeros(d), dtype)
            self._linear(rng, p + ".mlp1", d, 2 * d, dtype, scale=math.sqrt(2))
            self._linear(rng, p + ".mlp2", 2 * d, d, dtype)
        self._add("txt.ln.g", np.ones(d), dtype)
        self._add("txt.ln.b", np.zeros(d), dtype)
        self._linear(rng, "txt.proj", d, d, dtype)

        # queries are layer-normed so raw conv activations cannot saturate the softmax
        self._add("xattn.qln.g", np.ones(c3), dtype)
        self._add("xattn.qln.b", np.zeros(c3), dtype)
        self._linear(rng, "xattn.q", c3, c3, dtype, bias=False)
        self._linear(rng, "xattn.k", d, c3, dtype, bias=False)
        self._linear(rng, "xattn.v", d, c3, dtype, bias=False)
        # learned "nothing here" key/value so unprompted positions can attend away
        self._add("xattn.null_k", rng.normal(0, 1.0, c3), dtype)
        self._add("xattn.null_v", np.zeros(c3), dtype)

        self._linear(rng, "img.proj", c3, d, dtype)

        dc = cfg.decoder_channels
        self._conv(rng, "dec.top", c3, dc, 1, dtype)
        laterals = [cfg.stem_channels] + list(cfg.stage_channels[:-1])
        for lvl, ch in enumerate(laterals):
            self._conv(rng, f"dec.lat{lvl}", ch, dc, 1, dtype)
        self._conv(rng, "dec.head", dc, 1, 1, dtype, scale=0.1)
        # start near the typical foreground fraction of a text label (~10%)
        self.params["dec.head.b"].data[:] = HEAD_PRIOR_LOGIT

    def astype(self, dtype) -> "OdmModel":
        for p in self.params.values():
            p.data = p.data.astype(dtype)
            p.grad = None
        return self

    def named_parameters(self):
        return self.params.items()

    def zero_grad(self):
        for p in self.params.values():
            p.grad = None

    def state_dict(self) -> dict[str, np.ndarray]:
        return {k: v.data.copy() for k, v in self.params.items()}

    def load_state_dict(self, state: dict[str, np.ndarray]):
        missing = set(self.params) ^ set(state)
        if missing:
            raise KeyError(f"state mismatch on {sorted(missing)}")
        for k, v in state.items():
            if v.shape != self.params[k].shape:
                raise ShapeError(f"{k}: expected {self.params[k].shape}, got {v.shape}")
            self.params[k].data = np.array(v, dtype=v.dtype)

    @property
    def dtype(self):
        return next(iter(self.params.values())).dtype

    # image branch ------------------------------------------------------------------------
    def _cv(self, x, name, stride=1, pad=None):
        w = self.params[name + ".w"]
        pad = w.shape[-1] // 2 if pad is None else pad
        return nd.conv2d(x, w, self.params[name + ".b"], stride=stride, pad=pad)

    def encode_image(self, img) -> tuple[Array, list[Array]]:
        """Return the stride-8 grid and the finer levels [stride 1, 2, 4]."""
        img = img if isinstance(img, Array) else Array(np.asarray(img, dtype=self.dtype))
        s = self.config.image_size
        if img.ndim != 4 or img.shape[1] != 3 or img.shape[2:] != (s, s):
            raise ShapeError(f"encode_image: expected (B, 3, {s}, {s}), got {img.shape}")
        x = nd.relu(self._cv(img, "enc.stem"))
        for j in range(1, self.config.stem_layers):
            x = nd.relu(self._cv(x, f"enc.stem{j}"))
        feats = [x]
        for i in range(1, len(self.config.stage_channels) + 1):
            x = nd.relu(self._cv(x, f"enc.s{i}.down", stride=2))
            r = self._cv(nd.relu(self._cv(x, f"enc.s{i}.res1")), f"enc.s{i}.res2")
            x = nd.relu(x + r)
            feats.append(x)
        return feats[-1], feats[:-1]

    # text branch -------------------------------------------------------------------------
    def _lin(self, x, name):
        y = x @ self.params[name + ".w"]
        b = self.params.get(name + ".b")
        return y if b is None else y + b

    def _self_attn(self, x, pad, p):
        n, length, d = x.shape
        h = self.config.text_heads
        dh = d // h

        def heads(t):
            return nd.transpose(nd.reshape(t, (n, length, h, dh)), (0, 2, 1, 3))

        q, k, v = (heads(self._lin(x, f"{p}.{nm}")) for nm in ("q", "k", "v"))
        scores = (q @ nd.swapaxes(k, 2, 3)) * (1.0 / math.sqrt(dh))
        bias = np.where(pad, MASK_BIAS, 0.0).astype(scores.dtype)[:, None, None, :]
        scores = scores + Array(np.broadcast_to(bias, scores.shape).copy())
        ctx = nd.softmax(scores) @ v
        ctx = nd.reshape(nd.transpose(ctx, (0, 2, 1, 3)), (n, length, d))
        return self._lin(ctx, f"{p}.o")

    def encode_text(self, tokens: TokenBatch, allow_empty: bool = False) -> tuple[Array, Array]:
        """Per-instance embeddings (B, M, d) and pooled text embedding (B, d).

        Only present instances run through the transformer; absent slots come
        back as zero rows. Each instance vector is the mean of its non-PAD
        token states; the pooled vector is the mean over present instances.
        """
        cfg = self.config
        ids, mask = np.asarray(tokens.ids), np.asarray(tokens.mask, dtype=bool)
        if ids.ndim != 3 or ids.shape[2] > cfg.max_len or mask.shape != ids.shape[:2]:
            raise ShapeError(f"encode_text: ids {ids.shape}, mask {mask.shape}")
        if ids.min(initial=0) < 0 or ids.max(initial=0) >= cfg.vocab:
            raise ContractError("encode_text: token id out of range")
        counts = mask.sum(axis=1)
        if not allow_empty and (counts == 0).any():
            raise ContractError(f"encode_text: batch elements {np.flatnonzero(counts == 0).tolist()} have no instances")
        bsz, m, length = ids.shape
        d = cfg.embed_dim
        dtype = self.dtype

        present = np.flatnonzero(mask.reshape(-1))
        rows = ids.reshape(-1, length)[present]                          # (N, L)
        if len(present):
            x = nd.embedding(self.params["txt.tok"], rows) + nd.take(self.params["txt.pos"], np.arange(length))
            pad = rows == PAD_ID
            for i in range(cfg.text_depth):
                p = f"txt.l{i}"
                x = x + self._self_attn(nd.layer_norm(x, self.params[p + ".ln1.g"], self.params[p + ".ln1.b"]), pad, p)
                hdn = nd.relu(self._lin(nd.layer_norm(x, self.params[p + ".ln2.g"], self.params[p + ".ln2.b"]), p + ".mlp1"))
                x = x + self._lin(hdn, p + ".mlp2")
            x = nd.layer_norm(x, self.params["txt.ln.g"], self.params["txt.ln.b"])
            keep = (~pad).astype(dtype)
            pool = keep / np.maximum(keep.sum(axis=1, keepdims=True), 1.0)
            pooled = nd.reshape(Array(pool[:, None, :]) @ x, (len(present), d))
            inst = self._lin(pooled, "txt.proj")
            table = nd.concat([Array(np.zeros((1, d), dtype=dtype)), inst], axis=0)
        else:
            table = Array(np.zeros((1, d), dtype=dtype))
        slot = np.zeros(bsz * m, dtype=np.int64)
        slot[present] = np.arange(1, len(present) + 1)
        inst_embed = nd.take(table, slot.reshape(bsz, m), axis=0)          # (B, M, d)

        avg = (mask / np.maximum(counts, 1)[:, None]).astype(dtype)[:, None, :]
        txt_embed = nd.reshape(Array(avg) @ inst_embed, (bsz, d))
        return inst_embed, txt_embed

    # fusion and decoding ---------------------------------------------------------------------
    def fuse(self, grid: Array, inst_embed: Array, mask: np.ndarray):
        bsz, m, _ = inst_embed.shape
        c3 = grid.shape[1]
        keys = inst_embed @ self.params["xattn.k.w"]
        vals = inst_embed @ self.params["xattn.v.w"]
        null_k = nd.expand(self.params["xattn.null_k"], (bsz, 1, c3))
        null_v = nd.expand(self.params["xattn.null_v"], (bsz, 1, c3))
        full_mask = np.concatenate([np.ones((bsz, 1), dtype=bool), mask], axis=1)
        fused, attn, weights = cross_attend(grid, nd.concat([null_k, keys], axis=1), full_mask,
                                            values=nd.concat([null_v, vals], axis=1),
                                            w_q=self.params["xattn.q.w"],
                                            q_norm=(self.params["xattn.qln.g"], self.params["xattn.qln.b"]),
                                            heads=self.config.attn_heads)
        # each heatmap is normalised over positions on its own, so dropping the null column is enough
        return fused, attn[:, 1:], weights[:, :, 1:]

    def decode(self, fused: Array, pyramid: Sequence[Array]) -> Array:
        """Top-down path: 1x1 reduce, x2 nearest upsample, add 1x1 lateral, ReLU; then 1x1 head."""
        x = self._cv(fused, "dec.top")
        for lvl in reversed(range(len(pyramid))):
            x = nd.relu(nd.upsample_nearest(x, 2) + self._cv(pyramid[lvl], f"dec.lat{lvl}"))
        return self._cv(x, "dec.head")

    def forward(self, img, tokens: TokenBatch | None, allow_empty: bool = True) -> ModelOutput:
        """Full pass. ``tokens=None`` skips the text branch (no fusion, no text embedding)."""
        grid, pyramid = self.encode_image(img)
        img_embed = self._lin(nd.avg_pool_global(grid), "img.proj")
        if tokens is None:
            return ModelOutput(self.decode(grid, pyramid), img_embed, None, None)
        if tokens.batch_size != grid.shape[0]:
            raise ShapeError(f"forward: {grid.shape[0]} images but {tokens.batch_size} token rows")
        inst_embed, txt_embed = self.encode_text(tokens, allow_empty=allow_empty)
        fused, attn, weights = self.fuse(grid, inst_embed, tokens.mask)
        return ModelOutput(self.decode(fused, pyramid), img_embed, txt_embed, attn,
                           inst_embed=inst_embed, weights=weights, mask=np.asarray(tokens.mask, dtype=bool))

    __call__ = forward

    def predict(self, img, tokens: TokenBatch | None) -> ModelOutput:
        with nd.no_grad():
            return self.forward(img, tokens)

"""Pre-training loop: controller -> model -> losses -> Adam, plus checkpoints.

Checkpoint layout (all integers little-endian)::

    offset 0   8 bytes   magic b"ODMCKPT\\0"
    offset 8   1 byte    format version (currently 1)
    offset 9   4 bytes   header length N (uint32)
    offset 13  N bytes   UTF-8 JSON header: {"step", "config", "config_hash",
                         "arrays": [{"name", "dtype", "shape"}, ...]}
    then the raw array buffers in header order, C order, little-endian.

Arrays are the model parameters (``param/<name>``) followed by the Adam
moments (``adam_m/<name>``, ``adam_v/<name>``) and the Adam step count.
"""
from __future__ import annotations

import copy
import csv
import dataclasses
import hashlib
import json
import logging
import math
import os
import struct
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from . import nd
from .annot import SceneAnnotation
from .control import ControllerConfig, TextController
from .glyph import GlyphSet, builtin_font
from .loss import (FeatureExtractor, LossWeights, NumericError, batch_contrastive, EmbeddingBatch,
                   ocr_lpips, seg_loss, total_loss)
from .model import OdmConfig, OdmModel, TokenBatch, tokenize

log = logging.getLogger(__name__)

MAGIC = b"ODMCKPT\x00"
FORMAT_VERSION = 1
METRIC_FIELDS = ("step", "seg", "ocr", "bc", "total")


class FormatError(ValueError):
    """Checkpoint bytes do not follow the documented layout."""

    def __init__(self, message: str, offset: int):
        self.offset = offset
        super().__init__(f"{message} (at byte offset {offset})")


class VersionError(FormatError):
    """Checkpoint written by an unsupported format version."""


class TrainingError(RuntimeError):
    """Training hit a non-finite loss; carries the ids of the samples in the batch."""

    def __init__(self, message: str, sample_ids: Sequence[str], component: str | None = None):
        self.sample_ids = list(sample_ids)
        self.component = component
        super().__init__(f"{message}; samples: {', '.join(self.sample_ids)}")


# -- configuration -------------------------------------------------------------------------

@dataclass
class ModuleToggles:
    te: bool = True   # text encoder + cross-attention
    dt: bool = True   # drop prompts
    nt: bool = True   # inject non-existent prompts
    ol: bool = True   # feature-space loss


@dataclass
class LossConfig:
    alpha: float = 1.0
    beta: float = 1.0
    gamma: float = 0.5
    temperature: float = 1.0
    extractor_seed: int = 0
    extractor_weights_path: str | None = None


@dataclass
class ControllerSection:
    drop_keep_ratio: Any = (0.0, 1.0)
    noise_count: Any = (0, 3)
    seed: int = 0


SCHEDULES = ("constant", "cosine")


@dataclass
class TrainConfig:
    lr: float = 1e-4
    batch_size: int = 4
    steps: int = 500
    seed: int = 0
    image_size: int = 128
    checkpoint_every: int = 0
    weight_decay: float = 0.0
    schedule: str = "constant"    # or "cosine": decay to zero over ``steps``
    grad_clip: float = 0.0        # global gradient-norm cap, 0 disables
    modules: ModuleToggles = field(default_factory=ModuleToggles)
    loss: LossConfig = field(default_factory=LossConfig)
    controller: ControllerSection = field(default_factory=ControllerSection)
    model: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.lr >= 0 and math.isfinite(self.lr)):
            raise ValueError(f"lr must be finite and >= 0, got {self.lr}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.schedule not in SCHEDULES:
            raise ValueError(f"schedule must be one of {SCHEDULES}, got {self.schedule!r}")
        if not self.grad_clip >= 0:
            raise ValueError("grad_clip must be >= 0")
        self.model_config()          # validates model keys
        self.controller_config()
        self.loss_weights()

    def lr_at(self, step: int) -> float:
        if self.schedule == "cosine" and self.steps:
            return self.lr * 0.5 * (1.0 + math.cos(math.pi * min(step, self.steps) / self.steps))
        return self.lr

    def loss_weights(self) -> LossWeights:
        return LossWeights(self.loss.alpha, self.loss.beta, self.loss.gamma)

    def controller_config(self) -> ControllerConfig:
        c = self.controller
        return ControllerConfig(c.drop_keep_ratio, c.noise_count, c.seed,
                                drop=self.modules.dt, noise=self.modules.nt)

    def model_config(self) -> OdmConfig:
        return OdmConfig(image_size=self.image_size, **self.model)

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        for k in ("drop_keep_ratio", "noise_count"):
            v = d["controller"][k]
            d["controller"][k] = list(v) if isinstance(v, (tuple, list)) else v
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "TrainConfig":
        d = copy.deepcopy(d)
        sections = {"modules": ModuleToggles, "loss": LossConfig, "controller": ControllerSection}
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise KeyError(f"unknown config keys: {sorted(unknown)}")
        for name, klass in sections.items():
            if name in d:
                sub = d[name]
                if not isinstance(sub, dict):
                    raise TypeError(f"config section {name!r} must be an object")
                bad = set(sub) - {f.name for f in dataclasses.fields(klass)}
                if bad:
                    raise KeyError(f"unknown config keys: {sorted(f'{name}.{k}' for k in bad)}")
                d[name] = klass(**sub)
        if "model" in d:
            bad = set(d["model"]) - {f.name for f in dataclasses.fields(OdmConfig)} | (
                {"image_size"} & set(d["model"]))
            if bad:
                raise KeyError(f"unknown config keys: {sorted('model.' + k for k in bad)}")
        return cls(**d)

    def hash(self) -> str:
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode()).hexdigest()[:16]


def apply_overrides(d: dict, overrides: Iterable[str]) -> dict:
    """Apply ``dotted.key=value`` strings; values are parsed as JSON when possible."""
    d = copy.deepcopy(d)
    for item in overrides:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        try:
            val = json.loads(raw)
        except json.JSONDecodeError:
            val = raw
        node = d
        parts = key.strip().split(".")
        for p in parts[:-1]:
            node = node.setdefault(p, {})
            if not isinstance(node, dict):
                raise KeyError(f"override {key!r} descends into a non-section")
        node[parts[-1]] = val
    return d


# -- optimizer --------------------------------------------------------------------------------

class Adam:
    """Adam with bias correction and optional decoupled weight decay."""

    def __init__(self, params: dict[str, nd.Array], lr: float = 1e-4, betas=(0.9, 0.999),
                 eps: float = 1e-8, weight_decay: float = 0.0):
        self.params = params
        self.lr, self.betas, self.eps, self.weight_decay = lr, betas, eps, weight_decay
        self.t = 0
        self.m = {k: np.zeros_like(p.data) for k, p in params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in params.items()}

    def step(self):
        self.t += 1
        b1, b2 = self.betas
        c1, c2 = 1 - b1 ** self.t, 1 - b2 ** self.t
        for k, p in self.params.items():
            if p.grad is None:
                continue
            g = p.grad
            m, v = self.m[k], self.v[k]
            m *= b1
            m += (1 - b1) * g
            v *= b2
            v += (1 - b2) * g * g
            if self.lr == 0:
                continue
            upd = (m / c1) / (np.sqrt(v / c2) + self.eps)
            if self.weight_decay:
                upd = upd + self.weight_decay * p.data
            p.data -= (self.lr * upd).astype(p.dtype)

    def state(self) -> dict[str, np.ndarray]:
        out = {f"adam_m/{k}": v for k, v in self.m.items()}
        out.update({f"adam_v/{k}": v for k, v in self.v.items()})
        out["adam_t"] = np.array(self.t, dtype=np.int64)
        return out

    def load_state(self, arrays: dict[str, np.ndarray]):
        for k in self.params:
            self.m[k] = np.array(arrays[f"adam_m/{k}"])
            self.v[k] = np.array(arrays[f"adam_v/{k}"])
        self.t = int(arrays["adam_t"])


# -- training --------------------------------------------------------------------------------

@dataclass
class Sample:
    image: np.ndarray          # (3, S, S) float in [0, 1]
    annotation: SceneAnnotation

    @property
    def image_id(self) -> str:
        return self.annotation.image_id


@dataclass
class StepMetrics:
    step: int
    seg: float
    ocr: float
    bc: float
    total: float

    def row(self) -> dict:
        return dataclasses.asdict(self)


class Trainer:
    def __init__(self, config: TrainConfig, glyphs: GlyphSet | None = None,
                 model: OdmModel | None = None):
        self.config = config
        self.glyphs = glyphs or builtin_font()
        self.model = model or OdmModel(config.model_config(), seed=config.seed)
        self.optimizer = Adam(self.model.params, lr=config.lr, weight_decay=config.weight_decay)
        lc = config.loss
        self.extractor = (FeatureExtractor.from_file(lc.extractor_weights_path)
                          if lc.extractor_weights_path else FeatureExtractor(seed=lc.extractor_seed))
        size = (config.image_size, config.image_size)
        self.controller = TextController(config.controller_config(), self.glyphs, size)
        self.weights = config.loss_weights()
        self.step = 0

    # batch preparation ----------------------------------------------------------------------
    def prepare(self, batch: Sequence[Sample], step: int):
        """Prompts, token grid and target stack for one batch; deterministic per (seed, step, index)."""
        cfg = self.config
        prompts, targets = [], []
        for i, s in enumerate(batch):
            if cfg.modules.te:
                cs = self.controller(s.annotation, step=step, index=i)
                prompts.append(list(cs.prompts))
                targets.append(cs.target.pixels)
            else:
                # without text prompts every instance is foreground
                keep = [k for k, inst in enumerate(s.annotation.instances) if not inst.ignore]
                targets.append(self.controller.target_from_cache(s.annotation, keep).pixels)
        tokens = tokenize(prompts) if cfg.modules.te else None
        target = np.stack(targets)[:, None].astype(self.model.dtype)
        return tokens, target

    def losses(self, images: np.ndarray, tokens: TokenBatch | None, target: np.ndarray):
        out = self.model(images.astype(self.model.dtype), tokens)
        seg = seg_loss(out.logits, target)
        ocr = ocr_lpips(nd.sigmoid(out.logits), target, self.extractor) if self.config.modules.ol else None
        bc = None
        if out.txt_embed is not None:
            rows = np.flatnonzero(tokens.mask.any(axis=1))
            if len(rows):
                e = EmbeddingBatch(nd.take(out.img_embed, rows), nd.take(out.txt_embed, rows))
                bc = batch_contrastive(e, self.config.loss.temperature)
        return out, seg, ocr, bc

    def train_step(self, batch: Sequence[Sample]) -> StepMetrics:
        if not batch:
            raise ValueError("empty batch")
        ids = [s.image_id for s in batch]
        images = np.stack([s.image for s in batch])
        tokens, target = self.prepare(batch, self.step)
        self.model.zero_grad()
        _, seg, ocr, bc = self.losses(images, tokens, target)
        try:
            total = total_loss(seg, ocr, bc, self.weights)
        except NumericError as exc:
            raise TrainingError(f"step {self.step}: {exc}", ids, exc.component) from None
        nd.backward(total, self.model.params.values())
        for name, p in self.model.params.items():
            if not np.isfinite(p.grad).all():
                raise TrainingError(f"step {self.step}: non-finite gradient in {name}", ids)
        if self.config.grad_clip:
            norm = math.sqrt(sum(float(np.sum(np.square(p.grad, dtype=np.float64)))
                                 for p in self.model.params.values()))
            if norm > self.config.grad_clip:
                for p in self.model.params.values():
                    p.grad *= self.config.grad_clip / norm
        self.optimizer.lr = self.config.lr_at(self.step)
        self.optimizer.step()
        m = StepMetrics(self.step, _f(seg), _f(ocr), _f(bc), _f(total))
        self.step += 1
        return m

    # loop --------------------------------------------------------------------------------------
    def batches(self, n: int, step: int) -> list[int]:
        """Indices for ``step``: walk a per-epoch permutation, wrapping across epochs."""
        bs = self.config.batch_size
        out = []
        pos = step * bs
        while len(out) < bs:
            epoch, off = divmod(pos, n)
            perm = np.random.default_rng([self.config.seed, epoch]).permutation(n)
            take = min(bs - len(out), n - off)
            out.extend(perm[off:off + take].tolist())
            pos += take
        return out

    def fit(self, dataset: Sequence[Sample], steps: int | None = None, metrics_path=None,
            checkpoint_dir=None, callback=None) -> list[StepMetrics]:
        if not dataset:
            raise ValueError("empty dataset")
        steps = self.config.steps if steps is None else steps
        log.info("training %d steps on %d samples, config %s", steps, len(dataset), self.config.hash())
        rows = []
        writer = fh = None
        if metrics_path is not None:
            try:
                fh = open(metrics_path, "w", newline="")
            except OSError as exc:
                raise OSError(f"cannot write metrics log {metrics_path}: {exc.strerror}") from None
            writer = csv.DictWriter(fh, fieldnames=METRIC_FIELDS)
            writer.writeheader()
        try:
            for _ in range(steps):
                batch = [dataset[i] for i in self.batches(len(dataset), self.step)]
                m = self.train_step(batch)
                rows.append(m)
                if writer is not None:
                    writer.writerow({k: (v if k == "step" else repr(v)) for k, v in m.row().items()})
                if callback is not None:
                    callback(m)
                every = self.config.checkpoint_every
                if checkpoint_dir is not None and every and self.step % every == 0:
                    self.save(os.path.join(checkpoint_dir, f"step_{self.step:06d}.ckpt"))
        finally:
            if fh is not None:
                fh.close()
        return rows

    def save(self, path):
        save_checkpoint(path, self.model, self.optimizer, self.step, self.config)

    @classmethod
    def from_checkpoint(cls, path, glyphs: GlyphSet | None = None) -> "Trainer":
        ck = load_checkpoint(path)
        tr = cls(TrainConfig.from_dict(ck.config), glyphs)
        tr.model.load_state_dict(ck.params)
        tr.optimizer.load_state(ck.optimizer)
        tr.step = ck.step
        return tr


def _f(x) -> float:
    if x is None:
        return 0.0
    return float(x.data) if isinstance(x, nd.Array) else float(x)


def fit(dataset: Sequence[Sample], config: TrainConfig, **kwargs) -> tuple[Trainer, list[StepMetrics]]:
    tr = Trainer(config)
    rows = tr.fit(dataset, **kwargs)
    return tr, rows


def write_metrics(rows: Sequence[StepMetrics], path):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=METRIC_FIELDS)
        w.writeheader()
        for m in rows:
            w.writerow({k: (v if k == "step" else repr(v)) for k, v in m.row().items()})


# -- checkpoints ---------------------------------------------------------------------------------

@dataclass
class Checkpoint:
    step: int
    config: dict
    config_hash: str
    params: dict[str, np.ndarray]
    optimizer: dict[str, np.ndarray]


def save_checkpoint(path, model: OdmModel, optimizer: Adam | None, step: int, config: TrainConfig):
    arrays = [(f"param/{k}", v) for k, v in model.state_dict().items()]
    if optimizer is not None:
        arrays += list(optimizer.state().items())
    header = {
        "step": int(step),
        "config": config.to_dict(),
        "config_hash": config.hash(),
        "arrays": [{"name": n, "dtype": np.dtype(a.dtype).newbyteorder("<").str, "shape": list(a.shape)}
                   for n, a in arrays],
    }
    hb = json.dumps(header, sort_keys=True).encode("utf-8")
    tmp = f"{os.fspath(path)}.tmp"
    with open(tmp, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<BI", FORMAT_VERSION, len(hb)))
        fh.write(hb)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype=np.dtype(a.dtype).newbyteorder("<")).tobytes())
    os.replace(tmp, path)


def load_checkpoint(path) -> Checkpoint:
    with open(path, "rb") as fh:
        buf = fh.read()
    if len(buf) < len(MAGIC) or buf[:len(MAGIC)] != MAGIC:
        raise FormatError("bad magic", 0)
    off = len(MAGIC)
    if len(buf) < off + 5:
        raise FormatError("truncated header", len(buf))
    version, hlen = struct.unpack_from("<BI", buf, off)
    if version != FORMAT_VERSION:
        raise VersionError(f"unsupported checkpoint version {version} (expected {FORMAT_VERSION})", off)
    off += 5
    if len(buf) < off + hlen:
        raise FormatError(f"header needs {hlen} bytes, file ends", len(buf))
    try:
        header = json.loads(buf[off:off + hlen].decode("utf-8"))
        entries = header["arrays"]
        step, config, chash = int(header["step"]), header["config"], header["config_hash"]
    except (UnicodeDecodeError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"corrupt header: {exc}", off) from None
    off += hlen
    arrays = {}
    for e in entries:
        try:
            dt = np.dtype(e["dtype"])
            shape = tuple(int(s) for s in e["shape"])
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad array entry {e!r}: {exc}", off) from None
        nbytes = dt.itemsize * int(np.prod(shape, dtype=np.int64))
        if off + nbytes > len(buf):
            raise FormatError(f"array {e.get('name')!r} needs {nbytes} bytes, file ends", len(buf))
        arrays[e["name"]] = np.frombuffer(buf, dtype=dt, count=nbytes // dt.itemsize,
                                          offset=off).reshape(shape).astype(dt.newbyteorder("="))
        off += nbytes
    if off != len(buf):
        raise FormatError(f"{len(buf) - off} trailing bytes", off)
    params = {k[len("param/"):]: v for k, v in arrays.items() if k.startswith("param/")}
    opt = {k: v for k, v in arrays.items() if not k.startswith("param/")}
    return Checkpoint(step, config, chash, params, opt)


def model_from_checkpoint(path) -> tuple[OdmModel, TrainConfig, Checkpoint]:
    ck = load_checkpoint(path)
    cfg = TrainConfig.from_dict(ck.config)
    model = OdmModel(cfg.model_config(), seed=cfg.seed)
    model.load_state_dict(ck.params)
    return model, cfg, ck

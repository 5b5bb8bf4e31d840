import csv
import struct

import numpy as np
import pytest

from odm.synth import make_dataset
from odm.train import (
    FORMAT_VERSION, MAGIC, Adam, FormatError, Sample, Trainer, TrainConfig, TrainingError, VersionError,
    apply_overrides, load_checkpoint, model_from_checkpoint,
)
from odm import nd

MICRO_MODEL = {"embed_dim": 16, "stem_channels": 4, "stage_channels": [4, 8, 8], "text_depth": 1,
               "text_heads": 2, "decoder_channels": 4}


def micro_config(**kw):
    d = {"image_size": 32, "batch_size": 2, "lr": 1e-3, "model": MICRO_MODEL}
    d.update(kw)
    return TrainConfig.from_dict(d)


@pytest.fixture(scope="module")
def data():
    return [Sample(img, ann) for img, ann in make_dataset(3, seed=1, size=32, n_instances=(1, 2))]


def params(tr):
    return {k: v.data.copy() for k, v in tr.model.params.items()}


def test_zero_lr_keeps_parameters(data):
    tr = Trainer(micro_config(lr=0.0))
    before = params(tr)
    tr.fit(data, steps=3)
    assert all(np.array_equal(before[k], v) for k, v in params(tr).items())


def test_zero_steps_is_identity(data, tmp_path):
    tr = Trainer(micro_config())
    before = params(tr)
    rows = tr.fit(data, steps=0, metrics_path=tmp_path / "m.csv")
    assert rows == [] and all(np.array_equal(before[k], v) for k, v in params(tr).items())
    assert (tmp_path / "m.csv").read_text().strip() == "step,seg,ocr,bc,total"


def test_losses_finite(data):
    rows = Trainer(micro_config()).fit(data, steps=3)
    for m in rows:
        assert all(np.isfinite([m.seg, m.ocr, m.bc, m.total]))
        assert m.total == pytest.approx(m.seg + m.ocr + 0.5 * m.bc, rel=1e-5)


def test_single_sample_loss_decreases(data):
    cfg = micro_config(batch_size=1, modules={"dt": False, "nt": False})
    rows = Trainer(cfg).fit(data[:1], steps=50)
    totals = [m.total for m in rows]
    assert totals[-1] < totals[0]
    assert np.mean(totals[-10:]) < np.mean(totals[:10])


def test_metrics_are_deterministic(data, tmp_path):
    Trainer(micro_config()).fit(data, steps=4, metrics_path=tmp_path / "a.csv")
    Trainer(micro_config()).fit(data, steps=4, metrics_path=tmp_path / "b.csv")
    a, b = (tmp_path / "a.csv").read_text(), (tmp_path / "b.csv").read_text()
    assert a == b
    rows = list(csv.DictReader(open(tmp_path / "a.csv")))
    assert [int(r["step"]) for r in rows] == [0, 1, 2, 3]


def test_epoch_covers_dataset():
    tr = Trainer(micro_config(batch_size=2))
    seen = tr.batches(5, 0) + tr.batches(5, 1) + tr.batches(5, 2)[:1]
    assert sorted(seen) == list(range(5))


def test_text_disabled_trains_without_prompts(data):
    tr = Trainer(micro_config(modules={"te": False}))
    tokens, target = tr.prepare(data[:2], 0)
    assert tokens is None and target.shape == (2, 1, 32, 32)
    m = tr.train_step(data[:2])
    assert m.bc == 0.0


def test_zero_gamma_leaves_image_projection_untouched(data):
    tr = Trainer(micro_config(loss={"gamma": 0.0, "beta": 0.0}))
    images = np.stack([s.image for s in data[:2]])
    tokens, target = tr.prepare(data[:2], 0)
    _, seg, ocr, bc = tr.losses(images, tokens, target)
    from odm.loss import total_loss
    tr.model.zero_grad()
    nd.backward(total_loss(seg, ocr, bc, tr.weights), list(tr.model.params.values()))
    for name in ("img.proj.w", "img.proj.b"):
        assert not tr.model.params[name].grad.any()
    assert tr.model.params["dec.head.w"].grad.any()


def test_nan_input_names_samples(data):
    bad = Sample(np.full_like(data[0].image, np.nan), data[0].annotation)
    tr = Trainer(micro_config())
    with pytest.raises(TrainingError) as exc:
        tr.train_step([bad, data[1]])
    assert exc.value.component == "seg"
    assert data[0].image_id in str(exc.value)


# -- optimizer ------------------------------------------------------------------------------

def test_adam_first_step_is_signed_lr():
    p = nd.Array(np.array([1.0, -2.0, 3.0]), requires_grad=True)
    p.grad = np.array([0.5, -4.0, 0.0])
    Adam({"p": p}, lr=0.1).step()
    np.testing.assert_allclose(p.data, [0.9, -1.9, 3.0], atol=1e-6)


def test_adam_skips_parameters_without_gradient():
    a = nd.Array(np.ones(2), requires_grad=True)
    b = nd.Array(np.ones(2), requires_grad=True)
    a.grad = np.ones(2)
    opt = Adam({"a": a, "b": b}, lr=0.1)
    opt.step()
    assert (b.data == 1).all() and (a.data < 1).all()


# -- configuration --------------------------------------------------------------------------------

def test_config_defaults_and_overrides():
    cfg = TrainConfig()
    assert cfg.lr == 1e-4 and (cfg.loss.alpha, cfg.loss.beta, cfg.loss.gamma) == (1.0, 1.0, 0.5)
    d = apply_overrides(cfg.to_dict(), ["lr=0.01", "modules.nt=false", "controller.drop_keep_ratio=[0.5,1]"])
    cfg2 = TrainConfig.from_dict(d)
    assert cfg2.lr == 0.01 and not cfg2.modules.nt and cfg2.controller_config().keep_range == (0.5, 1.0)
    assert cfg.hash() != cfg2.hash()
    assert TrainConfig.from_dict(cfg.to_dict()).hash() == cfg.hash()


@pytest.mark.parametrize("bad", [{"lrr": 1}, {"loss": {"delta": 1}}, {"model": {"depth": 3}}])
def test_config_rejects_unknown_keys(bad):
    with pytest.raises(KeyError):
        TrainConfig.from_dict(bad)


def test_config_rejects_bad_values():
    with pytest.raises(ValueError):
        TrainConfig(lr=-1)
    with pytest.raises(ValueError):
        TrainConfig.from_dict({"controller": {"drop_keep_ratio": [0.9, 0.1]}})
    with pytest.raises(ValueError):
        apply_overrides({}, ["novalue"])



def test_cosine_schedule_endpoints():
    cfg = TrainConfig(lr=0.2, steps=100, schedule="cosine")
    assert cfg.lr_at(0) == pytest.approx(0.2)
    assert cfg.lr_at(50) == pytest.approx(0.1)
    assert cfg.lr_at(100) == pytest.approx(0.0, abs=1e-15)
    assert cfg.lr_at(500) == pytest.approx(0.0, abs=1e-15)
    assert TrainConfig(lr=0.2, steps=100).lr_at(99) == 0.2
    with pytest.raises(ValueError):
        TrainConfig(schedule="linear")
    with pytest.raises(ValueError):
        TrainConfig(grad_clip=-1.0)


def test_grad_clip_bounds_global_norm(data):
    tr = Trainer(micro_config(grad_clip=1e-3))
    tr.train_step(data[:2])
    norm = np.sqrt(sum(np.sum(p.grad ** 2) for p in tr.model.params.values()))
    assert norm == pytest.approx(1e-3, rel=1e-9)
    free = Trainer(micro_config())
    free.train_step(data[:2])
    assert np.sqrt(sum(np.sum(p.grad ** 2) for p in free.model.params.values())) > 1e-3

# -- checkpoints -------------------------------------------------------------------------------

def test_checkpoint_resume_matches_uninterrupted(data, tmp_path):
    straight = Trainer(micro_config())
    straight.fit(data, steps=4)

    first = Trainer(micro_config())
    first.fit(data, steps=2)
    first.save(tmp_path / "c.ckpt")
    resumed = Trainer.from_checkpoint(tmp_path / "c.ckpt")
    assert resumed.step == 2
    resumed.fit(data, steps=2)
    for k, v in params(straight).items():
        np.testing.assert_array_equal(v, resumed.model.params[k].data)


def test_checkpoint_layout_and_model_restore(data, tmp_path):
    tr = Trainer(micro_config())
    tr.fit(data, steps=1)
    path = tmp_path / "c.ckpt"
    tr.save(path)
    raw = path.read_bytes()
    assert raw[:8] == MAGIC and raw[8] == FORMAT_VERSION
    (hlen,) = struct.unpack_from("<I", raw, 9)
    assert raw[13:13 + hlen].startswith(b"{")
    model, cfg, ck = model_from_checkpoint(path)
    assert ck.step == 1 and cfg.hash() == tr.config.hash() == ck.config_hash
    x = np.stack([s.image for s in data[:1]])
    np.testing.assert_array_equal(model.predict(x, None).logits.data, tr.model.predict(x, None).logits.data)
    assert not (tmp_path / "c.ckpt.tmp").exists()


def test_checkpoint_corruption(data, tmp_path):
    tr = Trainer(micro_config())
    path = tmp_path / "c.ckpt"
    tr.save(path)
    raw = path.read_bytes()

    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(raw[:-10])
    with pytest.raises(FormatError) as exc:
        load_checkpoint(bad)
    assert exc.value.offset == len(raw) - 10

    bad.write_bytes(b"NOTACKPT" + raw[8:])
    with pytest.raises(FormatError) as exc:
        load_checkpoint(bad)
    assert exc.value.offset == 0

    bad.write_bytes(raw[:8] + bytes([FORMAT_VERSION + 1]) + raw[9:])
    with pytest.raises(VersionError):
        load_checkpoint(bad)

    bad.write_bytes(raw + b"\x00")
    with pytest.raises(FormatError):
        load_checkpoint(bad)

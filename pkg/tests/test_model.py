import logging

import numpy as np
import pytest

from odm import nd
from odm.model import (
    CHARSET, MAX_INSTANCES, MAX_LEN, PAD_ID, UNK_ID, OdmConfig, OdmModel, TokenBatch, cross_attend, tokenize,
)
from odm.nd import Array, ContractError, ShapeError, check_params, grad_check

MICRO = OdmConfig(image_size=32, embed_dim=16, stem_channels=4, stage_channels=(4, 8, 8), text_depth=1,
                  text_heads=2, decoder_channels=4, max_instances=4, max_len=8)


def micro(seed=0, dtype=np.float64):
    return OdmModel(MICRO, seed=seed, dtype=dtype)


def images(n, size=32, seed=0):
    return np.random.default_rng(seed).random((n, 3, size, size))


def toks(rows):
    return tokenize(rows, max_instances=MICRO.max_instances, max_len=MICRO.max_len)


# -- tokens ------------------------------------------------------------------------------

def test_charset_round_trip():
    text = "".join(chr(c) for c in range(0x20, 0x7F))
    ids = CHARSET.encode(text)
    assert ids == list(range(1, 96))
    assert CHARSET.decode(ids) == text
    assert CHARSET.encode("é") == [UNK_ID]


def test_tokenize_examples():
    tb = tokenize([["Ab", ""], ["x" * 30]])
    assert tb.ids.shape == (2, MAX_INSTANCES, MAX_LEN)
    assert tb.ids[0, 0, :3].tolist() == [ord("A") - 31, ord("b") - 31, PAD_ID]
    assert tb.mask[0, :3].tolist() == [True, True, False]
    assert not tb.ids[0, 1].any()               # empty string: present but all PAD
    assert (tb.ids[1, 0] == ord("x") - 31).all()  # cut to MAX_LEN
    assert tb.texts(1) == ["x" * MAX_LEN]


def test_tokenize_flat_list_is_one_image():
    assert tokenize(["a", "b"]).ids.shape[0] == 1


def test_tokenize_truncates_instances(caplog):
    with caplog.at_level(logging.WARNING):
        tb = tokenize([[str(i) for i in range(40)]])
    assert tb.mask.sum() == MAX_INSTANCES
    assert "truncated" in caplog.text


# -- image branch ----------------------------------------------------------------------------

def test_encode_image_shapes():
    m = micro()
    grid, pyr = m.encode_image(images(2))
    assert grid.shape == (2, 8, 4, 4)
    assert [p.shape for p in pyr] == [(2, 4, 32, 32), (2, 4, 16, 16), (2, 8, 8, 8)]
    assert MICRO.stride == 8 and MICRO.grid == 4


def test_default_config_grid():
    cfg = OdmConfig()
    assert cfg.stride == 8 and cfg.grid == 16


def test_zero_image_is_finite():
    m = micro()
    out = m.predict(np.zeros((1, 3, 32, 32)), toks([["abc"]]))
    assert np.isfinite(out.logits.data).all()


def test_different_images_differ():
    m = micro()
    a = m.encode_image(images(1, seed=1))[0].data
    b = m.encode_image(images(1, seed=2))[0].data
    assert not np.allclose(a, b)


def test_wrong_image_size():
    with pytest.raises(ShapeError):
        micro().encode_image(np.zeros((1, 3, 30, 30)))


def test_bad_config():
    with pytest.raises(ValueError):
        OdmConfig(image_size=100)
    with pytest.raises(ValueError):
        OdmConfig(embed_dim=30, text_heads=4)


# -- text branch ---------------------------------------------------------------------------

def test_identical_strings_embed_identically():
    inst, _ = micro().encode_text(toks([["hello", "hello", "x"]]))
    np.testing.assert_array_equal(inst.data[0, 0], inst.data[0, 1])
    assert not np.allclose(inst.data[0, 0], inst.data[0, 2])


def test_text_permutation_equivariant():
    m = micro()
    inst, pooled = m.encode_text(toks([["ab", "cde", "f"]]))
    inst2, pooled2 = m.encode_text(toks([["f", "ab", "cde"]]))
    np.testing.assert_allclose(inst2.data[0, [1, 2, 0]], inst.data[0, :3], atol=1e-12)
    np.testing.assert_allclose(pooled.data, pooled2.data, atol=1e-12)


def test_single_instance_pool_is_instance():
    inst, pooled = micro().encode_text(toks([["word"]]))
    np.testing.assert_allclose(pooled.data[0], inst.data[0, 0], atol=1e-12)
    assert not inst.data[0, 1:].any()


def test_empty_prompt_set():
    m = micro()
    with pytest.raises(ContractError):
        m.encode_text(toks([[]]))
    inst, pooled = m.encode_text(toks([[], ["a"]]), allow_empty=True)
    assert not pooled.data[0].any() and pooled.data[1].any()


def test_token_out_of_range():
    tb = toks([["a"]])
    tb.ids[0, 0, 0] = 500
    with pytest.raises(ContractError):
        micro().encode_text(tb)


# -- cross-attention -----------------------------------------------------------------------------

def test_cross_attend_single_key():
    rng = np.random.default_rng(0)
    img = Array(rng.normal(size=(1, 3, 2, 2)))
    v = Array(rng.normal(size=(1, 1, 3)))
    fused, attn, weights = cross_attend(img, Array(rng.normal(size=(1, 1, 3))), np.ones((1, 1), bool), v)
    np.testing.assert_allclose(weights, 1.0)
    np.testing.assert_allclose(fused.data, img.data + v.data[0, 0][None, :, None, None])
    np.testing.assert_allclose(attn, 0.25)


def test_cross_attend_masking_matches_single_key():
    rng = np.random.default_rng(1)
    img = Array(rng.normal(size=(1, 3, 2, 2)))
    k = Array(rng.normal(size=(1, 3, 3)))
    v = Array(rng.normal(size=(1, 3, 3)))
    mask = np.array([[False, True, False]])
    fused, attn, _ = cross_attend(img, k, mask, v)
    ref, _, _ = cross_attend(img, Array(k.data[:, 1:2]), np.ones((1, 1), bool), Array(v.data[:, 1:2]))
    np.testing.assert_allclose(fused.data, ref.data, atol=1e-12)
    assert not attn[0, 0].any() and not attn[0, 2].any()


def test_cross_attend_rows_normalised():
    rng = np.random.default_rng(2)
    _, attn, weights = cross_attend(Array(rng.normal(size=(2, 4, 3, 3))), Array(rng.normal(size=(2, 5, 4))),
                                    np.ones((2, 5), bool))
    np.testing.assert_allclose(weights.sum(axis=2), 1.0)
    np.testing.assert_allclose(attn.sum(axis=2), 1.0)


def test_cross_attend_contracts():
    img = Array(np.zeros((1, 3, 2, 2)))
    with pytest.raises(ShapeError):
        cross_attend(img, Array(np.zeros((1, 2, 4))), np.ones((1, 2), bool))
    with pytest.raises(ContractError):
        cross_attend(img, Array(np.zeros((1, 2, 3))), np.zeros((1, 2), bool))


def test_cross_attend_grad_check():
    rng = np.random.default_rng(3)
    k, mask = Array(rng.normal(size=(1, 3, 2))), np.array([[True, True, False]])
    rep = grad_check(lambda x: (lambda f: nd.sum_(f * f))(cross_attend(x, k, mask)[0]), rng.normal(size=(1, 2, 2, 2)),
                     tol=1e-5)
    assert rep.passed, rep.summary()



def test_heatmap_survives_float32_underflow():
    # a key that loses every position by a wide margin still gets a proper heatmap
    img = np.zeros((1, 2, 2, 2), np.float32)
    img[0, 0] = [[1.0, 2.0], [3.0, 4.0]]
    k = Array(np.array([[[200.0, 0.0], [-200.0, 0.0]]], np.float32))
    _, attn, weights = cross_attend(Array(img), k, np.ones((1, 2), bool))
    assert (weights[0, :, 1] == 0).all()
    np.testing.assert_allclose(attn.sum(axis=2), 1.0)
    assert attn[0, 1, 0] > attn[0, 1, 3]

def test_multi_head_equals_per_group_single_head():
    rng = np.random.default_rng(4)
    img, k, v = rng.normal(size=(2, 4, 3, 3)), rng.normal(size=(2, 3, 4)), rng.normal(size=(2, 3, 4))
    mask = np.array([[True, True, False], [True, True, True]])
    fused, attn, weights = cross_attend(Array(img), Array(k), mask, Array(v), heads=2)
    for g in range(2):
        sl = slice(2 * g, 2 * g + 2)
        ref, _, w = cross_attend(Array(img[:, sl]), Array(k[..., sl]), mask, Array(v[..., sl]))
        np.testing.assert_allclose(fused.data[:, sl], ref.data, atol=1e-12)
    np.testing.assert_allclose(weights.sum(axis=2), 1.0)
    np.testing.assert_allclose(attn[mask].sum(axis=1), 1.0)


def test_multi_head_grad_check():
    rng = np.random.default_rng(5)
    k, mask = Array(rng.normal(size=(1, 3, 4))), np.array([[True, False, True]])
    rep = grad_check(lambda x: (lambda f: nd.sum_(f * f))(cross_attend(x, k, mask, heads=2)[0]),
                     rng.normal(size=(1, 4, 2, 2)), tol=1e-5)
    assert rep.passed, rep.summary()


def test_heads_must_divide_channels():
    with pytest.raises(ContractError):
        cross_attend(Array(np.zeros((1, 3, 2, 2))), Array(np.zeros((1, 2, 3))), np.ones((1, 2), bool), heads=2)
    with pytest.raises(ValueError):
        OdmConfig(stage_channels=(8, 16, 30), attn_heads=4)


# -- full model ---------------------------------------------------------------------------------

def test_forward_shapes():
    out = micro().forward(images(2), toks([["ab", "c"], ["d"]]))
    assert out.logits.shape == (2, 1, 32, 32)
    assert out.img_embed.shape == out.txt_embed.shape == (2, 16)
    assert out.attn.shape == (2, 4, 16)
    np.testing.assert_allclose(out.attn[out.mask].sum(axis=1), 1.0)


def test_forward_without_text():
    out = micro().forward(images(1), None)
    assert out.logits.shape == (1, 1, 32, 32) and out.txt_embed is None and out.attn is None


def test_batch_size_mismatch():
    with pytest.raises(ShapeError):
        micro().forward(images(2), toks([["a"]]))


def test_zero_weights_give_zero_logits():
    m = micro()
    for p in m.params.values():
        p.data[...] = 0
    assert not m.predict(images(1), toks([["a"]])).logits.data.any()


def test_seeded_init_is_deterministic():
    a, b = micro(seed=5), micro(seed=5)
    x, t = images(1), toks([["abc", "de"]])
    np.testing.assert_array_equal(a.predict(x, t).logits.data, b.predict(x, t).logits.data)
    assert not np.array_equal(a.params["enc.stem.w"].data, micro(seed=6).params["enc.stem.w"].data)


def test_instance_order_does_not_change_logits():
    m = micro()
    x = images(1)
    a = m.predict(x, toks([["ab", "cde", "f"]]))
    b = m.predict(x, toks([["f", "ab", "cde"]]))
    np.testing.assert_allclose(a.logits.data, b.logits.data, atol=1e-10)
    np.testing.assert_allclose(b.attn[0, [1, 2, 0]], a.attn[0, :3], atol=1e-10)


def test_dropping_instance_removes_heatmap():
    m = micro()
    x = images(1)
    full = m.predict(x, toks([["ab", "cd", "ef"]]))
    tb = toks([["ab", "cd", "ef"]])
    tb.mask[0, 1] = False
    dropped = m.predict(x, tb)
    assert (np.abs(full.attn[0]).sum(axis=1) > 0).sum() == 3
    assert (np.abs(dropped.attn[0]).sum(axis=1) > 0).sum() == 2
    assert not dropped.attn[0, 1].any()


def test_state_dict_round_trip():
    a, b = micro(seed=1), micro(seed=2)
    b.load_state_dict(a.state_dict())
    x, t = images(1), toks([["a"]])
    np.testing.assert_array_equal(a.predict(x, t).logits.data, b.predict(x, t).logits.data)
    state = a.state_dict()
    state.pop("dec.head.b")
    with pytest.raises(KeyError):
        b.load_state_dict(state)


def test_decode_grad_check():
    m = micro()
    grid, pyr = m.encode_image(images(1))
    pyr = [Array(p.data) for p in pyr]
    rep = grad_check(lambda g: (lambda y: nd.sum_(y * y))(m.decode(g, pyr)), grid.data, tol=1e-5)
    assert rep.passed, rep.summary()


def test_end_to_end_parameter_gradients():
    from odm.loss import EmbeddingBatch, FeatureExtractor, batch_contrastive, ocr_lpips, seg_loss, total_loss

    m = micro(seed=0)
    x = images(2, seed=4)
    t = toks([["ab", "c"], ["de"]])
    y = (np.random.default_rng(5).random((2, 1, 32, 32)) > 0.8).astype(float)
    fx = FeatureExtractor(channels=(4, 4), seed=1, dtype=np.float64)

    def loss():
        out = m.forward(x, t)
        seg = seg_loss(out.logits, y)
        ocr = ocr_lpips(nd.sigmoid(out.logits), y, fx)
        bc = batch_contrastive(EmbeddingBatch(out.img_embed, out.txt_embed))
        return total_loss(seg, ocr, bc)

    rep = check_params(loss, dict(m.named_parameters()), tol=1e-5, per_param=3, seed=0)
    assert rep.passed, rep.summary()

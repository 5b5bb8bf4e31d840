import numpy as np
import pytest

from odm import nd
from odm.nd import Array


def naive_conv(x, w, stride, pad):
    n, c, h, wd = x.shape
    o, _, kh, kw = w.shape
    xp = np.pad(x, ((0, 0), (0, 0), (pad, pad), (pad, pad)))
    ho = (h + 2 * pad - kh) // stride + 1
    wo = (wd + 2 * pad - kw) // stride + 1
    out = np.zeros((n, o, ho, wo))
    for b in range(n):
        for k in range(o):
            for i in range(ho):
                for j in range(wo):
                    patch = xp[b, :, i * stride:i * stride + kh, j * stride:j * stride + kw]
                    out[b, k, i, j] = (patch * w[k]).sum()
    return out


# -- forward contracts ---------------------------------------------------------

def test_matmul_shape():
    out = Array(np.ones((2, 3))) @ Array(np.ones((3, 4)))
    assert out.shape == (2, 4)


def test_matmul_mismatch_names_both_shapes():
    with pytest.raises(nd.ShapeError, match=r"\(2, 3\).*\(4, 4\)"):
        Array(np.ones((2, 3))) @ Array(np.ones((4, 4)))


def test_trailing_broadcast_only():
    a = Array(np.ones((2, 3, 4)))
    assert (a + Array(np.ones(4))).shape == (2, 3, 4)
    assert (a + Array(np.ones((3, 4)))).shape == (2, 3, 4)
    with pytest.raises(nd.ShapeError, match=r"\(2, 3, 4\).*\(2, 1, 4\)"):
        a + Array(np.ones((2, 1, 4)))
    with pytest.raises(nd.ShapeError):
        a + Array(np.ones(3))


def test_softmax_uniform():
    s = nd.softmax(Array(np.zeros(3)))
    np.testing.assert_allclose(s.data, [1 / 3] * 3)


def test_softmax_rows_normalised():
    rng = np.random.default_rng(0)
    s = nd.softmax(Array(rng.normal(scale=20, size=(50, 7)).astype(np.float32))).data
    assert (s >= 0).all()
    np.testing.assert_allclose(s.sum(-1), 1.0, atol=1e-6)


def test_layer_norm_constant_is_zero():
    out = nd.layer_norm(Array(np.full((2, 8), 3.5)))
    np.testing.assert_array_equal(out.data, 0.0)


def test_conv_identity_1x1():
    rng = np.random.default_rng(1)
    x = rng.normal(size=(2, 3, 5, 6))
    w = np.eye(3).reshape(3, 3, 1, 1)
    np.testing.assert_array_equal(nd.conv2d(Array(x), Array(w)).data, x)


def test_conv_ones_kernel_interior_nine():
    x = np.ones((1, 1, 5, 5))
    w = np.ones((1, 1, 3, 3))
    out = nd.conv2d(Array(x), Array(w), pad=1).data[0, 0]
    oracle = naive_conv(x, w, 1, 1)[0, 0]
    np.testing.assert_array_equal(out, oracle)
    assert (out[1:-1, 1:-1] == 9).all()
    assert out[0, 0] == 4 and out[0, 2] == 6


@pytest.mark.parametrize("stride,pad,k", [(1, 0, 3), (2, 1, 3), (2, 0, 1), (1, 2, 5), (3, 1, 3)])
def test_conv_matches_naive(stride, pad, k):
    rng = np.random.default_rng(stride * 10 + pad)
    x = rng.normal(size=(2, 3, 9, 8))
    w = rng.normal(size=(4, 3, k, k))
    got = nd.conv2d(Array(x), Array(w), stride=stride, pad=pad).data
    np.testing.assert_allclose(got, naive_conv(x, w, stride, pad), atol=1e-12)


def test_conv_channel_mismatch():
    with pytest.raises(nd.ShapeError):
        nd.conv2d(Array(np.ones((1, 3, 4, 4))), Array(np.ones((2, 2, 1, 1))))


def test_upsample_blocks():
    x = np.arange(4.0).reshape(1, 1, 2, 2)
    out = nd.upsample_nearest(Array(x), 2).data[0, 0]
    expected = np.array([[0, 0, 1, 1], [0, 0, 1, 1], [2, 2, 3, 3], [2, 2, 3, 3]], dtype=float)
    np.testing.assert_array_equal(out, expected)


def test_dtype_preserved_with_python_scalars():
    a = Array(np.ones(3, dtype=np.float32))
    assert (a * 2.0 + 1.0).dtype == np.float32
    assert nd.mean(a).dtype == np.float32


# -- backward ------------------------------------------------------------------

def test_square_grad():
    x = Array(np.array(3.0), requires_grad=True)
    nd.backward(x * x)
    assert x.grad == 6.0


def test_softmax_ce_grad_closed_form():
    rng = np.random.default_rng(2)
    z = Array(rng.normal(size=(4, 5)), requires_grad=True)
    labels = np.array([0, 3, 1, 4])
    onehot = np.eye(5)[labels]
    loss = -(nd.log_softmax(z) * Array(onehot)).sum()
    nd.backward(loss)
    p = np.exp(z.data) / np.exp(z.data).sum(-1, keepdims=True)
    np.testing.assert_allclose(z.grad, p - onehot, atol=1e-12)


def test_unreached_leaf_gets_zero():
    x = Array(np.ones(3), requires_grad=True)
    y = Array(np.ones(2), requires_grad=True)
    nd.backward(x.sum(), [x, y])
    np.testing.assert_array_equal(y.grad, 0.0)


def test_non_scalar_loss_rejected():
    x = Array(np.ones(3), requires_grad=True)
    with pytest.raises(nd.ContractError):
        nd.backward(x * 2.0)


def test_shared_subgraph_visited_once():
    x = Array(np.array(2.0), requires_grad=True)
    y = Array(np.array(-4.0), requires_grad=True)
    q = (x + y) * (x + 1.0)
    nd.backward(q)
    assert x.grad == 1.0 and y.grad == 3.0


def test_no_grad_records_nothing():
    x = Array(np.ones(2), requires_grad=True)
    with nd.no_grad():
        y = x * 2.0
    assert not y.requires_grad and y._parents == ()


def test_grad_check_linear_is_exact():
    rng = np.random.default_rng(3)
    a = rng.normal(size=6)
    report = nd.grad_check(lambda x: (x * Array(a)).sum(), rng.normal(size=6), h=1e-3)
    assert report.max_error < 1e-9


def test_grad_check_reports_a_wrong_gradient():
    def bad(x):
        # forward x**2 with the gradient of x**3
        out = nd.mul(x, x)
        data = x.data
        return nd.array._node(out.data.sum(), (x,), lambda g: (g * 3 * data ** 2,))

    report = nd.grad_check(bad, np.array([1.0, 2.0]))
    assert not report.passed and len(report.failures) == 2


# finite-difference coverage for every differentiable op

RNG = np.random.default_rng(42)
W35 = RNG.normal(size=(3, 5))
IDS = np.array([[0, 2], [3, 3]])
COEF = RNG.normal(size=(2, 3, 5))
W62 = RNG.normal(size=(6, 2))
E225 = RNG.normal(size=(2, 2, 5))


OPS = {
    "add": (lambda x: (x + Array(W35[0]) * x).sum(), (2, 3, 5)),
    "sub": (lambda x: ((x - 2.0 * x * x) * Array(COEF)).sum(), (2, 3, 5)),
    "mul": (lambda x: (x * x * Array(COEF)).sum(), (2, 3, 5)),
    "div": (lambda x: (Array(COEF) / (x * x + 1.0)).sum(), (2, 3, 5)),
    "matmul": (lambda x: ((x @ Array(W35.T)) * Array(COEF[..., :3])).sum(), (2, 3, 5)),
    "matmul_batched": (lambda x: (x @ nd.swapaxes(x, -1, -2) * Array(COEF[..., :3] @ COEF[..., :3].transpose(0, 2, 1))).sum(), (2, 3, 5)),
    "relu": (lambda x: (nd.relu(x) * Array(COEF)).sum(), (2, 3, 5)),
    "sigmoid": (lambda x: (nd.sigmoid(x) * Array(COEF)).sum(), (2, 3, 5)),
    "exp_log": (lambda x: (nd.log(nd.exp(x) + 1.0) * Array(COEF)).sum(), (2, 3, 5)),
    "abs": (lambda x: (nd.abs_(x) * Array(COEF)).sum(), (2, 3, 5)),
    "clip": (lambda x: (nd.clip(x, -0.5, 0.5) * Array(COEF)).sum(), (2, 3, 5)),
    "softmax": (lambda x: (nd.softmax(x) * Array(COEF)).sum(), (2, 3, 5)),
    "log_softmax": (lambda x: (nd.log_softmax(x) * Array(COEF)).sum(), (2, 3, 5)),
    "layer_norm": (lambda x: (nd.layer_norm(x, Array(W35[1]), Array(W35[2])) * Array(COEF)).sum(), (2, 3, 5)),
    "l2_normalize": (lambda x: (nd.l2_normalize(x) * Array(COEF)).sum(), (2, 3, 5)),
    "mean_axis": (lambda x: (x.mean(axis=1) * Array(COEF[:, 0])).sum(), (2, 3, 5)),
    "sum_keepdims": (lambda x: (nd.expand(x.sum(axis=-1, keepdims=True), (2, 3, 5)) * x * Array(COEF)).sum(), (2, 3, 5)),
    "transpose_reshape": (lambda x: (x.transpose(2, 0, 1).reshape(5, 6) @ Array(W62)).sum(), (2, 3, 5)),
    "expand": (lambda x: (nd.expand(x.sum(axis=1, keepdims=True), (2, 3, 5)) * Array(COEF)).sum(), (2, 3, 5)),
    "concat": (lambda x: (nd.concat([x, x * x], axis=1) * Array(np.concatenate([COEF, COEF], 1))).sum(), (2, 3, 5)),
    "take": (lambda x: (nd.take(x, IDS, axis=2) * nd.take(x, IDS, axis=2)).sum(), (2, 3, 5)),
    "embedding": (lambda x: (nd.embedding(x.reshape(6, 5), IDS) * Array(E225)).sum(), (2, 3, 5)),
}


@pytest.mark.parametrize("name", sorted(OPS))
def test_op_gradients(name):
    f, shape = OPS[name]
    x = np.random.default_rng(7).normal(size=shape)
    report = nd.grad_check(f, x, h=1e-6, tol=1e-6)
    assert report.passed, (name, report.summary(), report.failures[:3])


@pytest.mark.parametrize("stride,pad", [(1, 1), (2, 1), (2, 0)])
def test_conv_gradients(stride, pad):
    rng = np.random.default_rng(stride + pad)
    x0 = rng.normal(size=(2, 3, 6, 7))
    w0 = rng.normal(size=(2, 3, 3, 3))
    b0 = rng.normal(size=2)
    out_shape = nd.conv2d(Array(x0), Array(w0), stride=stride, pad=pad).shape
    coef = Array(rng.normal(size=out_shape))
    rx = nd.grad_check(lambda x: (nd.conv2d(x, Array(w0), Array(b0), stride, pad) * coef).sum(), x0)
    rw = nd.grad_check(lambda w: (nd.conv2d(Array(x0), w, Array(b0), stride, pad) * coef).sum(), w0)
    rb = nd.grad_check(lambda b: (nd.conv2d(Array(x0), Array(w0), b, stride, pad) * coef).sum(), b0)
    assert rx.passed and rw.passed and rb.passed, (rx.summary(), rw.summary(), rb.summary())


def test_upsample_gradients():
    rng = np.random.default_rng(5)
    coef = Array(rng.normal(size=(1, 2, 6, 6)))
    report = nd.grad_check(lambda x: (nd.upsample_nearest(x, 3) * coef).sum(), rng.normal(size=(1, 2, 2, 2)))
    assert report.passed


def test_random_three_layer_network_single_precision():
    # autodiff runs in float32; the reference differences use float64 at h = 1e-3 * scale
    rng = np.random.default_rng(11)
    ws = [rng.normal(scale=0.5, size=s) for s in [(4, 8), (8, 8), (8, 1)]]
    x_in = rng.normal(size=(5, 4))

    def net(params, dtype):
        h = Array(x_in.astype(dtype))
        for i, w in enumerate(params):
            h = h @ w
            if i < 2:
                h = nd.sigmoid(h)
        return (h * h).mean()

    leaves = [Array(w.astype(np.float32), requires_grad=True) for w in ws]
    nd.backward(net(leaves, np.float32), leaves)
    for k, w in enumerate(ws):
        h = 1e-3 * np.abs(w).max()
        numeric = np.zeros(w.size)
        for i in range(w.size):
            plus, minus = [x.copy() for x in ws], [x.copy() for x in ws]
            plus[k].reshape(-1)[i] += h
            minus[k].reshape(-1)[i] -= h
            numeric[i] = (net([Array(p) for p in plus], np.float64).item()
                          - net([Array(m) for m in minus], np.float64).item()) / (2 * h)
        err = nd.relative_error(leaves[k].grad.reshape(-1), numeric)
        assert err.max() < 1e-3, (k, err.max())


def test_grad_check_tolerates_kink_inside_stencil():
    # the relu kink sits 0.3h to the right of the evaluation point
    h = 1e-5
    rep = nd.grad_check(lambda x: nd.sum_(nd.relu(x - 0.3 * h) * 3.0 + x), np.zeros(1), h=h)
    assert rep.passed, rep.summary()


def test_kink_aware_check_still_flags_wrong_gradient():
    def bad_relu(x):
        # relu forward with a gradient scaled by 1.5
        data = x.data
        return nd.array._node(np.maximum(data, 0), (x,), lambda g: (1.5 * g * (data > 0),))

    rep = nd.grad_check(lambda x: nd.sum_(bad_relu(x)), np.array([0.5, -0.5, 2.0]))
    assert not rep.passed


def test_bce_with_logits_value_and_gradient():
    z = np.array([[-3.0, 0.0, 2.0, 50.0]])
    y = np.array([[0.0, 1.0, 1.0, 0.0]])
    p = np.clip(1 / (1 + np.exp(-z)), 1e-7, 1 - 1e-7)
    x = Array(z, requires_grad=True)
    loss = nd.bce_with_logits(x, y)
    assert loss.item() == pytest.approx(np.mean(-(y * np.log(p) + (1 - y) * np.log(1 - p))), rel=1e-12)
    loss.backward()
    np.testing.assert_allclose(x.grad, (1 / (1 + np.exp(-z)) - y) / 4, atol=1e-15)


def test_bce_with_logits_grad_check():
    y = (np.random.default_rng(0).random((3, 5)) > 0.5).astype(float)
    rep = nd.grad_check(lambda x: nd.bce_with_logits(x, y), np.random.default_rng(1).normal(size=(3, 5)))
    assert rep.passed, rep.summary()


def test_relu_propagates_nan():
    assert np.isnan(nd.relu(Array(np.array([np.nan, 1.0]))).data[0])

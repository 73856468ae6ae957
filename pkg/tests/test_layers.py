# -*- coding: utf-8 -*-
# Filename: test_layers.py

"""
Temporal layers, skip operations, the input encoder and the architecture builder.
Created on 2026-09-18
"""

import math
import numpy as np
import pytest
from ttfs_snn.errors import ConfigError, ContractError
from ttfs_snn.layers import encoder, skip
from ttfs_snn.layers.architecture import ARCHITECTURES, make_architecture
from ttfs_snn.layers.temporal_layers import (extract_patches, min_time_pool, min_time_pool_backward,
                                             temporal_conv2d, temporal_dense,
                                             temporal_dense_backward)

def test_dense_single_synapse():
    t, _ = temporal_dense(np.array([[0.0]]), np.array([[2.0]]))
    assert t[0, 0] == pytest.approx(math.log(2.0))

def test_dense_zero_weights_are_silent():
    t, _ = temporal_dense(np.array([[0.1, 0.4, 0.2]]), np.zeros((2, 3)))
    assert np.all(np.isinf(t))

def test_dense_permutation_symmetry():
    rng = np.random.default_rng(0)
    x = rng.uniform(0.0, 1.0, (4, 6))
    w = rng.uniform(0.0, 0.6, (3, 6))
    perm = rng.permutation(6)
    a, _ = temporal_dense(x, w)
    b, _ = temporal_dense(x[:, perm], w[:, perm])
    np.testing.assert_allclose(a, b)

def test_dense_backward_finite_differences():
    rng = np.random.default_rng(1)
    x = rng.uniform(0.0, 1.0, (3, 6))
    w = rng.uniform(0.2, 0.6, (2, 6))
    g = rng.normal(size=(3, 2))
    t, cache = temporal_dense(x, w)
    assert np.all(np.isfinite(t))
    g_x, g_w = temporal_dense_backward(cache, w, g)

    def loss(xx, ww):
        return float(np.sum(temporal_dense(xx, ww)[0] * g))
    eps = 1.0e-6
    for idx in [(0, 0), (1, 3), (1, 5)]:
        wp, wm = w.copy(), w.copy()
        wp[idx] += eps
        wm[idx] -= eps
        assert g_w[idx] == pytest.approx((loss(x, wp) - loss(x, wm)) / (2 * eps), rel=1e-4, abs=1e-8)
    for idx in [(0, 1), (2, 4)]:
        xp, xm = x.copy(), x.copy()
        xp[idx] += eps
        xm[idx] -= eps
        assert g_x[idx] == pytest.approx((loss(xp, w) - loss(xm, w)) / (2 * eps), rel=1e-4, abs=1e-8)

def test_conv_uniform_input():
    c, s = 0.3, 1.8
    x = np.full((1, 2, 4, 4), c)
    kernel = np.full((2, 2, 3, 3), s / 18.0)
    t, _ = temporal_conv2d(x, kernel, stride=1, padding=0)
    assert t.shape == (1, 2, 2, 2)
    np.testing.assert_allclose(t, c + math.log(s / (s - 1.0)))

def test_conv_output_shape():
    x = np.zeros((2, 3, 8, 8))
    t, _ = temporal_conv2d(x, np.full((5, 3, 3, 3), 0.1), stride=2, padding=1)
    assert t.shape == (2, 5, 4, 4)

def test_conv_channel_mismatch():
    with pytest.raises(ConfigError):
        temporal_conv2d(np.zeros((1, 2, 4, 4)), np.ones((1, 3, 3, 3)))

def test_conv_equals_dense_on_patches():
    rng = np.random.default_rng(2)
    x = rng.uniform(0.0, 2.0, (2, 3, 6, 6))
    kernel = rng.uniform(0.0, 0.2, (4, 3, 3, 3))
    t, _ = temporal_conv2d(x, kernel, stride=1, padding=1)
    patches = extract_patches(x, 3, 1, 1, np.inf)
    d, _ = temporal_dense(patches.reshape((-1, patches.shape[-1])), kernel.reshape((4, -1)))
    np.testing.assert_array_equal(t, np.transpose(d.reshape((2, 6, 6, 4)), (0, 3, 1, 2)))

def test_conv_1x1_is_dense_per_pixel():
    rng = np.random.default_rng(4)
    x = rng.uniform(0.0, 1.0, (1, 3, 2, 2))
    kernel = rng.uniform(0.3, 0.8, (2, 3, 1, 1))
    t, _ = temporal_conv2d(x, kernel, stride=1, padding=0)
    for i in range(2):
        for j in range(2):
            d, _ = temporal_dense(x[:, :, i, j], kernel[:, :, 0, 0])
            np.testing.assert_allclose(t[:, :, i, j], d)

def test_min_time_pool():
    x = np.array([[[[0.2, 0.5], [0.7, 1.0]]]])
    t, _ = min_time_pool(x)
    assert t[0, 0, 0, 0] == 0.2
    t, _ = min_time_pool(np.full((1, 1, 2, 2), np.inf))
    assert np.isinf(t[0, 0, 0, 0])
    t, _ = min_time_pool(np.full((1, 2, 4, 4), 0.4))
    np.testing.assert_array_equal(t, np.full((1, 2, 2, 2), 0.4))

def test_min_time_pool_ceil_mode():
    x = np.arange(9.0).reshape((1, 1, 3, 3))
    t, _ = min_time_pool(x, ceil_mode=True)
    np.testing.assert_array_equal(t[0, 0], [[0.0, 2.0], [6.0, 8.0]])
    t, _ = min_time_pool(x, ceil_mode=False)
    assert t.shape == (1, 1, 1, 1)

def test_min_time_pool_backward_routes_to_winner():
    x = np.array([[[[0.5, 0.2], [0.7, 1.0]]]])
    _, cache = min_time_pool(x)
    g = min_time_pool_backward(cache, np.array([[[[3.0]]]]))
    np.testing.assert_array_equal(g, [[[[0.0, 3.0], [0.0, 0.0]]]])

def test_split_and_concat():
    x = np.arange(4.0).reshape((1, 4, 1, 1))
    a, b = skip.channel_split(x)
    assert a.ravel().tolist() == [0.0, 1.0]
    assert b.ravel().tolist() == [2.0, 3.0]
    np.testing.assert_array_equal(skip.concat_channels(a, b), x)
    with pytest.raises(ConfigError):
        skip.channel_split(np.zeros((1, 3, 1, 1)))
    with pytest.raises(ConfigError):
        skip.concat_channels(np.zeros((1, 2, 2, 2)), np.zeros((1, 2, 3, 3)))
    ga, gb = skip.concat_channels_backward(np.arange(5.0).reshape((1, 5)), 2)
    assert ga.tolist() == [[0.0, 1.0]] and gb.tolist() == [[2.0, 3.0, 4.0]]

def test_channel_shuffle():
    x = np.arange(4.0).reshape((1, 4, 1, 1))
    y = skip.channel_shuffle(x, 2)
    assert y.ravel().tolist() == [0.0, 2.0, 1.0, 3.0]
    np.testing.assert_array_equal(skip.channel_shuffle(y, 2), x)
    np.testing.assert_array_equal(skip.channel_shuffle(x, 1), x)
    with pytest.raises(ConfigError):
        skip.channel_shuffle(np.zeros((1, 6, 1, 1)), 4)

def test_channel_shuffle_backward_is_inverse():
    x = np.arange(12.0).reshape((1, 12))
    y = skip.channel_shuffle(x, 3)
    np.testing.assert_array_equal(skip.channel_shuffle_backward(y, 3), x)

def test_delay_apply():
    x = np.array([[[[0.1]], [[0.4]]], [[[np.inf]], [[1.0]]]])
    np.testing.assert_array_equal(skip.delay_apply(x, np.array([0.0, 0.0]), 'channel'), x)
    y = skip.delay_apply(x, np.array([0.3, 0.5]), 'channel')
    assert y[0, 0, 0, 0] == pytest.approx(0.4)
    assert y[0, 1, 0, 0] == pytest.approx(0.9)
    assert np.isinf(y[1, 0, 0, 0])
    assert y[1, 1, 0, 0] == pytest.approx(1.5)
    y = skip.delay_apply(x, np.array([0.25]), 'layer')
    assert y[0, 1, 0, 0] == pytest.approx(0.65)

def test_delay_apply_pixel():
    x = np.zeros((1, 2, 2, 2))
    theta = np.array([0.1, 0.2, 0.3, 0.4])
    y = skip.delay_apply(x, theta, 'pixel')
    np.testing.assert_allclose(y[0, 1], [[0.1, 0.2], [0.3, 0.4]])
    assert skip.delay_shape('pixel', (2, 2, 2)) == (4,)

def test_delay_errors():
    x = np.zeros((1, 2, 1, 1))
    with pytest.raises(ContractError):
        skip.delay_apply(x, np.array([-0.1, 0.0]), 'channel')
    with pytest.raises(ContractError):
        skip.delay_apply(x, np.array([0.1, 0.1, 0.1]), 'channel')
    with pytest.raises(ConfigError):
        skip.delay_shape('row', (2, 1, 1))

def test_delay_backward_counts_finite_spikes():
    x = np.array([[[[0.1, np.inf]], [[0.4, 0.2]]]])
    g = np.ones(x.shape)
    g_x, g_theta = skip.delay_apply_backward(x, np.array([0.5, 0.5]), 'channel', g)
    np.testing.assert_array_equal(g_x, g)
    assert g_theta.tolist() == [1.0, 2.0]

def test_delay_chained_time_shift():
    rng = np.random.default_rng(6)
    x = rng.uniform(0.0, 1.0, (1, 3, 4, 4))
    kernel = rng.uniform(0.0, 0.3, (2, 3, 3, 3))
    delta = 0.35
    a, _ = temporal_conv2d(x, kernel, 1, 0)
    b, _ = temporal_conv2d(skip.delay_apply(x, np.array([delta]), 'layer'), kernel, 1, 0)
    fin = np.isfinite(a)
    assert np.array_equal(fin, np.isfinite(b))
    np.testing.assert_allclose(b[fin], a[fin] + delta, atol=1e-9)

def test_add_skip():
    assert skip.add_skip(np.array([1.2]), np.array([0.8]))[0] == pytest.approx(2.0)
    rng = np.random.default_rng(8)
    a = rng.uniform(0.0, 3.0, (2, 3, 4, 4))
    b = rng.uniform(0.0, 3.0, (2, 3, 4, 4))
    np.testing.assert_array_equal(skip.add_skip(a, np.zeros(a.shape)), a)
    out = skip.add_skip(a, b)
    assert np.all(out >= a) and np.all(out >= b)
    assert np.isinf(skip.add_skip(np.array([np.inf]), np.array([1.0]))[0])
    with pytest.raises(ConfigError):
        skip.add_skip(np.zeros((1, 2)), np.zeros((1, 3)))

def test_pad_channels():
    x = np.ones((1, 2, 2, 2))
    y = skip.pad_channels(x, 5)
    assert y.shape == (1, 5, 2, 2)
    assert np.all(y[:, 2:] == 0.0)
    assert skip.pad_channels_backward(np.ones(y.shape), 2).shape == x.shape

def _bypass_params(kernel):
    c = kernel.shape[0]
    return encoder.EncoderParams(kernel, np.zeros((c,)), np.ones((c,)), np.zeros((c,)),
                                 np.zeros((c,)), np.ones((c,)))

def test_encoder_zero_image():
    params = _bypass_params(np.random.default_rng(0).normal(size=(3, 1, 3, 3)))
    t, _ = encoder.encode_input(np.zeros((2, 1, 5, 5)), params)
    assert t.shape == (2, 3, 5, 5)
    assert np.all(t == 0.0)

def test_encoder_identity_kernel():
    image = np.random.default_rng(1).uniform(-1.0, 1.0, (1, 1, 4, 4))
    params = _bypass_params(np.ones((1, 1, 1, 1)))
    t, _ = encoder.encode_input(image, params)
    np.testing.assert_allclose(t, np.maximum(image, 0.0) / math.sqrt(1.0 + encoder.BN_EPS))
    assert t.min() >= 0.0

def test_encoder_training_updates_running_stats():
    rng = np.random.default_rng(2)
    params = _bypass_params(rng.normal(size=(2, 1, 3, 3)))
    t, _ = encoder.encode_input(rng.uniform(0.0, 1.0, (4, 1, 6, 6)), params, training=True)
    assert t.min() >= 0.0
    assert not np.allclose(params.bn_mean, 0.0)
    before = params.bn_mean.copy()
    encoder.encode_input(rng.uniform(0.0, 1.0, (4, 1, 6, 6)), params, training=False)
    np.testing.assert_array_equal(params.bn_mean, before)

def test_encoder_backward_finite_differences():
    rng = np.random.default_rng(3)
    image = rng.uniform(0.0, 1.0, (2, 1, 4, 4))
    params = _bypass_params(rng.normal(size=(2, 1, 3, 3)))
    g = rng.normal(size=(2, 2, 4, 4))
    _, cache = encoder.encode_input(image, params, training=True, update_stats=False)
    grads = encoder.encode_input_backward(cache, params, g)

    def loss():
        return float(np.sum(encoder.encode_input(image, params, True, False)[0] * g))
    eps = 1.0e-6
    for name, idx in (('kernel', (0, 0, 1, 1)), ('kernel', (1, 0, 0, 2)), ('bn_scale', (1,)),
                      ('bn_shift', (0,))):
        arr = getattr(params, name)
        orig = arr[idx]
        arr[idx] = orig + eps
        plus = loss()
        arr[idx] = orig - eps
        minus = loss()
        arr[idx] = orig
        assert grads[name][idx] == pytest.approx((plus - minus) / (2 * eps), rel=1e-4, abs=1e-7)

def test_make_architecture_baseline():
    cfg = make_architecture('baseline', (1, 28, 28))
    assert cfg.arch == 'baseline'
    assert cfg.layers[-1].kind == 'dense' and cfg.layers[-1].out_features == 10
    assert [l.name for l in cfg.layers] == ['conv1', 'pool1', 'conv2', 'conv3', 'conv4', 'conv5', 'fc']

def test_make_architecture_variants():
    cfg = make_architecture('concat_skip_delay', (1, 28, 28), delay_granularity='channel',
                            delay_init=0.5)
    blocks = [l for l in cfg.layers if l.kind == 'shuffle_block']
    assert [b.name for b in blocks] == ['block1', 'block2']
    assert all(b.delay is not None and b.delay.init == 0.5 for b in blocks)
    cfg = make_architecture('concat_skip', (1, 28, 28))
    assert all(l.delay is None for l in cfg.layers if l.kind == 'shuffle_block')
    cfg = make_architecture('add_skip', (1, 28, 28))
    assert [l.name for l in cfg.layers if l.kind == 'residual'] == ['res1', 'res2']
    assert len(ARCHITECTURES) == 4

def test_make_architecture_errors():
    with pytest.raises(ConfigError):
        make_architecture('densenet', (1, 28, 28))
    with pytest.raises(ConfigError):
        make_architecture('baseline', (1, 28, 28), width=5)
    with pytest.raises(ConfigError):
        make_architecture('concat_skip_delay', (1, 28, 28), delay_init=-1.0)

# -*- coding: utf-8 -*-
# Filename: encoder.py

"""
Real-valued input encoder: convolution, batch normalization and ReLU.
The non-negative activation of every neuron is read directly as its spike time,
so the encoder emits exactly one spike per neuron.
Created on 2026-09-03
"""

import numpy as np
from .temporal_layers import extract_patches, fold_patches
from ..errors import NumericError

BN_EPS = 1.0e-5
BN_MOMENTUM = 0.1

class EncoderParams(object):
    '''
    Parameters and running statistics of the encoder.
    The arrays are used in place, running statistics are updated by encode_input
    in training mode.
    '''
    def __init__(self, kernel, bias, bn_scale, bn_shift, bn_mean, bn_var):
        '''
        Args:
            kernel: (C_out, C_in, k, k) conv kernel.
            bias: (C_out,) conv bias.
            bn_scale, bn_shift: (C_out,) batch norm affine parameters.
            bn_mean, bn_var: (C_out,) running statistics.
        '''
        self.kernel = kernel
        self.bias = bias
        self.bn_scale = bn_scale
        self.bn_shift = bn_shift
        self.bn_mean = bn_mean
        self.bn_var = bn_var

def encode_input(image, params, training=False, update_stats=None):
    '''
    Args:
        image: (B, C_in, H, W) real-valued images.
        params: EncoderParams.
        training: batch statistics if True, running statistics otherwise.
        update_stats: update the running statistics, defaults to training.
    Returns:
        t: (B, C_out, H, W) spike times, all >= 0 and finite.
        cache: saved values for encode_input_backward.
    '''
    if update_stats is None:
        update_stats = training
    image = np.asarray(image, dtype=np.float64)
    c_out, k = params.kernel.shape[0], params.kernel.shape[2]
    patches = extract_patches(image, k, 1, k // 2, 0.0)
    a = patches @ params.kernel.reshape((c_out, -1)).T.astype(np.float64) + params.bias
    if training:
        axes = (0, 1, 2)
        mean = np.mean(a, axis=axes)
        var = np.var(a, axis=axes)
        if update_stats:
            n = a.size // c_out
            unbiased = var * n / max(n - 1, 1)
            params.bn_mean[...] = (1.0 - BN_MOMENTUM) * params.bn_mean + BN_MOMENTUM * mean
            params.bn_var[...] = (1.0 - BN_MOMENTUM) * params.bn_var + BN_MOMENTUM * unbiased
    else:
        mean = params.bn_mean.astype(np.float64)
        var = params.bn_var.astype(np.float64)
    inv_std = 1.0 / np.sqrt(var + BN_EPS)
    x_hat = (a - mean) * inv_std
    y = params.bn_scale * x_hat + params.bn_shift
    if not np.all(np.isfinite(y)):
        raise NumericError('encoder produced non-finite activations.')
    t = np.maximum(y, 0.0)
    cache = (patches, x_hat, inv_std, y > 0.0, training, image.shape)
    return np.ascontiguousarray(np.transpose(t, (0, 3, 1, 2))), cache

def encode_input_backward(cache, params, g_t, need_input_grad=False):
    '''
    Args:
        cache: cache from encode_input.
        params: EncoderParams used in the forward.
        g_t: (B, C_out, H, W) gradient w.r.t. the encoder spike times.
        need_input_grad: also return the gradient w.r.t. the image.
    Returns:
        dict with keys kernel, bias, bn_scale, bn_shift (and image if requested).
    '''
    patches, x_hat, inv_std, active, training, image_shape = cache
    c_out, k = params.kernel.shape[0], params.kernel.shape[2]
    g_y = np.where(active, np.transpose(g_t, (0, 2, 3, 1)), 0.0)
    axes = (0, 1, 2)
    grads = {'bn_shift': np.sum(g_y, axis=axes),
             'bn_scale': np.sum(g_y * x_hat, axis=axes)}
    g_xhat = g_y * params.bn_scale
    if training:
        n = g_y.size // c_out
        g_a = inv_std / n * (n * g_xhat - np.sum(g_xhat, axis=axes) -
                             x_hat * np.sum(g_xhat * x_hat, axis=axes))
    else:
        g_a = g_xhat * inv_std
    g_rows = g_a.reshape((-1, c_out))
    grads['bias'] = np.sum(g_rows, axis=0)
    grads['kernel'] = (g_rows.T @ patches.reshape((g_rows.shape[0], -1))).reshape(params.kernel.shape)
    if need_input_grad:
        g_patches = g_a @ params.kernel.reshape((c_out, -1)).astype(np.float64)
        grads['image'] = fold_patches(g_patches, image_shape, k, 1, k // 2)
    return grads

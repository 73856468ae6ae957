# -*- coding: utf-8 -*-
# Filename: temporal_layers.py

"""
Temporal dense, temporal convolution and min-time pooling layers.
Layers take and return spike-time tensors (+inf = no spike). Every forward
returns (output, cache) and the matching *_backward consumes the cache.
Created on 2026-09-03
"""

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from ..temporal import spike_time
from ..temporal.spike_time import Z_MAX
from ..errors import ConfigError, ContractError

def extract_patches(x, kernel, stride, padding, fill):
    '''
    Receptive fields of a 2-D convolution.
    Args:
        x: (B, C, H, W) array.
        kernel: kernel size k.
        stride: stride.
        padding: zero-based padding on every side.
        fill: value written into padded positions.
    Returns:
        (B, H_out, W_out, C*k*k) array, channel-major then kernel row, kernel col,
        matching kernel.reshape((C_out, -1)).
    '''
    b, c, h, w = x.shape
    if padding > 0:
        x = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)),
                   mode='constant', constant_values=fill)
    if x.shape[2] < kernel or x.shape[3] < kernel:
        raise ConfigError('kernel %s does not fit input %sx%s (padding %s).'\
                          % (kernel, h, w, padding))
    win = sliding_window_view(x, (kernel, kernel), axis=(2, 3))[:, :, ::stride, ::stride]
    h_out, w_out = win.shape[2], win.shape[3]
    return np.ascontiguousarray(np.transpose(win, (0, 2, 3, 1, 4, 5))).reshape(
        (b, h_out, w_out, c * kernel * kernel))

def fold_patches(g, x_shape, kernel, stride, padding):
    '''
    Adjoint of extract_patches: sum patch gradients back onto the input grid.
    Args:
        g: (B, H_out, W_out, C*k*k) gradient w.r.t. the patches.
        x_shape: shape of the unpadded input (B, C, H, W).
        kernel, stride, padding: as in extract_patches.
    Returns:
        (B, C, H, W) gradient; contributions to padded positions are dropped.
    '''
    b, c, h, w = x_shape
    h_out, w_out = g.shape[1], g.shape[2]
    g6 = g.reshape((b, h_out, w_out, c, kernel, kernel))
    out = np.zeros((b, c, h + 2 * padding, w + 2 * padding))
    for i in range(kernel):
        for j in range(kernel):
            out[:, :, i:i + stride * h_out:stride, j:j + stride * w_out:stride] +=\
                np.transpose(g6[:, :, :, :, i, j], (0, 3, 1, 2))
    return out[:, :, padding:padding + h, padding:padding + w]

def conv_output_size(size, kernel, stride, padding):
    '''
    Output length of a convolution along one axis.
    '''
    return (size + 2 * padding - kernel) // stride + 1

def temporal_dense(x, weights):
    '''
    Fully connected layer of non-leaky integrate-and-fire neurons.
    Args:
        x: (B, F_in) input spike times.
        weights: (F_out, F_in) weights.
    Returns:
        t: (B, F_out) output spike times.
        cache: saved values for temporal_dense_backward.
    '''
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or weights.shape[1] != x.shape[1]:
        raise ContractError('dense layer expects (B, %s) input, got %s.'\
                            % (weights.shape[1], x.shape))
    z = spike_time.z_of_time(x)
    cc = spike_time.causal_solve(z, weights)
    t = spike_time.time_of_z(cc.z_out)
    return t, (z, cc)

def temporal_dense_backward(cache, weights, g_t):
    '''
    Args:
        cache: cache from temporal_dense.
        weights: weights used in the forward.
        g_t: (B, F_out) gradient w.r.t. the output spike times.
    Returns:
        g_x: (B, F_in) gradient w.r.t. the input spike times.
        g_w: (F_out, F_in) gradient w.r.t. the weights.
    '''
    z, cc = cache
    g_zout = _time_to_z_grad(g_t, cc.z_out)
    g_z, g_w = spike_time.causal_grad(cc, weights, g_zout)
    return g_z * np.where(z < Z_MAX, z, 0.0), g_w

def _time_to_z_grad(g_t, z_out):
    '''
    dL/dz_out from dL/dt_out with t = ln z; silent outputs pass no gradient.
    '''
    fires = z_out < Z_MAX
    return np.where(fires, np.where(fires, g_t, 0.0) / z_out, 0.0)

def temporal_conv2d(x, kernel, stride=1, padding=1):
    '''
    2-D convolution of non-leaky integrate-and-fire neurons.
    Each output location solves one neuron over the k*k*C_in synapses of its
    receptive field. Padded positions are absent synapses (z = Z_MAX), not t = 0 spikes.
    Args:
        x: (B, C_in, H, W) input spike times.
        kernel: (C_out, C_in, k, k) weights.
        stride: stride.
        padding: padding on every side.
    Returns:
        t: (B, C_out, H_out, W_out) output spike times.
        cache: saved values for temporal_conv2d_backward.
    '''
    x = np.asarray(x, dtype=np.float64)
    c_out, c_in, k = kernel.shape[0], kernel.shape[1], kernel.shape[2]
    if x.ndim != 4 or x.shape[1] != c_in:
        raise ConfigError('conv expects %s input channels, got input of shape %s.'\
                          % (c_in, x.shape))
    z = spike_time.z_of_time(x)
    patches = extract_patches(z, k, stride, padding, Z_MAX)
    b, h_out, w_out, n_in = patches.shape
    cc = spike_time.causal_solve(patches.reshape((-1, n_in)), kernel.reshape((c_out, -1)))
    t = spike_time.time_of_z(cc.z_out).reshape((b, h_out, w_out, c_out))
    return np.ascontiguousarray(np.transpose(t, (0, 3, 1, 2))),\
           (z, cc, stride, padding, (b, h_out, w_out))

def temporal_conv2d_backward(cache, kernel, g_t):
    '''
    Args:
        cache: cache from temporal_conv2d.
        kernel: kernel used in the forward.
        g_t: (B, C_out, H_out, W_out) gradient w.r.t. the output spike times.
    Returns:
        g_x: (B, C_in, H, W) gradient w.r.t. the input spike times.
        g_kernel: gradient w.r.t. the kernel.
    '''
    z, cc, stride, padding, (b, h_out, w_out) = cache
    c_out, k = kernel.shape[0], kernel.shape[2]
    g_rows = np.transpose(g_t, (0, 2, 3, 1)).reshape((-1, c_out))
    g_zout = _time_to_z_grad(g_rows, cc.z_out)
    g_patches, g_w = spike_time.causal_grad(cc, kernel.reshape((c_out, -1)), g_zout)
    g_z = fold_patches(g_patches.reshape((b, h_out, w_out, -1)), z.shape, k, stride, padding)
    return g_z * np.where(z < Z_MAX, z, 0.0), g_w.reshape(kernel.shape)

def min_time_pool(x, window=2, stride=2, ceil_mode=False):
    '''
    Time-domain max pooling: the earliest spike of every window propagates.
    Args:
        x: (B, C, H, W) spike times.
        window: window size.
        stride: stride.
        ceil_mode: if True, trailing partial windows are kept; the missing
            positions count as silent.
    Returns:
        t: (B, C, H_out, W_out) spike times.
        cache: saved values for min_time_pool_backward.
    '''
    x = np.asarray(x, dtype=np.float64)
    b, c, h, w = x.shape
    pad_h, pad_w = 0, 0
    if ceil_mode:
        pad_h = max(0, (-(-(h - window) // stride)) * stride + window - h)
        pad_w = max(0, (-(-(w - window) // stride)) * stride + window - w)
        if pad_h or pad_w:
            x = np.pad(x, ((0, 0), (0, 0), (0, pad_h), (0, pad_w)),
                       mode='constant', constant_values=np.inf)
    if x.shape[2] < window or x.shape[3] < window:
        raise ConfigError('pool window %s does not fit input %sx%s.' % (window, h, w))
    win = sliding_window_view(x, (window, window), axis=(2, 3))[:, :, ::stride, ::stride]
    h_out, w_out = win.shape[2], win.shape[3]
    flat = win.reshape((b, c, h_out, w_out, window * window))
    arg = np.argmin(flat, axis=4)
    t = np.take_along_axis(flat, arg[..., np.newaxis], axis=4)[..., 0]
    return t, (arg, (b, c, h, w), window, stride, np.isfinite(t))

def min_time_pool_backward(cache, g_t):
    '''
    Route every output gradient to the input that won its window.
    '''
    arg, (b, c, h, w), window, stride, finite = cache
    h_out, w_out = arg.shape[2], arg.shape[3]
    rows = np.arange(h_out).reshape((1, 1, h_out, 1)) * stride + arg // window
    cols = np.arange(w_out).reshape((1, 1, 1, w_out)) * stride + arg % window
    bi = np.broadcast_to(np.arange(b).reshape((b, 1, 1, 1)), arg.shape)
    ci = np.broadcast_to(np.arange(c).reshape((1, c, 1, 1)), arg.shape)
    g = np.where(finite, g_t, 0.0)
    g_x = np.zeros((b, c, max(h, int(rows.max()) + 1), max(w, int(cols.max()) + 1)))
    np.add.at(g_x, (bi, ci, rows, cols), g)
    return g_x[:, :, :h, :w]

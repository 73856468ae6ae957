# -*- coding: utf-8 -*-
# Filename: skip.py

"""
Skip-connection operations on spike-time tensors: channel split, concatenation,
channel shuffle, learnable delays, addition skips and channel padding.
Channels are always axis 1.
Created on 2026-09-04
"""

import numpy as np
from ..errors import ConfigError, ContractError

GRANULARITIES = ('layer', 'channel', 'pixel')

def channel_split(x):
    '''
    Split x into two halves along the channel axis.
    Returns:
        (first, second) halves.
    '''
    c = x.shape[1]
    if c % 2 != 0:
        raise ConfigError('cannot split %s channels into halves.' % c)
    return x[:, :c // 2], x[:, c // 2:]

def channel_split_backward(g_first, g_second):
    '''
    Either half may be None if it received no gradient.
    '''
    if g_first is None:
        g_first = np.zeros(g_second.shape)
    if g_second is None:
        g_second = np.zeros(g_first.shape)
    return np.concatenate([g_first, g_second], axis=1)

def concat_channels(a, b):
    '''
    Concatenate two tensors along the channel axis.
    '''
    if a.shape[0] != b.shape[0] or a.shape[2:] != b.shape[2:]:
        raise ConfigError('cannot concatenate %s and %s.' % (a.shape, b.shape))
    return np.concatenate([a, b], axis=1)

def concat_channels_backward(g, n_first):
    '''
    Returns:
        gradients of the first and second operand.
    '''
    return g[:, :n_first], g[:, n_first:]

def shuffle_permutation(c, groups=2):
    '''
    Source channel of every output channel of channel_shuffle.
    '''
    if groups < 1 or c % groups != 0:
        raise ConfigError('%s channels are not divisible into %s groups.' % (c, groups))
    return np.arange(c).reshape((groups, c // groups)).T.ravel()

def channel_shuffle(x, groups=2):
    '''
    Interleave channel groups: view the channels as (groups, C/groups), transpose
    and flatten. For 4 channels [a, b, c, d] and 2 groups this gives [a, c, b, d].
    '''
    return x[:, shuffle_permutation(x.shape[1], groups)]

def channel_shuffle_backward(g, groups=2):
    perm = shuffle_permutation(g.shape[1], groups)
    g_x = np.empty(g.shape)
    g_x[:, perm] = g
    return g_x

def delay_shape(granularity, x_shape):
    '''
    Shape of the delay vector for a tensor of shape x_shape = (C, H, W).
    '''
    if granularity == 'layer':
        return (1,)
    if granularity == 'channel':
        return (x_shape[0],)
    if granularity == 'pixel':
        if len(x_shape) != 3:
            raise ConfigError('pixel delays need a (C, H, W) tensor, got %s.' % (x_shape,))
        return (x_shape[1] * x_shape[2],)
    raise ConfigError('unknown delay granularity: %s' % granularity)

def _broadcast_theta(theta, granularity, x):
    expected = delay_shape(granularity, x.shape[1:])
    if theta.shape != expected:
        raise ContractError('delay vector has shape %s, expected %s for %s granularity.'\
                            % (theta.shape, expected, granularity))
    theta = theta.astype(np.float64)
    if granularity == 'layer':
        return theta[0]
    if granularity == 'channel':
        return theta.reshape((1, -1) + (1,) * (x.ndim - 2))
    return theta.reshape((1, 1, x.shape[2], x.shape[3]))

def delay_apply(x, theta, granularity):
    '''
    Shift spike times by non-negative learnable delays. Silent neurons stay silent.
    Args:
        x: spike-time tensor (B, C, ...).
        theta: delay vector, see delay_shape.
        granularity: 'layer', 'channel' or 'pixel'.
    Returns:
        delayed tensor of the same shape.
    '''
    theta = np.asarray(theta)
    if np.any(theta < 0.0) or np.any(np.isnan(theta)):
        raise ContractError('delays must be >= 0, got min %s.' % np.min(theta))
    return x + _broadcast_theta(theta, granularity, x)

def delay_apply_backward(x, theta, granularity, g):
    '''
    Returns:
        g_x: gradient w.r.t. x (identity).
        g_theta: gradient w.r.t. theta, summed over finite spikes only.
    '''
    g_f = np.where(np.isfinite(x), g, 0.0)
    if granularity == 'layer':
        g_theta = np.array([np.sum(g_f)])
    elif granularity == 'channel':
        g_theta = np.sum(g_f, axis=tuple(i for i in range(g_f.ndim) if i != 1))
    else:
        g_theta = np.sum(g_f, axis=(0, 1)).ravel()
    return g, g_theta.reshape(np.shape(theta))

def add_skip(a, b):
    '''
    Element-wise sum of the main and skip branch spike times.
    '''
    if a.shape != b.shape:
        raise ConfigError('addition skip needs equal shapes, got %s and %s.' % (a.shape, b.shape))
    return a + b

def add_skip_backward(out, g):
    '''
    Both branches receive the upstream gradient where the sum is finite.
    '''
    g = np.where(np.isfinite(out), g, 0.0)
    return g, g

def pad_channels(x, c_out):
    '''
    Append channels spiking at t = 0 so that x has c_out channels.
    '''
    c = x.shape[1]
    if c > c_out:
        raise ConfigError('cannot pad %s channels down to %s.' % (c, c_out))
    pad = np.zeros((x.shape[0], c_out - c) + x.shape[2:])
    return np.concatenate([x, pad], axis=1)

def pad_channels_backward(g, c_in):
    return g[:, :c_in]

# -*- coding: utf-8 -*-
# Filename: optim.py

"""
Adam with decoupled weight decay, cosine learning rate and gradient clipping.
Created on 2026-09-08
"""

import math
import numpy as np
from ..errors import DomainError

BETA1 = 0.9
BETA2 = 0.999
ADAM_EPS = 1.0e-8

# parameter roles that get weight decay; delays, biases and BN affine parameters do not
DECAY_ROLES = ('temporal', 'kernel')
# parameter roles projected to >= 0 after every step
NONNEG_ROLES = ('delay',)

class AdamState(object):
    '''
    First and second moment estimates and the step count.
    '''
    def __init__(self, params=None):
        self.step = 0
        self.m = {}
        self.v = {}
        if params is not None:
            for name, p in params.items():
                self.m[name] = np.zeros(p.shape)
                self.v[name] = np.zeros(p.shape)

def adam_step(params, grads, state, lr, weight_decay=0.0, decay=None, nonneg=None,
              beta1=BETA1, beta2=BETA2, eps=ADAM_EPS):
    '''
    One Adam step, parameters are updated in place.
    Args:
        params: dict name -> array.
        grads: dict name -> gradient.
        state: AdamState.
        lr: learning rate.
        weight_decay: decoupled decay coefficient, p -= lr*weight_decay*p.
        decay: names that get weight decay, all parameters if None.
        nonneg: names projected to >= 0 after the update.
    Returns:
        state.
    '''
    state.step += 1
    bc1 = 1.0 - beta1 ** state.step
    bc2 = 1.0 - beta2 ** state.step
    for name, p in params.items():
        g = grads[name]
        if name not in state.m:
            state.m[name] = np.zeros(p.shape)
            state.v[name] = np.zeros(p.shape)
        m = state.m[name] = beta1 * state.m[name] + (1.0 - beta1) * g
        v = state.v[name] = beta2 * state.v[name] + (1.0 - beta2) * g * g
        new = p.astype(np.float64)
        if weight_decay != 0.0 and (decay is None or name in decay):
            new = new - lr * weight_decay * new
        new = new - lr * (m / bc1) / (np.sqrt(v / bc2) + eps)
        if nonneg is not None and name in nonneg:
            new = np.maximum(new, 0.0)
        p[...] = new
    return state

def cosine_lr(epoch, total_epochs, lr0):
    '''
    lr0 * 0.5 * (1 + cos(pi*epoch/total_epochs)).
    '''
    if total_epochs < 1 or epoch < 0 or epoch >= total_epochs:
        raise DomainError('epoch %s outside [0, %s).' % (epoch, total_epochs))
    return lr0 * 0.5 * (1.0 + math.cos(math.pi * epoch / total_epochs))

def clip_grad_norm(grads, max_norm):
    '''
    Scale all gradients in place so that their global L2 norm is at most max_norm.
    Returns:
        the norm before clipping.
    '''
    norm = math.sqrt(sum(float(np.sum(g * g)) for g in grads.values()))
    if max_norm is not None and norm > max_norm:
        scale = max_norm / norm
        for name in grads:
            grads[name] = grads[name] * scale
    return norm

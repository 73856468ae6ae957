# -*- coding: utf-8 -*-
# Filename: loss.py

"""
Training objective: cross entropy over negated output spike times, a penalty on
neurons whose input weight sum is below threshold, and a timing-overlap term that
pulls the skip branch of every delayed block toward its conv branch.
Created on 2026-09-08
"""

import numpy as np
from ..temporal.spike_time import T_MAX
from ..errors import ContractError, DomainError

class LossBreakdown(object):
    '''
    Components of the total loss. total = ce + lambda1*weight_penalty + lambda2*overlap.
    empty_branches names the delayed blocks left out of the overlap term because
    one of their branches had no spike.
    '''
    def __init__(self, ce, weight_penalty, overlap, lambda1=1.0, lambda2=1.0e-6, empty_branches=()):
        self.ce = float(ce)
        self.weight_penalty = float(weight_penalty)
        self.overlap = float(overlap)
        self.lambda1 = float(lambda1)
        self.lambda2 = float(lambda2)
        self.empty_branches = list(empty_branches)
        self.total = self.ce + self.lambda1 * self.weight_penalty + self.lambda2 * self.overlap

    def as_dict(self):
        return {'loss_total': self.total, 'loss_ce': self.ce,
                'loss_weight': self.weight_penalty, 'loss_overlap': self.overlap}

    def __repr__(self):
        return 'LossBreakdown(total=%.6g, ce=%.6g, weight=%.6g, overlap=%.6g)' %\
               (self.total, self.ce, self.weight_penalty, self.overlap)

def loss_ce(o, y):
    '''
    Cross entropy of softmax(-O): the correct class should fire first.
    Output times at or beyond T_MAX (including no-spike) are replaced by T_MAX and
    receive no gradient.
    Args:
        o: (num_classes,) or (B, num_classes) output spike times.
        y: class index or (B,) class indices.
    Returns:
        loss: mean over the batch.
        grad: dL/dO, same shape as o, including the 1/B of the batch mean.
    '''
    o = np.asarray(o, dtype=np.float64)
    single = o.ndim == 1
    o2 = o.reshape((1, -1)) if single else o
    y = np.atleast_1d(np.asarray(y)).astype(np.int64)
    b, n = o2.shape
    if y.shape[0] != b:
        raise ContractError('%s labels for a batch of %s.' % (y.shape[0], b))
    if np.any(y < 0) or np.any(y >= n):
        raise DomainError('labels must be in [0, %s), got %s..%s.' % (n, y.min(), y.max()))
    live = o2 < T_MAX
    s = -np.where(live, o2, T_MAX)
    s = s - np.max(s, axis=1, keepdims=True)
    log_z = np.log(np.sum(np.exp(s), axis=1))
    rows = np.arange(b)
    loss = np.mean(log_z - s[rows, y])
    p = np.exp(s - log_z[:, np.newaxis])
    onehot = np.zeros((b, n))
    onehot[rows, y] = 1.0
    grad = np.where(live, onehot - p, 0.0) / b
    return float(loss), grad.reshape(o.shape)

def temporal_weights(graph):
    '''
    Weights of all temporal layers of a graph, name -> float64 array.
    '''
    return dict((name, p.astype(np.float64)) for name, p in graph.params.items()
                if graph.param_roles[name] == 'temporal')

def loss_weight(weights):
    '''
    Sum over neurons of max(0, 1 - sum of input weights).
    Args:
        weights: dict name -> weight array whose first axis indexes output neurons.
    Returns:
        value and a dict name -> gradient.
    '''
    value = 0.0
    grads = {}
    for name, w in weights.items():
        w = np.asarray(w, dtype=np.float64)
        sums = w.reshape((w.shape[0], -1)).sum(axis=1)
        value += float(np.sum(np.maximum(0.0, 1.0 - sums)))
        deficit = (sums < 1.0).astype(np.float64).reshape((-1,) + (1,) * (w.ndim - 1))
        grads[name] = -np.broadcast_to(deficit, w.shape).copy()
    return value, grads

def loss_overlap(pairs):
    '''
    Sum over blocks of (mean finite conv-branch time - mean finite skip-branch time)^2.
    Args:
        pairs: list of (conv branch tensor, delayed skip tensor).
    Returns:
        value: the overlap loss.
        grads: list of (gradient w.r.t. conv tensor, gradient w.r.t. skip tensor).
        empty: list of flags, True where a branch had no finite spike.
    '''
    value = 0.0
    grads = []
    empty = []
    for f, d in pairs:
        fin_f = np.isfinite(f)
        fin_d = np.isfinite(d)
        n_f, n_d = int(fin_f.sum()), int(fin_d.sum())
        if n_f == 0 or n_d == 0:
            grads.append((np.zeros(f.shape), np.zeros(d.shape)))
            empty.append(True)
            continue
        gap = np.sum(f[fin_f]) / n_f - np.sum(d[fin_d]) / n_d
        value += gap * gap
        grads.append((np.where(fin_f, 2.0 * gap / n_f, 0.0),
                      np.where(fin_d, -2.0 * gap / n_d, 0.0)))
        empty.append(False)
    return float(value), grads, empty

def total_loss(ce, weight_penalty, overlap, lambda1=1.0, lambda2=1.0e-6, empty_branches=()):
    return LossBreakdown(ce, weight_penalty, overlap, lambda1, lambda2, empty_branches)

def network_loss(graph, acts, labels, lambda1=1.0, lambda2=1.0e-6):
    '''
    Total loss of a forward pass and the gradients that seed backward.
    Args:
        graph: Graph.
        acts: activations returned by forward.
        labels: (B,) class indices.
        lambda1, lambda2: weights of the weight penalty and the overlap loss.
    Returns:
        breakdown: LossBreakdown.
        loss_grads: dict node id -> gradient w.r.t. that node's output.
        param_grads: dict parameter name -> direct gradient (weight penalty).
    '''
    ce, g_out = loss_ce(acts[graph.output_id], labels)
    wp, g_w = loss_weight(temporal_weights(graph))
    ov, g_pairs, empty = loss_overlap([(acts[c], acts[d]) for c, d in graph.overlap_pairs])
    loss_grads = {graph.output_id: g_out}
    if lambda2 != 0.0:
        for (c, d), (g_c, g_d) in zip(graph.overlap_pairs, g_pairs):
            for nid, g in ((c, g_c), (d, g_d)):
                loss_grads[nid] = lambda2 * g if nid not in loss_grads else loss_grads[nid] + lambda2 * g
    param_grads = dict((name, lambda1 * g) for name, g in g_w.items())
    blocks = [graph.nodes[d].attrs['block'] for (_, d), e in zip(graph.overlap_pairs, empty) if e]
    return total_loss(ce, wp, ov, lambda1, lambda2, blocks), loss_grads, param_grads
